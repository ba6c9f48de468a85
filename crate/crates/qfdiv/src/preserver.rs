//! Transformations of PSD operators and the checks that separate divergence
//! preservers from everything else.
//!
//! Conjugation by a single unitary or antiunitary operator leaves every
//! divergence in this crate unchanged; essentially nothing else does. This
//! module applies candidate transformations, stress-tests preservation on
//! seeded operator pairs, hunts for counterexamples, reconstructs the
//! implementing operator from black-box access, and runs the structural
//! checks (extremal boundary values, the zero-middle triangle bound, rank-one
//! overlaps) that pin the preservation property down.

use crate::divergence::{boundary_values, divergence_spectral};
use crate::generator::{
    certify_strict_convexity, default_convexity_grid, ExtendedReal, GeneratorFunction,
};
use crate::linalg::{
    mix, random_psd, random_rank_one_projection, rng_for, CMatrix, Complex, HermitianOperator,
    Projection, PsdOperator, UnitaryMatrix,
};
use crate::{Error, Result};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// A probe response whose second eigenvalue exceeds this fraction of the top
/// one is not rank-one, so the probed map cannot be a conjugation.
const RANK_ONE_REL_TOL: f64 = 1e-8;

/// A probe response whose top eigenvalue falls below this has lost most of
/// the probe's mass; conjugations preserve it exactly.
const RESPONSE_FLOOR: f64 = 0.5;

/// Cross amplitudes read off the superposition probes must be unimodular up
/// to this tolerance.
const CROSS_AMPLITUDE_TOL: f64 = 1e-6;

/// The residual of the rejected linear/antilinear hypothesis must exceed the
/// accepted one by this factor, otherwise the classification is ambiguous.
const CLASSIFICATION_GAP: f64 = 1e3;

/// Relative tolerance for the extremal bound and attainment comparisons.
const BOUND_REL_TOL: f64 = 1e-9;

type CustomMap = Arc<dyn Fn(&PsdOperator) -> Result<HermitianOperator> + Send + Sync>;

/// Whether a recovered conjugation acts linearly or antilinearly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationKind {
    Unitary,
    Antiunitary,
}

impl ConjugationKind {
    pub fn label(self) -> &'static str {
        match self {
            ConjugationKind::Unitary => "unitary",
            ConjugationKind::Antiunitary => "antiunitary",
        }
    }
}

impl fmt::Display for ConjugationKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.label())
    }
}

/// A candidate transformation of PSD operators.
///
/// The two conjugation variants act as `A -> U A U^*` and
/// `A -> U conj(A) U^*` (entrywise conjugation in the standard basis).
/// Custom maps return a Hermitian result that is re-validated PSD on every
/// application rather than trusted.
#[derive(Clone)]
pub enum TransformSpec {
    Unitary(UnitaryMatrix),
    Antiunitary(UnitaryMatrix),
    Custom { name: String, map: CustomMap },
}

impl fmt::Debug for TransformSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Unitary(u) => out.debug_tuple("Unitary").field(&u.dim()).finish(),
            TransformSpec::Antiunitary(u) => {
                out.debug_tuple("Antiunitary").field(&u.dim()).finish()
            }
            TransformSpec::Custom { name, .. } => out
                .debug_struct("Custom")
                .field("name", name)
                .finish_non_exhaustive(),
        }
    }
}

impl TransformSpec {
    pub fn unitary(u: UnitaryMatrix) -> Self {
        TransformSpec::Unitary(u)
    }

    pub fn antiunitary(u: UnitaryMatrix) -> Self {
        TransformSpec::Antiunitary(u)
    }

    pub fn custom<F>(name: impl Into<String>, map: F) -> Self
    where
        F: Fn(&PsdOperator) -> Result<HermitianOperator> + Send + Sync + 'static,
    {
        TransformSpec::Custom {
            name: name.into(),
            map: Arc::new(map),
        }
    }

    /// Keeps the diagonal and zeroes every off-diagonal entry.
    pub fn pinching() -> Self {
        TransformSpec::custom("pinching", |a| {
            let diag: Vec<f64> = (0..a.dim()).map(|i| a.matrix().get(i, i).re).collect();
            Ok(HermitianOperator::diagonal(&diag))
        })
    }

    /// Replaces the operator by the trace-matching multiple of the identity.
    pub fn averaging() -> Self {
        TransformSpec::custom("averaging", |a| {
            let n = a.dim();
            Ok(HermitianOperator::identity(n).scale_re(a.trace() / n as f64))
        })
    }

    /// Transposition in the standard basis, the conjugation
    /// `A -> I conj(A) I^*` in custom-map form.
    pub fn transpose() -> Self {
        TransformSpec::custom("transpose", |a| {
            HermitianOperator::new(a.matrix().transpose())
        })
    }

    pub fn label(&self) -> &str {
        match self {
            TransformSpec::Unitary(_) => "unitary",
            TransformSpec::Antiunitary(_) => "antiunitary",
            TransformSpec::Custom { name, .. } => name,
        }
    }

    /// Applies the transformation. Custom outputs are re-validated, so a map
    /// that leaves the PSD cone fails here with the offending eigenvalue.
    pub fn apply(&self, a: &PsdOperator) -> Result<PsdOperator> {
        match self {
            TransformSpec::Unitary(u) => {
                if u.dim() != a.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: u.dim(),
                        got: a.dim(),
                    });
                }
                PsdOperator::new(u.conjugate(a.herm())?)
            }
            TransformSpec::Antiunitary(u) => {
                if u.dim() != a.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: u.dim(),
                        got: a.dim(),
                    });
                }
                PsdOperator::new(u.conjugate_antilinear(a.herm())?)
            }
            TransformSpec::Custom { map, .. } => {
                let h = map(a)?;
                if h.dim() != a.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: a.dim(),
                        got: h.dim(),
                    });
                }
                PsdOperator::new(h).map_err(|e| match e {
                    Error::NotPositiveSemidefinite { eigenvalue } => {
                        Error::NonPsdOutput { eigenvalue }
                    }
                    other => other,
                })
            }
        }
    }
}

/// Deterministic source of PSD operator pairs with a fixed class schedule.
///
/// Out of every ten consecutive trials, four draw independent full-rank
/// pairs, three draw independent rank-deficient pairs (so both contained and
/// violated supports occur), two draw scalar multiples `(A, lambda A)`, and
/// one draws scaled rank-one operators that share their line on every other
/// visit. Each side is regenerated from the sub-seed reported with the pair.
#[derive(Clone, Copy, Debug)]
pub struct PairSampler {
    dim: usize,
    seed: u64,
}

impl PairSampler {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                reason: "sampler dimension must be at least 1".into(),
            });
        }
        Ok(PairSampler { dim, seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The pair for `trial`, together with the sub-seeds regenerating each side.
    pub fn pair(&self, trial: u64) -> Result<(PsdOperator, PsdOperator, (u64, u64))> {
        let sa = mix(self.seed, 2 * trial + 1);
        let sb = mix(self.seed, 2 * trial + 2);
        let mut rng = rng_for(mix(self.seed, 2 * trial));
        let (a, b) = match trial % 10 {
            0..=3 => (
                random_psd(self.dim, self.dim, None, sa)?,
                random_psd(self.dim, self.dim, None, sb)?,
            ),
            4..=6 => {
                let ra = rng.gen_range(1..=self.dim);
                let rb = rng.gen_range(1..=self.dim);
                (
                    random_psd(self.dim, ra, None, sa)?,
                    random_psd(self.dim, rb, None, sb)?,
                )
            }
            7 | 8 => {
                let a = random_psd(self.dim, self.dim, None, sa)?;
                let lambda: f64 = rng.gen_range(0.2..5.0);
                let b = a.scale(lambda)?;
                (a, b)
            }
            _ => {
                let p = random_rank_one_projection(self.dim, sa)?;
                let q = if (trial / 10).is_multiple_of(2) {
                    p.clone()
                } else {
                    random_rank_one_projection(self.dim, sb)?
                };
                let la: f64 = rng.gen_range(0.3..3.0);
                let lb: f64 = rng.gen_range(0.3..3.0);
                (
                    PsdOperator::new(p.operator().scale_re(la))?,
                    PsdOperator::new(q.operator().scale_re(lb))?,
                )
            }
        };
        Ok((a, b, (sa, sb)))
    }

    /// The left operator of [`PairSampler::pair`], for single-argument checks.
    pub fn operator(&self, trial: u64) -> Result<(PsdOperator, u64)> {
        let (a, _, ids) = self.pair(trial)?;
        Ok((a, ids.0))
    }
}

/// Outcome of a preservation stress test.
#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub trials: usize,
    /// Largest `|S_before - S_after|`; `f64::INFINITY` when some trial had
    /// one infinite and one finite value.
    pub max_abs_deviation: f64,
    /// Sub-seeds of the pair achieving the largest deviation.
    pub worst_pair: Option<(u64, u64)>,
    /// Trials where exactly one of the two values was infinite.
    pub infinite_mismatches: usize,
    /// Trials whose deviation exceeded the tolerance.
    pub violations: usize,
}

fn value_gap(before: ExtendedReal, after: ExtendedReal) -> (f64, bool) {
    match (before.value(), after.value()) {
        (Some(x), Some(y)) => ((x - y).abs(), false),
        (None, None) => (0.0, false),
        _ => (f64::INFINITY, true),
    }
}

/// Measures how well `transform` preserves the divergence for `f` over the
/// sampler's pair schedule. Infinite values compare by flag: two infinities
/// agree, an infinite/finite split counts as a mismatch with infinite
/// deviation.
pub fn check_preservation(
    transform: &TransformSpec,
    f: &GeneratorFunction,
    sampler: &PairSampler,
    trials: usize,
    tol: f64,
) -> Result<PreservationReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            reason: "preservation check needs at least one trial".into(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("tolerance must be finite and positive, got {tol}"),
        });
    }
    let mut max_abs_deviation = 0.0f64;
    let mut worst_pair = None;
    let mut infinite_mismatches = 0usize;
    let mut violations = 0usize;
    for trial in 0..trials as u64 {
        let (a, b, ids) = sampler.pair(trial)?;
        let before = divergence_spectral(&a, &b, f)?.value;
        let ta = transform.apply(&a)?;
        let tb = transform.apply(&b)?;
        let after = divergence_spectral(&ta, &tb, f)?.value;
        let (dev, mismatch) = value_gap(before, after);
        if mismatch {
            infinite_mismatches += 1;
        }
        if dev > tol {
            violations += 1;
        }
        if worst_pair.is_none() || dev > max_abs_deviation {
            max_abs_deviation = dev;
            worst_pair = Some(ids);
        }
    }
    Ok(PreservationReport {
        trials,
        max_abs_deviation,
        worst_pair,
        infinite_mismatches,
        violations,
    })
}

/// A pair on which a candidate transformation measurably changed the
/// divergence.
#[derive(Clone, Debug)]
pub struct Witness {
    pub trial: u64,
    /// Sub-seeds regenerating the two sides of the pair.
    pub pair: (u64, u64),
    pub before: ExtendedReal,
    pub after: ExtendedReal,
    pub deviation: f64,
}

/// Searches the sampler's schedule for the first pair whose divergence moves
/// by more than `threshold` under `transform`. `None` means the budget ran
/// out without a counterexample.
pub fn falsify(
    transform: &TransformSpec,
    f: &GeneratorFunction,
    sampler: &PairSampler,
    budget: usize,
    threshold: f64,
) -> Result<Option<Witness>> {
    if budget == 0 {
        return Err(Error::InvalidParameter {
            reason: "falsification needs a positive trial budget".into(),
        });
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("threshold must be finite and positive, got {threshold}"),
        });
    }
    for trial in 0..budget as u64 {
        let (a, b, ids) = sampler.pair(trial)?;
        let before = divergence_spectral(&a, &b, f)?.value;
        let ta = transform.apply(&a)?;
        let tb = transform.apply(&b)?;
        let after = divergence_spectral(&ta, &tb, f)?.value;
        let (deviation, _) = value_gap(before, after);
        if deviation > threshold {
            return Ok(Some(Witness {
                trial,
                pair: ids,
                before,
                after,
                deviation,
            }));
        }
    }
    Ok(None)
}

/// Result of reconstructing the operator behind a black-box preserver.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub kind: ConjugationKind,
    pub u_hat: UnitaryMatrix,
    /// `‖U^* U - I‖_HS` of the recovered columns before re-validation.
    pub unitarity_residual: f64,
    /// Largest `‖conjugation-by-u_hat(P) - phi(P)‖_HS` over all probes `P`.
    pub action_residual: f64,
}

fn not_conjugation(reason: String) -> Error {
    Error::NotConjugation { reason }
}

fn basis_projection(dim: usize, i: usize) -> Result<PsdOperator> {
    let mut d = vec![0.0; dim];
    d[i] = 1.0;
    PsdOperator::diagonal(&d)
}

/// Rank-one projection onto `(e_0 + e_j)/sqrt(2)`, or onto
/// `(e_0 + i e_j)/sqrt(2)` when `imaginary` is set.
fn superposition_probe(dim: usize, j: usize, imaginary: bool) -> Result<PsdOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![Complex::new(0.0, 0.0); dim];
    v[0] = Complex::new(s, 0.0);
    v[j] = if imaginary {
        Complex::new(0.0, s)
    } else {
        Complex::new(s, 0.0)
    };
    PsdOperator::new(HermitianOperator::new(CMatrix::outer(&v, &v))?)
}

/// Unit top eigenvector of a probe response, after checking the response is
/// genuinely rank-one and kept the probe's mass.
fn top_unit_vector(resp: &PsdOperator) -> std::result::Result<Vec<Complex>, String> {
    let evs = resp.eigenvalues();
    let top = evs[0];
    if top < RESPONSE_FLOOR {
        return Err(format!(
            "response lost the probe's mass (top eigenvalue {top:.3e})"
        ));
    }
    let second = evs.get(1).copied().unwrap_or(0.0);
    if second > RANK_ONE_REL_TOL * top.max(1.0) {
        return Err(format!(
            "response is not rank-one (second eigenvalue {second:.3e})"
        ));
    }
    Ok(resp.spectral().vector(0))
}

/// Reconstructs the (anti)unitary implementing a black-box preserver from
/// `2 * dim` probe evaluations.
///
/// Each basis projection fixes the image line of one basis vector, a real
/// superposition probe against the first basis vector fixes each line's
/// relative phase, and one complex superposition probe separates linear from
/// antilinear action. The two hypotheses predict images a fixed distance
/// apart, so the decision requires the rejected residual to exceed the
/// accepted one by a factor of 10^3. The recovered operator is normalized so
/// that the first meaningfully nonzero entry of its first column is real
/// positive. In dimension one the two actions coincide and the result is
/// reported as unitary.
///
/// Any response inconsistent with a conjugation (wrong rank, lost mass,
/// non-unimodular cross amplitude, ambiguous classification, non-orthonormal
/// columns) fails with [`Error::NotConjugation`].
pub fn recover_operator(
    phi: impl Fn(&PsdOperator) -> Result<PsdOperator>,
    dim: usize,
) -> Result<RecoveryResult> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            reason: "recovery dimension must be at least 1".into(),
        });
    }
    let mut probes: Vec<(PsdOperator, PsdOperator)> = Vec::with_capacity(2 * dim);

    let mut lines: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let probe = basis_projection(dim, i)?;
        let resp = phi(&probe)?;
        if resp.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: resp.dim(),
            });
        }
        let c =
            top_unit_vector(&resp).map_err(|r| not_conjugation(format!("basis probe {i}: {r}")))?;
        lines.push(c);
        probes.push((probe, resp));
    }

    let mut columns = vec![lines[0].clone()];
    for (j, line) in lines.iter().enumerate().skip(1) {
        let probe = superposition_probe(dim, j, false)?;
        let resp = phi(&probe)?;
        if resp.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: resp.dim(),
            });
        }
        top_unit_vector(&resp)
            .map_err(|r| not_conjugation(format!("superposition probe (0, {j}): {r}")))?;
        let image = resp.matrix().mul_vec(line);
        let s: Complex = columns[0]
            .iter()
            .zip(image.iter())
            .map(|(c0, w)| c0.conj() * *w)
            .sum();
        let t = s * 2.0;
        if (t.norm() - 1.0).abs() > CROSS_AMPLITUDE_TOL {
            return Err(not_conjugation(format!(
                "superposition probe (0, {j}): cross amplitude {:.6} is not unimodular",
                t.norm()
            )));
        }
        let phase = t.conj() / t.norm();
        columns.push(line.iter().map(|z| *z * phase).collect());
        probes.push((probe, resp));
    }

    let k0 = columns[0]
        .iter()
        .position(|z| z.norm() > 1e-8)
        .ok_or_else(|| not_conjugation("first recovered column vanished".into()))?;
    let z0 = columns[0][k0];
    let gauge = z0.conj() / z0.norm();
    for col in columns.iter_mut() {
        for z in col.iter_mut() {
            *z *= gauge;
        }
    }

    let m = CMatrix::from_fn(dim, |i, j| columns[j][i]);
    let unitarity_residual = m.adjoint().mul(&m).sub(&CMatrix::identity(dim)).hs_norm();
    let u_hat = UnitaryMatrix::new(m).map_err(|_| {
        not_conjugation(format!(
            "recovered columns are not orthonormal (residual {unitarity_residual:.3e})"
        ))
    })?;

    let kind = if dim == 1 {
        ConjugationKind::Unitary
    } else {
        let probe = superposition_probe(dim, 1, true)?;
        let resp = phi(&probe)?;
        if resp.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: resp.dim(),
            });
        }
        let linear = u_hat.conjugate(probe.herm())?;
        let antilinear = u_hat.conjugate_antilinear(probe.herm())?;
        let r_linear = resp.matrix().sub(linear.matrix()).hs_norm();
        let r_antilinear = resp.matrix().sub(antilinear.matrix()).hs_norm();
        probes.push((probe, resp));
        let (accepted, rejected) = if r_linear <= r_antilinear {
            (r_linear, r_antilinear)
        } else {
            (r_antilinear, r_linear)
        };
        if rejected <= CLASSIFICATION_GAP * accepted.max(1e-15) {
            return Err(not_conjugation(format!(
                "cannot separate linear from antilinear action \
                 (residuals {r_linear:.3e} vs {r_antilinear:.3e})"
            )));
        }
        if r_linear <= r_antilinear {
            ConjugationKind::Unitary
        } else {
            ConjugationKind::Antiunitary
        }
    };

    let spec = match kind {
        ConjugationKind::Unitary => TransformSpec::Unitary(u_hat.clone()),
        ConjugationKind::Antiunitary => TransformSpec::Antiunitary(u_hat.clone()),
    };
    let mut action_residual = 0.0f64;
    for (probe, resp) in &probes {
        let applied = spec.apply(probe)?;
        action_residual = action_residual.max(applied.matrix().sub(resp.matrix()).hs_norm());
    }

    Ok(RecoveryResult {
        kind,
        u_hat,
        unitarity_residual,
        action_residual,
    })
}

/// Upper-bound side of the extremal report, present when the generator is
/// decreasing on the probe window.
#[derive(Clone, Debug)]
pub struct MaxBoundCheck {
    /// `f(0) * tr A`, the largest value `S_f(.‖A)` can take.
    pub bound: f64,
    pub max_observed: f64,
    pub holds: bool,
    /// Whether `S_f(0‖A)` meets the bound, which is where it is attained.
    pub attained_at_zero: bool,
}

/// Lower-bound side of the extremal report, present when the generator's
/// infimum is finite (its slope at infinity is nonnegative).
#[derive(Clone, Debug)]
pub struct InfBoundCheck {
    /// Numeric infimum of the generator over the probe window.
    pub infimum: f64,
    pub minimizer: f64,
    /// `inf f * tr A`, the smallest value `S_f(.‖A)` can take.
    pub bound: f64,
    pub min_observed: f64,
    pub holds: bool,
    /// Whether `S_f(x* A‖A)` meets the bound at the minimizer `x*`.
    pub attained_on_ray: bool,
}

#[derive(Clone, Debug)]
pub struct ExtremalReport {
    pub trials: usize,
    pub max_check: Option<MaxBoundCheck>,
    pub inf_check: Option<InfBoundCheck>,
}

/// Nonincreasing on the probe grid with an overall strict drop.
fn strictly_decreasing_on_grid(f: &GeneratorFunction) -> bool {
    let grid = default_convexity_grid();
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    for k in 1..values.len() {
        if values[k] > values[k - 1] + slack {
            return false;
        }
    }
    values[values.len() - 1] < values[0] - 1e-9 * scale
}

/// Grid scan plus golden-section refinement of the generator over the
/// certification window. Strict convexity makes the restriction unimodal, so
/// the refined value sits at the true infimum up to curvature-limited noise.
fn minimize_generator(f: &GeneratorFunction) -> (f64, f64) {
    let grid = default_convexity_grid();
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = f.eval(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = grid[(best_i + 1).min(grid.len() - 1)];
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f.eval(x1);
    let mut f2 = f.eval(x2);
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f.eval(x2);
        }
    }
    let mut xstar = 0.5 * (lo + hi);
    let mut fstar = f.eval(xstar);
    for (x, v) in [(grid[best_i], best), (x1, f1), (x2, f2)] {
        if v < fstar {
            xstar = x;
            fstar = v;
        }
    }
    (xstar, fstar)
}

/// Checks the extremal values of `X -> S_f(X‖A)` over sampled `X`.
///
/// When `f` is decreasing, the map is bounded above by `f(0) * tr A` with the
/// maximum at `X = 0`; when `inf f` is finite, it is bounded below by
/// `inf f * tr A` with the bound met on the ray `X = x* A` at the minimizer.
/// At least one side always applies: a generator with negative slope at
/// infinity is decreasing outright. Requires `f` to pass strict-convexity
/// certification on the default grid.
pub fn extremal_checks(
    f: &GeneratorFunction,
    reference: &PsdOperator,
    sampler: &PairSampler,
    trials: usize,
) -> Result<ExtremalReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            reason: "extremal check needs at least one trial".into(),
        });
    }
    if sampler.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            got: sampler.dim(),
        });
    }
    if reference.trace() <= 0.0 {
        return Err(Error::InvalidParameter {
            reason: "reference operator must be nonzero".into(),
        });
    }
    let cert = certify_strict_convexity(f, &default_convexity_grid())?;
    if !cert.passed {
        return Err(Error::InvalidParameter {
            reason: format!("generator {} is not certified strictly convex", f.name()),
        });
    }

    let tr = reference.trace();
    let mut finite_lo = f64::INFINITY;
    let mut finite_hi = f64::NEG_INFINITY;
    let mut saw_infinite = false;
    for trial in 0..trials as u64 {
        let (x, _) = sampler.operator(trial)?;
        match divergence_spectral(&x, reference, f)?.value.value() {
            Some(v) => {
                finite_lo = finite_lo.min(v);
                finite_hi = finite_hi.max(v);
            }
            None => saw_infinite = true,
        }
    }

    let max_check = if strictly_decreasing_on_grid(f) {
        let bound = f.value_at_zero() * tr;
        let tol = BOUND_REL_TOL * bound.abs().max(1.0);
        let at_zero = divergence_spectral(&PsdOperator::zero(reference.dim()), reference, f)?
            .value
            .as_f64();
        Some(MaxBoundCheck {
            bound,
            max_observed: if saw_infinite {
                f64::INFINITY
            } else {
                finite_hi
            },
            holds: !saw_infinite && finite_hi <= bound + tol,
            attained_at_zero: (at_zero - bound).abs() <= tol,
        })
    } else {
        None
    };

    let omega_nonneg = match f.omega().value() {
        Some(w) => w >= -1e-12,
        None => true,
    };
    let inf_check = if omega_nonneg {
        let (minimizer, infimum) = minimize_generator(f);
        let bound = infimum * tr;
        let tol = BOUND_REL_TOL * bound.abs().max(1.0);
        let on_ray = divergence_spectral(&reference.scale(minimizer)?, reference, f)?
            .value
            .as_f64();
        Some(InfBoundCheck {
            infimum,
            minimizer,
            bound,
            min_observed: finite_lo,
            holds: finite_lo >= bound - tol,
            attained_on_ray: (on_ray - bound).abs() <= tol,
        })
    } else {
        None
    };

    Ok(ExtremalReport {
        trials,
        max_check,
        inf_check,
    })
}

/// Outcome of probing whether an operator behaves like the zero element of
/// the via-middle triangle bound `S_f(A‖B) <= S_f(A‖X) + S_f(X‖B)`.
#[derive(Clone, Debug)]
pub enum ZeroCharacterizationReport {
    /// The middle is zero: the bound held on every sampled pair.
    ZeroMiddle {
        trials: usize,
        min_slack: f64,
        holds: bool,
    },
    /// The middle is nonzero: the scaled-ray counterexample, with the
    /// observed and predicted gap by which the bound fails.
    NonzeroMiddle {
        lhs: f64,
        rhs: f64,
        margin: f64,
        predicted_margin: f64,
    },
}

/// For a zero middle, verifies `S_f(A‖B) <= omega tr A + f(0) tr B` on the
/// sampler's pairs. For a nonzero middle `X`, exhibits the failure on its own
/// ray: with `lambda = mu = 2`,
/// `S_f(4X‖2X) + S_f(2X‖X) < S_f(4X‖X)` by the strict margin
/// `tr X * (f(4) - 2 f(2) - f(2))`.
///
/// Requires a certified strictly convex generator vanishing at 1; the
/// zero-middle branch additionally needs a nonnegative generator, i.e.
/// numeric infimum zero.
pub fn zero_characterization(
    f: &GeneratorFunction,
    middle: &PsdOperator,
    sampler: &PairSampler,
    trials: usize,
) -> Result<ZeroCharacterizationReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            reason: "zero characterization needs at least one trial".into(),
        });
    }
    if sampler.dim() != middle.dim() {
        return Err(Error::DimensionMismatch {
            expected: middle.dim(),
            got: sampler.dim(),
        });
    }
    if f.eval(1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            reason: format!("generator {} must vanish at 1", f.name()),
        });
    }
    let cert = certify_strict_convexity(f, &default_convexity_grid())?;
    if !cert.passed {
        return Err(Error::InvalidParameter {
            reason: format!("generator {} is not certified strictly convex", f.name()),
        });
    }

    if middle.rank() == 0 {
        let (_, infimum) = minimize_generator(f);
        if infimum.abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                reason: format!(
                    "generator {} must be nonnegative for the zero-middle bound \
                     (infimum {infimum:.3e})",
                    f.name()
                ),
            });
        }
        let mut min_slack = f64::INFINITY;
        let mut holds = true;
        for trial in 0..trials as u64 {
            let (a, b, _) = sampler.pair(trial)?;
            let (s_a0, s_0b) = boundary_values(&a, &b, f)?;
            let via_zero = s_a0 + s_0b;
            let direct = divergence_spectral(&a, &b, f)?.value;
            match (via_zero.value(), direct.value()) {
                (Some(bound), Some(v)) => {
                    let slack = bound - v;
                    min_slack = min_slack.min(slack);
                    if slack < -1e-10 * bound.abs().max(1.0) {
                        holds = false;
                    }
                }
                (None, _) => {}
                (Some(_), None) => {
                    min_slack = f64::NEG_INFINITY;
                    holds = false;
                }
            }
        }
        Ok(ZeroCharacterizationReport::ZeroMiddle {
            trials,
            min_slack,
            holds,
        })
    } else {
        let (lambda, mu) = (2.0, 2.0);
        let top = middle.scale(lambda * mu)?;
        let mid = middle.scale(lambda)?;
        let s_top_mid = divergence_spectral(&top, &mid, f)?.value.as_f64();
        let s_mid_low = divergence_spectral(&mid, middle, f)?.value.as_f64();
        let s_top_low = divergence_spectral(&top, middle, f)?.value.as_f64();
        let lhs = s_top_mid + s_mid_low;
        let rhs = s_top_low;
        let margin = rhs - lhs;
        let predicted_margin =
            middle.trace() * (f.eval(lambda * mu) - lambda * f.eval(mu) - f.eval(lambda));
        let margin_positive = margin.is_finite() && margin > 0.0;
        if !margin_positive {
            return Err(Error::InvariantViolated {
                what: "nonzero middle must break the triangle bound",
                residual: margin,
            });
        }
        Ok(ZeroCharacterizationReport::NonzeroMiddle {
            lhs,
            rhs,
            margin,
            predicted_margin,
        })
    }
}

/// Outcome of the rank-one overlap check.
#[derive(Clone, Debug)]
pub struct RankOneOverlapReport {
    /// `S_f(lambda P‖mu P)` computed spectrally.
    pub value: f64,
    /// `mu * f(lambda/mu)`, the aligned rank-one value.
    pub expected: f64,
    /// `|value - expected|`.
    pub agreement: f64,
    /// `lambda * omega + mu * f(0) - expected`: the price of full support
    /// misalignment over the aligned value. `None` when omega is infinite,
    /// which makes the comparison vacuous.
    pub boundary_gap: Option<f64>,
}

/// On a single line, the divergence collapses to the scalar generator:
/// `S_f(lambda P‖mu P) = mu f(lambda/mu)` for a rank-one projection `P`.
/// When omega is finite, the misaligned boundary price
/// `lambda omega + mu f(0)` strictly exceeds that value, and the gap is
/// reported. Requires a certified strictly convex generator.
pub fn rank_one_overlap_check(
    f: &GeneratorFunction,
    line: &Projection,
    lambda: f64,
    mu: f64,
) -> Result<RankOneOverlapReport> {
    if line.rank() != 1 {
        return Err(Error::InvalidRank {
            rank: line.rank(),
            dim: line.dim(),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0 && mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("scales must be finite and positive, got {lambda} and {mu}"),
        });
    }
    let cert = certify_strict_convexity(f, &default_convexity_grid())?;
    if !cert.passed {
        return Err(Error::InvalidParameter {
            reason: format!("generator {} is not certified strictly convex", f.name()),
        });
    }
    let a = PsdOperator::new(line.operator().scale_re(lambda))?;
    let b = PsdOperator::new(line.operator().scale_re(mu))?;
    let value = divergence_spectral(&a, &b, f)?.value.as_f64();
    let expected = mu * f.eval(lambda / mu);
    let boundary_gap = match f.omega().value() {
        Some(w) => {
            let gap = lambda * w + mu * f.value_at_zero() - expected;
            let gap_positive = gap.is_finite() && gap > 0.0;
            if !gap_positive {
                return Err(Error::InvariantViolated {
                    what: "rank-one boundary price must exceed the aligned value",
                    residual: gap,
                });
            }
            Some(gap)
        }
        None => None,
    };
    Ok(RankOneOverlapReport {
        value,
        expected,
        agreement: (value - expected).abs(),
        boundary_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{
        make_affine, make_entropy, make_exp_decreasing, make_sqrt_deviation, make_tsallis,
    };
    use crate::linalg::{hs_inner, random_unitary};

    const SEED: u64 = 20240811;

    fn laboratory_generators() -> Vec<GeneratorFunction> {
        vec![
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_tsallis(0.5).unwrap(),
            make_sqrt_deviation(),
            make_exp_decreasing(),
        ]
    }

    #[test]
    fn transform_application_matches_hand_computed_images() {
        let m = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Complex::new(1.0, 1.0),
            (1, 0) => Complex::new(1.0, -1.0),
            _ => Complex::new(2.0, 0.0),
        });
        let a = PsdOperator::new(HermitianOperator::new(m).unwrap()).unwrap();

        let pinched = TransformSpec::pinching().apply(&a).unwrap();
        assert_eq!(pinched.matrix().get(0, 1), Complex::new(0.0, 0.0));
        assert_eq!(pinched.matrix().get(0, 0), Complex::new(2.0, 0.0));

        let averaged = TransformSpec::averaging().apply(&a).unwrap();
        assert_eq!(averaged.matrix().get(0, 0), Complex::new(2.0, 0.0));
        assert_eq!(averaged.matrix().get(1, 0), Complex::new(0.0, 0.0));

        let transposed = TransformSpec::transpose().apply(&a).unwrap();
        assert_eq!(transposed.matrix().get(0, 1), Complex::new(1.0, -1.0));

        let u = random_unitary(2, mix(SEED, 1)).unwrap();
        for t in [
            TransformSpec::unitary(u.clone()),
            TransformSpec::antiunitary(u),
            TransformSpec::pinching(),
            TransformSpec::averaging(),
            TransformSpec::transpose(),
        ] {
            let out = t.apply(&a).unwrap();
            assert!(
                (out.trace() - a.trace()).abs() <= 1e-12,
                "{} must preserve the trace",
                t.label()
            );
        }
    }

    #[test]
    fn conjugations_preserve_every_generator_on_the_full_pair_mix() {
        let u = random_unitary(4, mix(SEED, 2)).unwrap();
        let sampler = PairSampler::new(4, mix(SEED, 3)).unwrap();
        for f in laboratory_generators() {
            for t in [
                TransformSpec::unitary(u.clone()),
                TransformSpec::antiunitary(u.clone()),
            ] {
                let report = check_preservation(&t, &f, &sampler, 20, 1e-9).unwrap();
                assert_eq!(report.trials, 20);
                assert_eq!(report.infinite_mismatches, 0, "{}", f.name());
                assert_eq!(report.violations, 0, "{}", f.name());
                assert!(report.max_abs_deviation <= 1e-9, "{}", f.name());
                assert!(report.worst_pair.is_some());
            }
        }
    }

    #[test]
    fn custom_map_with_negative_output_reports_the_eigenvalue() {
        let t = TransformSpec::custom("shift-down", |a| {
            a.herm()
                .sub(&HermitianOperator::identity(a.dim()).scale_re(5.0))
        });
        let err = t.apply(&PsdOperator::identity(2)).unwrap_err();
        assert!(matches!(err, Error::NonPsdOutput { eigenvalue } if eigenvalue < -3.9));
    }

    #[test]
    fn falsification_finds_witnesses_for_pinching_and_averaging() {
        let sampler = PairSampler::new(3, mix(SEED, 4)).unwrap();
        for f in [
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_sqrt_deviation(),
        ] {
            for t in [TransformSpec::pinching(), TransformSpec::averaging()] {
                let witness = falsify(&t, &f, &sampler, 1000, 1e-3)
                    .unwrap()
                    .unwrap_or_else(|| panic!("{} must break {}", t.label(), f.name()));
                assert!(witness.deviation > 1e-3);
            }
        }
    }

    #[test]
    fn conjugations_survive_falsification() {
        let u = random_unitary(3, mix(SEED, 5)).unwrap();
        let sampler = PairSampler::new(3, mix(SEED, 6)).unwrap();
        for f in [make_entropy(), make_sqrt_deviation()] {
            for t in [
                TransformSpec::unitary(u.clone()),
                TransformSpec::antiunitary(u.clone()),
            ] {
                assert!(falsify(&t, &f, &sampler, 100, 1e-6).unwrap().is_none());
            }
        }
    }

    #[test]
    fn recovery_round_trips_unitary_conjugations() {
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, mix(SEED, 10 + dim as u64)).unwrap();
            let t = TransformSpec::unitary(u.clone());
            let rec = recover_operator(|a| t.apply(a), dim).unwrap();
            assert_eq!(rec.kind, ConjugationKind::Unitary);
            assert!(rec.unitarity_residual <= 1e-10);
            assert!(rec.action_residual <= 1e-8, "dim {dim}");
            let overlap = hs_inner(rec.u_hat.matrix(), u.matrix()).unwrap();
            assert!(
                (overlap.norm() - dim as f64).abs() <= 1e-8,
                "recovered operator must match up to one global phase"
            );
        }
    }

    #[test]
    fn recovery_round_trips_antiunitary_conjugations() {
        for dim in [2usize, 4] {
            let u = random_unitary(dim, mix(SEED, 20 + dim as u64)).unwrap();
            let t = TransformSpec::antiunitary(u.clone());
            let rec = recover_operator(|a| t.apply(a), dim).unwrap();
            assert_eq!(rec.kind, ConjugationKind::Antiunitary);
            assert!(rec.unitarity_residual <= 1e-10);
            assert!(rec.action_residual <= 1e-8);
            let overlap = hs_inner(rec.u_hat.matrix(), u.matrix()).unwrap();
            assert!((overlap.norm() - dim as f64).abs() <= 1e-8);
        }
    }

    #[test]
    fn transpose_recovers_as_antiunitary_with_the_identity() {
        let t = TransformSpec::transpose();
        let rec = recover_operator(|a| t.apply(a), 3).unwrap();
        assert_eq!(rec.kind, ConjugationKind::Antiunitary);
        assert!(rec.action_residual <= 1e-10);
        let diff = rec.u_hat.matrix().sub(&CMatrix::identity(3)).max_abs();
        assert!(diff <= 1e-9, "gauge must pin the identity exactly");
    }

    #[test]
    fn recovery_in_dimension_one_defaults_to_unitary() {
        let t = TransformSpec::unitary(UnitaryMatrix::identity(1));
        let rec = recover_operator(|a| t.apply(a), 1).unwrap();
        assert_eq!(rec.kind, ConjugationKind::Unitary);
        let top = rec.u_hat.matrix().get(0, 0);
        assert!((top - Complex::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn recovery_rejects_non_conjugations() {
        let pinching = TransformSpec::pinching();
        let err = recover_operator(|a| pinching.apply(a), 3).unwrap_err();
        assert!(matches!(err, Error::NotConjugation { .. }), "{err}");

        let averaging = TransformSpec::averaging();
        let err = recover_operator(|a| averaging.apply(a), 2).unwrap_err();
        assert!(matches!(err, Error::NotConjugation { .. }), "{err}");

        let doubling = TransformSpec::custom("double", |a| Ok(a.herm().scale_re(2.0)));
        let err = recover_operator(|a| doubling.apply(a), 2).unwrap_err();
        assert!(matches!(err, Error::NotConjugation { .. }), "{err}");
    }

    #[test]
    fn extremal_report_for_a_decreasing_generator() {
        let f = make_exp_decreasing();
        let a = PsdOperator::identity(2);
        let sampler = PairSampler::new(2, mix(SEED, 21)).unwrap();
        let report = extremal_checks(&f, &a, &sampler, 40).unwrap();

        let mx = report
            .max_check
            .expect("decreasing generator has a max bound");
        let bound = 2.0 * (std::f64::consts::E - 1.0);
        assert!((mx.bound - bound).abs() <= 1e-12);
        assert!(mx.holds && mx.attained_at_zero);
        assert!(mx.max_observed <= mx.bound);

        let inf = report.inf_check.expect("finite infimum has a lower bound");
        assert!((inf.infimum + 1.0).abs() <= 1e-9);
        assert!((inf.bound + 2.0).abs() <= 1e-9);
        assert!(inf.holds && inf.attained_on_ray);
    }

    #[test]
    fn extremal_entropy_lower_bound_is_attained_on_the_ray() {
        let f = make_entropy();
        let a = PsdOperator::identity(3);
        let sampler = PairSampler::new(3, mix(SEED, 22)).unwrap();
        let report = extremal_checks(&f, &a, &sampler, 40).unwrap();
        assert!(report.max_check.is_none(), "entropy is not decreasing");

        let e = std::f64::consts::E;
        let inf = report.inf_check.unwrap();
        assert!((inf.infimum + 1.0 / e).abs() <= 1e-9);
        assert!((inf.minimizer - 1.0 / e).abs() <= 1e-6);
        assert!((inf.bound + 3.0 / e).abs() <= 1e-9);
        assert!(inf.holds && inf.attained_on_ray);

        let scaled = a.scale(1.0 / e).unwrap();
        let v = divergence_spectral(&scaled, &a, &f).unwrap().value.as_f64();
        assert!((v + 3.0 / e).abs() <= 1e-12);
    }

    #[test]
    fn extremal_tsallis_two_minimizer_and_frozen_ray_value() {
        let f = make_tsallis(2.0).unwrap();
        let a = PsdOperator::identity(2);
        let sampler = PairSampler::new(2, mix(SEED, 23)).unwrap();
        let report = extremal_checks(&f, &a, &sampler, 40).unwrap();
        let inf = report.inf_check.unwrap();
        assert!((inf.infimum + 0.25).abs() <= 1e-9);
        assert!((inf.minimizer - 0.5).abs() <= 1e-6);
        assert!(inf.holds && inf.attained_on_ray);

        let half = a.scale(0.5).unwrap();
        let v = divergence_spectral(&half, &a, &f).unwrap().value.as_f64();
        assert!((v + 0.5).abs() <= 1e-12);
    }

    #[test]
    fn extremal_rejects_uncertified_generators() {
        let f = make_affine(2.0, 3.0).unwrap();
        let a = PsdOperator::identity(2);
        let sampler = PairSampler::new(2, mix(SEED, 24)).unwrap();
        let err = extremal_checks(&f, &a, &sampler, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn zero_middle_triangle_holds_for_sqrt_deviation() {
        let f = make_sqrt_deviation();
        let sampler = PairSampler::new(3, mix(SEED, 30)).unwrap();
        let report = zero_characterization(&f, &PsdOperator::zero(3), &sampler, 60).unwrap();
        match report {
            ZeroCharacterizationReport::ZeroMiddle {
                trials,
                min_slack,
                holds,
            } => {
                assert_eq!(trials, 60);
                assert!(holds);
                assert!(min_slack > 0.0, "slack is twice the root overlap");
            }
            other => panic!("expected the zero-middle branch, got {other:?}"),
        }
    }

    #[test]
    fn zero_middle_requires_a_nonnegative_generator() {
        let f = make_tsallis(2.0).unwrap();
        let sampler = PairSampler::new(2, mix(SEED, 31)).unwrap();
        let err = zero_characterization(&f, &PsdOperator::zero(2), &sampler, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn nonzero_middle_breaks_the_triangle_with_the_frozen_scalar_margin() {
        let f = make_tsallis(2.0).unwrap();
        let x = PsdOperator::diagonal(&[1.0]).unwrap();
        let sampler = PairSampler::new(1, mix(SEED, 32)).unwrap();
        let report = zero_characterization(&f, &x, &sampler, 1).unwrap();
        match report {
            ZeroCharacterizationReport::NonzeroMiddle {
                lhs,
                rhs,
                margin,
                predicted_margin,
            } => {
                assert!((lhs - 6.0).abs() <= 1e-9);
                assert!((rhs - 12.0).abs() <= 1e-9);
                assert!((margin - 6.0).abs() <= 1e-9);
                assert!((margin - predicted_margin).abs() <= 1e-9);
            }
            other => panic!("expected the nonzero-middle branch, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_middle_margin_matches_the_prediction_on_random_operators() {
        let f = make_sqrt_deviation();
        let x = random_psd(2, 2, None, mix(SEED, 33)).unwrap();
        let sampler = PairSampler::new(2, mix(SEED, 34)).unwrap();
        let report = zero_characterization(&f, &x, &sampler, 1).unwrap();
        match report {
            ZeroCharacterizationReport::NonzeroMiddle {
                margin,
                predicted_margin,
                ..
            } => {
                assert!(margin > 0.0);
                assert!((margin - predicted_margin).abs() <= 1e-10 * predicted_margin.max(1.0));
            }
            other => panic!("expected the nonzero-middle branch, got {other:?}"),
        }
    }

    #[test]
    fn scaled_ray_triangle_violation_margin_stays_positive_for_random_scales() {
        let gens = [
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_sqrt_deviation(),
            make_exp_decreasing(),
        ];
        for k in 0..100u64 {
            let f = &gens[(k % 4) as usize];
            let dim = 2 + (k % 2) as usize;
            let x = random_psd(dim, dim, None, mix(SEED, 600 + k)).unwrap();
            let mut rng = rng_for(mix(SEED, 700 + k));
            let lambda: f64 = rng.gen_range(1.001..10.0);
            let mu: f64 = rng.gen_range(1.001..10.0);
            let top = x.scale(lambda * mu).unwrap();
            let mid = x.scale(lambda).unwrap();
            let s_top_mid = divergence_spectral(&top, &mid, f).unwrap().value.as_f64();
            let s_mid_x = divergence_spectral(&mid, &x, f).unwrap().value.as_f64();
            let s_top_x = divergence_spectral(&top, &x, f).unwrap().value.as_f64();
            let margin = s_top_x - s_top_mid - s_mid_x;
            assert!(
                margin > 0.0,
                "margin {margin:.3e} for {} at lambda={lambda:.3}, mu={mu:.3}",
                f.name()
            );
        }
    }

    #[test]
    fn rank_one_overlap_reports_frozen_values() {
        let p = random_rank_one_projection(3, mix(SEED, 40)).unwrap();

        let f = make_sqrt_deviation();
        let report = rank_one_overlap_check(&f, &p, 4.0, 1.0).unwrap();
        assert!((report.value - 1.0).abs() <= 1e-10);
        assert!(report.agreement <= 1e-10);
        assert!((report.boundary_gap.unwrap() - 4.0).abs() <= 1e-9);

        let f = make_tsallis(0.5).unwrap();
        let report = rank_one_overlap_check(&f, &p, 1.0, 2.0).unwrap();
        let sqrt2 = std::f64::consts::SQRT_2;
        assert!((report.value - (2.0 - 2.0 * sqrt2)).abs() <= 1e-10);
        assert!((report.boundary_gap.unwrap() - 2.0 * sqrt2).abs() <= 1e-9);

        let f = make_entropy();
        let report = rank_one_overlap_check(&f, &p, 4.0, 1.0).unwrap();
        assert!(
            report.boundary_gap.is_none(),
            "infinite omega skips the gap"
        );

        assert!(rank_one_overlap_check(&f, &p, -1.0, 1.0).is_err());
        let full = Projection::identity(3);
        assert!(matches!(
            rank_one_overlap_check(&f, &full, 1.0, 1.0),
            Err(Error::InvalidRank { rank: 3, dim: 3 })
        ));
    }

    #[test]
    fn sampler_classes_are_deterministic_and_cover_the_mix() {
        let s = PairSampler::new(3, mix(SEED, 50)).unwrap();

        let (a1, b1, ids1) = s.pair(4).unwrap();
        let (a2, b2, ids2) = s.pair(4).unwrap();
        assert_eq!(ids1, ids2);
        assert_eq!(a1.matrix().sub(a2.matrix()).max_abs(), 0.0);
        assert_eq!(b1.matrix().sub(b2.matrix()).max_abs(), 0.0);

        let (a, b, _) = s.pair(7).unwrap();
        let lambda = b.trace() / a.trace();
        assert!(b.matrix().sub(&a.matrix().scale_re(lambda)).max_abs() <= 1e-12);

        let (a, b, _) = s.pair(9).unwrap();
        assert_eq!(a.rank(), 1);
        assert_eq!(b.rank(), 1);
        let aligned = hs_inner(a.matrix(), b.matrix()).unwrap().re;
        assert!((aligned - a.hs_norm() * b.hs_norm()).abs() <= 1e-10);

        let (a, b, _) = s.pair(19).unwrap();
        let overlap = hs_inner(a.matrix(), b.matrix()).unwrap().re;
        assert!(overlap < 0.999 * a.hs_norm() * b.hs_norm());
    }
}
