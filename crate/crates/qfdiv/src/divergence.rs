//! The divergence `S_f(A‖B)` of two PSD operators, computed three
//! independent ways, plus closed forms for the classic generator choices.
//!
//! Routes:
//!
//! * **spectral**: the double sum over eigenpairs, `Σ b_j · f(a_i/b_j) · w_ij`
//!   with `w_ij = |⟨u_i, v_j⟩|²`, plus `ω_f · Σ_{b_j = 0} a_i · w_ij` for the
//!   mass of `A` seen by the kernel of `B`.
//! * **superoperator**: `⟨B^{1/2}, f(L_A R_B⁻¹) B^{1/2}⟩_HS` realized on the
//!   support of `B`, structurally independent of the spectral sum.
//! * **ε-limit**: `S_f(A‖B + εI)` along a decreasing schedule, extrapolated.
//!
//! All three agree on their common domain; the spectral route is total, the
//! superoperator route requires `supp A ⊆ supp B`, and the ε-limit never
//! needs a support decision at all, which is what makes it a useful
//! cross-check.
//!
//! Kernel mass below `1e-10 · max(1, tr A)` is treated as eigenvector
//! roundoff rather than genuine support violation, so a pair that is
//! contained in exact arithmetic cannot be pushed to `+∞` by `1e-30`-sized
//! squared overlaps.

use crate::generator::{ExtendedReal, GeneratorFunction};
use crate::linalg::{
    eig_hermitian, hs_inner, matrix_function, overlap_table, support_contained, CMatrix, Complex,
    HermitianOperator, PsdOperator, SUPPORT_TOL,
};
use crate::{Error, Result};

/// Eigenvalue ratios below this evaluate as `f(0)`; a convex generator
/// finite at 0 is continuous there, and the cutoff avoids amplifying
/// clamp-boundary roundoff through `f`.
pub const RATIO_FLOOR: f64 = 1e-14;

/// Kernel mass above `Q0_MASS_REL_TOL · max(1, tr A)` counts as a genuine
/// support violation; anything below is eigenvector roundoff.
pub const Q0_MASS_REL_TOL: f64 = 1e-10;

/// An ε-limit sequence whose last value exceeds this is divergent outright.
pub const LIMIT_DIVERGENCE_CAP: f64 = 1e12;

/// Smallest ratio of successive tail increments that still reads as
/// divergence. Convergent sequences on a decade schedule shrink their
/// increments by at least √10 per step (ratio ≤ 0.32); logarithmic
/// divergence holds the ratio near 1 and power divergence grows it.
pub const LIMIT_TAIL_RATIO: f64 = 0.5;

/// Tail increments below `1e-8 · max(1, |value|)` are converged noise and
/// never read as divergence.
pub const LIMIT_INCREMENT_FLOOR_REL: f64 = 1e-8;

/// Aitken denominators below `1e-12 · max(1, |value|)` mean the sequence is
/// already flat; extrapolation keeps the raw value.
pub const AITKEN_GUARD_REL: f64 = 1e-12;

/// Which computation produced a [`DivergenceResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Spectral,
    Superoperator,
    EpsilonLimit,
    ClosedForm,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Spectral => "spectral",
            Route::Superoperator => "superoperator",
            Route::EpsilonLimit => "epsilon_limit",
            Route::ClosedForm => "closed_form",
        }
    }
}

/// One eigenpair term of the spectral sum: eigenvalue `a` of the first
/// operator against eigenvalue `b` of the second, squared overlap `weight`,
/// and the term's contribution to the total.
#[derive(Clone, Debug)]
pub struct TermContribution {
    pub a: f64,
    pub b: f64,
    pub weight: f64,
    pub contribution: ExtendedReal,
}

/// A computed divergence value with its provenance.
///
/// `support_violated` records whether mass of the first operator genuinely
/// escapes the support of the second; together with an infinite growth rate
/// that forces `value = +∞`.
#[derive(Clone, Debug)]
pub struct DivergenceResult {
    pub value: ExtendedReal,
    pub route: Route,
    pub support_violated: bool,
    pub terms_breakdown: Option<Vec<TermContribution>>,
}

/// The ε values along which [`divergence_limit`] evaluates
/// `S_f(A‖B + εI)`: strictly decreasing positive reals.
#[derive(Clone, Debug)]
pub struct EpsilonSchedule {
    values: Vec<f64>,
}

impl EpsilonSchedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                reason: "epsilon schedule must be nonempty".to_string(),
            });
        }
        for &v in &values {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter {
                    reason: format!("epsilon schedule entries must be positive reals, got {v}"),
                });
            }
        }
        for pair in values.windows(2) {
            if pair[1] >= pair[0] {
                return Err(Error::InvalidParameter {
                    reason: "epsilon schedule must be strictly decreasing".to_string(),
                });
            }
        }
        Ok(EpsilonSchedule { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for EpsilonSchedule {
    /// `1e-1, 1e-2, .., 1e-8`.
    fn default() -> Self {
        EpsilonSchedule {
            values: (1..=8).map(|k| 10f64.powi(-k)).collect(),
        }
    }
}

/// The divergence via the eigenpair double sum.
pub fn divergence_spectral(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
) -> Result<DivergenceResult> {
    spectral_impl(a, b, f, false, Route::Spectral)
}

/// Same as [`divergence_spectral`], with every nonzero-weight term recorded
/// in `terms_breakdown`.
pub fn divergence_spectral_with_breakdown(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
) -> Result<DivergenceResult> {
    spectral_impl(a, b, f, true, Route::Spectral)
}

fn spectral_impl(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
    want_breakdown: bool,
    route: Route,
) -> Result<DivergenceResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let n = a.dim();
    let table = overlap_table(a.spectral(), b.spectral())?;

    let mut q0_mass = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = table.get(i, j);
            if e.weight > 0.0 && e.b == 0.0 {
                q0_mass += e.a * e.weight;
            }
        }
    }
    let mass_tol = Q0_MASS_REL_TOL * 1.0_f64.max(a.trace());
    let support_violated = q0_mass > mass_tol;
    let infinite_q0 = support_violated && f.omega().is_infinite();
    // Per-term threshold for labelling an individual kernel pair as the
    // carrier of the infinity in the breakdown.
    let pair_mass_tol = mass_tol / (n * n) as f64;

    let mut finite_sum = 0.0;
    let mut overflow = false;
    let mut breakdown = want_breakdown.then(Vec::new);

    for i in 0..n {
        for j in 0..n {
            let e = table.get(i, j);
            if e.weight == 0.0 {
                continue;
            }
            let contribution = if e.b == 0.0 {
                match f.omega() {
                    ExtendedReal::Finite(om) => {
                        let c = om * e.a * e.weight;
                        finite_sum += c;
                        ExtendedReal::finite(c)
                    }
                    ExtendedReal::PosInfinity => {
                        if infinite_q0 && e.a * e.weight > pair_mass_tol {
                            ExtendedReal::PosInfinity
                        } else {
                            // kernel mass at roundoff scale: 0 · ∞ = 0
                            ExtendedReal::finite(0.0)
                        }
                    }
                }
            } else {
                let ratio = e.a / e.b;
                let y = if ratio < RATIO_FLOOR {
                    f.value_at_zero()
                } else {
                    f.eval(ratio)
                };
                if y == f64::INFINITY {
                    overflow = true;
                    ExtendedReal::PosInfinity
                } else if !y.is_finite() {
                    return Err(Error::NonFiniteGenerator { x: ratio });
                } else {
                    let c = e.b * y * e.weight;
                    finite_sum += c;
                    ExtendedReal::finite(c)
                }
            };
            if let Some(terms) = breakdown.as_mut() {
                terms.push(TermContribution {
                    a: e.a,
                    b: e.b,
                    weight: e.weight,
                    contribution,
                });
            }
        }
    }

    let value = if infinite_q0 || overflow {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::from_value(finite_sum)
    };
    Ok(DivergenceResult {
        value,
        route,
        support_violated,
        terms_breakdown: breakdown,
    })
}

/// The divergence via the superoperator `X ↦ A X B⁻¹` on the support of `B`.
///
/// The map is realized through the compression `Ã = V† A V`, where `V`
/// spans the support of `B`: its eigenvectors are the rank-one bridges
/// `w_i e_j†` with eigenvalues `α_i / b_j`, and pairing `f` of the map
/// against `B^{1/2}` gives `Σ b_j · f(α_i/b_j) · |w_i[j]|²`. No overlap
/// table of `A` against `B` is involved, which keeps the route independent
/// of the spectral sum.
///
/// Unlike the other routes this one has no limit branch: a support
/// violation is an error.
pub fn divergence_superoperator(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
) -> Result<DivergenceResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !support_contained(a, b, SUPPORT_TOL)? {
        return Err(Error::SupportViolation);
    }
    let rank = b.rank();
    if rank == 0 {
        // Containment forces A = 0; the divergence of the zero pair is 0.
        return Ok(DivergenceResult {
            value: ExtendedReal::finite(0.0),
            route: Route::Superoperator,
            support_violated: false,
            terms_breakdown: None,
        });
    }

    // Eigenvalues are sorted descending, so the first `rank` columns of the
    // eigenvector matrix span the support of B.
    let vb = b.spectral().vectors();
    let am = a.matrix();
    let n = a.dim();

    // tmp = A · V_r, column-compressed to the support.
    let mut tmp = vec![Complex::new(0.0, 0.0); n * rank];
    for k in 0..n {
        for q in 0..rank {
            let mut s = Complex::new(0.0, 0.0);
            for l in 0..n {
                s += am.get(k, l) * vb.get(l, q);
            }
            tmp[k * rank + q] = s;
        }
    }
    let compressed = CMatrix::from_fn(rank, |p, q| {
        let mut s = Complex::new(0.0, 0.0);
        for k in 0..n {
            s += vb.get(k, p).conj() * tmp[k * rank + q];
        }
        s
    });
    let compressed = HermitianOperator::symmetrized(compressed);
    let dec = eig_hermitian(&compressed)?;

    let mut total = 0.0;
    let mut overflow = false;
    for i in 0..rank {
        // The compression of a PSD operator is PSD; negatives are roundoff.
        let alpha = dec.eigenvalues()[i].max(0.0);
        for j in 0..rank {
            let bj = b.spectral().eigenvalues()[j];
            let wt = dec.vectors().get(j, i).norm_sqr();
            if wt == 0.0 {
                continue;
            }
            let ratio = alpha / bj;
            let y = if ratio < RATIO_FLOOR {
                f.value_at_zero()
            } else {
                f.eval(ratio)
            };
            if y == f64::INFINITY {
                overflow = true;
            } else if !y.is_finite() {
                return Err(Error::NonFiniteGenerator { x: ratio });
            } else {
                total += bj * y * wt;
            }
        }
    }

    Ok(DivergenceResult {
        value: if overflow {
            ExtendedReal::PosInfinity
        } else {
            ExtendedReal::from_value(total)
        },
        route: Route::Superoperator,
        support_violated: false,
        terms_breakdown: None,
    })
}

/// `S_f(A‖B + εI)` for one regularization strength.
///
/// The shifted second argument has full support, so the value is finite for
/// any generator that is finite on `(0, ∞)`.
pub fn divergence_epsilon(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
    eps: f64,
) -> Result<DivergenceResult> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter {
            reason: format!("epsilon must be a positive real, got {eps}"),
        });
    }
    let shifted = b.add_scaled_identity(eps)?;
    spectral_impl(a, &shifted, f, false, Route::EpsilonLimit)
}

/// The value sequence behind a [`divergence_limit`] verdict.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub declared_infinite: bool,
}

/// The divergence as the ε → 0 limit of `S_f(A‖B + εI)` along a schedule.
///
/// Divergence to `+∞` is recognized either outright (last value beyond
/// [`LIMIT_DIVERGENCE_CAP`]) or from the tail increments: a convergent
/// sequence on a decade schedule shrinks its increments geometrically
/// (ratio ≤ ~0.32 even for √ε-rate tails), while logarithmic and power
/// blowups keep the ratio near or above 1, so the cut sits at
/// [`LIMIT_TAIL_RATIO`]. Finite limits are extrapolated with two iterated
/// Aitken Δ² passes, which removes the mixed `√ε` and `ε` error modes that
/// a raw last value would keep at around `1e-4`.
pub fn divergence_limit(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
    schedule: &EpsilonSchedule,
) -> Result<(DivergenceResult, ConvergenceReport)> {
    let mut values = Vec::with_capacity(schedule.values().len());
    for &eps in schedule.values() {
        let r = divergence_epsilon(a, b, f, eps)?;
        values.push(r.value.as_f64());
    }
    let support_violated = !support_contained(a, b, SUPPORT_TOL)?;
    let declared_infinite = tail_diverges(&values);
    let value = if declared_infinite {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::from_value(aitken_extrapolate(&values))
    };
    let report = ConvergenceReport {
        epsilons: schedule.values().to_vec(),
        values: values.clone(),
        declared_infinite,
    };
    Ok((
        DivergenceResult {
            value,
            route: Route::EpsilonLimit,
            support_violated,
            terms_breakdown: None,
        },
        report,
    ))
}

fn tail_diverges(values: &[f64]) -> bool {
    let last = *values.last().expect("schedule is nonempty");
    if !last.is_finite() || last > LIMIT_DIVERGENCE_CAP {
        return true;
    }
    if values.len() < 3 {
        return false;
    }
    let n = values.len();
    let d_last = values[n - 1] - values[n - 2];
    let d_prev = values[n - 2] - values[n - 3];
    let floor = LIMIT_INCREMENT_FLOOR_REL * 1.0_f64.max(last.abs());
    d_last > floor && d_prev > floor && d_last / d_prev > LIMIT_TAIL_RATIO
}

fn aitken_extrapolate(values: &[f64]) -> f64 {
    let mut seq = values.to_vec();
    for _ in 0..2 {
        if seq.len() < 3 {
            break;
        }
        seq = aitken_pass(&seq);
    }
    *seq.last().expect("sequence stays nonempty")
}

fn aitken_pass(v: &[f64]) -> Vec<f64> {
    (0..v.len() - 2)
        .map(|k| {
            let den = v[k + 2] - 2.0 * v[k + 1] + v[k];
            let num = v[k + 2] - v[k + 1];
            if den.abs() <= AITKEN_GUARD_REL * 1.0_f64.max(v[k + 2].abs()) {
                v[k + 2]
            } else {
                v[k + 2] - num * num / den
            }
        })
        .collect()
}

/// Relative entropy closed form `tr A (log A − log B)`, with `+∞` on
/// support violation. Logarithms are taken on the support (zero eigenvalues
/// map to 0); the kernel components never meet mass of `A` once containment
/// holds.
pub fn umegaki(a: &PsdOperator, b: &PsdOperator) -> Result<ExtendedReal> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !support_contained(a, b, SUPPORT_TOL)? {
        return Ok(ExtendedReal::PosInfinity);
    }
    if a.rank() == 0 {
        return Ok(ExtendedReal::finite(0.0));
    }
    let log_supp = |x: f64| if x > 0.0 { x.ln() } else { 0.0 };
    let la = matrix_function(a, log_supp)?;
    let lb = matrix_function(b, log_supp)?;
    let ta = hs_inner(a.matrix(), la.matrix())?.re;
    let tb = hs_inner(a.matrix(), lb.matrix())?.re;
    Ok(ExtendedReal::finite(ta - tb))
}

/// Tsallis closed form `(tr A^q B^{1−q} − tr A) / (q − 1)`.
///
/// For `q > 1` a support violation makes the value `+∞`; for `q < 1` the
/// value stays finite and the power `B^{1−q}` is taken on the support of
/// `B`, which reproduces the spectral sum exactly, kernel mass included.
pub fn tsallis_closed(a: &PsdOperator, b: &PsdOperator, q: f64) -> Result<ExtendedReal> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !q.is_finite() || q <= 0.0 || (q - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidParameter {
            reason: format!("tsallis order must be a finite positive real away from 1, got {q}"),
        });
    }
    let violated = !support_contained(a, b, SUPPORT_TOL)?;
    if violated && q > 1.0 {
        return Ok(ExtendedReal::PosInfinity);
    }
    let aq = matrix_function(a, |x| if x > 0.0 { x.powf(q) } else { 0.0 })?;
    let b1q = matrix_function(b, |x| if x > 0.0 { x.powf(1.0 - q) } else { 0.0 })?;
    let cross = hs_inner(aq.matrix(), b1q.matrix())?.re;
    Ok(ExtendedReal::finite((cross - a.trace()) / (q - 1.0)))
}

/// Squared Hellinger distance `‖√A − √B‖²_HS`; always finite.
pub fn hellinger_sq(a: &PsdOperator, b: &PsdOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let ra = matrix_function(a, f64::sqrt)?;
    let rb = matrix_function(b, f64::sqrt)?;
    let diff = ra.sub(&rb)?;
    Ok(diff.hs_norm().powi(2))
}

/// Both sides of the scaling identity `S_f(λA‖A) = f(λ) tr A`: the left
/// side computed by the spectral route, the right side in closed form.
pub fn trace_rule(
    a: &PsdOperator,
    lambda: f64,
    f: &GeneratorFunction,
) -> Result<(DivergenceResult, f64)> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter {
            reason: format!("scaling factor must be a nonnegative real, got {lambda}"),
        });
    }
    let scaled = a.scale(lambda)?;
    let lhs = divergence_spectral(&scaled, a, f)?;
    let rhs = f.eval(lambda) * a.trace();
    Ok((lhs, rhs))
}

/// The boundary values `S_f(A‖0) = ω_f · tr A` and `S_f(0‖B) = f(0) · tr B`,
/// with `0 · ∞ = 0` when `tr A = 0`.
pub fn boundary_values(
    a: &PsdOperator,
    b: &PsdOperator,
    f: &GeneratorFunction,
) -> Result<(ExtendedReal, ExtendedReal)> {
    let s_a0 = f.omega().scale_nonneg(a.trace().max(0.0));
    let s_0b = ExtendedReal::finite(f.value_at_zero() * b.trace());
    Ok((s_a0, s_0b))
}
