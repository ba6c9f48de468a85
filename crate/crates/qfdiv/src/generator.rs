//! Scalar generator functions and the extended-real values they produce.
//!
//! A generator is a convex function `f` on `[0, ∞)` together with its value
//! at zero and its growth rate `ω = lim f(x)/x` as `x → ∞`. Divergences built
//! from a generator take values in `[−c, +∞]`, so this module also provides
//! [`ExtendedReal`], a `f64` extended with a single `+∞` point. `−∞` is
//! deliberately unrepresentable: no convex generator produces it.
//!
//! Built-in generators cover the standard families (relative entropy, Tsallis,
//! squared square-root deviation, affine, decaying exponential). Custom
//! generators are wrapped by [`make_custom`], which probes the function for
//! finiteness and, when no growth rate is supplied, estimates one numerically
//! with [`estimate_omega`].
//!
//! [`certify_strict_convexity`] checks strict convexity on a grid by testing
//! that difference quotients `(f(a) − f(t))/(a − t)` strictly increase in `t`.
//! The check works at the resolution of the stored `f64` values: a pair of
//! grid points whose function values are closer than a few ulps carries no
//! sign information and is skipped rather than reported as a violation, and a
//! confirmed increase must clear the rounding-noise bound of the two quotients
//! involved. Ties that are resolvable at working precision (an affine
//! generator's constant quotient) are reported as violations.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Exponents `k` of the evaluation grid `x = 2^k` used by [`estimate_omega`].
pub const OMEGA_GRID_EXPONENTS: std::ops::RangeInclusive<i32> = 10..=40;

/// Quotient magnitude beyond which the growth rate is declared infinite.
pub const OMEGA_DIVERGENCE_CAP: f64 = 1e12;

/// Relative increase per grid doubling, at the last doubling, beyond which
/// the quotient sequence is considered still growing and the rate infinite.
pub const OMEGA_TAIL_REL: f64 = 1e-6;

/// Relative slack allowed before a decreasing difference quotient is
/// reported as "not convex-like".
pub const OMEGA_MONOTONE_TOL: f64 = 1e-9;

/// A function-value pair closer than this many ulps of the larger value is
/// treated as unresolvable at working precision during certification.
const RESOLVE_ULPS: f64 = 8.0;

/// Multiplier on the propagated half-ulp noise bound that a quotient
/// increase must clear to count as a confirmed strict increase.
const QUOTIENT_NOISE_FACTOR: f64 = 4.0;

/// A real value extended with a single point at positive infinity.
///
/// Arithmetic follows the divergence conventions: `0 · ∞ = 0`, finite
/// overflow saturates to `PosInfinity`, and NaN or `−∞` panics because no
/// supported computation produces either.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    /// Wraps a finite value.
    ///
    /// Panics if `v` is NaN or infinite.
    pub fn finite(v: f64) -> Self {
        assert!(
            v.is_finite(),
            "ExtendedReal::finite requires a finite value, got {v}"
        );
        ExtendedReal::Finite(v)
    }

    /// Wraps a value, mapping `+∞` to `PosInfinity`.
    ///
    /// Panics on NaN and `−∞`.
    pub fn from_value(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else {
            Self::finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }

    /// The finite value, if there is one.
    pub fn value(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// The value as an `f64`, with `PosInfinity` mapped to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    /// Scales by a nonnegative finite factor, with `0 · ∞ = 0`.
    ///
    /// Panics if `c` is negative, NaN, or infinite.
    pub fn scale_nonneg(self, c: f64) -> ExtendedReal {
        assert!(
            c.is_finite() && c >= 0.0,
            "scale_nonneg requires a finite nonnegative factor, got {c}"
        );
        if c == 0.0 {
            return ExtendedReal::Finite(0.0);
        }
        match self {
            ExtendedReal::Finite(v) => Self::from_value(c * v),
            ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        }
    }

    /// Whether two values agree within `tol`, relative to `max(1, |a|, |b|)`.
    /// Two infinite values agree; a finite and an infinite value never do.
    pub fn approx_eq(self, rhs: ExtendedReal, tol: f64) -> bool {
        self.deviation(rhs) <= tol
    }

    /// Relative deviation used by the equality checks: `0` for two infinite
    /// values, `+∞` for a finite/infinite mismatch.
    pub fn deviation(self, rhs: ExtendedReal) -> f64 {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
            }
            (ExtendedReal::PosInfinity, ExtendedReal::PosInfinity) => 0.0,
            _ => f64::INFINITY,
        }
    }
}

impl std::ops::Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Self::from_value(a + b),
            _ => ExtendedReal::PosInfinity,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => write!(f, "inf"),
        }
    }
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex generator function on `[0, ∞)`.
///
/// The value at zero is stored separately so that families defined by
/// formulas with removable singularities (entropy's `x ln x`, Tsallis
/// powers) evaluate exactly at the origin, and so that `f(0)` is available
/// without a limit computation. [`GeneratorFunction::eval`] intercepts
/// `x == 0` and returns the stored value.
#[derive(Clone)]
pub struct GeneratorFunction {
    name: String,
    eval: EvalFn,
    value_at_zero: f64,
    omega: ExtendedReal,
    analytic_omega: bool,
}

impl fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorFunction")
            .field("name", &self.name)
            .field("value_at_zero", &self.value_at_zero)
            .field("omega", &self.omega)
            .field("analytic_omega", &self.analytic_omega)
            .finish()
    }
}

impl GeneratorFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates the generator at `x ≥ 0`.
    ///
    /// Panics if `x` is negative or not finite; divergence code only ever
    /// evaluates generators at clamped nonnegative eigenvalue ratios.
    pub fn eval(&self, x: f64) -> f64 {
        assert!(
            x.is_finite() && x >= 0.0,
            "generator evaluated outside [0, ∞): {x}"
        );
        if x == 0.0 {
            self.value_at_zero
        } else {
            (self.eval)(x)
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    /// The growth rate `ω = lim f(x)/x` for `x → ∞`.
    pub fn omega(&self) -> ExtendedReal {
        self.omega
    }

    /// Whether `omega` came from a closed form rather than numerical
    /// estimation.
    pub fn analytic_omega(&self) -> bool {
        self.analytic_omega
    }
}

/// Relative entropy generator `f(x) = x ln x`, with `f(0) = 0` and `ω = +∞`.
pub fn make_entropy() -> GeneratorFunction {
    GeneratorFunction {
        name: "entropy".to_string(),
        eval: Arc::new(|x: f64| x * x.ln()),
        value_at_zero: 0.0,
        omega: ExtendedReal::PosInfinity,
        analytic_omega: true,
    }
}

/// Tsallis generator `f(x) = (x^q − x)/(q − 1)` for `q > 0`, `q ≠ 1`.
///
/// `f(0) = 0`; the growth rate is `+∞` for `q > 1` and `1/(1 − q)` for
/// `q < 1`. Rejects `q` within `1e-12` of 1, where the formula loses all
/// precision; the `q → 1` limit is the entropy generator.
pub fn make_tsallis(q: f64) -> Result<GeneratorFunction> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::InvalidParameter {
            reason: format!("tsallis order must be a finite positive real, got {q}"),
        });
    }
    if (q - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidParameter {
            reason: format!("tsallis order {q} is too close to 1; use the entropy generator"),
        });
    }
    let omega = if q > 1.0 {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::Finite(1.0 / (1.0 - q))
    };
    Ok(GeneratorFunction {
        name: format!("tsallis:{q}"),
        eval: Arc::new(move |x: f64| (x.powf(q) - x) / (q - 1.0)),
        value_at_zero: 0.0,
        omega,
        analytic_omega: true,
    })
}

/// Squared square-root deviation `f(x) = (√x − 1)²`, with `f(0) = 1` and
/// `ω = 1`.
pub fn make_sqrt_deviation() -> GeneratorFunction {
    GeneratorFunction {
        name: "sqrt-dev".to_string(),
        eval: Arc::new(|x: f64| {
            let d = x.sqrt() - 1.0;
            d * d
        }),
        value_at_zero: 1.0,
        omega: ExtendedReal::Finite(1.0),
        analytic_omega: true,
    }
}

/// Affine generator `f(x) = αx + β`, with `ω = α`.
///
/// Convex but never strictly convex; used as the negative control in
/// convexity certification and as the exactly-solvable case in divergence
/// identities.
pub fn make_affine(alpha: f64, beta: f64) -> Result<GeneratorFunction> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            reason: format!("affine coefficients must be finite, got alpha={alpha}, beta={beta}"),
        });
    }
    Ok(GeneratorFunction {
        name: format!("affine:{alpha}:{beta}"),
        eval: Arc::new(move |x: f64| alpha * x + beta),
        value_at_zero: beta,
        omega: ExtendedReal::Finite(alpha),
        analytic_omega: true,
    })
}

/// Decaying exponential generator `f(x) = e^(1−x) − 1`, with `f(0) = e − 1`
/// and `ω = 0`.
///
/// Strictly convex and strictly decreasing, with `f(1) = 0`. Beyond
/// `x ≈ 40` the value is exactly `−1` in `f64`, which certification handles
/// by skipping pairs whose function values are bitwise too close to order.
pub fn make_exp_decreasing() -> GeneratorFunction {
    GeneratorFunction {
        name: "exp-dec".to_string(),
        eval: Arc::new(|x: f64| (1.0 - x).exp() - 1.0),
        value_at_zero: std::f64::consts::E - 1.0,
        omega: ExtendedReal::Finite(0.0),
        analytic_omega: true,
    }
}

/// Wraps an arbitrary convex function as a generator.
///
/// The function is probed on a wide geometric grid and must be finite
/// there, as must `value_at_zero`. When `omega` is `None` the growth rate
/// is estimated with [`estimate_omega`]; an estimation failure (typically a
/// decreasing difference quotient, meaning the function is not convex-like)
/// is returned as an error.
pub fn make_custom<F>(
    name: &str,
    eval: F,
    value_at_zero: f64,
    omega: Option<ExtendedReal>,
) -> Result<GeneratorFunction>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if name.is_empty() {
        return Err(Error::InvalidParameter {
            reason: "generator name must be nonempty".to_string(),
        });
    }
    if !value_at_zero.is_finite() {
        return Err(Error::NonFiniteGenerator { x: 0.0 });
    }
    for k in -6..=6 {
        let x = 10f64.powi(k);
        let y = eval(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteGenerator { x });
        }
    }
    let eval: EvalFn = Arc::new(eval);
    let (omega, analytic_omega) = match omega {
        Some(w) => (w, true),
        None => (estimate_omega_raw(eval.as_ref(), value_at_zero)?, false),
    };
    Ok(GeneratorFunction {
        name: name.to_string(),
        eval,
        value_at_zero,
        omega,
        analytic_omega,
    })
}

/// Estimates the growth rate `ω = lim f(x)/x` on the grid `x = 2^k`,
/// `k = 10..=40`.
///
/// The rate is declared infinite if a quotient exceeds
/// [`OMEGA_DIVERGENCE_CAP`], if the function itself overflows to `+∞`, or if
/// the quotient is still increasing by more than [`OMEGA_TAIL_REL`]
/// (relative) at the final doubling. Otherwise the last quotient is
/// returned.
///
/// As a sanity diagnostic the secant slope `(f(x) − f(0))/x`, which is
/// nondecreasing in `x` for any convex `f`, is checked for monotonicity;
/// a decrease beyond [`OMEGA_MONOTONE_TOL`] yields
/// [`Error::NotConvexLike`]. The raw quotient `f(x)/x` is not used for this
/// check because it decreases legitimately whenever `f(0) > 0`.
pub fn estimate_omega(f: &GeneratorFunction) -> Result<ExtendedReal> {
    estimate_omega_raw(&*f.eval, f.value_at_zero)
}

fn estimate_omega_raw(eval: &(dyn Fn(f64) -> f64 + Send + Sync), f0: f64) -> Result<ExtendedReal> {
    let mut prev_quotient: Option<f64> = None;
    let mut prev_slope: Option<f64> = None;
    let mut tail_increase = 0.0;
    let mut last_quotient = 0.0;
    for k in OMEGA_GRID_EXPONENTS {
        let x = 2f64.powi(k);
        let y = eval(x);
        if y == f64::INFINITY {
            return Ok(ExtendedReal::PosInfinity);
        }
        if !y.is_finite() {
            return Err(Error::NonFiniteGenerator { x });
        }
        let quotient = y / x;
        let slope = (y - f0) / x;
        if let Some(prev) = prev_slope {
            if slope < prev - OMEGA_MONOTONE_TOL * 1.0_f64.max(prev.abs()) {
                return Err(Error::NotConvexLike { x });
            }
        }
        if quotient > OMEGA_DIVERGENCE_CAP {
            return Ok(ExtendedReal::PosInfinity);
        }
        if let Some(prev) = prev_quotient {
            tail_increase = quotient - prev;
        }
        prev_quotient = Some(quotient);
        prev_slope = Some(slope);
        last_quotient = quotient;
    }
    if tail_increase > OMEGA_TAIL_REL * 1.0_f64.max(last_quotient.abs()) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::finite(last_quotient))
}

/// The grid on which strict convexity is certified by default:
/// `{0}` followed by 61 geometrically spaced points from `1e-3` to `1e3`.
pub fn default_convexity_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(62);
    grid.push(0.0);
    for k in 0..=60 {
        grid.push(10f64.powf(-3.0 + 0.1 * k as f64));
    }
    grid
}

/// The first triple found to violate strict quotient growth:
/// `(f(base) − f(t))/(base − t)` failed to strictly increase from
/// `t = lower` to `t = upper`.
#[derive(Clone, Debug)]
pub struct ConvexityWitness {
    pub base: f64,
    pub lower: f64,
    pub upper: f64,
    pub quotient_low: f64,
    pub quotient_high: f64,
}

/// Outcome of a grid certification run.
///
/// `unresolved` counts point pairs skipped because their function values
/// were too close, in ulps, to carry a sign; `min_margin` is the smallest
/// confirmed quotient increase over all checks. A certificate with zero
/// performed checks never passes.
#[derive(Clone, Debug)]
pub struct ConvexityCertificate {
    pub generator: String,
    pub passed: bool,
    pub grid: Vec<f64>,
    pub checks: usize,
    pub unresolved: usize,
    pub min_margin: f64,
    pub witness: Option<ConvexityWitness>,
}

/// Certifies strict convexity of `f` on a grid.
///
/// For every base point `a`, the difference quotients `(f(a) − f(t))/(a − t)`
/// over the remaining grid points `t` must strictly increase with `t`; this
/// holds for all pairs if and only if it holds for consecutive ones. An
/// increase counts only if it clears the propagated rounding noise of the
/// two quotients, so an affine generator fails with a witness rather than
/// passing on stray last-ulp wiggle. Pairs of points whose function values
/// are bitwise too close to order (possible for strictly convex functions
/// whose variation falls below `f64` resolution, such as `e^(1−x) − 1` far
/// into its flat tail) are skipped and counted as unresolved.
///
/// A failed certificate is a report, not an error; errors are reserved for
/// malformed grids (fewer than 3 points, unsorted, duplicates, negative or
/// non-finite entries) and non-finite function values.
pub fn certify_strict_convexity(
    f: &GeneratorFunction,
    grid: &[f64],
) -> Result<ConvexityCertificate> {
    if grid.len() < 3 {
        return Err(Error::InvalidParameter {
            reason: format!(
                "certification grid needs at least 3 points, got {}",
                grid.len()
            ),
        });
    }
    for &x in grid {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParameter {
                reason: "certification grid points must be finite and nonnegative".to_string(),
            });
        }
    }
    for pair in grid.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidParameter {
                reason: "certification grid must be strictly ascending".to_string(),
            });
        }
    }

    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    for (&x, &y) in grid.iter().zip(&values) {
        if !y.is_finite() {
            return Err(Error::NonFiniteGenerator { x });
        }
    }

    let resolvable = |i: usize, j: usize| -> bool {
        let scale = values[i].abs().max(values[j].abs());
        (values[i] - values[j]).abs() > RESOLVE_ULPS * f64::EPSILON * scale
    };

    let mut checks = 0usize;
    let mut unresolved = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut witness = None;

    'bases: for i in 0..grid.len() {
        let a = grid[i];
        let fa = values[i];
        let mut prev: Option<usize> = None;
        for j in 0..grid.len() {
            if j == i {
                continue;
            }
            if !resolvable(i, j) {
                unresolved += 1;
                continue;
            }
            if let Some(p) = prev {
                let h_low = (fa - values[p]) / (a - grid[p]);
                let h_high = (fa - values[j]) / (a - grid[j]);
                // Half-ulp perturbations of the three stored function values
                // move the quotient difference by at most this much.
                let noise = 0.5
                    * f64::EPSILON
                    * (fa.abs() * (1.0 / (a - grid[j]) - 1.0 / (a - grid[p])).abs()
                        + values[j].abs() / (a - grid[j]).abs()
                        + values[p].abs() / (a - grid[p]).abs());
                let margin = h_high - h_low;
                if margin <= QUOTIENT_NOISE_FACTOR * noise {
                    witness = Some(ConvexityWitness {
                        base: a,
                        lower: grid[p],
                        upper: grid[j],
                        quotient_low: h_low,
                        quotient_high: h_high,
                    });
                    break 'bases;
                }
                checks += 1;
                min_margin = min_margin.min(margin);
            }
            prev = Some(j);
        }
    }

    Ok(ConvexityCertificate {
        generator: f.name().to_string(),
        passed: witness.is_none() && checks > 0,
        grid: grid.to_vec(),
        checks,
        unresolved,
        min_margin,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn entropy_pins_its_defining_values() {
        let f = make_entropy();
        assert_eq!(f.eval(1.0), 0.0);
        assert!((f.eval(std::f64::consts::E) - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(f.eval(0.0), 0.0);
        assert!(f.omega().is_infinite());
        assert!(f.analytic_omega());
    }

    #[test]
    fn tsallis_values_and_parameter_validation() {
        let f = make_tsallis(2.0).unwrap();
        assert_eq!(f.eval(2.0), 2.0);
        assert_eq!(f.eval(0.0), 0.0);
        assert!(f.omega().is_infinite());

        let g = make_tsallis(0.5).unwrap();
        assert_eq!(g.omega(), ExtendedReal::Finite(2.0));
        assert!((g.eval(0.25) - -0.5).abs() < 1e-15);

        assert!(make_tsallis(1.0).is_err());
        assert!(make_tsallis(1.0 + 1e-13).is_err());
        assert!(make_tsallis(0.0).is_err());
        assert!(make_tsallis(-1.0).is_err());
        assert!(make_tsallis(f64::NAN).is_err());
    }

    #[test]
    fn sqrt_deviation_values() {
        let f = make_sqrt_deviation();
        assert_eq!(f.eval(4.0), 1.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.omega(), ExtendedReal::Finite(1.0));
    }

    #[test]
    fn affine_values() {
        let f = make_affine(2.0, 3.0).unwrap();
        assert_eq!(f.eval(5.0), 13.0);
        assert_eq!(f.eval(0.0), 3.0);
        assert_eq!(f.omega(), ExtendedReal::Finite(2.0));
        assert!(make_affine(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn exp_decreasing_values() {
        let f = make_exp_decreasing();
        assert_eq!(f.eval(1.0), 0.0);
        assert!((f.eval(0.0) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert_eq!(f.omega(), ExtendedReal::Finite(0.0));
        // Far past the decay scale the value saturates to exactly −1 in f64.
        assert_eq!(f.eval(100.0), -1.0);
    }

    #[test]
    fn extended_real_arithmetic_and_display() {
        let two = ExtendedReal::finite(2.0);
        let inf = ExtendedReal::PosInfinity;
        assert_eq!(two + ExtendedReal::finite(3.0), ExtendedReal::Finite(5.0));
        assert_eq!(two + inf, inf);
        assert_eq!(inf.scale_nonneg(0.0), ExtendedReal::Finite(0.0));
        assert_eq!(inf.scale_nonneg(2.0), inf);
        assert_eq!(two.scale_nonneg(0.5), ExtendedReal::Finite(1.0));
        assert!(two.approx_eq(ExtendedReal::finite(2.0 + 1e-12), 1e-9));
        assert!(inf.approx_eq(inf, 0.0));
        assert!(!two.approx_eq(inf, 1e9));
        assert_eq!(inf.to_string(), "inf");
        assert_eq!(ExtendedReal::finite(1.5).to_string(), "1.5");
        assert_eq!(inf.deviation(two), f64::INFINITY);
        assert_eq!(inf.as_f64(), f64::INFINITY);
    }

    #[test]
    #[should_panic]
    fn extended_real_rejects_nan() {
        let _ = ExtendedReal::finite(f64::NAN);
    }

    #[test]
    fn estimated_omega_agrees_with_analytic_omega() {
        let finite_cases = [
            make_sqrt_deviation(),
            make_tsallis(0.5).unwrap(),
            make_affine(2.0, 3.0).unwrap(),
            make_exp_decreasing(),
        ];
        for f in &finite_cases {
            let est = estimate_omega(f).unwrap();
            let dev = est.deviation(f.omega());
            assert!(
                dev <= 1e-5,
                "{}: estimate {est} vs {} (dev {dev})",
                f.name(),
                f.omega()
            );
        }
        for f in [
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_tsallis(1.5).unwrap(),
        ] {
            assert!(
                estimate_omega(&f).unwrap().is_infinite(),
                "{} should estimate an infinite growth rate",
                f.name()
            );
        }
    }

    #[test]
    fn omega_estimation_rejects_concave_functions() {
        let err = make_custom("neg-square", |x| -x * x, 0.0, None).unwrap_err();
        assert!(matches!(err, Error::NotConvexLike { .. }), "got {err:?}");
    }

    #[test]
    fn custom_generator_matches_builtin_entropy() {
        let custom = make_custom("xlnx", |x| x * x.ln(), 0.0, None).unwrap();
        let builtin = make_entropy();
        for &x in &[0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 123.0] {
            assert_eq!(custom.eval(x), builtin.eval(x));
        }
        assert!(custom.omega().is_infinite());
        assert!(!custom.analytic_omega());
    }

    #[test]
    fn custom_generator_rejects_non_finite_probes() {
        let err = make_custom("pole", |x| 1.0 / (x - 10.0), 0.0, None).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGenerator { .. }));
        let err = make_custom("log", |x| x.ln().ln(), 0.0, None).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGenerator { .. }));
        assert!(make_custom("", |x| x, 0.0, None).is_err());
        assert!(make_custom("bad-zero", |x| x, f64::NAN, None).is_err());
    }

    #[test]
    fn certification_passes_strictly_convex_builtins_on_default_grid() {
        let grid = default_convexity_grid();
        assert_eq!(grid.len(), 62);
        assert_eq!(grid[0], 0.0);
        for f in [
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_tsallis(0.5).unwrap(),
            make_sqrt_deviation(),
            make_exp_decreasing(),
        ] {
            let cert = certify_strict_convexity(&f, &grid).unwrap();
            assert!(
                cert.passed,
                "{}: expected pass, witness {:?}",
                f.name(),
                cert.witness
            );
            assert!(cert.checks > 0);
            assert!(cert.min_margin > 0.0);
        }
    }

    #[test]
    fn certification_skips_flat_tail_pairs_for_exp_decreasing() {
        let cert =
            certify_strict_convexity(&make_exp_decreasing(), &default_convexity_grid()).unwrap();
        assert!(cert.passed);
        assert!(
            cert.unresolved > 0,
            "the f64-flat tail should show up as unresolved pairs"
        );
    }

    #[test]
    fn certification_fails_affine_with_constant_quotient_witness() {
        let f = make_affine(2.0, 3.0).unwrap();
        let cert = certify_strict_convexity(&f, &default_convexity_grid()).unwrap();
        assert!(!cert.passed);
        let w = cert
            .witness
            .expect("affine failure must carry a witness triple");
        assert!(w.lower < w.upper);
        assert!((w.quotient_low - 2.0).abs() < 1e-9);
        assert!((w.quotient_high - 2.0).abs() < 1e-9);
    }

    #[test]
    fn certification_fails_constant_function_without_resolvable_pairs() {
        let f = make_affine(0.0, 5.0).unwrap();
        let cert = certify_strict_convexity(&f, &default_convexity_grid()).unwrap();
        assert!(!cert.passed);
        assert_eq!(cert.checks, 0);
    }

    #[test]
    fn certification_validates_the_grid() {
        let f = make_entropy();
        assert!(certify_strict_convexity(&f, &[0.0, 1.0]).is_err());
        assert!(certify_strict_convexity(&f, &[0.0, 1.0, 1.0, 2.0]).is_err());
        assert!(certify_strict_convexity(&f, &[1.0, 0.5, 2.0]).is_err());
        assert!(certify_strict_convexity(&f, &[-1.0, 0.5, 2.0]).is_err());
    }

    #[test]
    fn quotients_stay_below_finite_omega_on_the_grid() {
        let grid = default_convexity_grid();
        for f in [
            make_sqrt_deviation(),
            make_tsallis(0.5).unwrap(),
            make_exp_decreasing(),
        ] {
            let omega = f.omega().value().unwrap();
            for i in 0..grid.len() {
                for j in (i + 1)..grid.len() {
                    let h = (f.eval(grid[j]) - f.eval(grid[i])) / (grid[j] - grid[i]);
                    assert!(
                        h <= omega + 1e-9,
                        "{}: quotient {h} above omega {omega} at ({}, {})",
                        f.name(),
                        grid[i],
                        grid[j]
                    );
                }
            }
        }
    }

    #[test]
    fn random_convex_combinations_have_positive_convexity_margin() {
        let mut rng = crate::linalg::rng_for(crate::linalg::mix(20240811, 0x0C));
        let generators = [
            make_entropy(),
            make_tsallis(2.0).unwrap(),
            make_tsallis(0.5).unwrap(),
            make_sqrt_deviation(),
            make_exp_decreasing(),
        ];
        for f in &generators {
            for _ in 0..100 {
                let (a, b) = loop {
                    let a: f64 = rng.gen_range(0.05..8.0);
                    let b: f64 = rng.gen_range(0.05..8.0);
                    if (a - b).abs() >= 0.25 {
                        break (a, b);
                    }
                };
                let lambda: f64 = rng.gen_range(0.1..0.9);
                let mid = lambda * a + (1.0 - lambda) * b;
                let chord = lambda * f.eval(a) + (1.0 - lambda) * f.eval(b);
                let margin = chord - f.eval(mid);
                let scale = 1.0_f64.max(f.eval(a).abs()).max(f.eval(b).abs());
                assert!(
                    margin > 1e-12 * scale,
                    "{}: margin {margin} at a={a}, b={b}, lambda={lambda}",
                    f.name()
                );
            }
        }
    }
}
