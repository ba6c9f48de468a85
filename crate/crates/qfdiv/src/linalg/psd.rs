use super::eig::{eig_hermitian, SpectralDecomposition};
use super::matrix::{CMatrix, Complex, HermitianOperator, Projection};
use crate::{Error, Result};

/// Scale-aware zero band: eigenvalues of magnitude up to
/// `PSD_CLAMP_REL * max(largest |eigenvalue|, 1)` count as zero.
pub const PSD_CLAMP_REL: f64 = 1e-10;

/// Default tolerance for support queries.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Hermitian operator validated positive semidefinite, carrying its
/// eigendecomposition.
///
/// Construction eigendecomposes once. Eigenvalues below `-1e-10 * max(w_max, 1)`
/// are rejected; everything inside the band up to `+1e-10 * max(w_max, 1)` is
/// clamped to exactly `0.0`, so "zero eigenvalue" is an exact predicate for all
/// downstream support logic. The matrix entries keep their original values; only
/// the spectral view is clamped.
#[derive(Debug, Clone)]
pub struct PsdOperator {
    herm: HermitianOperator,
    spectral: SpectralDecomposition,
}

impl PsdOperator {
    pub fn new(herm: HermitianOperator) -> Result<Self> {
        if herm.dim() == 0 {
            return Err(Error::InvalidParameter {
                reason: "operator dimension must be at least 1".into(),
            });
        }
        let sd = eig_hermitian(&herm)?;
        let w_max_abs = sd.eigenvalues().iter().map(|w| w.abs()).fold(0.0, f64::max);
        let band = PSD_CLAMP_REL * w_max_abs.max(1.0);
        if let Some(&w) = sd.eigenvalues().iter().find(|&&w| w < -band) {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: w });
        }
        let clamped = sd.map_eigenvalues(|w| if w <= band { 0.0 } else { w });
        Ok(PsdOperator {
            spectral: sd.with_eigenvalues(clamped),
            herm,
        })
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        PsdOperator::new(HermitianOperator::diagonal(entries))
    }

    pub fn identity(n: usize) -> Self {
        PsdOperator::new(HermitianOperator::identity(n)).expect("identity is PSD")
    }

    pub fn zero(n: usize) -> Self {
        PsdOperator::new(HermitianOperator::zero(n)).expect("zero is PSD")
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn herm(&self) -> &HermitianOperator {
        &self.herm
    }

    pub fn matrix(&self) -> &CMatrix {
        self.herm.matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Clamped eigenvalues, descending. Zeros are exact.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectral.eigenvalues()
    }

    pub fn trace(&self) -> f64 {
        self.herm.trace_re()
    }

    pub fn hs_norm(&self) -> f64 {
        self.herm.hs_norm()
    }

    /// Number of nonzero (clamped) eigenvalues.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&w| w > 0.0).count()
    }

    /// `c * A` for a nonnegative real factor.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidParameter {
                reason: format!("scale factor must be finite and nonnegative, got {c}"),
            });
        }
        PsdOperator::new(self.herm.scale_re(c))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        PsdOperator::new(self.herm.add(&rhs.herm)?)
    }

    /// `A + eps * I` for a nonnegative shift.
    pub fn add_scaled_identity(&self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParameter {
                reason: format!("identity shift must be finite and nonnegative, got {eps}"),
            });
        }
        PsdOperator::new(self.herm.add_scaled_identity(eps))
    }
}

/// Projection onto the span of eigenvectors with eigenvalue above `tol * w_max`.
///
/// The zero operator yields the zero projection.
pub fn support_projection(a: &PsdOperator, tol: f64) -> Projection {
    let w_max = a.eigenvalues().first().copied().unwrap_or(0.0);
    let cut = tol * w_max;
    let mut m = CMatrix::zeros(a.dim());
    for (i, &w) in a.eigenvalues().iter().enumerate() {
        if w > cut {
            m.add_scaled_outer(1.0, &a.spectral().vector(i));
        }
    }
    Projection::new(HermitianOperator::symmetrized(m))
        .expect("sum of orthonormal rank-one projectors is a projection")
}

/// Whether the support of `a` sits inside the support of `b`:
/// `||(I - P_b) P_a||_HS <= tol` on the default-support projections.
pub fn support_contained(a: &PsdOperator, b: &PsdOperator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let pa = support_projection(a, SUPPORT_TOL);
    let pb = support_projection(b, SUPPORT_TOL);
    let leak = CMatrix::identity(a.dim())
        .sub(pb.matrix())
        .mul(pa.matrix())
        .hs_norm();
    Ok(leak <= tol)
}

/// Allowed deviation of each overlap-table row sum from 1.
pub const OVERLAP_ROW_SUM_TOL: f64 = 1e-9;

/// One eigenvalue pair with the squared overlap of its eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEntry {
    pub a: f64,
    pub b: f64,
    pub weight: f64,
}

/// All eigenvalue pairs `(a_i, b_j)` of two decompositions together with
/// `w_ij = |<u_i, v_j>|^2`, stored row-major in `i`.
///
/// Each row of weights sums to 1 (the `v_j` form a complete basis); this is
/// re-checked at construction.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    dim: usize,
    entries: Vec<OverlapEntry>,
}

impl OverlapTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[OverlapEntry] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> OverlapEntry {
        self.entries[i * self.dim + j]
    }
}

/// Builds the overlap table of two spectral decompositions of equal dimension.
pub fn overlap_table(
    sa: &SpectralDecomposition,
    sb: &SpectralDecomposition,
) -> Result<OverlapTable> {
    let n = sa.dim();
    if sb.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sb.dim(),
        });
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = sa.vector(i);
        let mut row_sum = 0.0;
        for j in 0..n {
            let inner: Complex = u
                .iter()
                .enumerate()
                .map(|(k, z)| z.conj() * sb.vectors().get(k, j))
                .sum();
            let weight = inner.norm_sqr();
            row_sum += weight;
            entries.push(OverlapEntry {
                a: sa.eigenvalues()[i],
                b: sb.eigenvalues()[j],
                weight,
            });
        }
        if (row_sum - 1.0).abs() > OVERLAP_ROW_SUM_TOL {
            return Err(Error::InvariantViolated {
                what: "overlap table row sum",
                residual: (row_sum - 1.0).abs(),
            });
        }
    }
    Ok(OverlapTable { dim: n, entries })
}

/// `sum_i g(w_i) v_i v_i^*` over the clamped eigenvalues of `a`.
///
/// `g` must be finite at every eigenvalue present, including exact zeros on
/// rank-deficient input; `log` of a singular operator is the canonical rejection.
pub fn matrix_function(a: &PsdOperator, g: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let mut m = CMatrix::zeros(a.dim());
    for (i, &w) in a.eigenvalues().iter().enumerate() {
        let y = g(w);
        if !y.is_finite() {
            return Err(Error::FunctionDomain { eigenvalue: w });
        }
        if y != 0.0 {
            m.add_scaled_outer(y, &a.spectral().vector(i));
        }
    }
    Ok(HermitianOperator::symmetrized(m))
}
