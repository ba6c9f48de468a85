use crate::{Error, Result};

/// Complex scalar used everywhere in this crate.
pub type Complex = num_complex::Complex<f64>;

/// Dense square complex matrix, row-major.
///
/// This is the raw arithmetic layer. It does not know about Hermiticity or
/// positivity; the validated wrappers ([`HermitianOperator`], [`UnitaryMatrix`],
/// [`Projection`]) do. Dimension agreement inside arithmetic is a programming
/// contract and is asserted, not returned as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Outer product `u v^*` of two equal-length vectors.
    pub fn outer(u: &[Complex], v: &[Complex]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product needs equal lengths");
        CMatrix::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix product needs equal dimensions");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(
            self.n,
            v.len(),
            "matrix-vector product needs equal dimensions"
        );
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(i, j).conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix sum needs equal dimensions");
        CMatrix::from_fn(self.n, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix difference needs equal dimensions");
        CMatrix::from_fn(self.n, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn scale_re(&self, c: f64) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(i, j) * c)
    }

    pub fn trace(&self) -> Complex {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.get(i, j);
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Adds `g * v v^*` in place. The two mirror entries of each pair are built
    /// from bitwise-conjugate products, so repeated accumulation keeps the
    /// matrix exactly Hermitian.
    pub fn add_scaled_outer(&mut self, g: f64, v: &[Complex]) {
        assert_eq!(self.n, v.len(), "outer accumulation needs equal dimensions");
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.get(i, j) + v[i] * v[j].conj() * g;
                self.set(i, j, w);
            }
        }
    }
}

/// Hilbert-Schmidt inner product `tr(X^* Y)`.
///
/// Real up to rounding when both arguments are Hermitian.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> Result<Complex> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..x.dim() {
        for j in 0..x.dim() {
            acc += x.get(i, j).conj() * y.get(i, j);
        }
    }
    Ok(acc)
}

/// Absolute Hermiticity tolerance enforced on directly constructed operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Square complex matrix validated to be (numerically) self-adjoint.
///
/// Construction measures `max |m[i][j] - conj(m[j][i])|`, rejects violations
/// beyond the tolerance, and stores the exactly symmetrized form `(M + M^*)/2`,
/// so the diagonal is exactly real and downstream code never re-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with_tolerance(m, HERMITICITY_TOL)
    }

    pub fn new_with_tolerance(m: CMatrix, tolerance: f64) -> Result<Self> {
        if let Some((row, col)) = m.first_non_finite() {
            return Err(Error::NonFiniteEntry { row, col });
        }
        for i in 0..m.dim() {
            for j in i..m.dim() {
                let violation = (m.get(i, j) - m.get(j, i).conj()).norm();
                if violation > tolerance {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        violation,
                        tolerance,
                    });
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Forcibly symmetrizes without a tolerance check. For internal products
    /// (conjugations, spectral reassembly) that are Hermitian by construction
    /// and only carry last-ulp asymmetry.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let n = m.dim();
        let mut s = CMatrix::zeros(n);
        for i in 0..n {
            s.set(i, i, Complex::new(m.get(i, i).re, 0.0));
            for j in (i + 1)..n {
                let avg = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                s.set(i, j, avg);
                s.set(j, i, avg.conj());
            }
        }
        HermitianOperator { m: s }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = CMatrix::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, Complex::new(d, 0.0));
        }
        HermitianOperator { m }
    }

    pub fn zero(n: usize) -> Self {
        HermitianOperator {
            m: CMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator {
            m: CMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.m.get(i, j)
    }

    pub fn trace_re(&self) -> f64 {
        self.m.trace().re
    }

    pub fn hs_norm(&self) -> f64 {
        self.m.hs_norm()
    }

    /// Scaling by a real factor keeps Hermiticity exactly.
    pub fn scale_re(&self, c: f64) -> Self {
        HermitianOperator {
            m: self.m.scale_re(c),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        Ok(HermitianOperator {
            m: self.m.add(&rhs.m),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rhs.dim(),
            });
        }
        Ok(HermitianOperator {
            m: self.m.sub(&rhs.m),
        })
    }

    pub fn add_scaled_identity(&self, eps: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.dim() {
            let d = m.get(i, i) + eps;
            m.set(i, i, d);
        }
        HermitianOperator { m }
    }

    /// Entry-wise complex conjugate. For a Hermitian matrix this equals the
    /// transpose, so the result is Hermitian again.
    pub fn entrywise_conj(&self) -> Self {
        HermitianOperator { m: self.m.conj() }
    }
}

/// Unitarity residual allowed at construction, in Hilbert-Schmidt norm.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Complex matrix validated to satisfy `||U^* U - I||_HS <= 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if let Some((row, col)) = m.first_non_finite() {
            return Err(Error::NonFiniteEntry { row, col });
        }
        let residual = m
            .adjoint()
            .mul(&m)
            .sub(&CMatrix::identity(m.dim()))
            .hs_norm();
        if residual > UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(UnitaryMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix {
            m: CMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    /// `U A U^*`, re-symmetrized to absorb last-ulp rounding.
    pub fn conjugate(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        let product = self.m.mul(a.matrix()).mul(&self.m.adjoint());
        Ok(HermitianOperator::symmetrized(product))
    }

    /// `U conj(A) U^*`: the action of the antiunitary map `x -> U conj(x)`.
    pub fn conjugate_antilinear(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        self.conjugate(&a.entrywise_conj())
    }
}

/// Idempotence residual allowed at construction, in Hilbert-Schmidt norm.
pub const PROJECTION_TOL: f64 = 1e-9;

/// Hermitian idempotent: `||P P - P||_HS <= 1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    h: HermitianOperator,
}

impl Projection {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let p = h.matrix();
        let residual = p.mul(p).sub(p).hs_norm();
        if residual > PROJECTION_TOL {
            return Err(Error::NotProjection { residual });
        }
        Ok(Projection { h })
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            h: HermitianOperator::zero(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            h: HermitianOperator::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn matrix(&self) -> &CMatrix {
        self.h.matrix()
    }

    /// Dimension of the projected subspace, read off the trace.
    pub fn rank(&self) -> usize {
        self.h.trace_re().round().max(0.0) as usize
    }
}
