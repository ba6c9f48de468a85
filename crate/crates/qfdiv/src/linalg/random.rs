//! Seeded generation of unitaries, PSD operators, and rank-one projections.
//!
//! Every sample is a pure function of a 64-bit seed. Substreams are derived
//! with [`mix`], so a driver holding one session seed can hand independent,
//! reproducible seeds to trial `k` via `mix(seed, k)` without coordinating any
//! shared generator state. Same seed, same platform-independent bytes out.

use super::matrix::{CMatrix, Complex, HermitianOperator, Projection, UnitaryMatrix};
use super::psd::PsdOperator;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Splittable seed derivation: finalizer-style bit mixing of `seed` with a
/// stream index. Distinct streams give statistically independent generators;
/// the map is deterministic and stable across releases.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The deterministic RNG used throughout: every consumer derives its seed
/// with [`mix`] and draws from its own instance.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Complex> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(Complex::new(re, im));
    }
    data
}

/// Haar-like random unitary: a complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt (two passes), which keeps the triangular factor's
/// diagonal real positive, i.e. the phase convention is already canonical.
pub fn random_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            reason: "unitary dimension must be at least 1".into(),
        });
    }
    let mut rng = rng_for(mix(seed, 0x75));
    let g = gaussian_matrix(dim, dim, &mut rng);
    let mut cols: Vec<Vec<Complex>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[i * dim + j]).collect())
        .collect();

    for _pass in 0..2 {
        for j in 0..dim {
            for k in 0..j {
                let (settled, pending) = cols.split_at_mut(j);
                let ck = &settled[k];
                let cj = &mut pending[0];
                let proj: Complex = ck.iter().zip(cj.iter()).map(|(a, b)| a.conj() * *b).sum();
                for (zj, zk) in cj.iter_mut().zip(ck.iter()) {
                    *zj -= proj * *zk;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }

    let m = CMatrix::from_fn(dim, |i, j| cols[j][i]);
    UnitaryMatrix::new(m)
}

/// Random PSD operator `G G^*` with `G` complex Gaussian of shape
/// `dim x rank`, optionally rescaled to a target trace.
pub fn random_psd(
    dim: usize,
    rank: usize,
    trace_target: Option<f64>,
    seed: u64,
) -> Result<PsdOperator> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            reason: "operator dimension must be at least 1".into(),
        });
    }
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    if let Some(t) = trace_target {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter {
                reason: format!("trace target must be finite and positive, got {t}"),
            });
        }
    }
    let mut rng = rng_for(mix(seed, 0xA1));
    let g = gaussian_matrix(dim, rank, &mut rng);
    let mut m = CMatrix::zeros(dim);
    for k in 0..rank {
        let col: Vec<Complex> = (0..dim).map(|i| g[i * rank + k]).collect();
        m.add_scaled_outer(1.0, &col);
    }
    let mut a = PsdOperator::new(HermitianOperator::symmetrized(m))?;
    if let Some(t) = trace_target {
        a = a.scale(t / a.trace())?;
    }
    Ok(a)
}

/// Rank-one projection `v v^*` onto a Haar-like random unit vector.
pub fn random_rank_one_projection(dim: usize, seed: u64) -> Result<Projection> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            reason: "projection dimension must be at least 1".into(),
        });
    }
    let mut rng = rng_for(mix(seed, 0xB2));
    let mut v = gaussian_matrix(dim, 1, &mut rng);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    let mut m = CMatrix::zeros(dim);
    m.add_scaled_outer(1.0, &v);
    Projection::new(HermitianOperator::symmetrized(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_separates_streams() {
        let s = 1234567891011u64;
        assert_ne!(mix(s, 0), mix(s, 1));
        assert_ne!(mix(s, 1), mix(s, 2));
        assert_eq!(mix(s, 7), mix(s, 7));
    }

    #[test]
    fn unitary_samples_pass_validation_across_dims() {
        for dim in 1..=8 {
            for trial in 0..5u64 {
                let u = random_unitary(dim, mix(42, trial)).unwrap();
                let residual = u
                    .matrix()
                    .adjoint()
                    .mul(u.matrix())
                    .sub(&CMatrix::identity(dim))
                    .hs_norm();
                assert!(residual <= 1e-10, "dim {dim} trial {trial}: {residual:.3e}");
            }
        }
    }

    #[test]
    fn unitary_generation_is_bit_reproducible() {
        let a = random_unitary(5, 999).unwrap();
        let b = random_unitary(5, 999).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let (x, y) = (a.matrix().get(i, j), b.matrix().get(i, j));
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        let c = random_unitary(5, 1000).unwrap();
        assert!(a.matrix().sub(c.matrix()).hs_norm() > 1e-3);
    }

    #[test]
    fn psd_samples_have_requested_rank_and_trace() {
        for dim in 2..=6 {
            for rank in 1..=dim {
                let a = random_psd(dim, rank, Some(3.0), mix(7, (dim * 10 + rank) as u64)).unwrap();
                assert_eq!(a.rank(), rank, "dim {dim} rank {rank}");
                assert!((a.trace() - 3.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn psd_rejects_bad_rank() {
        assert!(matches!(
            random_psd(3, 0, None, 1),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            random_psd(3, 4, None, 1),
            Err(Error::InvalidRank { .. })
        ));
    }

    #[test]
    fn rank_one_projection_is_normalized() {
        let p = random_rank_one_projection(4, 31).unwrap();
        assert!((p.operator().trace_re() - 1.0).abs() < 1e-12);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn psd_generation_is_bit_reproducible() {
        let a = random_psd(4, 4, None, 555).unwrap();
        let b = random_psd(4, 4, None, 555).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.matrix().get(i, j), b.matrix().get(i, j));
            }
        }
    }
}
