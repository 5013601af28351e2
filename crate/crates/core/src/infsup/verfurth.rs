use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::InfSupError;
use crate::fem::StokesSystem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerfurthTerms {
    pub l2_norm: f64,
    /// `sup_v (div v, q) / |grad v| = sqrt(q^T B A^{-1} B^T q)`
    pub sup_term: f64,
    /// `h |grad q|`
    pub grad_term: f64,
}

impl VerfurthTerms {
    /// `(sup_term + grad_term) / l2_norm`, zero for the zero pressure.
    pub fn ratio(&self) -> f64 {
        if self.l2_norm > 0.0 {
            (self.sup_term + self.grad_term) / self.l2_norm
        } else {
            0.0
        }
    }
}

/// Both sides of `c |q| <= sup_v (div v, q)/|grad v| + h |grad q|` for the
/// mean-zero part of `q`.
pub fn verfurth_gap(sys: &StokesSystem, q: &[f64]) -> Result<VerfurthTerms, InfSupError> {
    let quad = |q: &[f64], m: &crate::linalg::CsrMatrix| -> f64 {
        q.iter().zip(m.mul_vec(q)).map(|(a, b)| a * b).sum::<f64>().max(0.0)
    };
    let input = quad(q, &sys.mp).sqrt();
    let q = sys.mean_zero(q);
    let l2 = quad(&q, &sys.mp).sqrt();
    // constants project to roundoff; snap them to zero
    if l2 <= 64.0 * f64::EPSILON * input {
        return Ok(VerfurthTerms {
            l2_norm: 0.0,
            sup_term: 0.0,
            grad_term: 0.0,
        });
    }
    let schur = sys.schur_stiffness()?;
    Ok(VerfurthTerms {
        l2_norm: l2,
        sup_term: schur.quadratic_form(&q).max(0.0).sqrt(),
        grad_term: sys.h() * quad(&q, &sys.kp).sqrt(),
    })
}

/// Seeded random pressure with entries uniform in `[-1, 1]`.
pub fn random_pressure(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `min` of [`VerfurthTerms::ratio`] over `probes` seeded random pressures.
pub fn c_fit(sys: &StokesSystem, probes: usize, seed: u64) -> Result<f64, InfSupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..probes {
        let q = random_pressure(&mut rng, sys.mh.dim_free);
        best = best.min(verfurth_gap(sys, &q)?.ratio());
    }
    Ok(best)
}
