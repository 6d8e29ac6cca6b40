//! Seeded random instances: Ginibre states, Dirichlet distributions and
//! Haar-ish unitaries.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::operator::{CMatrix, ClassicalState, Complex64, DensityMatrix, HermitianOperator};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng>(r: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    Complex64::new(re, im)
}

/// Full-rank state G G† / Tr G G† with a square complex Ginibre matrix G.
pub fn random_density<R: Rng>(d: usize, r: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(r));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m).expect("Ginibre construction yields a state")
}

/// Uniform (flat Dirichlet) probability vector with strictly positive
/// entries.
pub fn random_classical<R: Rng>(k: usize, r: &mut R) -> ClassicalState {
    let gamma = Gamma::new(1.0, 1.0).expect("valid gamma parameters");
    let mut w: Vec<f64> = (0..k).map(|_| gamma.sample(r) + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    // make the sum exact up to rounding of the last entry
    let head: f64 = w[..k - 1].iter().sum();
    w[k - 1] = 1.0 - head;
    ClassicalState::from_weights(w).expect("Dirichlet sample is a distribution")
}

/// Unitary from the eigenvectors of a random Hermitian (GUE) matrix.
pub fn random_unitary<R: Rng>(d: usize, r: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_complex(r));
    let h = (&g + g.adjoint()).scale(0.5);
    HermitianOperator::new(h)
        .expect("symmetrized matrix is Hermitian")
        .spectrum()
        .vectors
        .clone()
}

/// Random unit vector in C^d.
pub fn random_pure<R: Rng>(d: usize, r: &mut R) -> DensityMatrix {
    let v = DVector::from_fn(d, |_, _| gaussian_complex(r));
    let v = v.unscale(v.norm());
    DensityMatrix::pure(v.as_slice()).expect("normalized vector")
}
