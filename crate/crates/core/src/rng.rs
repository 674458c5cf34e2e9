//! Seeded sampling helpers shared by tests, scans and the CLI.

use crate::algebra::{c, expm, CMat3, CMat4, C64};
use crate::chart::{ChartPoint, TangentVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    c(normal(rng), normal(rng))
}

pub fn chart_point<R: Rng>(rng: &mut R, scale: f64) -> ChartPoint {
    ChartPoint::new(
        complex_normal(rng) * scale,
        complex_normal(rng) * scale,
        complex_normal(rng) * scale,
    )
}

pub fn tangent<R: Rng>(rng: &mut R) -> TangentVec {
    TangentVec::new(complex_normal(rng), complex_normal(rng), complex_normal(rng))
}

/// Random skew-Hermitian `N×N` matrix with Gaussian entries times `scale`.
pub fn skew_hermitian<const N: usize, R: Rng>(rng: &mut R, scale: f64) -> nalgebra::SMatrix<C64, N, N> {
    let mut m = nalgebra::SMatrix::<C64, N, N>::zeros();
    for i in 0..N {
        for j in 0..N {
            m[(i, j)] = complex_normal(rng) * scale;
        }
    }
    (m - m.adjoint()) * c(0.5, 0.0)
}

/// Random element of SU(3).
pub fn su3<R: Rng>(rng: &mut R) -> CMat3 {
    let mut x = skew_hermitian::<3, R>(rng, 1.0);
    let tr = x.trace() / c(3.0, 0.0);
    for i in 0..3 {
        x[(i, i)] -= tr;
    }
    expm(&x)
}

/// Random Sp(2) element as a complex 4×4 matrix.
pub fn sp2<R: Rng>(rng: &mut R, scale: f64) -> CMat4 {
    use crate::algebra::{QuatMat2, Quaternion};
    let mut q = || Quaternion::new(complex_normal(rng) * scale, complex_normal(rng) * scale);
    let a = QuatMat2::new(q(), q(), q(), q());
    let x = (a - a.adjoint()).scale(0.5);
    expm(&x.embed_c4())
}
