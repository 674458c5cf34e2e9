//! Small exact-layout linear algebra: quaternions in the `z + j·w` convention,
//! 2×2 quaternionic matrices and their complex 4×4 images, brackets, the matrix
//! exponential, numerical rank and symmetric 3×3 eigenvalues.

use nalgebra::{DMatrix, Matrix3, Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::NkError;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CMat3 = Matrix3<C64>;
pub type CMat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default tolerances, overridable wherever a function takes a `tol`.
pub mod tol {
    pub const RANK_REL: f64 = 1e-9;
    pub const SYMMETRIC: f64 = 1e-10;
    pub const JACOBI_SWEEPS: usize = 64;
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Quaternion `q = z + j·w` with `z, w ∈ ℂ`; `j z = z̄ j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub z: C64,
    pub w: C64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { z: ZERO, w: ZERO };
    pub const ONE: Quaternion = Quaternion { z: ONE, w: ZERO };

    pub fn new(z: C64, w: C64) -> Self {
        Quaternion { z, w }
    }
    pub fn complex(z: C64) -> Self {
        Quaternion { z, w: ZERO }
    }
    pub fn i() -> Self {
        Quaternion::complex(I)
    }
    pub fn j() -> Self {
        Quaternion { z: ZERO, w: ONE }
    }
    pub fn k() -> Self {
        Quaternion::i() * Quaternion::j()
    }
    pub fn conj(self) -> Self {
        Quaternion { z: self.z.conj(), w: -self.w }
    }
    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }
    pub fn inv(self) -> Self {
        let n = self.norm_sqr();
        Quaternion { z: self.z.conj() / n, w: -self.w / n }
    }
    pub fn scale(self, s: f64) -> Self {
        Quaternion { z: self.z * s, w: self.w * s }
    }
    /// Complex 2×2 image `[[z, −w̄], [w, z̄]]`.
    pub fn block(self) -> [[C64; 2]; 2] {
        [[self.z, -self.w.conj()], [self.w, self.z.conj()]]
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion {
            z: self.z * o.z - self.w.conj() * o.w,
            w: self.z.conj() * o.w + self.w * o.z,
        }
    }
}
impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion { z: self.z + o.z, w: self.w + o.w }
    }
}
impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion { z: self.z - o.z, w: self.w - o.w }
    }
}
impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion { z: -self.z, w: -self.w }
    }
}

/// 2×2 matrix over ℍ, acting on `ℍ² ≅ ℂ⁴` with `q₁ = Z₀ + jZ₁`, `q₂ = Z₂ + jZ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatMat2 {
    pub e: [[Quaternion; 2]; 2],
}

impl QuatMat2 {
    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        QuatMat2 { e: [[a, b], [c, d]] }
    }
    pub fn identity() -> Self {
        Self::diag(Quaternion::ONE, Quaternion::ONE)
    }
    pub fn zero() -> Self {
        Self::diag(Quaternion::ZERO, Quaternion::ZERO)
    }
    pub fn diag(a: Quaternion, d: Quaternion) -> Self {
        Self::new(a, Quaternion::ZERO, Quaternion::ZERO, d)
    }
    /// Quaternionic conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let e = &self.e;
        Self::new(e[0][0].conj(), e[1][0].conj(), e[0][1].conj(), e[1][1].conj())
    }
    pub fn scale(&self, s: f64) -> Self {
        let e = &self.e;
        Self::new(e[0][0].scale(s), e[0][1].scale(s), e[1][0].scale(s), e[1][1].scale(s))
    }
    pub fn max_abs(&self) -> f64 {
        self.e.iter().flatten().map(|q| q.norm()).fold(0.0, f64::max)
    }
    /// Residual of `A + A^† = 0`.
    pub fn sp2_residual(&self) -> f64 {
        (*self + self.adjoint()).max_abs()
    }
    /// Residual of `A^† A = I`.
    pub fn unitary_residual(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }
    pub fn embed_c4(&self) -> CMat4 {
        embed_c4(self)
    }
    /// Inverse of [`embed_c4`] on matrices commuting with the quaternionic structure.
    pub fn from_c4(m: &CMat4) -> Self {
        let q = |r: usize, c: usize| Quaternion::new(m[(2 * r, 2 * c)], m[(2 * r + 1, 2 * c)]);
        Self::new(q(0, 0), q(0, 1), q(1, 0), q(1, 1))
    }
}

impl Mul for QuatMat2 {
    type Output = QuatMat2;
    fn mul(self, o: QuatMat2) -> QuatMat2 {
        let (a, b) = (&self.e, &o.e);
        let m = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        QuatMat2::new(m(0, 0), m(0, 1), m(1, 0), m(1, 1))
    }
}
impl Add for QuatMat2 {
    type Output = QuatMat2;
    fn add(self, o: QuatMat2) -> QuatMat2 {
        let (a, b) = (&self.e, &o.e);
        QuatMat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}
impl Sub for QuatMat2 {
    type Output = QuatMat2;
    fn sub(self, o: QuatMat2) -> QuatMat2 {
        self + o.scale(-1.0)
    }
}

/// Block `(r,c)` holding `q = z + jw` becomes `[[z, −w̄], [w, z̄]]`.
pub fn embed_c4(a: &QuatMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for r in 0..2 {
        for col in 0..2 {
            let b = a.e[r][col].block();
            for i in 0..2 {
                for j in 0..2 {
                    m[(2 * r + i, 2 * col + j)] = b[i][j];
                }
            }
        }
    }
    m
}

/// The quaternionic structure `Z ↦ M_j Z̄` on ℂ⁴; `U` is quaternionic iff `U M_j = M_j Ū`.
pub fn quaternionic_structure() -> CMat4 {
    let mut m = CMat4::zeros();
    m[(0, 1)] = -ONE;
    m[(1, 0)] = ONE;
    m[(2, 3)] = -ONE;
    m[(3, 2)] = ONE;
    m
}

/// Residual of membership in the embedded `sp(2)`: skew-Hermitian and quaternionic.
pub fn sp2_membership_residual(x: &CMat4) -> f64 {
    let mj = quaternionic_structure();
    let skew = (x + x.adjoint()).camax();
    let quat = (x * mj - mj * x.conjugate()).camax();
    skew.max(quat)
}

pub fn commutator<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    a * b - b * a
}

/// `AB − BA` for dynamically sized complex matrices.
pub fn bracket(a: &CMat, b: &CMat) -> Result<CMat, NkError> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(NkError::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(a * b - b * a)
}

/// Scaling and squaring with a 16-term Taylor series, `‖A‖/2^k ≤ 0.5`.
pub fn expm<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm = a.iter().map(|x| x.norm()).sum::<f64>().max(0.0);
    let mut k = 0i32;
    while norm / 2f64.powi(k) > 0.5 {
        k += 1;
    }
    let s = a / C64::new(2f64.powi(k), 0.0);
    let mut term = SMatrix::<C64, N, N>::identity();
    let mut sum = term;
    for n in 1..=16 {
        term = term * s / C64::new(n as f64, 0.0);
        sum += term;
    }
    for _ in 0..k {
        sum = sum * sum;
    }
    sum
}

pub fn expm_dyn(a: &CMat) -> Result<CMat, NkError> {
    if a.nrows() != a.ncols() {
        return Err(NkError::DimensionMismatch(format!("{:?}", a.shape())));
    }
    let n = a.nrows();
    let norm: f64 = a.iter().map(|x| x.norm()).sum();
    let mut k = 0i32;
    while norm / 2f64.powi(k) > 0.5 {
        k += 1;
    }
    let s = a / C64::new(2f64.powi(k), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = term.clone();
    for j in 1..=16 {
        term = &term * &s / C64::new(j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Sorted eigenvalues of a real symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn sym3_eigenvalues(s: &Matrix3<f64>) -> Result<[f64; 3], NkError> {
    let asym = (s - s.transpose()).camax();
    if asym > tol::SYMMETRIC * (1.0 + s.camax()) {
        return Err(NkError::Asymmetric(asym));
    }
    let mut a = (s + s.transpose()) * 0.5;
    for _ in 0..tol::JACOBI_SWEEPS {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off <= f64::EPSILON.powi(2) * a.norm_squared().max(f64::MIN_POSITIVE) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let cs = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * cs;
            let mut rot = Matrix3::<f64>::identity();
            rot[(p, p)] = cs;
            rot[(q, q)] = cs;
            rot[(p, q)] = sn;
            rot[(q, p)] = -sn;
            a = rot.transpose() * a * rot;
        }
    }
    let mut ev = [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

pub fn singular_values_real(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Numerical rank: singular values below `tol·σ_max` count as zero.
pub fn rank_tol(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values_real(m);
    match sv.first() {
        None => 0,
        Some(&top) if top == 0.0 => 0,
        Some(&top) => sv.iter().filter(|&&s| s > tol * top).count(),
    }
}

pub fn rank_tol_complex(m: &CMat, tol: f64) -> usize {
    rank_tol(&realify(m), tol)
}

/// Real form `[[Re, −Im], [Im, Re]]`; its rank is twice the complex rank.
pub fn realify(m: &CMat) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Row-major flattening of a complex square matrix into `[re…, im…]`.
pub fn flatten_real<const N: usize>(m: &SMatrix<C64, N, N>) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * N * N);
    for i in 0..N {
        for j in 0..N {
            v.push(m[(i, j)].re);
        }
    }
    for i in 0..N {
        for j in 0..N {
            v.push(m[(i, j)].im);
        }
    }
    v
}

/// Moore–Penrose least squares `min ‖A x − b‖`, returning `(x, max residual)`.
pub fn lstsq(a: &DMatrix<f64>, b: &[f64]) -> (Vec<f64>, f64) {
    let bv = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let x = svd.solve(&bv, eps).expect("svd with u and v");
    let r = (a * &x - &bv).camax();
    (x.iter().copied().collect(), r)
}

/// Distance of `v` from the column span of `basis`, as a max-norm residual.
pub fn span_residual(basis: &DMatrix<f64>, v: &[f64]) -> f64 {
    lstsq(basis, v).1
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [nalgebra::Matrix2<C64>; 3] {
    use nalgebra::Matrix2;
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}
