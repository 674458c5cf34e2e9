//! Special Lagrangian 3-planes in ℂ³ under `H = S(U(2)×U(1))`.
//!
//! `b₁, b₂, b₃` is the standard basis, `b₃` spans the vertical line. Forms are the flat
//! versions of the chart ones: `ω = Σ Im(āᵢbᵢ)`, `ω_V = Im(ā₃b₃)`, `ψ = −i det`.

use nalgebra::{DMatrix, Matrix2, Matrix3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use crate::algebra::{c, expm, lstsq, rank_tol, CMat3, C64, I, ONE, ZERO};
use crate::chart::{metric_c3, omega_c3, omega_v_c3, psi_c3, CoframeValue};
use crate::rng::{complex_normal, skew_hermitian};
use crate::symmetry::theta_from_frame;
use crate::{NkError, Result};

/// Three vectors of ℂ³, the columns of a 3×3 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagBasis {
    pub cols: [[C64; 3]; 3],
}

impl LagBasis {
    pub fn from_matrix(m: &CMat3) -> Self {
        LagBasis { cols: [0, 1, 2].map(|j| [m[(0, j)], m[(1, j)], m[(2, j)]]) }
    }
    pub fn matrix(&self) -> CMat3 {
        CMat3::from_fn(|i, j| self.cols[j][i])
    }
    pub fn standard_r3() -> Self {
        Self::from_matrix(&CMat3::identity())
    }
    pub fn transformed(&self, a: &CMat3) -> Self {
        Self::from_matrix(&(a * self.matrix()))
    }
    /// Row-major matrix, columns are the basis vectors.
    pub fn rows(&self) -> [[C64; 3]; 3] {
        [0, 1, 2].map(|i| [self.cols[0][i], self.cols[1][i], self.cols[2][i]])
    }
    pub fn from_rows(r: [[C64; 3]; 3]) -> Self {
        LagBasis { cols: [0, 1, 2].map(|j| [r[0][j], r[1][j], r[2][j]]) }
    }
    fn real6(&self, j: usize) -> nalgebra::Vector6<f64> {
        CoframeValue { c: self.cols[j] }.to_real6()
    }
    /// Gram–Schmidt in `Re⟨·,·⟩`; errors on real-linear dependence.
    pub fn orthonormalized(&self) -> Result<LagBasis> {
        let mut out: Vec<nalgebra::Vector6<f64>> = Vec::new();
        for j in 0..3 {
            let mut v = self.real6(j);
            let n0 = v.norm();
            for u in &out {
                v -= u * u.dot(&v);
            }
            for u in &out {
                v -= u * u.dot(&v);
            }
            let n = v.norm();
            if n0 == 0.0 || n <= 1e-10 * n0 {
                return Err(NkError::DegenerateBasis);
            }
            out.push(v / n);
        }
        Ok(LagBasis { cols: [0, 1, 2].map(|j| CoframeValue::from_real6(&out[j]).c) })
    }
}

/// `T_θ ∈ SU(3)`; its columns span `W_θ`.
pub fn t_theta(theta: f64) -> CMat3 {
    let e = C64::from_polar(1.0 / SQRT_2, theta);
    let em = C64::from_polar(1.0 / SQRT_2, -theta);
    CMat3::new(ONE, ZERO, ZERO, ZERO, -I * em, e, ZERO, -em, I * e)
}

/// `d T_θ / dθ`.
pub fn t_theta_derivative(theta: f64) -> CMat3 {
    let e = C64::from_polar(1.0 / SQRT_2, theta);
    let em = C64::from_polar(1.0 / SQRT_2, -theta);
    CMat3::new(ZERO, ZERO, ZERO, ZERO, -em, I * e, ZERO, I * em, -e)
}

pub fn w_theta(theta: f64) -> LagBasis {
    LagBasis::from_matrix(&t_theta(theta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlagCheck {
    pub omega_max: f64,
    /// `| |Im ψ| − Gram volume |`.
    pub volume_residual: f64,
    pub re_psi: f64,
    pub is_slag: bool,
}

pub fn is_special_lagrangian_subspace(b: &LagBasis, tol: f64) -> Result<SlagCheck> {
    let o = b.orthonormalized()?;
    let mut omega_max: f64 = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            omega_max = omega_max.max(omega_c3(&o.cols[i], &o.cols[j]).abs());
        }
    }
    let psi = psi_c3(&o.cols[0], &o.cols[1], &o.cols[2]);
    let volume_residual = (psi.im.abs() - 1.0).abs();
    Ok(SlagCheck {
        omega_max,
        volume_residual,
        re_psi: psi.re.abs(),
        is_slag: omega_max < tol && volume_residual < tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub theta: f64,
    pub n_w: usize,
}

fn frame(o: &LagBasis) -> Vec<CoframeValue> {
    o.cols.iter().map(|c| CoframeValue { c: *c }).collect()
}

/// `n_W = dim K_W`, where `K_W` is the kernel of the projection `W → span(b₃)`.
pub fn kernel_dim(o: &LagBasis) -> usize {
    let m = DMatrix::from_fn(3, 2, |i, k| if k == 0 { o.cols[i][2].re } else { o.cols[i][2].im });
    if m.camax() < 1e-12 {
        return 3;
    }
    3 - rank_tol(&m, 1e-9)
}

pub fn canonical_theta(b: &LagBasis) -> Result<CanonicalForm> {
    let chk = is_special_lagrangian_subspace(b, 1e-8)?;
    if !chk.is_slag {
        return Err(NkError::NotSpecialLagrangian(format!(
            "ω {:.2e}, volume {:.2e}",
            chk.omega_max, chk.volume_residual
        )));
    }
    let o = b.orthonormalized()?;
    let n_w = kernel_dim(&o);
    let theta = if n_w >= 2 { FRAC_PI_4 } else { theta_from_frame(&frame(&o)) };
    Ok(CanonicalForm { theta, n_w })
}

/// `½|cos 2θ| = ‖w₁‖ |ω_V(w₂,w₃)| / |Im ψ(w₁,w₂,w₃)|` with `w₁ ∈ K_W`, `w₂, w₃ ⊥ K_W`.
pub fn theta_by_formula(b: &LagBasis) -> Result<f64> {
    let o = b.orthonormalized()?;
    if kernel_dim(&o) >= 2 {
        return Ok(FRAC_PI_4);
    }
    let re = nalgebra::Vector3::from_iterator(o.cols.iter().map(|c| c[2].re));
    let im = nalgebra::Vector3::from_iterator(o.cols.iter().map(|c| c[2].im));
    let a = re.cross(&im).normalize();
    let seed = if a.x.abs() < 0.9 { nalgebra::Vector3::x() } else { nalgebra::Vector3::y() };
    let bb = (seed - a * a.dot(&seed)).normalize();
    let d = a.cross(&bb);
    let comb = |v: &nalgebra::Vector3<f64>| {
        let mut out = [ZERO; 3];
        for k in 0..3 {
            for i in 0..3 {
                out[i] += o.cols[k][i] * v[k];
            }
        }
        out
    };
    let (w1, w2, w3) = (comb(&a), comb(&bb), comb(&d));
    let ratio = metric_c3(&w1, &w1).sqrt() * omega_v_c3(&w2, &w3).abs() / psi_c3(&w1, &w2, &w3).im.abs();
    Ok(0.5 * (2.0 * ratio).clamp(-1.0, 1.0).acos())
}

/// `max |ω_V|` over orthonormal pairs of the subspace: the operator norm of `ω_V|_W`.
pub fn omega_v_norm(b: &LagBasis) -> Result<f64> {
    let o = b.orthonormalized()?;
    let mut a = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            a[(i, j)] = omega_v_c3(&o.cols[i], &o.cols[j]);
        }
    }
    // A skew 3×3 matrix has singular values (s, s, 0) with s = |axial vector|.
    Ok((a[(1, 2)].powi(2) + a[(0, 2)].powi(2) + a[(0, 1)].powi(2)).sqrt())
}

/// Basis of `s(u(2) ⊕ u(1))`.
pub fn h_basis() -> [CMat3; 4] {
    let mut e = [CMat3::zeros(); 4];
    e[0][(0, 0)] = I;
    e[0][(2, 2)] = -I;
    e[1][(1, 1)] = I;
    e[1][(2, 2)] = -I;
    e[2][(0, 1)] = ONE;
    e[2][(1, 0)] = -ONE;
    e[3][(0, 1)] = I;
    e[3][(1, 0)] = I;
    e
}

/// Random element of `H` via the exponential of `s(u(2)⊕u(1))`.
pub fn random_h<R: Rng>(rng: &mut R) -> CMat3 {
    let a = skew_hermitian::<2, R>(rng, 1.5);
    let u = expm(&a);
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let mut h = CMat3::zeros();
    h.fixed_view_mut::<2, 2>(0, 0).copy_from(&u);
    h[(2, 2)] = det.conj() / det.norm();
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stabilizer {
    pub dim: usize,
    /// A generator of the stabiliser algebra when `dim == 1`, acting on ℂ³.
    pub generator: Option<CMat3>,
}

/// `{A ∈ s(u(2)⊕u(1)) : A·W_θ ⊆ W_θ}` from `ω(w_j, A w_k) = 0`.
pub fn stabilizer_algebra(theta: f64, rel_tol: f64) -> Stabilizer {
    let w = w_theta(theta);
    let basis = h_basis();
    let mut m = DMatrix::zeros(9, 4);
    for (a, x) in basis.iter().enumerate() {
        let xw = x * w.matrix();
        for j in 0..3 {
            for k in 0..3 {
                let col = [xw[(0, k)], xw[(1, k)], xw[(2, k)]];
                m[(3 * j + k, a)] = omega_c3(&w.cols[j], &col);
            }
        }
    }
    let r = rank_tol(&m, rel_tol);
    let dim = 4 - r;
    let generator = if dim == 1 {
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors");
        let (kmin, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| {
            if s < acc.1 {
                (i, s)
            } else {
                acc
            }
        });
        let mut g = CMat3::zeros();
        for (a, x) in basis.iter().enumerate() {
            g += x * c(vt[(kmin, a)], 0.0);
        }
        Some(g)
    } else {
        None
    };
    Stabilizer { dim, generator }
}

pub fn stabilizer_algebra_dim(theta: f64) -> usize {
    stabilizer_algebra(theta, 1e-9).dim
}

/// Displayed generator of `T h_{π/4} T⁻¹`.
pub fn quarter_pi_generator() -> CMat3 {
    let mut g = CMat3::zeros();
    g[(0, 1)] = c(-1.0, 1.0);
    g[(1, 0)] = c(1.0, 1.0);
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    pub invariant: bool,
    pub residual: f64,
    /// `max |Re⟨J w₁, w_j⟩|`: `J(K_W) ⊥ W`.
    pub jk_orthogonality: f64,
}

/// `K_W^⊥ ⊂ W` is invariant under `J′ = diag(i, i, −i)` iff θ = 0.
pub fn cr_criterion(b: &LagBasis, tol: f64) -> Result<CrReport> {
    let cf = canonical_theta(b)?;
    if cf.n_w >= 2 {
        return Err(NkError::ThetaQuarterPi);
    }
    let o = b.orthonormalized()?;
    let re = nalgebra::Vector3::from_iterator(o.cols.iter().map(|c| c[2].re));
    let im = nalgebra::Vector3::from_iterator(o.cols.iter().map(|c| c[2].im));
    let a = re.cross(&im).normalize();
    let seed = if a.x.abs() < 0.9 { nalgebra::Vector3::x() } else { nalgebra::Vector3::y() };
    let bb = (seed - a * a.dot(&seed)).normalize();
    let d = a.cross(&bb);
    let comb = |v: &nalgebra::Vector3<f64>| {
        let mut out = [ZERO; 3];
        for k in 0..3 {
            for i in 0..3 {
                out[i] += o.cols[k][i] * v[k];
            }
        }
        out
    };
    let (w1, w2, w3) = (comb(&a), comb(&bb), comb(&d));
    let perp = DMatrix::from_fn(6, 2, |r, k| {
        let v = if k == 0 { w2 } else { w3 };
        CoframeValue { c: v }.to_real6()[r]
    });
    let jp = |v: [C64; 3]| [v[0] * I, v[1] * I, -v[2] * I];
    let mut residual: f64 = 0.0;
    for v in [w2, w3] {
        let t = CoframeValue { c: jp(v) }.to_real6();
        residual = residual.max(lstsq(&perp, t.as_slice()).1);
    }
    let jw1 = w1.map(|z| z * I);
    let jk = o.cols.iter().map(|w| metric_c3(&jw1, w).abs()).fold(0.0, f64::max);
    Ok(CrReport { invariant: residual < tol, residual, jk_orthogonality: jk })
}

/// `V_θ = span(−ie^{−iθ}b₂ − e^{−iθ}b₃, e^{iθ}b₂ + ie^{iθ}b₃) ⊂ ℂ²`, as columns.
pub fn v_theta(theta: f64) -> Matrix2<C64> {
    let t = t_theta(theta);
    Matrix2::new(t[(1, 1)], t[(1, 2)], t[(2, 1)], t[(2, 2)])
}

fn projector_c2(v: &Matrix2<C64>) -> Option<nalgebra::Matrix4<f64>> {
    let mut cols: Vec<nalgebra::Vector4<f64>> = Vec::new();
    for j in 0..2 {
        let mut x = nalgebra::Vector4::new(v[(0, j)].re, v[(0, j)].im, v[(1, j)].re, v[(1, j)].im);
        for u in &cols {
            x -= u * u.dot(&x);
        }
        let n = x.norm();
        if n < 1e-12 {
            return None;
        }
        cols.push(x / n);
    }
    Some(cols[0] * cols[0].transpose() + cols[1] * cols[1].transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleRepresentative {
    pub phi: f64,
    pub theta: f64,
    pub residual: f64,
}

fn circle_residual(v: &Matrix2<C64>, phi: f64, theta: f64) -> Option<nalgebra::Matrix4<f64>> {
    let d = Matrix2::new(C64::from_polar(1.0, phi), ZERO, ZERO, C64::from_polar(1.0, -phi));
    Some(projector_c2(&(d * v))? - projector_c2(&v_theta(theta))?)
}

/// Gauss–Newton on the 16 projector entries; θ is left unconstrained.
fn circle_polish(v: &Matrix2<C64>, mut x: [f64; 2]) -> ([f64; 2], f64) {
    let res = |x: [f64; 2]| circle_residual(v, x[0], x[1]).map_or(f64::INFINITY, |m| m.norm());
    let mut r = res(x);
    for _ in 0..50 {
        if r < 1e-14 {
            break;
        }
        let Some(f0) = circle_residual(v, x[0], x[1]) else { break };
        let h = 1e-7;
        let mut jac = DMatrix::zeros(16, 2);
        for k in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            let (Some(fp), Some(fm)) = (circle_residual(v, xp[0], xp[1]), circle_residual(v, xm[0], xm[1])) else {
                return (x, r);
            };
            for i in 0..16 {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let (dx, _) = lstsq(&jac, f0.as_slice());
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-8 {
            let xn = [x[0] - t * dx[0], x[1] - t * dx[1]];
            let rn = res(xn);
            if rn < r {
                x = xn;
                r = rn;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, r)
}

/// Find `φ`, `θ ∈ [0, π/2]` with `diag(e^{iφ}, e^{−iφ})·V = V_θ` for `V ∈ SLag(ℂ²)`.
///
/// A coarse grid over `(φ, θ)` seeds Gauss–Newton from its best cells. `V_θ` is
/// π-periodic in θ, and a solution with θ outside `[0, π/2]` is restarted from the
/// reflected angle `−θ` with φ shifted by multiples of π/2.
pub fn circle_representative(v: &Matrix2<C64>) -> Result<CircleRepresentative> {
    projector_c2(v).ok_or(NkError::DegenerateBasis)?;
    let cost = |phi: f64, theta: f64| circle_residual(v, phi, theta).map_or(f64::INFINITY, |m| m.norm());
    let (np, nt) = (60usize, 30usize);
    let mut cells = Vec::with_capacity(np * (nt + 1));
    for i in 0..np {
        for j in 0..=nt {
            let phi = PI * i as f64 / np as f64;
            let theta = FRAC_PI_2 * j as f64 / nt as f64;
            cells.push((cost(phi, theta), phi, theta));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let in_range = |t: f64| (-1e-12..=FRAC_PI_2 + 1e-12).contains(&t);
    let mut best: Option<([f64; 2], f64)> = None;
    let mut consider = |x: [f64; 2], r: f64| {
        let t = x[1].rem_euclid(PI);
        let t = if t > PI - 1e-12 { t - PI } else { t };
        if in_range(t) && best.is_none_or(|b| r < b.1) {
            best = Some(([x[0], t.clamp(0.0, FRAC_PI_2)], r));
        }
    };
    for &(_, phi, theta) in cells.iter().take(6) {
        let (x, r) = circle_polish(v, [phi, theta]);
        consider(x, r);
        let t = x[1].rem_euclid(PI);
        if !in_range(t) {
            for k in 1..4 {
                let (y, ry) = circle_polish(v, [x[0] + k as f64 * FRAC_PI_2, PI - t]);
                consider(y, ry);
            }
        }
    }
    let (x, residual) = best.ok_or(NkError::DegenerateBasis)?;
    Ok(CircleRepresentative { phi: x[0].rem_euclid(PI), theta: x[1], residual })
}

/// Random element of `SLag(ℂ²)`: `A·ℝ²` for `A ∈ SU(2)`.
pub fn random_slag_c2<R: Rng>(rng: &mut R) -> Matrix2<C64> {
    let a = complex_normal(rng);
    let b = complex_normal(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Matrix2::new(a, -b.conj(), b, a.conj())
}
