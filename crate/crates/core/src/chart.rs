//! The nearly Kähler structure of CP³ on the chart `A₀ = {Z₀ ≠ 0}`.
//!
//! A real tangent vector is stored as its holomorphic components: `v = (v₁, v₂, v₃)`
//! stands for `Σ vₐ ∂/∂Zₐ + v̄ₐ ∂/∂Z̄ₐ`. The real coordinate directions are
//! `vₐ = 1` (∂/∂Re Zₐ) and `vₐ = i` (∂/∂Im Zₐ).

use nalgebra::{Matrix6, Vector4, Vector6};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Sub};

use crate::algebra::{c, CMat4, QuatMat2, Quaternion, C64, I, ONE, ZERO};
use crate::{NkError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub z: [C64; 3],
}

impl ChartPoint {
    pub fn new(z1: C64, z2: C64, z3: C64) -> Self {
        ChartPoint { z: [z1, z2, z3] }
    }
    pub fn real(z1: f64, z2: f64, z3: f64) -> Self {
        Self::new(c(z1, 0.0), c(z2, 0.0), c(z3, 0.0))
    }
    pub fn origin() -> Self {
        Self::real(0.0, 0.0, 0.0)
    }
    /// `|Z|² = 1 + |Z₁|² + |Z₂|² + |Z₃|²`.
    pub fn norm2(&self) -> f64 {
        1.0 + self.z.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
    pub fn is_finite(&self) -> bool {
        self.z.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
    pub fn hom(&self) -> HomPoint {
        HomPoint([ONE, self.z[0], self.z[1], self.z[2]])
    }
    pub fn to_real6(&self) -> Vector6<f64> {
        let z = &self.z;
        Vector6::new(z[0].re, z[0].im, z[1].re, z[1].im, z[2].re, z[2].im)
    }
    pub fn from_real6(x: &Vector6<f64>) -> Self {
        Self::new(c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5]))
    }
    /// Displace by `t·X` in the coordinates.
    pub fn shifted(&self, x: &TangentVec, t: f64) -> Self {
        Self::new(self.z[0] + x.v[0] * t, self.z[1] + x.v[1] * t, self.z[2] + x.v[2] * t)
    }
    pub fn dist(&self, o: &ChartPoint) -> f64 {
        (0..3).map(|a| (self.z[a] - o.z[a]).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Homogeneous coordinates `[Z₀, Z₁, Z₂, Z₃]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomPoint(pub [C64; 4]);

impl HomPoint {
    pub fn real(a: [f64; 4]) -> Self {
        HomPoint(a.map(|x| c(x, 0.0)))
    }
    pub fn as_vector(&self) -> Vector4<C64> {
        Vector4::from_column_slice(&self.0)
    }
    pub fn scaled(&self, s: C64) -> Self {
        HomPoint(self.0.map(|z| z * s))
    }
}

/// Divide through by `Z₀`.
pub fn hom_to_chart(h: &HomPoint) -> Result<ChartPoint> {
    let z0 = h.0[0];
    let scale = h.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || z0.norm() <= 1e-14 * scale {
        return Err(NkError::OutOfChart);
    }
    Ok(ChartPoint::new(h.0[1] / z0, h.0[2] / z0, h.0[3] / z0))
}

/// Image of a chart point under a linear map of ℂ⁴.
pub fn act(g: &CMat4, p: &ChartPoint) -> Result<ChartPoint> {
    let w = g * p.hom().as_vector();
    hom_to_chart(&HomPoint([w[0], w[1], w[2], w[3]]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub v: [C64; 3],
}

impl TangentVec {
    pub fn new(v1: C64, v2: C64, v3: C64) -> Self {
        TangentVec { v: [v1, v2, v3] }
    }
    pub fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO)
    }
    /// Real coordinate direction `k ∈ 0..6`: `∂/∂Re Z_{k/2+1}` for even `k`, `∂/∂Im` for odd.
    pub fn coord(k: usize) -> Self {
        let mut v = [ZERO; 3];
        v[k / 2] = if k % 2 == 0 { ONE } else { I };
        TangentVec { v }
    }
    pub fn to_real6(&self) -> Vector6<f64> {
        let v = &self.v;
        Vector6::new(v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im)
    }
    pub fn from_real6(x: &Vector6<f64>) -> Self {
        Self::new(c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5]))
    }
    pub fn norm_coords(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for TangentVec {
    type Output = TangentVec;
    fn add(self, o: TangentVec) -> TangentVec {
        TangentVec::new(self.v[0] + o.v[0], self.v[1] + o.v[1], self.v[2] + o.v[2])
    }
}
impl Sub for TangentVec {
    type Output = TangentVec;
    fn sub(self, o: TangentVec) -> TangentVec {
        TangentVec::new(self.v[0] - o.v[0], self.v[1] - o.v[1], self.v[2] - o.v[2])
    }
}
impl Mul<f64> for TangentVec {
    type Output = TangentVec;
    fn mul(self, s: f64) -> TangentVec {
        TangentVec::new(self.v[0] * s, self.v[1] * s, self.v[2] * s)
    }
}

/// Values `(s*ω₁(X), s*ω₂(X), s*ω₃(X))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoframeValue {
    pub c: [C64; 3],
}

impl CoframeValue {
    pub fn to_real6(&self) -> Vector6<f64> {
        let c = &self.c;
        Vector6::new(c[0].re, c[0].im, c[1].re, c[1].im, c[2].re, c[2].im)
    }
    pub fn from_real6(x: &Vector6<f64>) -> Self {
        CoframeValue { c: [c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5])] }
    }
}

/// The local section `s: A₀ → Sp(2)` built from `h₁ = 1 + jZ₁`, `h₂ = Z₂ + jZ₃`.
///
/// `|h₁|² = 1 + |Z₁|² ≥ 1`, so the section is defined on all of `A₀`.
pub fn section_s(p: &ChartPoint) -> Result<QuatMat2> {
    if !p.is_finite() {
        return Err(NkError::NonFinite);
    }
    let nz = p.norm2().sqrt();
    let h1 = Quaternion::new(ONE, p.z[0]);
    let h2 = Quaternion::new(p.z[1], p.z[2]);
    let a = (1.0 + h2.norm_sqr() / h1.norm_sqr()).powf(-0.5);
    let top_right = (h1.conj().inv() * h2.conj()).scale(-a);
    Ok(QuatMat2::new(
        h1.scale(1.0 / nz),
        top_right,
        h2.scale(1.0 / nz),
        Quaternion::complex(c(a, 0.0)),
    ))
}

/// Unitary coframe pulled back by [`section_s`].
pub fn coframe(p: &ChartPoint, x: &TangentVec) -> CoframeValue {
    let [z1, z2, z3] = p.z;
    let [v1, v2, v3] = x.v;
    let n2 = p.norm2();
    let q = 1.0 + z1.norm_sqr();
    let k = SQRT_2 / (n2 * q.sqrt());
    let c1 = ((z3.conj() - z1.conj() * z2) * v1 + v2 * q) * k;
    let c2 = ((-z2.conj() - z1.conj() * z3) * v1 + v3 * q) * k;
    let c3 = (v1.conj() - z3.conj() * v2.conj() + z2.conj() * v3.conj()) / n2;
    CoframeValue { c: [c1, c2, c3] }
}

/// The pullback formulas exactly as printed; they differ from [`coframe`] by
/// `(1+|Z₁|²)^{1/2}` in the first two components and are kept as a fixture.
pub fn coframe_printed(p: &ChartPoint, x: &TangentVec) -> CoframeValue {
    let mut cv = coframe(p, x);
    let q = (1.0 + p.z[0].norm_sqr()).sqrt();
    cv.c[0] *= q;
    cv.c[1] *= q;
    cv
}

/// `ω`-slots of `s⁻¹ ∂s/∂x_k` for the real coordinate `k`, by a five-point stencil.
pub fn section_pullback_fd(p: &ChartPoint, k: usize, step: f64) -> Result<CoframeValue> {
    let e = TangentVec::coord(k);
    let s = |t: f64| section_s(&p.shifted(&e, t));
    let d = (s(step)? - s(-step)?).scale(8.0) - (s(2.0 * step)? - s(-2.0 * step)?);
    let m = section_s(p)?.adjoint() * d.scale(1.0 / (12.0 * step));
    Ok(CoframeValue { c: McSlots::from_quat(&m).omega })
}

/// Real 6×6 matrix of `X ↦ c(X)` in the real coordinate bases.
pub fn coframe_matrix(p: &ChartPoint) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    for k in 0..6 {
        m.set_column(k, &coframe(p, &TangentVec::coord(k)).to_real6());
    }
    m
}

/// The tangent vector with coframe value `cv`.
pub fn coframe_inverse(p: &ChartPoint, cv: &CoframeValue) -> TangentVec {
    let m = coframe_matrix(p);
    let x = m.lu().solve(&cv.to_real6()).expect("coframe is invertible on the chart");
    TangentVec::from_real6(&x)
}

/// Nearly Kähler almost complex structure: multiplication by `i` on coframe values.
pub fn apply_j(p: &ChartPoint, x: &TangentVec) -> TangentVec {
    let cv = coframe(p, x);
    coframe_inverse(p, &CoframeValue { c: cv.c.map(|z| z * I) })
}

/// Sp(2)-valued Maurer–Cartan slots `[[iρ₁ + jω̄₃, −ω̄₁/√2 + jω₂/√2], [ω₁/√2 + jω₂/√2, iρ₂ + jτ]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSlots {
    pub rho1: f64,
    pub rho2: f64,
    pub tau: C64,
    pub omega: [C64; 3],
}

impl McSlots {
    pub fn to_quat(&self) -> QuatMat2 {
        let s = 1.0 / SQRT_2;
        let [w1, w2, w3] = self.omega;
        QuatMat2::new(
            Quaternion::new(c(0.0, self.rho1), w3.conj()),
            Quaternion::new(-w1.conj() * s, w2 * s),
            Quaternion::new(w1 * s, w2 * s),
            Quaternion::new(c(0.0, self.rho2), self.tau),
        )
    }
    /// Read off the slots; the (1,2) block and real parts of the diagonal are ignored.
    pub fn from_quat(m: &QuatMat2) -> Self {
        let e = &m.e;
        McSlots {
            rho1: e[0][0].z.im,
            rho2: e[1][1].z.im,
            tau: e[1][1].w,
            omega: [e[1][0].z * SQRT_2, e[1][0].w * SQRT_2, e[0][0].w.conj()],
        }
    }
}

/// `ω(a,b) = Σ Im(āᵢ bᵢ)` on coframe values.
pub fn omega_c3(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    (0..3).map(|i| (a[i].conj() * b[i]).im).sum()
}
pub fn omega_v_c3(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    (a[2].conj() * b[2]).im
}
pub fn metric_c3(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    (0..3).map(|i| (a[i] * b[i].conj()).re).sum()
}
/// `ψ = −i ω₁∧ω₂∧ω₃` evaluated as `−i det[a, b, c]`.
pub fn psi_c3(a: &[C64; 3], b: &[C64; 3], w: &[C64; 3]) -> C64 {
    let det = a[0] * (b[1] * w[2] - b[2] * w[1]) - a[1] * (b[0] * w[2] - b[2] * w[0])
        + a[2] * (b[0] * w[1] - b[1] * w[0]);
    -I * det
}

pub fn nk_omega(p: &ChartPoint, x: &TangentVec, y: &TangentVec) -> f64 {
    omega_c3(&coframe(p, x).c, &coframe(p, y).c)
}
pub fn omega_vertical(p: &ChartPoint, x: &TangentVec, y: &TangentVec) -> f64 {
    omega_v_c3(&coframe(p, x).c, &coframe(p, y).c)
}
pub fn metric_g(p: &ChartPoint, x: &TangentVec, y: &TangentVec) -> f64 {
    metric_c3(&coframe(p, x).c, &coframe(p, y).c)
}
pub fn nk_psi(p: &ChartPoint, x: &TangentVec, y: &TangentVec, w: &TangentVec) -> C64 {
    psi_c3(&coframe(p, x).c, &coframe(p, y).c, &coframe(p, w).c)
}

/// Metric components `g(∂ᵢ, ∂ⱼ)` in the six real coordinates.
pub fn metric_matrix(p: &ChartPoint) -> Matrix6<f64> {
    let m = coframe_matrix(p);
    m.transpose() * m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn section_examples() {
        let s = section_s(&ChartPoint::origin()).unwrap();
        assert!((s - QuatMat2::identity()).max_abs() < 1e-15);
        let s = section_s(&ChartPoint::real(0.0, SQRT_2, 0.0)).unwrap();
        let r3 = 3f64.sqrt();
        let want = [[1.0 / r3, -SQRT_2 / r3], [SQRT_2 / r3, 1.0 / r3]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(s.e[i][j].z, c(want[i][j], 0.0)) && s.e[i][j].w.norm() < 1e-15);
            }
        }
        assert!(section_s(&ChartPoint::real(f64::NAN, 0.0, 0.0)).is_err());
    }

    #[test]
    fn coframe_at_origin() {
        let o = ChartPoint::origin();
        let e = |a: usize| TangentVec::coord(2 * a);
        let r = coframe(&o, &e(1)).c;
        assert!(close(r[0], c(SQRT_2, 0.0)) && close(r[1], ZERO) && close(r[2], ZERO));
        let r = coframe(&o, &e(0)).c;
        assert!(close(r[0], ZERO) && close(r[1], ZERO) && close(r[2], ONE));
        let r = coframe(&o, &e(2)).c;
        assert!(close(r[0], ZERO) && close(r[1], c(SQRT_2, 0.0)) && close(r[2], ZERO));
        assert!((metric_g(&o, &e(1), &e(1)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hom_to_chart_examples() {
        let r2 = SQRT_2;
        let p = hom_to_chart(&HomPoint::real([1.0, 0.0, r2, 0.0])).unwrap();
        assert!(p.dist(&ChartPoint::real(0.0, r2, 0.0)) < 1e-15);
        let p = hom_to_chart(&HomPoint::real([2.0, 0.0, 0.0, 2.0])).unwrap();
        assert!(p.dist(&ChartPoint::real(0.0, 0.0, 1.0)) < 1e-15);
        assert_eq!(hom_to_chart(&HomPoint::real([0.0, 1.0, 0.0, 0.0])), Err(NkError::OutOfChart));
    }

    #[test]
    fn mc_slots_roundtrip() {
        let s = McSlots { rho1: 0.3, rho2: -1.1, tau: c(0.2, 0.7), omega: [c(1.0, 2.0), c(-0.5, 0.1), c(0.4, -0.9)] };
        let q = s.to_quat();
        assert!(q.sp2_residual() < 1e-15);
        let back = McSlots::from_quat(&q);
        assert!((back.rho1 - s.rho1).abs() < 1e-15 && (back.rho2 - s.rho2).abs() < 1e-15);
        assert!(close(back.tau, s.tau));
        for i in 0..3 {
            assert!(close(back.omega[i], s.omega[i]));
        }
    }
}
