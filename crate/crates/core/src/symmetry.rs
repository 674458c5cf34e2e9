//! SU(2) subgroups of Sp(2) acting on CP³: Killing fields, the moment-type maps
//! μ, ν, μ_V, special Lagrangian orbit tests, the orbit angle θ and slice scans.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::algebra::{c, expm, levi_civita, lstsq, pauli, rank_tol, tol, CMat4, QuatMat2, Quaternion, C64, I, ONE, ZERO};
use crate::chart::{
    coframe, metric_c3, nk_omega, nk_psi, omega_c3, omega_v_c3, psi_c3, ChartPoint, CoframeValue, TangentVec,
};
use crate::{NkError, Result};

/// Coefficient in `dν = c Σ μ_l ω(K^{ξ_l}, ·)` for the determinant convention of ψ.
pub const DNU_COEFF: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    K1,
    K2,
    K2Ext,
    K3,
}

impl GroupId {
    pub fn name(&self) -> &'static str {
        match self {
            GroupId::K1 => "k1",
            GroupId::K2 => "k2",
            GroupId::K2Ext => "k2ext",
            GroupId::K3 => "k3",
        }
    }
    pub fn parse(s: &str) -> Option<GroupId> {
        match s.to_ascii_lowercase().as_str() {
            "k1" => Some(GroupId::K1),
            "k2" => Some(GroupId::K2),
            "k2ext" | "k2_extended" | "u2" => Some(GroupId::K2Ext),
            "k3" => Some(GroupId::K3),
            _ => None,
        }
    }
}

/// Ordered generators; the su(2) triple is always the last three entries.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub id: GroupId,
    pub xis: Vec<CMat4>,
}

impl GeneratorSet {
    pub fn new(id: GroupId) -> Self {
        let xis = match id {
            GroupId::K1 => k1_generators().to_vec(),
            GroupId::K2 => k2_generators().to_vec(),
            GroupId::K2Ext => {
                let mut v = vec![xi0()];
                v.extend(k2_generators());
                v
            }
            GroupId::K3 => k3_generators().to_vec(),
        };
        GeneratorSet { id, xis }
    }
    pub fn su2(&self) -> [CMat4; 3] {
        let n = self.xis.len();
        [self.xis[n - 3], self.xis[n - 2], self.xis[n - 1]]
    }
    pub fn scaled(&self, s: f64) -> Self {
        GeneratorSet { id: self.id, xis: self.xis.iter().map(|x| x * c(s, 0.0)).collect() }
    }
    /// Sample `exp(Σ tᵢ ξᵢ)` from the su(2) part.
    pub fn group_element(&self, t: [f64; 3]) -> CMat4 {
        let [a, b, d] = self.su2();
        expm(&(a * c(t[0], 0.0) + b * c(t[1], 0.0) + d * c(t[2], 0.0)))
    }
}

fn diag_h(a: Quaternion, d: Quaternion) -> CMat4 {
    QuatMat2::diag(a, d).embed_c4()
}

/// `K₁ = {1} × Sp(1)`: `ξ = −½ diag_H(0, q)` for `q = i, j, k`.
pub fn k1_generators() -> [CMat4; 3] {
    let z = Quaternion::ZERO;
    [Quaternion::i(), Quaternion::j(), Quaternion::k()].map(|q| diag_h(z, q.scale(-0.5)))
}

/// A complex 2×2 matrix acting on `(q₁, q₂)` by complex scalars, i.e. the inclusion `ℂ² ⊂ ℍ²`.
pub fn complex_in_sp2(a: &nalgebra::Matrix2<C64>) -> CMat4 {
    let q = |r: usize, s: usize| Quaternion::complex(a[(r, s)]);
    QuatMat2::new(q(0, 0), q(0, 1), q(1, 0), q(1, 1)).embed_c4()
}

/// `K₂ = SU(2)` from `ℂ² ⊂ ℍ²`, ordered `(iσ₃, iσ₂, −iσ₁)/2`.
pub fn k2_generators() -> [CMat4; 3] {
    let [s1, s2, s3] = pauli();
    let h = c(0.0, 0.5);
    [complex_in_sp2(&(s3 * h)), complex_in_sp2(&(s2 * h)), complex_in_sp2(&(s1 * (-h)))]
}

/// `ξ₀ = diag_H(i, i)`, commuting with `K₂`.
pub fn xi0() -> CMat4 {
    diag_h(Quaternion::i(), Quaternion::i())
}

/// Chart slot `i` holds weight vector `e_{PERM[i]}`: `(Z₀,Z₁,Z₂,Z₃) = (e₃,e₀,e₁,e₂)`.
pub const K3_PERM: [usize; 4] = [3, 0, 1, 2];

/// The irreducible representation on `S³(ℂ²)` in the weight basis `e₀..e₃`.
pub fn k3_weight_family(a: C64, b: C64) -> CMat4 {
    let s3 = 3f64.sqrt();
    let (ab, bb) = (a.conj(), b.conj());
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    CMat4::new(
        a * a * a,
        -a * a * bb * s3,
        a * bb * bb * s3,
        -bb * bb * bb,
        a * a * b * s3,
        a * (na - 2.0 * nb),
        -bb * (2.0 * na - nb),
        ab * bb * bb * s3,
        a * b * b * s3,
        b * (2.0 * na - nb),
        ab * (na - 2.0 * nb),
        -ab * ab * bb * s3,
        b * b * b,
        ab * b * b * s3,
        ab * ab * b * s3,
        ab * ab * ab,
    )
}

/// [`k3_weight_family`] reordered into chart coordinates.
pub fn k3_family(a: C64, b: C64) -> CMat4 {
    let w = k3_weight_family(a, b);
    CMat4::from_fn(|i, j| w[(K3_PERM[i], K3_PERM[j])])
}

/// Derivatives of [`k3_family`] at `(1,0)` in the directions `ia`, `b`, `ib`.
///
/// The family is cubic in the curve parameter, so the five-point stencil is exact.
fn k3_directional_derivatives() -> [CMat4; 3] {
    let curve = |dir: usize, t: f64| match dir {
        0 => k3_family(c(1.0, t), ZERO),
        1 => k3_family(ONE, c(t, 0.0)),
        _ => k3_family(ONE, c(0.0, t)),
    };
    let h = 0.5;
    [0, 1, 2].map(|d| {
        (((curve(d, h) - curve(d, -h)) * c(8.0, 0.0)) - (curve(d, 2.0 * h) - curve(d, -2.0 * h))) / c(12.0 * h, 0.0)
    })
}

/// `K₃` generators `−½(D_{ia}, −D_b, D_{ib})`, normalised to `[ξᵢ,ξⱼ] = −ε_{ijk} ξ_k`.
pub fn k3_generators() -> [CMat4; 3] {
    let [dia, db, dib] = k3_directional_derivatives();
    let m = c(-0.5, 0.0);
    [dia * m, db * (-m), dib * m]
}

/// `K_a = W_a − Z_a W₀` with `W = ξ·(1, Z₁, Z₂, Z₃)`.
pub fn killing_field(xi: &CMat4, p: &ChartPoint) -> TangentVec {
    let w = xi * p.hom().as_vector();
    TangentVec::new(w[1] - p.z[0] * w[0], w[2] - p.z[1] * w[0], w[3] - p.z[2] * w[0])
}

/// Directional derivative `dK(v)` of [`killing_field`] in the chart.
pub fn killing_derivative(xi: &CMat4, p: &ChartPoint, v: &TangentVec) -> TangentVec {
    let w = xi * p.hom().as_vector();
    let dv = nalgebra::Vector4::new(ZERO, v.v[0], v.v[1], v.v[2]);
    let dw = xi * dv;
    TangentVec::new(
        dw[1] - v.v[0] * w[0] - p.z[0] * dw[0],
        dw[2] - v.v[1] * w[0] - p.z[1] * dw[0],
        dw[3] - v.v[2] * w[0] - p.z[2] * dw[0],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub mu: [f64; 3],
    pub nu: f64,
    pub mu_v: [f64; 3],
}

fn killing_coframes(xis: &[CMat4], p: &ChartPoint) -> Vec<[C64; 3]> {
    xis.iter().map(|x| coframe(p, &killing_field(x, p)).c).collect()
}

/// `μ`, `ν`, `μ_V` of an su(2) triple.
pub fn moment_of(triple: &[CMat4; 3], p: &ChartPoint) -> Result<MomentValue> {
    if !p.is_finite() {
        return Err(NkError::NonFinite);
    }
    let k = killing_coframes(triple, p);
    let pairs = [(1, 2), (2, 0), (0, 1)];
    Ok(MomentValue {
        mu: pairs.map(|(i, j)| omega_c3(&k[i], &k[j])),
        nu: psi_c3(&k[0], &k[1], &k[2]).im,
        mu_v: pairs.map(|(i, j)| omega_v_c3(&k[i], &k[j])),
    })
}

pub fn moment(gen: &GeneratorSet, p: &ChartPoint) -> Result<MomentValue> {
    moment_of(&gen.su2(), p)
}

/// `|Re ψ(K₁,K₂,K₃)|`.
pub fn reps_vanishing_check(gen: &GeneratorSet, p: &ChartPoint) -> f64 {
    let k = killing_coframes(&gen.su2(), p);
    psi_c3(&k[0], &k[1], &k[2]).re.abs()
}

fn fd_gradient(f: impl Fn(&ChartPoint) -> f64, p: &ChartPoint, step: f64) -> [f64; 6] {
    let mut g = [0.0; 6];
    for (k, gk) in g.iter_mut().enumerate() {
        let e = TangentVec::coord(k);
        let at = |t: f64| f(&p.shifted(&e, t));
        *gk = (8.0 * (at(step) - at(-step)) - (at(2.0 * step) - at(-2.0 * step))) / (12.0 * step);
    }
    g
}

/// Max over the six real directions of `|dν − DNU_COEFF Σ μ_l ω(K_l, ·)|`, by a five-point stencil.
pub fn dnu_identity_residual(gen: &GeneratorSet, p: &ChartPoint, step: f64) -> Result<f64> {
    dnu_identity_residual_with(gen, p, step, DNU_COEFF)
}

/// [`dnu_identity_residual`] with an explicit coefficient.
pub fn dnu_identity_residual_with(gen: &GeneratorSet, p: &ChartPoint, step: f64, coeff: f64) -> Result<f64> {
    let triple = gen.su2();
    let m = moment_of(&triple, p)?;
    let grad = fd_gradient(|q| moment_of(&triple, q).map(|m| m.nu).unwrap_or(f64::NAN), p, step);
    let ks: Vec<TangentVec> = triple.iter().map(|x| killing_field(x, p)).collect();
    let mut r: f64 = 0.0;
    for (k, gk) in grad.iter().enumerate() {
        let e = TangentVec::coord(k);
        let rhs: f64 = (0..3).map(|l| m.mu[l] * nk_omega(p, &ks[l], &e)).sum::<f64>() * coeff;
        r = r.max((gk - rhs).abs());
    }
    Ok(r)
}

/// Max residual of `dμ_k = −ω(K_k,·) + 3 Re ψ(K_i,K_j,·)` over `k` and the six real directions.
pub fn dmu_identity_residual(gen: &GeneratorSet, p: &ChartPoint, step: f64) -> Result<f64> {
    let triple = gen.su2();
    moment_of(&triple, p)?;
    let ks: Vec<TangentVec> = triple.iter().map(|x| killing_field(x, p)).collect();
    let mut r: f64 = 0.0;
    for (kk, (i, j)) in [(1usize, 2usize), (2, 0), (0, 1)].into_iter().enumerate() {
        let grad = fd_gradient(|q| moment_of(&triple, q).map(|m| m.mu[kk]).unwrap_or(f64::NAN), p, step);
        for (d, gd) in grad.iter().enumerate() {
            let e = TangentVec::coord(d);
            let rhs = -nk_omega(p, &ks[kk], &e) + 3.0 * nk_psi(p, &ks[i], &ks[j], &e).re;
            r = r.max((gd - rhs).abs());
        }
    }
    Ok(r)
}

/// `R` with `μ(g·p) = R μ(p)` for `g` in the group generated by the triple.
pub fn adjoint_rotation(gen: &GeneratorSet, g: &CMat4) -> Matrix3<f64> {
    let triple = gen.su2();
    let ginv = g.adjoint();
    let basis = DMatrix::from_fn(32, 3, |r, col| real_entry(&triple[col], r));
    let mut a = Matrix3::zeros();
    for i in 0..3 {
        let ad = ginv * triple[i] * g;
        let rhs: Vec<f64> = (0..32).map(|r| real_entry(&ad, r)).collect();
        let (x, _) = lstsq(&basis, &rhs);
        for k in 0..3 {
            a[(k, i)] = x[k];
        }
    }
    a.transpose()
}

fn real_entry(m: &CMat4, r: usize) -> f64 {
    let z = m[((r % 16) / 4, r % 4)];
    if r < 16 {
        z.re
    } else {
        z.im
    }
}

/// Coframe images (as ℝ⁶ columns) of the Killing fields of `gens` at `p`.
pub fn killing_matrix(gens: &[CMat4], p: &ChartPoint) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, gens.len());
    for (j, x) in gens.iter().enumerate() {
        let v = coframe(p, &killing_field(x, p)).to_real6();
        m.set_column(j, &nalgebra::DVector::from_column_slice(v.as_slice()));
    }
    m
}

/// Orbit dimension at `p` and an orthonormal frame of the orbit tangent space, as coframe values.
pub fn orbit_frame(gens: &[CMat4], p: &ChartPoint, rel_tol: f64) -> (usize, Vec<CoframeValue>) {
    let m = killing_matrix(gens, p);
    let r = rank_tol(&m, rel_tol);
    if r == 0 {
        return (0, Vec::new());
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let frame = order[..r]
        .iter()
        .map(|&k| {
            let col = u.column(k);
            CoframeValue::from_real6(&nalgebra::Vector6::from_iterator(col.iter().copied()))
        })
        .collect();
    (r, frame)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlDiagnostics {
    pub dim: usize,
    /// `max |ω(K_a, K_b)| / (|K_a||K_b|)` over all generator pairs.
    pub omega_max: f64,
    /// `|Im ψ|` on an orthonormal tangent triple; 1 for special Lagrangian.
    pub im_psi_frame: f64,
    pub re_psi_frame: f64,
    pub is_sl: bool,
    pub reason: Option<String>,
}

pub fn is_sl_orbit(gens: &[CMat4], p: &ChartPoint, tol: f64) -> SlDiagnostics {
    let (dim, frame) = orbit_frame(gens, p, tol::RANK_REL);
    let ks = killing_coframes(gens, p);
    let mut omega_max: f64 = 0.0;
    for a in 0..ks.len() {
        for b in a + 1..ks.len() {
            let na = metric_c3(&ks[a], &ks[a]).sqrt();
            let nb = metric_c3(&ks[b], &ks[b]).sqrt();
            if na * nb > 0.0 {
                omega_max = omega_max.max(omega_c3(&ks[a], &ks[b]).abs() / (na * nb));
            }
        }
    }
    if dim != 3 {
        return SlDiagnostics {
            dim,
            omega_max,
            im_psi_frame: 0.0,
            re_psi_frame: 0.0,
            is_sl: false,
            reason: Some(format!("orbit has dimension {dim}")),
        };
    }
    let psi = psi_c3(&frame[0].c, &frame[1].c, &frame[2].c);
    let lag_ok = omega_max < tol;
    let vol_ok = (psi.im.abs() - 1.0).abs() < tol;
    let reason = if !lag_ok {
        Some(format!("ω does not vanish on the orbit ({omega_max:.3e})"))
    } else if !vol_ok {
        Some(format!("|Im ψ| = {:.6} on an orthonormal frame", psi.im.abs()))
    } else {
        None
    };
    SlDiagnostics { dim, omega_max, im_psi_frame: psi.im.abs(), re_psi_frame: psi.re.abs(), is_sl: reason.is_none(), reason }
}

/// Complex rank of the three Killing fields of the su(2) triple (in coframe values).
pub fn complex_rank(gen: &GeneratorSet, p: &ChartPoint, rel_tol: f64) -> usize {
    let k = killing_coframes(&gen.su2(), p);
    let m = crate::algebra::CMat::from_fn(3, 3, |i, j| k[j][i]);
    crate::algebra::rank_tol_complex(&m, rel_tol) / 2
}

fn lagrangian_frame(gens: &[CMat4], p: &ChartPoint) -> Result<Vec<CoframeValue>> {
    let (dim, frame) = orbit_frame(gens, p, tol::RANK_REL);
    if dim != 3 {
        return Err(NkError::OrbitDimension(dim));
    }
    for a in 0..3 {
        for b in a + 1..3 {
            let w = omega_c3(&frame[a].c, &frame[b].c);
            if w.abs() > 1e-8 {
                return Err(NkError::NotSpecialLagrangian(format!("ω = {w:.3e} on the tangent frame")));
            }
        }
    }
    Ok(frame)
}

/// Angle of an orthonormal Lagrangian frame from the vertical components `c₃`.
///
/// With `m_re`, `m_im ∈ ℝ³` the real and imaginary parts of `c₃` over the frame,
/// `sin 2θ = √((|m_re|²−|m_im|²)² + 4(m_re·m_im)²)` and `cos 2θ = 2|m_re × m_im|`.
pub fn theta_from_frame(frame: &[CoframeValue]) -> f64 {
    let m_re = Vector3::from_iterator(frame.iter().map(|f| f.c[2].re));
    let m_im = Vector3::from_iterator(frame.iter().map(|f| f.c[2].im));
    let (g11, g22, g12) = (m_re.norm_squared(), m_im.norm_squared(), m_re.dot(&m_im));
    let s2 = ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt();
    let c2 = 2.0 * m_re.cross(&m_im).norm();
    0.5 * s2.atan2(c2)
}

/// θ ∈ [0, π/4] of the orbit through `p`.
pub fn theta_at(gens: &[CMat4], p: &ChartPoint) -> Result<f64> {
    Ok(theta_from_frame(&lagrangian_frame(gens, p)?))
}

/// θ from `½|cos 2θ| = ‖w₁‖ |ω_V(w₂,w₃)| / |Im ψ(w₁,w₂,w₃)|` with `w₁` spanning the
/// kernel of the vertical projection; π/4 when that kernel is 2-dimensional.
pub fn theta_by_formula(gens: &[CMat4], p: &ChartPoint) -> Result<f64> {
    let frame = lagrangian_frame(gens, p)?;
    let m_re = Vector3::from_iterator(frame.iter().map(|f| f.c[2].re));
    let m_im = Vector3::from_iterator(frame.iter().map(|f| f.c[2].im));
    let a = m_re.cross(&m_im);
    let scale = m_re.norm().max(m_im.norm()).powi(2).max(f64::MIN_POSITIVE);
    if a.norm() <= 1e-8 * scale {
        return Ok(FRAC_PI_4);
    }
    let comb = |v: &Vector3<f64>| {
        let mut out = [ZERO; 3];
        for (k, f) in frame.iter().enumerate() {
            for i in 0..3 {
                out[i] += f.c[i] * v[k];
            }
        }
        out
    };
    let a = a.normalize();
    let seed = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let b = (seed - a * a.dot(&seed)).normalize();
    let d = a.cross(&b);
    let (w1, w2, w3) = (comb(&a), comb(&b), comb(&d));
    let ratio = metric_c3(&w1, &w1).sqrt() * omega_v_c3(&w2, &w3).abs() / psi_c3(&w1, &w2, &w3).im.abs();
    let cos2 = (2.0 * ratio).clamp(-1.0, 1.0);
    Ok(0.5 * cos2.acos())
}

// ---------------------------------------------------------------------------
// Closed forms on slices

/// `f = ¼|Z|⁻²(−2(1+|Z₁|²) + |Z₂|² + |Z₃|²)`; its level sets are the Sp(1)×Sp(1) orbits.
pub fn k1_f(p: &ChartPoint) -> f64 {
    let [z1, z2, z3] = p.z;
    0.25 / p.norm2() * (-2.0 * (1.0 + z1.norm_sqr()) + z2.norm_sqr() + z3.norm_sqr())
}

pub fn k1_closed_form(p: &ChartPoint) -> MomentValue {
    let [z1, z2, z3] = p.z;
    let n2 = p.norm2();
    let f = k1_f(p);
    let m23 = -C64::new(0.0, 2.0) * z2 * z3.conj() * (f / n2);
    MomentValue {
        mu: [-(z3.norm_sqr() - z2.norm_sqr()) * f / n2, m23.re, m23.im],
        nu: -0.5 * (1.0 + z1.norm_sqr()) * (z2.norm_sqr() + z3.norm_sqr()).powi(2) / n2.powi(3),
        mu_v: [f64::NAN; 3],
    }
}

/// `ν = −|Z₁ + Z₂Z₃|²/|Z|⁴` (with `Z₀ = 1`).
pub fn k2_nu_closed_form(p: &ChartPoint) -> f64 {
    -(p.z[0] + p.z[1] * p.z[2]).norm_sqr() / p.norm2().powi(2)
}

/// μ on the K₂ slice `(Z₁, Z₂, Z₃) = (r, 0, Z₃)`.
pub fn k2_slice_mu(r: f64, z3: C64) -> [f64; 3] {
    let t2 = z3.norm_sqr();
    let n4 = (1.0 + r * r + t2).powi(2);
    let mu1 = -0.5 * (-1.0 + r.powi(4) + 4.0 * t2 - t2 * t2) / n4;
    let w = -I * z3 * (r * (-2.0 + r * r + t2) / n4);
    [mu1, w.re, -w.im]
}

/// μ and ν on the K₃ slice `(Z₁, Z₂, Z₃) = (s e^{iφ}, r, 0)`.
pub fn k3_slice_closed_form(r: f64, s: f64, phi: f64) -> ([f64; 3], f64) {
    let s3 = 3f64.sqrt();
    let (r2, s2) = (r * r, s * s);
    let n2 = 1.0 + r2 + s2;
    let n4 = n2 * n2;
    let mu1 = 0.5 * (5.0 * r2 * r2 - 4.0 * r2 * s2 - 16.0 * r2 - 3.0 * s2 * s2 + 3.0) / n4;
    let mu2 = r * s * phi.sin() * (r * (s3 * r - 9.0) + s3 * (s2 - 8.0)) / n4;
    let mu3 = r * s * phi.cos() * (r * (-s3 * r - 9.0) - s3 * (s2 - 8.0)) / n4;
    let nu = (4.0 * r2 * r2 * (s2 - 5.0) - 12.0 * s3 * r2 * r * s2 * (2.0 * phi).cos() + 3.0 * r2 * (s2 + 4.0)
        - 9.0 * (s2 * s2 + s2))
        / (n4 * n2);
    ([mu1, mu2, mu3], nu)
}

pub fn k3_slice_point(r: f64, s: f64, phi: f64) -> ChartPoint {
    ChartPoint::new(C64::from_polar(s, phi), c(r, 0.0), ZERO)
}

// ---------------------------------------------------------------------------
// Named points and printed fixtures

pub mod points {
    use super::*;

    pub fn p11() -> ChartPoint {
        ChartPoint::real(0.0, SQRT_2, 0.0)
    }
    /// `r = 0`, `|Z₃|² = 2 + √3` on the K₂ slice.
    pub fn p21() -> ChartPoint {
        ChartPoint::real(0.0, 0.0, (2.0 + 3f64.sqrt()).sqrt())
    }
    /// The other `r = 0` root, `|Z₃|² = 2 − √3`; image of [`p21`] under right multiplication by `j`.
    pub fn p21_j() -> ChartPoint {
        ChartPoint::real(0.0, 0.0, (2.0 - 3f64.sqrt()).sqrt())
    }
    /// `[1, 1, 0, 0]`.
    pub fn p22() -> ChartPoint {
        ChartPoint::real(1.0, 0.0, 0.0)
    }
    /// The Chiang point; `[1,0,0,1]` in the weight basis.
    pub fn p31() -> ChartPoint {
        ChartPoint::real(1.0, 0.0, 0.0)
    }
    /// Slice root `(r, s) = (1/√5, 0)`.
    pub fn p32() -> ChartPoint {
        ChartPoint::real(0.0, 1.0 / 5f64.sqrt(), 0.0)
    }
}

/// Closed-form values in the normalisation `[ξᵢ,ξⱼ] = −ε_{ijk} ξ_k`.
pub mod values {
    /// `ν(P₁₁)` for K₁.
    pub const NU_P11: f64 = -2.0 / 27.0;
    /// `ν(P₂₂)` for K₂.
    pub const NU_P22: f64 = -0.25;
    pub const NU_P31: f64 = -9.0 / 4.0;
    pub const NU_P32: f64 = 25.0 / 27.0;
    /// Printed extremes; generators scaled by 2 multiply ν by 8.
    pub const NU_P31_PRINTED: f64 = -18.0;
    pub const NU_P32_PRINTED: f64 = 200.0 / 27.0;
    pub const GENERATOR_SCALE_PRINTED: f64 = 2.0;
    pub const MU_V_P32: [f64; 3] = [-7.0 / 18.0, 0.0, 0.0];
    pub const MU_V_P32_PRINTED: [f64; 3] = [-14.0 / 9.0, 0.0, 0.0];

    pub fn theta_o32() -> f64 {
        0.5 * (7.0 * 2f64.sqrt() / (5.0 * 5f64.sqrt())).acos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixtureStatus {
    Match,
    MismatchDocumented,
}

/// A printed coordinate formula for a Killing field, compared against direct differentiation.
pub struct PrintedKilling {
    pub group: GroupId,
    pub label: &'static str,
    /// Index into `GeneratorSet::xis`.
    pub index: usize,
    pub status: FixtureStatus,
    /// `printed = ratio · computed` when the status is `Match`.
    pub ratio: f64,
    pub field: fn(&ChartPoint) -> TangentVec,
}

/// `Re(V·∂)` as a real vector field has holomorphic part `V/2`, `Im(V·∂)` has `−iV/2`.
fn re_field(v: [C64; 3], k: f64) -> TangentVec {
    TangentVec::new(v[0] * (k / 2.0), v[1] * (k / 2.0), v[2] * (k / 2.0))
}
fn im_field(v: [C64; 3], k: f64) -> TangentVec {
    let f = -I * (k / 2.0);
    TangentVec::new(v[0] * f, v[1] * f, v[2] * f)
}

/// `K^{ξ₂} + iK^{ξ₃}` of K₂ is printed as a complex combination with a stray `Z₃` term and
/// is not a fixture.
pub fn printed_killing_fixtures() -> Vec<PrintedKilling> {
    vec![
        PrintedKilling {
            group: GroupId::K1,
            label: "K1 ξ1 = −Im(Z2∂2 − Z3∂3)",
            index: 0,
            status: FixtureStatus::Match,
            ratio: -1.0,
            field: |p| im_field([ZERO, p.z[1], -p.z[2]], -1.0),
        },
        PrintedKilling {
            group: GroupId::K1,
            label: "K1 ξ2 = Re(Z3∂2 − Z2∂3)",
            index: 1,
            status: FixtureStatus::Match,
            ratio: 1.0,
            field: |p| re_field([ZERO, p.z[2], -p.z[1]], 1.0),
        },
        PrintedKilling {
            group: GroupId::K1,
            label: "K1 ξ3 = Im(Z3∂2 + Z2∂3)",
            index: 2,
            status: FixtureStatus::Match,
            ratio: -1.0,
            field: |p| im_field([ZERO, p.z[2], p.z[1]], 1.0),
        },
        PrintedKilling {
            group: GroupId::K2Ext,
            label: "K2 ξ0 = 2Re(iZ1∂1)",
            index: 0,
            status: FixtureStatus::MismatchDocumented,
            ratio: f64::NAN,
            field: |p| re_field([I * p.z[0], ZERO, ZERO], 2.0),
        },
        PrintedKilling {
            group: GroupId::K2Ext,
            label: "K2 ξ1 = 2Re(−2i(Z1∂1 + Z2∂2))",
            index: 1,
            status: FixtureStatus::Match,
            ratio: 2.0,
            field: |p| re_field([-2.0 * I * p.z[0], -2.0 * I * p.z[1], ZERO], 2.0),
        },
        PrintedKilling {
            group: GroupId::K3,
            label: "K3 ξ1 = 2Im(3Z1∂1 + 2Z2∂2 + Z3∂3)",
            index: 0,
            status: FixtureStatus::Match,
            ratio: 1.0,
            field: |p| im_field([p.z[0] * 3.0, p.z[1] * 2.0, p.z[2]], 2.0),
        },
        PrintedKilling {
            group: GroupId::K3,
            label: "K3 ξ2 = Re(...)",
            index: 1,
            status: FixtureStatus::Match,
            ratio: 1.0,
            field: |p| {
                let s3 = 3f64.sqrt();
                let [z1, z2, z3] = p.z;
                re_field(
                    [
                        -(z1 * z3 + z2) * s3,
                        z1 * s3 - (c(2.0, 0.0) + z2 * s3) * z3,
                        z2 * 2.0 - (ONE + z3 * z3) * s3,
                    ],
                    1.0,
                )
            },
        },
        PrintedKilling {
            group: GroupId::K3,
            label: "K3 ξ3 = Im(...)",
            index: 2,
            status: FixtureStatus::Match,
            ratio: 1.0,
            field: |p| {
                let s3 = 3f64.sqrt();
                let [z1, z2, z3] = p.z;
                im_field(
                    [
                        (-z1 * z3 + z2) * s3,
                        z1 * s3 + (c(2.0, 0.0) - z2 * s3) * z3,
                        z2 * 2.0 - (-ONE + z3 * z3) * s3,
                    ],
                    1.0,
                )
            },
        },
    ]
}

/// Best real `λ` with `printed ≈ λ·computed` over sample points, and the relative misfit.
pub fn fixture_fit(fx: &PrintedKilling, pts: &[ChartPoint]) -> (f64, f64) {
    let gen = GeneratorSet::new(fx.group);
    let xi = gen.xis[fx.index];
    let (mut num, mut den) = (0.0, 0.0);
    let mut pairs = Vec::new();
    for p in pts {
        let a = (fx.field)(p).to_real6();
        let b = killing_field(&xi, p).to_real6();
        num += a.dot(&b);
        den += b.dot(&b);
        pairs.push((a, b));
    }
    let lam = num / den;
    let mut mis: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, b) in pairs {
        mis = mis.max((a - b * lam).camax());
        scale = scale.max(a.camax());
    }
    (lam, mis / scale.max(f64::MIN_POSITIVE))
}

// ---------------------------------------------------------------------------
// Slice scans

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub n: usize,
    /// Phase of `Z₁` on the K₃ slice.
    pub phi: f64,
}

impl GridSpec {
    pub fn default_for(id: GroupId) -> Self {
        match id {
            GroupId::K1 => GridSpec { lo: [0.0, 0.0], hi: [3.0, 0.0], n: 31, phi: 0.0 },
            _ => GridSpec { lo: [0.0, 0.0], hi: [5.0, 5.0], n: 400, phi: 0.0 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceRoot {
    pub group: GroupId,
    /// `(r, s)` for K₃, `(r, |Z₃|)` for K₂, `(|Z₁|, |Z₂|)` on the `f = 0` locus for K₁.
    pub coords: [f64; 2],
    pub point: ChartPoint,
    pub mu: [f64; 3],
    pub nu: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Max difference between the closed-form slice μ and the general contraction.
    pub closed_form_gap: f64,
    pub tag: String,
}

fn slice_system(id: GroupId, phi: f64) -> impl Fn(f64, f64) -> [f64; 3] {
    move |a: f64, b: f64| match id {
        GroupId::K3 => {
            let (mu, _) = k3_slice_closed_form(a, b, phi);
            let n4 = (1.0 + a * a + b * b).powi(2);
            mu.map(|m| m * n4)
        }
        _ => {
            let n4 = (1.0 + a * a + b * b).powi(2);
            k2_slice_mu(a, c(b, 0.0)).map(|m| m * n4)
        }
    }
}

fn slice_point(id: GroupId, a: f64, b: f64, phi: f64) -> ChartPoint {
    match id {
        GroupId::K3 => k3_slice_point(a, b, phi),
        _ => ChartPoint::real(a, 0.0, b),
    }
}

/// Damped Gauss–Newton on a 3-component system in two unknowns.
fn polish(f: &impl Fn(f64, f64) -> [f64; 3], mut x: [f64; 2]) -> ([f64; 2], usize, f64) {
    let norm = |v: &[f64; 3]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let mut fx = f(x[0], x[1]);
    let mut it = 0;
    for _ in 0..60 {
        let r = norm(&fx);
        if r < 1e-15 {
            break;
        }
        it += 1;
        let h = 1e-7;
        let mut jac = DMatrix::zeros(3, 2);
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (f(xp[0], xp[1]), f(xm[0], xm[1]));
            for i in 0..3 {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let (dx, _) = lstsq(&jac, &fx);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-6 {
            let xn = [x[0] - t * dx[0], x[1] - t * dx[1]];
            let fnew = f(xn[0], xn[1]);
            if norm(&fnew) < r {
                x = xn;
                fx = fnew;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, it, norm(&fx))
}

fn tag_root(id: GroupId, a: f64, b: f64) -> String {
    let near = |x: f64, y: f64| (a - x).abs() < 1e-6 && (b - y).abs() < 1e-6;
    let s3 = 3f64.sqrt();
    match id {
        GroupId::K3 if near(0.0, 1.0) => "P31 (U(1) orbit of the Chiang point)".into(),
        GroupId::K3 if near(s3, 0.0) => "K3 orbit of P31".into(),
        GroupId::K3 if near(1.0 / 5f64.sqrt(), 0.0) => "P32".into(),
        GroupId::K2 | GroupId::K2Ext if near(1.0, 0.0) => "P22".into(),
        GroupId::K2 | GroupId::K2Ext if near(0.0, (2.0 + s3).sqrt()) => "P21".into(),
        GroupId::K2 | GroupId::K2Ext if near(0.0, (2.0 - s3).sqrt()) => "P21 j-image".into(),
        _ => "unclassified".into(),
    }
}

/// Zeros of μ on the slice of `id`.
///
/// K₂/K₃: cells of an `n×n` grid on which every μ-component's corner values straddle zero
/// are polished by Gauss–Newton on the closed-form slice polynomials and deduplicated at
/// distance `dedupe`. K₁: `n` samples of the `f = 0` locus `|Z₂|² = 2(1+|Z₁|²)`, `Z₃ = 0`.
pub fn scan_slice(id: GroupId, grid: &GridSpec, dedupe: f64) -> Result<Vec<SliceRoot>> {
    if grid.n == 0 || !(grid.hi[0] >= grid.lo[0]) || !(grid.hi[1] >= grid.lo[1]) {
        return Err(NkError::InvalidInput("empty grid".into()));
    }
    let gen = GeneratorSet::new(id);
    if id == GroupId::K1 {
        let mut out = Vec::new();
        for i in 0..grid.n {
            let a = if grid.n == 1 { grid.lo[0] } else { grid.lo[0] + (grid.hi[0] - grid.lo[0]) * i as f64 / (grid.n - 1) as f64 };
            let b = (2.0 * (1.0 + a * a)).sqrt();
            let p = ChartPoint::real(a, b, 0.0);
            let m = moment(&gen, &p)?;
            let cf = k1_closed_form(&p);
            let gap = (0..3).map(|k| (cf.mu[k] - m.mu[k]).abs()).fold((cf.nu - m.nu).abs(), f64::max);
            out.push(SliceRoot {
                group: id,
                coords: [a, b],
                point: p,
                mu: m.mu,
                nu: m.nu,
                iterations: 0,
                residual: m.mu.iter().map(|x| x.abs()).fold(k1_f(&p).abs(), f64::max),
                closed_form_gap: gap,
                tag: if i == 0 && a == 0.0 { "P11".into() } else { "f = 0 locus".into() },
            });
        }
        return Ok(out);
    }
    let f = slice_system(id, grid.phi);
    let n = grid.n;
    let (dx, dy) = ((grid.hi[0] - grid.lo[0]) / n as f64, (grid.hi[1] - grid.lo[1]) / n as f64);
    let mut vals = vec![[0.0; 3]; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            vals[i * (n + 1) + j] = f(grid.lo[0] + i as f64 * dx, grid.lo[1] + j as f64 * dy);
        }
    }
    let mut roots: Vec<SliceRoot> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let straddles = (0..3).all(|k| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &(a, b) in &corners {
                    let v = vals[a * (n + 1) + b][k];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                lo <= 0.0 && hi >= 0.0
            });
            if !straddles {
                continue;
            }
            let start = [grid.lo[0] + (i as f64 + 0.5) * dx, grid.lo[1] + (j as f64 + 0.5) * dy];
            let (x, iters, res) = polish(&f, start);
            if res > 1e-12 {
                continue;
            }
            let x = [x[0].abs(), x[1].abs()];
            let eps = 1e-9;
            if x[0] < grid.lo[0] - eps || x[0] > grid.hi[0] + eps || x[1] < grid.lo[1] - eps || x[1] > grid.hi[1] + eps {
                continue;
            }
            if roots.iter().any(|r| ((r.coords[0] - x[0]).powi(2) + (r.coords[1] - x[1]).powi(2)).sqrt() < dedupe) {
                continue;
            }
            let p = slice_point(id, x[0], x[1], grid.phi);
            let m = moment(&gen, &p)?;
            let closed = match id {
                GroupId::K3 => k3_slice_closed_form(x[0], x[1], grid.phi).0,
                _ => k2_slice_mu(x[0], c(x[1], 0.0)),
            };
            let gap = (0..3).map(|k| (closed[k] - m.mu[k]).abs()).fold(0.0, f64::max);
            roots.push(SliceRoot {
                group: id,
                coords: x,
                point: p,
                mu: m.mu,
                nu: m.nu,
                iterations: iters,
                residual: res,
                closed_form_gap: gap,
                tag: tag_root(id, x[0], x[1]),
            });
        }
    }
    roots.sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap());
    Ok(roots)
}

/// `(e_i, e_j) ↦ −ε_{ijk}` structure constants of the su(2) triples, `c[k][i][j]`.
pub fn su2_structure_constants() -> [[[f64; 3]; 3]; 3] {
    let mut c = [[[0.0; 3]; 3]; 3];
    for (k, ck) in c.iter_mut().enumerate() {
        for (i, row) in ck.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = -levi_civita(i, j, k);
            }
        }
    }
    c
}
