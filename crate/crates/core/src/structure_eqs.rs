//! Structure equations of a special Lagrangian in the θ-gauge, and the Bonnet-type
//! reconstruction of homogeneous solutions as Lie subalgebras of `sp(2)`.
//!
//! On the reduced bundle the forms are `ρ₁, ρ₂` (real), `τ` (complex) and `σ = T_θ⁻¹ ω`
//! (real on a Lagrangian). The gauge-transformed connection is
//! `φ = T_θ⁻¹ A_ω T_θ + T_θ⁻¹ dT_θ = α + iβ` with `β_ij = h_ijk σ_k`.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::algebra::{c, flatten_real, lstsq, rank_tol, CMat3, CMat4, QuatMat2, Quaternion, C64, I, ZERO};
use crate::chart::{ChartPoint, McSlots};
use crate::homogeneous::{cubic_invariants, second_fundamental_form, CubicForm, SymmetryOrder};
use crate::linear_model::{t_theta, t_theta_derivative};
use crate::symmetry::{is_sl_orbit, points, theta_at, GeneratorSet, GroupId};
use crate::{NkError, Result};

/// `C = H_TO_C · h`: the structure-equation tensor is the fundamental cubic itself.
/// Calibrated on the Chiang example (‖h‖² = ‖C‖² = 8/3).
pub const H_TO_C: f64 = 1.0;

/// Values of `ρ₁, ρ₂, τ` on one tangent direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionValue {
    pub rho1: f64,
    pub rho2: f64,
    pub tau: C64,
    /// Max residual of the β-matching system that produced this value.
    pub residual: f64,
}

impl ConnectionValue {
    pub fn new(rho1: f64, rho2: f64, tau: C64) -> Self {
        ConnectionValue { rho1, rho2, tau, residual: 0.0 }
    }
    pub fn zero() -> Self {
        Self::new(0.0, 0.0, ZERO)
    }
}

/// Connection form on `Sp(2)` in the unitary frame.
pub fn a_omega(cv: &ConnectionValue) -> CMat3 {
    let (r1, r2, t) = (cv.rho1, cv.rho2, cv.tau);
    CMat3::new(
        I * (r2 - r1),
        -t.conj(),
        ZERO,
        t,
        -I * (r1 + r2),
        ZERO,
        ZERO,
        ZERO,
        I * (2.0 * r1),
    )
}

/// `φ = T_θ⁻¹ A_ω T_θ + T_θ⁻¹ T_θ' dθ` on one direction.
pub fn phi_matrix(theta: f64, cv: &ConnectionValue, dtheta: f64) -> CMat3 {
    let t = t_theta(theta);
    let ti = t.adjoint();
    ti * a_omega(cv) * t + ti * t_theta_derivative(theta) * c(dtheta, 0.0)
}

/// `(α, β) = (Re φ, Im φ)`.
pub fn alpha_beta_from_connection(theta: f64, cv: &ConnectionValue, dtheta: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let p = phi_matrix(theta, cv, dtheta);
    (p.map(|z| z.re), p.map(|z| z.im))
}

/// The α, β tables entry by entry as displayed. Their first rows disagree with the gauge
/// formula (which makes α antisymmetric and β symmetric); kept for comparison.
pub fn alpha_beta_printed(theta: f64, cv: &ConnectionValue, dtheta: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let s = 1.0 / SQRT_2;
    let t = cv.tau;
    let e = C64::from_polar(1.0, theta);
    let em = C64::from_polar(1.0, -theta);
    let g = 0.5 * (3.0 * cv.rho1 + cv.rho2);
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let a01 = I * e * t.conj();
    let a02 = em * t.conj();
    let a10 = I * e * t;
    let a20 = em * t;
    let alpha = Matrix3::new(0.0, s * a01.re, -s * a02.re, s * a10.re, 0.0, g * c2, s * a20.re, -g * c2, 0.0);
    let beta = Matrix3::new(
        -cv.rho1 + cv.rho2,
        s * a01.im,
        -s * a02.im,
        s * a10.im,
        0.5 * (cv.rho1 - cv.rho2 - 2.0 * dtheta),
        g * s2,
        s * a20.im,
        g * s2,
        0.5 * (cv.rho1 - cv.rho2 + 2.0 * dtheta),
    );
    (alpha, beta)
}

/// Coefficient tables of `Rσ∧σ` and `Sσ∧σ`: `r[i][j][p]` multiplies the `p`-th basis
/// 2-form in the order `σ₂∧σ₃, σ₁∧σ₃, σ₁∧σ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTables {
    pub r: [[[f64; 3]; 3]; 3],
    pub s: [[[f64; 3]; 3]; 3],
}

pub fn curvature_rs(theta: f64) -> CurvatureTables {
    let (c2, s2, s4) = ((2.0 * theta).cos(), (2.0 * theta).sin(), (4.0 * theta).sin());
    let mut r = [[[0.0; 3]; 3]; 3];
    r[0][1] = [0.0, -0.5 * s2, 0.5];
    r[0][2] = [0.0, 0.5, -0.5 * s2];
    r[1][0] = [0.0, 0.5 * s2, -0.5];
    r[2][0] = [0.0, -0.5, 0.5 * s2];
    r[1][2] = [2.5 * c2 * c2, 0.0, 0.0];
    r[2][1] = [-2.5 * c2 * c2, 0.0, 0.0];
    let mut s = [[[0.0; 3]; 3]; 3];
    s[0][0] = [-c2, 0.0, 0.0];
    s[0][1] = [0.0, -0.5 * c2, 0.0];
    s[1][0] = s[0][1];
    s[0][2] = [0.0, 0.0, 0.5 * c2];
    s[2][0] = s[0][2];
    s[1][1] = [0.5 * c2, 0.0, 0.0];
    s[1][2] = [1.25 * s4, 0.0, 0.0];
    s[2][1] = s[1][2];
    s[2][2] = [0.5 * c2, 0.0, 0.0];
    CurvatureTables { r, s }
}

/// Symmetric trace-free `h` from `x = h₂₂₁, y = h₂₂₂, z = h₃₂₂, w = h₃₂₁`, using the
/// relations forced on homogeneous solutions with `dθ = 0`.
pub fn h_from_xyzw(x: f64, y: f64, z: f64, w: f64) -> CubicForm {
    CubicForm::from_sorted(&[
        ((0, 0, 0), -2.0 * x),
        ((0, 0, 1), -2.0 * y),
        ((0, 0, 2), -2.0 * z),
        ((0, 1, 1), x),
        ((0, 1, 2), w),
        ((0, 2, 2), x),
        ((1, 1, 1), y),
        ((1, 1, 2), z),
        ((1, 2, 2), y),
        ((2, 2, 2), z),
    ])
}

/// `h` of the θ = 0 family: `β₁₁ = −f σ₁`, `β₂₂ = β₃₃ = ½ f σ₁`, `β₂₁ = ½ f σ₂`, and `β₃₁`
/// according to `reading`.
pub fn h_theta0(f: f64, reading: Beta31Reading) -> CubicForm {
    let mut h = CubicForm::from_sorted(&[((0, 0, 0), -f), ((0, 1, 1), 0.5 * f), ((0, 2, 2), 0.5 * f)]);
    if reading == Beta31Reading::Literal {
        h.h[2][0][2] = 0.5;
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Beta31Reading {
    /// `β₃₁ = ½ f σ₃`, forced by the symmetry of β.
    WithF,
    /// `β₃₁ = ½ σ₃` as printed.
    Literal,
}

/// Constant data of a homogeneous candidate. `offsets[k]` adds `offsets[k]·S` to `E_k`
/// where `S` spans the stabiliser at θ = π/4; `append_stabilizer` adds the θ = 0
/// stabiliser generator to the algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionConstants {
    pub name: String,
    pub theta: f64,
    pub h: CubicForm,
    pub t: [f64; 3],
    pub offsets: [f64; 3],
    pub append_stabilizer: bool,
}

impl SolutionConstants {
    pub fn from_xyzw(name: &str, theta: f64, x: f64, y: f64, z: f64, w: f64) -> Self {
        SolutionConstants {
            name: name.into(),
            theta,
            h: h_from_xyzw(x, y, z, w),
            t: [0.0; 3],
            offsets: [0.0; 3],
            append_stabilizer: false,
        }
    }
    pub fn exotic() -> Self {
        let theta = 0.5 * (7.0 * SQRT_2 / (5.0 * 5f64.sqrt())).acos();
        Self::from_xyzw("exotic", theta, -(0.4f64).sqrt(), 0.0, 0.0, -0.6 * 1.5f64.sqrt())
    }
    pub fn chiang() -> Self {
        let a = 1.0 / 6f64.sqrt();
        let mut s = Self::from_xyzw("chiang", FRAC_PI_4, -a, 0.0, 0.0, a);
        s.offsets = [0.0, -1.0 / 6.0, -1.0 / 6.0];
        s
    }
    pub fn rp3() -> Self {
        let mut s = Self::from_xyzw("rp3", FRAC_PI_4, 0.0, 0.0, 0.0, 0.0);
        s.offsets = [0.0, 0.5, 0.5];
        s
    }
    pub fn theta0(f: f64, reading: Beta31Reading) -> Self {
        SolutionConstants {
            name: format!("theta0 f={f}"),
            theta: 0.0,
            h: h_theta0(f, reading),
            t: [0.0; 3],
            offsets: [0.0; 3],
            append_stabilizer: true,
        }
    }
    pub fn berger() -> Self {
        let mut s = Self::theta0(0.5, Beta31Reading::WithF);
        s.name = "berger".into();
        s
    }
    pub fn s1s2() -> Self {
        let mut s = Self::theta0(-1.0, Beta31Reading::WithF);
        s.name = "s1s2".into();
        s
    }
    /// The ten independent components `h₁₁₁, h₁₁₂, h₁₁₃, h₁₂₂, h₁₂₃, h₁₃₃, h₂₂₂, h₂₂₃, h₂₃₃, h₃₃₃`.
    pub fn h_components(&self) -> [f64; 10] {
        let h = &self.h.h;
        [h[0][0][0], h[0][0][1], h[0][0][2], h[0][1][1], h[0][1][2], h[0][2][2], h[1][1][1], h[1][1][2], h[1][2][2], h[2][2][2]]
    }
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "theta": self.theta, "h": self.h_components(), "t": self.t })
    }
}

/// `mc(ρ₁, ρ₂, τ, ω)` as a complex 4×4 matrix.
pub fn mc_matrix(rho1: f64, rho2: f64, tau: C64, omega: [C64; 3]) -> CMat4 {
    McSlots { rho1, rho2, tau, omega }.to_quat().embed_c4()
}

/// `S = mc(0, 0, 1+i, 0)`, the stabiliser direction at θ = π/4.
pub fn quarter_pi_stabilizer() -> CMat4 {
    mc_matrix(0.0, 0.0, c(1.0, 1.0), [ZERO; 3])
}

/// `m₁ = diag_H(i, i) = mc(1, 1, 0, 0)`, the stabiliser direction at θ = 0.
pub fn theta0_stabilizer() -> CMat4 {
    mc_matrix(1.0, 1.0, ZERO, [ZERO; 3])
}

/// Solve `Im φ(e_k) = h(·,·,k)` for `(ρ₁, ρ₂, Re τ, Im τ)` in least squares.
pub fn connection_from_h(sol: &SolutionConstants, k: usize, tol: f64) -> Result<ConnectionValue> {
    let th = sol.theta;
    let base = phi_matrix(th, &ConnectionValue::zero(), sol.t[k]).map(|z| z.im);
    let units = [
        ConnectionValue::new(1.0, 0.0, ZERO),
        ConnectionValue::new(0.0, 1.0, ZERO),
        ConnectionValue::new(0.0, 0.0, c(1.0, 0.0)),
        ConnectionValue::new(0.0, 0.0, I),
    ];
    let mut a = DMatrix::zeros(9, 4);
    for (col, u) in units.iter().enumerate() {
        let b = phi_matrix(th, u, 0.0).map(|z| z.im);
        for i in 0..3 {
            for j in 0..3 {
                a[(3 * i + j, col)] = b[(i, j)];
            }
        }
    }
    let mut rhs = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            rhs[3 * i + j] = sol.h.h[i][j][k] - base[(i, j)];
        }
    }
    let (u, res) = lstsq(&a, &rhs);
    if res > tol {
        return Err(NkError::InconsistentConstants(res));
    }
    Ok(ConnectionValue { rho1: u[0], rho2: u[1], tau: c(u[2], u[3]), residual: res })
}

/// Max distance of pairwise brackets from the span, in the real flattening of `gl(4,ℂ)`.
pub fn closure_residual(gens: &[CMat4]) -> f64 {
    let basis = DMatrix::from_fn(32, gens.len(), |r, col| flatten_real(&gens[col])[r]);
    let mut res: f64 = 0.0;
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let br = gens[a] * gens[b] - gens[b] * gens[a];
            res = res.max(lstsq(&basis, &flatten_real(&br)).1);
        }
    }
    res
}

pub fn span_rank(gens: &[CMat4]) -> usize {
    let m = DMatrix::from_fn(32, gens.len(), |r, col| flatten_real(&gens[col])[r]);
    rank_tol(&m, 1e-9)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BonnetAlgebra {
    /// `E₁, E₂, E₃`, followed by the stabiliser generator when appended.
    pub gens: Vec<CMat4>,
    pub connection: [ConnectionValue; 3],
    pub connection_residual: f64,
    pub closure: f64,
    pub rank: usize,
}

/// `E_k = mc(ρ₁(e_k), ρ₂(e_k), τ(e_k), T_θ e_k)` plus gauge offsets.
pub fn assemble_bonnet(sol: &SolutionConstants, tol: f64) -> Result<BonnetAlgebra> {
    let t = t_theta(sol.theta);
    let s = quarter_pi_stabilizer();
    let mut gens = Vec::new();
    let mut conn = [ConnectionValue::zero(); 3];
    let mut cres: f64 = 0.0;
    for k in 0..3 {
        let cv = connection_from_h(sol, k, tol)?;
        cres = cres.max(cv.residual);
        conn[k] = cv;
        let om = [t[(0, k)], t[(1, k)], t[(2, k)]];
        gens.push(mc_matrix(cv.rho1, cv.rho2, cv.tau, om) + s * c(sol.offsets[k], 0.0));
    }
    if sol.append_stabilizer {
        gens.push(theta0_stabilizer());
    }
    let closure = closure_residual(&gens);
    let rank = span_rank(&gens);
    Ok(BonnetAlgebra { gens, connection: conn, connection_residual: cres, closure, rank })
}

/// Gauss–Newton fit of the π/4 gauge offsets minimising the bracket-closure defect.
pub fn fit_gauge_offsets(sol: &SolutionConstants, start: [f64; 3]) -> Result<([f64; 3], f64)> {
    let defect = |off: &[f64; 3]| -> Result<Vec<f64>> {
        let mut s2 = sol.clone();
        s2.offsets = *off;
        let alg = assemble_bonnet(&s2, 1e-8)?;
        let g = &alg.gens;
        let basis = DMatrix::from_fn(32, g.len(), |r, col| flatten_real(&g[col])[r]);
        let mut out = Vec::new();
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                let br = flatten_real(&(g[a] * g[b] - g[b] * g[a]));
                let (x, _) = lstsq(&basis, &br);
                let proj = &basis * nalgebra::DVector::from_vec(x);
                out.extend(br.iter().zip(proj.iter()).map(|(u, v)| u - v));
            }
        }
        Ok(out)
    };
    let mut x = start;
    for _ in 0..50 {
        let r0 = defect(&x)?;
        let n0 = r0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if n0 < 1e-14 {
            return Ok((x, n0));
        }
        let h = 1e-7;
        let mut jac = DMatrix::zeros(r0.len(), 3);
        for k in 0..3 {
            let mut xp = x;
            xp[k] += h;
            let rp = defect(&xp)?;
            for (i, v) in rp.iter().enumerate() {
                jac[(i, k)] = (v - r0[i]) / h;
            }
        }
        let neg: Vec<f64> = r0.iter().map(|v| -v).collect();
        let (dx, _) = lstsq(&jac, &neg);
        for k in 0..3 {
            x[k] += dx[k];
        }
    }
    let r = defect(&x)?;
    Ok((x, r.iter().fold(0.0f64, |m, v| m.max(v.abs()))))
}

/// Roots of `−1 + f + 2f² = 0`, sorted.
pub fn solve_f_roots() -> [f64; 2] {
    let (a, b, cc) = (2.0f64, 1.0f64, -1.0f64);
    let d = (b * b - 4.0 * a * cc).sqrt();
    [(-b - d) / (2.0 * a), (-b + d) / (2.0 * a)]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theta0Algebra {
    pub m: [CMat4; 4],
    pub closure: f64,
    pub rank: usize,
}

/// The four displayed generators `m₁..m₄` of the θ = 0 algebras.
pub fn theta0_generators(f: f64) -> Theta0Algebra {
    let s = 1.0 / SQRT_2;
    let q = |z: C64, w: C64| Quaternion::new(z, w);
    let z0 = ZERO;
    let m1 = QuatMat2::diag(q(I, z0), q(I, z0));
    let m2 = QuatMat2::new(q(I * (f * s), z0), q(c(-1.0, 0.0), z0), q(c(1.0, 0.0), z0), q(-I * (f * s), z0));
    let m3 = QuatMat2::new(q(z0, c(-1.0, 0.0)), q(z0, -I * s), q(z0, -I * s), q(z0, c(f, 0.0)));
    let m4 = QuatMat2::new(q(z0, -I), q(z0, c(s, 0.0)), q(z0, c(s, 0.0)), q(z0, I * f));
    let m = [m1, m2, m3, m4].map(|x| x.embed_c4());
    Theta0Algebra { closure: closure_residual(&m), rank: span_rank(&m), m }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadingReport {
    pub reading: Beta31Reading,
    pub connection_residual: f64,
    pub closure: f64,
}

/// Evaluate both readings of `β₃₁` for the θ = 0 family at `f`.
pub fn beta31_readings(f: f64) -> Vec<ReadingReport> {
    [Beta31Reading::WithF, Beta31Reading::Literal]
        .into_iter()
        .map(|reading| {
            let sol = SolutionConstants::theta0(f, reading);
            let alg = assemble_bonnet(&sol, f64::INFINITY).expect("infinite tolerance");
            ReadingReport { reading, connection_residual: alg.connection_residual, closure: alg.closure }
        })
        .collect()
}

/// Per-identity maximal residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub entries: Vec<(String, f64)>,
    /// Curvature identities with `−Rσ∧σ`, `−Sσ∧σ` (not expected to vanish).
    pub curvature_opposite_sign: (f64, f64),
}

impl StructureReport {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == name).map(|e| e.1)
    }
}

type Form1 = Vec<C64>;
type Form2 = DMatrix<C64>;

fn wedge(a: &Form1, b: &Form1) -> Form2 {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i] * b[j] - b[i] * a[j])
}

fn mat_wedge(a: &[[Form1; 3]; 3], b: &[[Form1; 3]; 3], n: usize) -> Vec<Vec<Form2>> {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| (0..3).fold(DMatrix::zeros(n, n), |acc, k| acc + wedge(&a[i][k], &b[k][j])))
                .collect()
        })
        .collect()
}

fn max_abs(m: &Form2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Check the structure equations on a bracket-closed basis, with invariant 1-forms read
/// off each basis element and `dλ(a,b) = −λ([a,b])`.
pub fn verify_structure_equations_on(gens: &[CMat4], theta: f64, t: [f64; 3]) -> StructureReport {
    let n = gens.len();
    let flat = DMatrix::from_fn(32, n, |r, col| flatten_real(&gens[col])[r]);
    let mut brk = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            brk[a][b] = lstsq(&flat, &flatten_real(&(gens[a] * gens[b] - gens[b] * gens[a]))).0;
        }
    }
    let d = |lam: &Form1| DMatrix::from_fn(n, n, |a, b| -(0..n).map(|k| lam[k] * brk[a][b][k]).sum::<C64>());
    let ti = t_theta(theta).adjoint();
    let slots: Vec<McSlots> = gens.iter().map(|g| McSlots::from_quat(&QuatMat2::from_c4(g))).collect();
    let r1: Form1 = slots.iter().map(|s| c(s.rho1, 0.0)).collect();
    let r2: Form1 = slots.iter().map(|s| c(s.rho2, 0.0)).collect();
    let tau: Form1 = slots.iter().map(|s| s.tau).collect();
    let tau_bar: Form1 = tau.iter().map(|z| z.conj()).collect();
    let sig_c: Vec<[C64; 3]> = slots
        .iter()
        .map(|s| {
            let v = ti * nalgebra::Vector3::new(s.omega[0], s.omega[1], s.omega[2]);
            [v[0], v[1], v[2]]
        })
        .collect();
    let sigma_imag = sig_c.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max);
    let sig: [Form1; 3] = [0, 1, 2].map(|i| sig_c.iter().map(|v| c(v[i].re, 0.0)).collect());
    let dtheta: Vec<f64> = (0..n).map(|a| (0..3).map(|k| t[k] * sig[k][a].re).sum()).collect();
    let phis: Vec<CMat3> = (0..n)
        .map(|a| phi_matrix(theta, &ConnectionValue::new(slots[a].rho1, slots[a].rho2, slots[a].tau), dtheta[a]))
        .collect();
    let al: [[Form1; 3]; 3] = [0, 1, 2].map(|i| [0, 1, 2].map(|j| phis.iter().map(|p| c(p[(i, j)].re, 0.0)).collect()));
    let be: [[Form1; 3]; 3] = [0, 1, 2].map(|i| [0, 1, 2].map(|j| phis.iter().map(|p| c(p[(i, j)].im, 0.0)).collect()));

    let c2 = (2.0 * theta).cos();
    let e = C64::from_polar(1.0, theta);
    let em = C64::from_polar(1.0, -theta);
    let k = 1.0 / (2.0 * SQRT_2);
    let eps1: Form1 = (0..n).map(|a| I * k * (e * tau[a] - em * tau_bar[a])).collect();
    let eps2: Form1 = (0..n).map(|a| (em * tau[a] + e * tau_bar[a]) * k).collect();
    let lin = |u: &Form1, a: f64, v: &Form1, b: f64| -> Form1 { u.iter().zip(v).map(|(x, y)| x * a + y * b).collect() };
    let g31: Form1 = lin(&r1, 3.0, &r2, 1.0);
    let w = |p: usize, q: usize| wedge(&sig[p], &sig[q]);

    let mut entries = Vec::new();
    entries.push(("sigma_real".to_string(), sigma_imag));
    entries.push(("drho1".into(), max_abs(&(d(&r1) - w(1, 2) * c(1.5 * c2, 0.0)))));
    entries.push(("drho2".into(), max_abs(&(d(&r2) - (w(1, 2) * c(0.5 * c2, 0.0) + wedge(&tau, &tau_bar) * I)))));
    let dtau_rhs: Form1 = (0..n).map(|a| I * sig[1][a] * em - sig[2][a] * e).collect();
    entries.push((
        "dtau".into(),
        max_abs(&(d(&tau) - (wedge(&tau, &r2) * c(0.0, -2.0) + wedge(&sig[0], &dtau_rhs) * c(1.0 / SQRT_2, 0.0)))),
    ));
    entries.push(("dsigma1".into(), max_abs(&(d(&sig[0]) - (wedge(&eps1, &sig[1]) + wedge(&eps2, &sig[2]) + w(1, 2))))));
    entries.push((
        "dsigma2".into(),
        max_abs(&(d(&sig[1]) - (wedge(&g31, &sig[2]) * c(-0.5 * c2, 0.0) - wedge(&eps1, &sig[0]) - w(0, 2)))),
    ));
    entries.push((
        "dsigma3".into(),
        max_abs(&(d(&sig[2]) - (wedge(&g31, &sig[1]) * c(0.5 * c2, 0.0) - wedge(&eps2, &sig[0]) + w(0, 1)))),
    ));

    // dσ = −α∧σ − ½[σ]∧σ and β∧σ = 0
    let zero: Form1 = vec![ZERO; n];
    let neg = |v: &Form1| -> Form1 { v.iter().map(|z| -z).collect() };
    let sgm: [[Form1; 3]; 3] = [
        [zero.clone(), sig[2].clone(), neg(&sig[1])],
        [neg(&sig[2]), zero.clone(), sig[0].clone()],
        [sig[1].clone(), neg(&sig[0]), zero.clone()],
    ];
    let mut torsion: f64 = 0.0;
    let mut bws: f64 = 0.0;
    for i in 0..3 {
        let mut rhs = DMatrix::zeros(n, n);
        let mut bw = DMatrix::zeros(n, n);
        for j in 0..3 {
            rhs -= wedge(&al[i][j], &sig[j]) + wedge(&sgm[i][j], &sig[j]) * c(0.5, 0.0);
            bw += wedge(&be[i][j], &sig[j]);
        }
        torsion = torsion.max(max_abs(&(d(&sig[i]) - rhs)));
        bws = bws.max(max_abs(&bw));
    }
    entries.push(("dsigma_torsion".into(), torsion));
    entries.push(("beta_wedge_sigma".into(), bws));

    let tables = curvature_rs(theta);
    let two_form = |tab: &[f64; 3]| w(1, 2) * c(tab[0], 0.0) + w(0, 2) * c(tab[1], 0.0) + w(0, 1) * c(tab[2], 0.0);
    let aa = mat_wedge(&al, &al, n);
    let bb = mat_wedge(&be, &be, n);
    let ba = mat_wedge(&be, &al, n);
    let ab = mat_wedge(&al, &be, n);
    let mut curv = [[0.0f64; 2]; 2];
    for (si, sign) in [1.0, -1.0].into_iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let ra = d(&al[i][j]) - (-&aa[i][j] + &bb[i][j] + two_form(&tables.r[i][j]) * c(sign, 0.0));
                let rb = d(&be[i][j]) - (-&ba[i][j] - &ab[i][j] + two_form(&tables.s[i][j]) * c(sign, 0.0));
                curv[si][0] = curv[si][0].max(max_abs(&ra));
                curv[si][1] = curv[si][1].max(max_abs(&rb));
            }
        }
    }
    entries.push(("dalpha".into(), curv[0][0]));
    entries.push(("dbeta".into(), curv[0][1]));
    StructureReport { entries, curvature_opposite_sign: (curv[1][0], curv[1][1]) }
}

pub fn verify_structure_equations(sol: &SolutionConstants) -> Result<StructureReport> {
    let alg = assemble_bonnet(sol, 1e-8)?;
    Ok(verify_structure_equations_on(&alg.gens, sol.theta, sol.t))
}

/// Curvature tables implied by a closed algebra: `R = dα + α∧α − β∧β`,
/// `S = dβ + β∧α + α∧β`, read on `(E_p, E_q)`.
pub fn implied_curvature(sol: &SolutionConstants) -> Result<CurvatureTables> {
    let alg = assemble_bonnet(sol, 1e-8)?;
    let gens = &alg.gens;
    let n = gens.len();
    let flat = DMatrix::from_fn(32, n, |r, col| flatten_real(&gens[col])[r]);
    let slots: Vec<McSlots> = gens.iter().map(|g| McSlots::from_quat(&QuatMat2::from_c4(g))).collect();
    let phis: Vec<CMat3> =
        slots.iter().map(|s| phi_matrix(sol.theta, &ConnectionValue::new(s.rho1, s.rho2, s.tau), 0.0)).collect();
    let bracket_phi = |a: usize, b: usize| {
        let x = lstsq(&flat, &flatten_real(&(gens[a] * gens[b] - gens[b] * gens[a]))).0;
        (0..n).fold(CMat3::zeros(), |acc, k| acc + phis[k] * c(x[k], 0.0))
    };
    let pairs = [(1, 2), (0, 2), (0, 1)];
    let mut out = CurvatureTables { r: [[[0.0; 3]; 3]; 3], s: [[[0.0; 3]; 3]; 3] };
    for (pi, &(p, q)) in pairs.iter().enumerate() {
        let (pp, pq) = (phis[p], phis[q]);
        // dφ(a,b) = −φ([a,b]); (φ∧φ)(a,b) = φ(a)φ(b) − φ(b)φ(a) entrywise in (α, β).
        let dphi = -bracket_phi(p, q);
        let al = |m: &CMat3| m.map(|z| z.re);
        let be = |m: &CMat3| m.map(|z| z.im);
        let r = al(&dphi) + al(&pp) * al(&pq) - al(&pq) * al(&pp) - (be(&pp) * be(&pq) - be(&pq) * be(&pp));
        let s = be(&dphi) + be(&pp) * al(&pq) - be(&pq) * al(&pp) + al(&pp) * be(&pq) - al(&pq) * be(&pp);
        for i in 0..3 {
            for j in 0..3 {
                out.r[i][j][pi] = r[(i, j)];
                out.s[i][j][pi] = s[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Lie algebra of `{[[a, −b̄], [b, ā]] : a, b ∈ ℝ ⊕ jℝ}`.
pub fn standard_rp3_algebra() -> [CMat4; 3] {
    let j = Quaternion::j();
    let one = Quaternion::ONE;
    let z = Quaternion::ZERO;
    [
        QuatMat2::diag(j, j.conj()),
        QuatMat2::new(z, -one, one, z),
        QuatMat2::new(z, -j.conj(), j, z),
    ]
    .map(|m| m.embed_c4())
}

fn h_element(p: &[f64; 4]) -> QuatMat2 {
    let u = Quaternion::new(c(0.0, p[1]), c(p[2], p[3]));
    let n = u.norm();
    let q = if n == 0.0 { Quaternion::ONE } else { Quaternion::complex(c(n.cos(), 0.0)) + u.scale(n.sin() / n) };
    QuatMat2::diag(Quaternion::complex(C64::from_polar(1.0, p[0])), q)
}

/// Smallest distance of `Ad_h(span a)` from `span b` over `h ∈ S¹×S³`, by Gauss–Newton from
/// seeded random starts. Zero when the two algebras are conjugate under the isotropy group.
pub fn isotropy_conjugacy_residual(a: &[CMat4], b: &[CMat4], restarts: usize, seed: u64) -> f64 {
    use crate::rng::{normal, seeded};
    let bb = DMatrix::from_fn(32, b.len(), |r, col| flatten_real(&b[col])[r]);
    let resid = |p: &[f64; 4]| -> Vec<f64> {
        let h = h_element(p);
        let (hm, hi) = (h.embed_c4(), h.adjoint().embed_c4());
        let mut out = Vec::new();
        for x in a {
            let v = flatten_real(&(hm * x * hi));
            let (coef, _) = lstsq(&bb, &v);
            let proj = &bb * nalgebra::DVector::from_vec(coef);
            out.extend(v.iter().zip(proj.iter()).map(|(u, w)| u - w));
        }
        out
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rng = seeded(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut p = [0.0; 4].map(|_| 2.0 * normal(&mut rng));
        for _ in 0..60 {
            let r0 = resid(&p);
            let n0 = norm(&r0);
            if n0 < 1e-13 {
                break;
            }
            let mut jac = DMatrix::zeros(r0.len(), 4);
            for k in 0..4 {
                let mut pp = p;
                pp[k] += 1e-7;
                for (i, v) in resid(&pp).iter().enumerate() {
                    jac[(i, k)] = (v - r0[i]) / 1e-7;
                }
            }
            let neg: Vec<f64> = r0.iter().map(|v| -v).collect();
            let (dp, _) = lstsq(&jac, &neg);
            let mut t = 1.0;
            loop {
                let trial = [0, 1, 2, 3].map(|k| p[k] + t * dp[k]);
                if norm(&resid(&trial)) < n0 || t < 1e-6 {
                    p = trial;
                    break;
                }
                t *= 0.5;
            }
        }
        best = best.min(norm(&resid(&p)));
        if best < 1e-12 {
            break;
        }
    }
    best
}

/// The five homogeneous examples, each reachable by the structure equations and as a group orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedExample {
    Rp3,
    Berger,
    S1S2,
    Chiang,
    Exotic,
}

impl NamedExample {
    pub const ALL: [NamedExample; 5] =
        [NamedExample::Rp3, NamedExample::Berger, NamedExample::S1S2, NamedExample::Chiang, NamedExample::Exotic];
    pub fn name(&self) -> &'static str {
        match self {
            NamedExample::Rp3 => "rp3",
            NamedExample::Berger => "berger",
            NamedExample::S1S2 => "s1s2",
            NamedExample::Chiang => "chiang",
            NamedExample::Exotic => "exotic",
        }
    }
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s.to_ascii_lowercase())
    }
    pub fn solution(&self) -> SolutionConstants {
        match self {
            NamedExample::Rp3 => SolutionConstants::rp3(),
            NamedExample::Berger => SolutionConstants::berger(),
            NamedExample::S1S2 => SolutionConstants::s1s2(),
            NamedExample::Chiang => SolutionConstants::chiang(),
            NamedExample::Exotic => SolutionConstants::exotic(),
        }
    }
    /// Orbit label, acting group and base point.
    pub fn orbit(&self) -> (&'static str, GeneratorSet, ChartPoint) {
        match self {
            NamedExample::Berger => ("O11", GeneratorSet::new(GroupId::K1), points::p11()),
            NamedExample::S1S2 => ("O21", GeneratorSet::new(GroupId::K2Ext), points::p21()),
            NamedExample::Rp3 => ("O22", GeneratorSet::new(GroupId::K2), points::p22()),
            NamedExample::Chiang => ("O31", GeneratorSet::new(GroupId::K3), points::p31()),
            NamedExample::Exotic => ("O32", GeneratorSet::new(GroupId::K3), points::p32()),
        }
    }
    /// Tabulated value of θ.
    pub fn theta(&self) -> f64 {
        self.solution().theta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteValues {
    pub theta: f64,
    pub cubic_norm2: f64,
    pub symmetry: SymmetryOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossRoute {
    pub example: NamedExample,
    pub orbit: String,
    /// Constants of the solution: θ and ‖H_TO_C·h‖².
    pub constants: RouteValues,
    /// Orbit of the assembled algebra through `[1,0,0,0]`.
    pub assembled: RouteValues,
    /// Moment-map orbit through the named base point.
    pub moment_orbit: RouteValues,
    pub closure: f64,
}

impl CrossRoute {
    pub fn max_gap(&self) -> f64 {
        let a = &self.assembled;
        let b = &self.moment_orbit;
        let c0 = &self.constants;
        [a.theta - b.theta, a.cubic_norm2 - b.cubic_norm2, c0.theta - b.theta, c0.cubic_norm2 - b.cubic_norm2]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn orbit_values(gens: &[CMat4], p: &ChartPoint, step: f64) -> Result<RouteValues> {
    let diag = is_sl_orbit(gens, p, 1e-8);
    if !diag.is_sl {
        return Err(NkError::NotSpecialLagrangian(diag.reason.unwrap_or_default()));
    }
    let sff = second_fundamental_form(gens, p, step)?;
    let inv = cubic_invariants(&sff.cubic, 1e-6);
    Ok(RouteValues { theta: theta_at(gens, p)?, cubic_norm2: inv.norm2, symmetry: inv.symmetry })
}

/// Compare `(θ, ‖C‖²)` from the structure-equation assembly with the moment-map orbit.
pub fn cross_route(ex: NamedExample, step: f64) -> Result<CrossRoute> {
    let sol = ex.solution();
    let alg = assemble_bonnet(&sol, 1e-8)?;
    let hc = sol.h.scaled(H_TO_C);
    let constants = RouteValues {
        theta: sol.theta,
        cubic_norm2: hc.norm2(),
        symmetry: cubic_invariants(&hc, 1e-6).symmetry,
    };
    let assembled = orbit_values(&alg.gens, &ChartPoint::origin(), step)?;
    let (label, gen, p) = ex.orbit();
    let moment_orbit = orbit_values(&gen.xis, &p, step)?;
    Ok(CrossRoute { example: ex, orbit: label.into(), constants, assembled, moment_orbit, closure: alg.closure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_connection_gives_zero_forms() {
        let (a, b) = alpha_beta_from_connection(0.3, &ConnectionValue::zero(), 0.0);
        assert_eq!(a.camax(), 0.0);
        assert!(b.camax() < 1e-16);
    }

    #[test]
    fn gauge_formula_matches_display_off_first_row() {
        let cv = ConnectionValue::new(0.4, -1.3, c(0.7, -0.2));
        for th in [0.0, 0.31, 0.7] {
            let (a, b) = alpha_beta_from_connection(th, &cv, 0.25);
            let (ap, bp) = alpha_beta_printed(th, &cv, 0.25);
            for i in 1..3 {
                for j in 0..3 {
                    assert!((a[(i, j)] - ap[(i, j)]).abs() < 1e-14, "alpha {i}{j}");
                    assert!((b[(i, j)] - bp[(i, j)]).abs() < 1e-14, "beta {i}{j}");
                }
            }
            assert!((b[(0, 0)] - bp[(0, 0)]).abs() < 1e-14);
            assert!((a + a.transpose()).camax() < 1e-14);
            assert!((b - b.transpose()).camax() < 1e-14);
            assert!(b.trace().abs() < 1e-14);
        }
    }

    #[test]
    fn curvature_named_entries() {
        let t = curvature_rs(0.0);
        assert_eq!(t.s[0][0][0], -1.0);
        assert_eq!(t.r[1][2][0], 2.5);
        let q = curvature_rs(FRAC_PI_4);
        assert!(q.s.iter().flatten().flatten().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn f_roots() {
        let [a, b] = solve_f_roots();
        assert_eq!((a, b), (-1.0, 0.5));
        assert_eq!(a * b, -0.5);
        for f in [a, b] {
            assert_eq!(-1.0 + f + 2.0 * f * f, 0.0);
        }
    }

    #[test]
    fn theta0_connection_relations() {
        for f in [-1.0, 0.5, 0.3] {
            let sol = SolutionConstants::theta0(f, Beta31Reading::WithF);
            for k in 0..3 {
                let cv = connection_from_h(&sol, k, 1e-12).unwrap();
                let sig = [0.0, 1.0, 2.0].map(|i: f64| if i as usize == k { 1.0 } else { 0.0 });
                assert!((cv.rho1 - cv.rho2 - f * sig[0]).abs() < 1e-12);
                let want = c(sig[1], sig[2]) * (f / SQRT_2);
                assert!((cv.tau - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rp3_matches_standard_algebra() {
        let alg = assemble_bonnet(&SolutionConstants::rp3(), 1e-12).unwrap();
        let std = standard_rp3_algebra();
        assert!(closure_residual(&std) < 1e-14);
        assert!(isotropy_conjugacy_residual(&alg.gens, &std, 40, 1) < 1e-10);
        let ex = assemble_bonnet(&SolutionConstants::exotic(), 1e-12).unwrap();
        assert!(isotropy_conjugacy_residual(&ex.gens, &std, 10, 1) > 1e-3);
    }
}
