//! Geometry of three-dimensional orbits: induced metric, Ricci spectrum of a left-invariant
//! metric, the second fundamental form and the fundamental cubic `C(X,Y,Z) = ω(II(X,Y), Z)`.

use nalgebra::{DMatrix, Matrix3, Matrix6, Rotation3, Vector3, Vector6};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{lstsq, rank_tol, sym3_eigenvalues, tol, CMat4};
use crate::chart::{coframe, metric_c3, metric_matrix, omega_c3, ChartPoint, TangentVec};
use crate::rng::{normal, seeded};
use crate::symmetry::{is_sl_orbit, killing_derivative, killing_field};
use crate::{NkError, Result};

pub type StructConsts = [[[f64; 3]; 3]; 3];

/// `G_ij = g(K_i, K_j)` at `p`.
pub fn induced_metric(gens: &[CMat4], p: &ChartPoint) -> Result<Matrix3<f64>> {
    if gens.len() != 3 {
        return Err(NkError::DimensionMismatch(format!("{} generators", gens.len())));
    }
    let k: Vec<_> = gens.iter().map(|x| coframe(p, &killing_field(x, p)).c).collect();
    let g = Matrix3::from_fn(|i, j| metric_c3(&k[i], &k[j]));
    if g.cholesky().is_none() || g.determinant() <= 1e-14 * g.camax().powi(3) {
        let m = DMatrix::from_fn(3, 3, |i, j| g[(i, j)]);
        return Err(NkError::OrbitDimension(rank_tol(&m, tol::RANK_REL)));
    }
    Ok(g)
}

/// `c[k][i][j]` with `[ξ_i, ξ_j] = Σ_k c^k_{ij} ξ_k`, and the bracket-span residual.
pub fn structure_constants(gens: &[CMat4]) -> Result<(StructConsts, f64)> {
    if gens.len() != 3 {
        return Err(NkError::DimensionMismatch(format!("{} generators", gens.len())));
    }
    let flat = |m: &CMat4| crate::algebra::flatten_real(m);
    let basis = DMatrix::from_fn(32, 3, |r, c| flat(&gens[c])[r]);
    let mut out = [[[0.0; 3]; 3]; 3];
    let mut res: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let b = gens[i] * gens[j] - gens[j] * gens[i];
            let (x, r) = lstsq(&basis, &flat(&b));
            res = res.max(r);
            for k in 0..3 {
                out[k][i][j] = x[k];
            }
        }
    }
    Ok((out, res))
}

pub fn jacobi_residual(c: &StructConsts) -> f64 {
    let br = |a: &Vector3<f64>, b: &Vector3<f64>| {
        Vector3::from_fn(|k, _| (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| c[k][i][j] * a[i] * b[j]).sum())
    };
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut r: f64 = 0.0;
    for a in &e {
        for b in &e {
            for d in &e {
                let s = br(a, &br(b, d)) + br(b, &br(d, a)) + br(d, &br(a, b));
                r = r.max(s.camax());
            }
        }
    }
    r
}

/// Ricci form and sorted eigenvalues of `G⁻¹ Ric` for the left-invariant metric `G` on the
/// Lie algebra with structure constants `c`.
pub fn ricci_left_invariant(c: &StructConsts, g: &Matrix3<f64>) -> Result<(Matrix3<f64>, [f64; 3])> {
    let chol = g.cholesky().ok_or(NkError::NotPositiveDefinite)?;
    let ginv = chol.inverse();
    let br = |a: usize, b: usize| Vector3::from_fn(|k, _| c[k][a][b]);
    let gb = |u: &Vector3<f64>, v: &Vector3<f64>| (u.transpose() * g * v)[0];
    let e = |i: usize| {
        let mut v = Vector3::zeros();
        v[i] = 1.0;
        v
    };
    // nabla[i] is the matrix of ∇_{e_i} acting on coefficient vectors.
    let mut nabla = [Matrix3::<f64>::zeros(); 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut low = Vector3::zeros();
            for k in 0..3 {
                low[k] = 0.5 * (gb(&br(i, j), &e(k)) - gb(&br(j, k), &e(i)) + gb(&br(k, i), &e(j)));
            }
            nabla[i].set_column(j, &(ginv * low));
        }
    }
    let nab_v = |v: &Vector3<f64>| nabla[0] * v[0] + nabla[1] * v[1] + nabla[2] * v[2];
    let mut ric = Matrix3::zeros();
    for b in 0..3 {
        for cc in 0..3 {
            let mut tr = 0.0;
            for a in 0..3 {
                let r = nabla[a] * (nabla[b] * e(cc)) - nabla[b] * (nabla[a] * e(cc)) - nab_v(&br(a, b)) * e(cc);
                tr += r[a];
            }
            ric[(b, cc)] = tr;
        }
    }
    let ric = (ric + ric.transpose()) * 0.5;
    let l_inv = chol.l().try_inverse().ok_or(NkError::NotPositiveDefinite)?;
    let s = l_inv * ric * l_inv.transpose();
    let s = (s + s.transpose()) * 0.5;
    Ok((ric, sym3_eigenvalues(&s)?))
}

pub type Christoffel = [[[f64; 6]; 6]; 6];

/// `Γ^m_{ij} = ½ g^{ml}(∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij})` with central differences.
pub fn christoffels_fd(metric: impl Fn(&Vector6<f64>) -> Matrix6<f64>, x: &Vector6<f64>, step: f64) -> Result<Christoffel> {
    let g = metric(x);
    let gi = g.try_inverse().ok_or(NkError::NotPositiveDefinite)?;
    let mut dg = [Matrix6::<f64>::zeros(); 6];
    for (k, d) in dg.iter_mut().enumerate() {
        let mut e = Vector6::zeros();
        e[k] = step;
        *d = (metric(&(x + e)) - metric(&(x - e))) / (2.0 * step);
    }
    let mut gam = [[[0.0; 6]; 6]; 6];
    for i in 0..6 {
        for j in i..6 {
            let mut low = Vector6::zeros();
            for l in 0..6 {
                low[l] = 0.5 * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
            }
            let up = gi * low;
            for m in 0..6 {
                gam[m][i][j] = up[m];
                gam[m][j][i] = up[m];
            }
        }
    }
    Ok(gam)
}

/// Christoffel symbols of the nearly Kähler metric in the real chart coordinates.
pub fn nk_christoffels(p: &ChartPoint, step: f64) -> Result<Christoffel> {
    christoffels_fd(|x| metric_matrix(&ChartPoint::from_real6(x)), &p.to_real6(), step)
}

/// Symmetric 3-tensor on an orthonormal frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicForm {
    pub h: [[[f64; 3]; 3]; 3],
}

impl CubicForm {
    pub fn zero() -> Self {
        CubicForm { h: [[[0.0; 3]; 3]; 3] }
    }
    /// Fully symmetric tensor from its values on sorted index triples.
    pub fn from_sorted(vals: &[((usize, usize, usize), f64)]) -> Self {
        let mut h = [[[0.0; 3]; 3]; 3];
        for &((i, j, k), v) in vals {
            for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                h[a][b][c] = v;
            }
        }
        CubicForm { h }
    }
    /// Tensor of the polynomial `Σ h_ijk x_i x_j x_k` from monomial coefficients keyed by exponents.
    pub fn from_polynomial(terms: &[([usize; 3], f64)]) -> Self {
        let mut vals = Vec::new();
        for &(e, coef) in terms {
            let mut idx = Vec::new();
            for (var, &n) in e.iter().enumerate() {
                idx.extend(std::iter::repeat_n(var, n));
            }
            let mult = match (e.iter().filter(|&&n| n > 0).count(), e.iter().max()) {
                (1, _) => 1.0,
                (2, _) => 3.0,
                _ => 6.0,
            };
            vals.push(((idx[0], idx[1], idx[2]), coef / mult));
        }
        Self::from_sorted(&vals)
    }
    pub fn norm2(&self) -> f64 {
        self.h.iter().flatten().flatten().map(|x| x * x).sum()
    }
    /// Sum of squared monomial coefficients of `Σ h_ijk x_i x_j x_k`.
    pub fn monomial_norm2(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in i..3 {
                for k in j..3 {
                    let mult = if i == j && j == k {
                        1.0
                    } else if i == j || j == k {
                        3.0
                    } else {
                        6.0
                    };
                    s += (mult * self.h[i][j][k]).powi(2);
                }
            }
        }
        s
    }
    pub fn trace_residual(&self) -> f64 {
        (0..3).map(|k| (0..3).map(|i| self.h[i][i][k]).sum::<f64>().abs()).fold(0.0, f64::max)
    }
    pub fn symmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let v = self.h[i][j][k];
                    for w in [self.h[j][i][k], self.h[i][k][j], self.h[k][j][i]] {
                        r = r.max((v - w).abs());
                    }
                }
            }
        }
        r
    }
    pub fn as_vec(&self) -> Vec<f64> {
        self.h.iter().flatten().flatten().copied().collect()
    }
    /// `(R·C)_{ijk} = Σ R_ia R_jb R_kc C_abc`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut s = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            for c in 0..3 {
                                s += r[(i, a)] * r[(j, b)] * r[(k, c)] * self.h[a][b][c];
                            }
                        }
                    }
                    out[i][j][k] = s;
                }
            }
        }
        CubicForm { h: out }
    }
    /// Infinitesimal action of `L ∈ so(3)`.
    pub fn derived(&self, l: &Matrix3<f64>) -> Self {
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j][k] = (0..3)
                        .map(|a| l[(i, a)] * self.h[a][j][k] + l[(j, a)] * self.h[i][a][k] + l[(k, a)] * self.h[i][j][a])
                        .sum();
                }
            }
        }
        CubicForm { h: out }
    }
    pub fn sub(&self, o: &CubicForm) -> Self {
        let mut h = self.h;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    h[i][j][k] -= o.h[i][j][k];
                }
            }
        }
        CubicForm { h }
    }
    pub fn scaled(&self, s: f64) -> Self {
        let mut h = self.h;
        h.iter_mut().flatten().flatten().for_each(|x| *x *= s);
        CubicForm { h }
    }
}

fn so3_basis() -> [Matrix3<f64>; 3] {
    [
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
        Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0),
        Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SymmetryOrder {
    /// The zero cubic: fixed by all of SO(3).
    Infinite,
    /// A positive-dimensional stabiliser.
    Continuous { dim: usize },
    Finite(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicInvariants {
    pub norm2: f64,
    pub monomial_norm2: f64,
    pub trace_residual: f64,
    pub symmetry: SymmetryOrder,
}

/// Rotations fixing `C` up to `tol·‖C‖`: dense seeded sampling of SO(3), Gauss–Newton
/// refinement, deduplication.
pub fn symmetry_rotations(cf: &CubicForm, tol: f64, samples: usize, seed: u64) -> Vec<Matrix3<f64>> {
    let nc = cf.norm2().sqrt();
    let basis = so3_basis();
    let mut rng = seeded(seed);
    let mut found: Vec<Matrix3<f64>> = Vec::new();
    for _ in 0..samples {
        let q = nalgebra::Quaternion::new(normal(&mut rng), normal(&mut rng), normal(&mut rng), normal(&mut rng));
        let mut r = *nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix().matrix();
        let mut res = f64::INFINITY;
        for _ in 0..40 {
            let rc = cf.rotated(&r);
            let resid = DMatrix::from_column_slice(27, 1, &rc.sub(cf).as_vec());
            res = resid.norm() / nc;
            if res < 1e-13 {
                break;
            }
            let mut jac = DMatrix::zeros(27, 3);
            for (a, l) in basis.iter().enumerate() {
                jac.set_column(a, &nalgebra::DVector::from_vec(rc.derived(l).as_vec()));
            }
            let jtj = jac.transpose() * &jac + DMatrix::identity(3, 3) * 1e-12 * nc * nc;
            let step = match jtj.cholesky() {
                Some(ch) => ch.solve(&(jac.transpose() * &resid)),
                None => break,
            };
            let w = Vector3::new(-step[0], -step[1], -step[2]);
            let w = if w.norm() > 0.5 { w * (0.5 / w.norm()) } else { w };
            r = Rotation3::from_scaled_axis(w).matrix() * r;
        }
        if res < tol && !found.iter().any(|f| (f - r).norm() < 1e-5) {
            found.push(r);
        }
    }
    found
}

pub fn cubic_invariants(cf: &CubicForm, tol: f64) -> CubicInvariants {
    let norm2 = cf.norm2();
    let symmetry = if norm2.sqrt() < tol {
        SymmetryOrder::Infinite
    } else {
        let m = DMatrix::from_fn(27, 3, |r, c| cf.derived(&so3_basis()[c]).as_vec()[r] / norm2.sqrt());
        let sv = crate::algebra::singular_values_real(&m);
        let stab = sv.iter().filter(|&&s| s < tol).count();
        if stab > 0 {
            SymmetryOrder::Continuous { dim: stab }
        } else {
            SymmetryOrder::Finite(symmetry_rotations(cf, tol, 1500, 7).len())
        }
    };
    CubicInvariants { norm2, monomial_norm2: cf.monomial_norm2(), trace_residual: cf.trace_residual(), symmetry }
}

/// Fit `R·C` to `a(x₁³−3x₁x₂²) + b(x₂³−3x₂x₁²)` using the order-3 symmetry axis.
pub fn fit_s3_normal_form(cf: &CubicForm, tol: f64) -> Option<(f64, f64, f64)> {
    let rots = symmetry_rotations(cf, tol, 1500, 11);
    let r3 = rots.iter().find(|r| r.trace().abs() < 1e-6)?;
    let axis = Rotation3::from_matrix_unchecked(*r3).scaled_axis().normalize();
    let align = Rotation3::rotation_between(&axis, &Vector3::z())
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
    let rc = cf.rotated(align.matrix());
    let ta = CubicForm::from_polynomial(&[([3, 0, 0], 1.0), ([1, 2, 0], -3.0)]);
    let tb = CubicForm::from_polynomial(&[([0, 3, 0], 1.0), ([2, 1, 0], -3.0)]);
    let m = DMatrix::from_fn(27, 2, |r, c| if c == 0 { ta.as_vec()[r] } else { tb.as_vec()[r] });
    let (x, res) = lstsq(&m, &rc.as_vec());
    Some((x[0], x[1], res))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondFundamentalForm {
    pub cubic: CubicForm,
    /// `(Σ g(II(e_i,e_j), II(e_i,e_j)))^{1/2}`.
    pub norm: f64,
    /// Norm of the mean curvature vector `Σ II(e_i,e_i)`.
    pub mean_curvature: f64,
    pub symmetry_residual: f64,
}

fn orthonormal_tangent(kr: &[Vector6<f64>], g: &Matrix6<f64>) -> Result<Vec<Vector6<f64>>> {
    let ip = |a: &Vector6<f64>, b: &Vector6<f64>| (a.transpose() * g * b)[0];
    let mut basis: Vec<Vector6<f64>> = Vec::new();
    for k in kr {
        let mut v = *k;
        for u in &basis {
            v -= u * ip(u, &v);
        }
        let n = ip(&v, &v).sqrt();
        if n > 1e-8 * ip(k, k).sqrt() && basis.len() < 3 {
            basis.push(v / n);
        }
    }
    if basis.len() != 3 {
        return Err(NkError::OrbitDimension(basis.len()));
    }
    Ok(basis)
}

fn sff_at_step(gens: &[CMat4], p: &ChartPoint, step: f64) -> Result<(CubicForm, [[Vector6<f64>; 3]; 3], Matrix6<f64>)> {
    let gam = nk_christoffels(p, step)?;
    let g = metric_matrix(p);
    let ks: Vec<TangentVec> = gens.iter().map(|x| killing_field(x, p)).collect();
    let kr: Vec<Vector6<f64>> = ks.iter().map(|k| k.to_real6()).collect();
    let n = gens.len();
    let mut nab = vec![vec![Vector6::zeros(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut v = killing_derivative(&gens[b], p, &ks[a]).to_real6();
            for (m, gm) in gam.iter().enumerate() {
                let mut s = 0.0;
                for i in 0..6 {
                    for j in 0..6 {
                        s += gm[i][j] * kr[a][i] * kr[b][j];
                    }
                }
                v[m] += s;
            }
            nab[a][b] = v;
        }
    }
    let basis = orthonormal_tangent(&kr, &g)?;
    let kmat = DMatrix::from_fn(6, n, |r, c| kr[c][r]);
    let coeffs: Vec<Vec<f64>> = basis.iter().map(|e| lstsq(&kmat, e.as_slice()).0).collect();
    let bmat = nalgebra::Matrix6x3::from_fn(|r, c| basis[c][r]);
    let proj = bmat * bmat.transpose() * g;
    let mut h = [[[0.0; 3]; 3]; 3];
    let mut ii = [[Vector6::zeros(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = Vector6::zeros();
            for a in 0..n {
                for b in 0..n {
                    v += nab[a][b] * (coeffs[i][a] * coeffs[j][b]);
                }
            }
            let normal = v - proj * v;
            ii[i][j] = normal;
            let nt = TangentVec::from_real6(&normal);
            for k in 0..3 {
                let ek = TangentVec::from_real6(&basis[k]);
                h[i][j][k] = omega_c3(&coframe(p, &nt).c, &coframe(p, &ek).c);
            }
        }
    }
    Ok((CubicForm { h }, ii, g))
}

/// Second fundamental form of the orbit through `p`, Richardson-extrapolated from steps
/// `step` and `step/2`.
pub fn second_fundamental_form(gens: &[CMat4], p: &ChartPoint, step: f64) -> Result<SecondFundamentalForm> {
    let diag = is_sl_orbit(gens, p, 1e-8);
    if !diag.is_sl {
        return Err(NkError::NotSpecialLagrangian(diag.reason.unwrap_or_default()));
    }
    let (c1, ii1, g) = sff_at_step(gens, p, step)?;
    let (c2, ii2, _) = sff_at_step(gens, p, step / 2.0)?;
    let cubic = c2.scaled(4.0 / 3.0).sub(&c1.scaled(1.0 / 3.0));
    let ip = |a: &Vector6<f64>, b: &Vector6<f64>| (a.transpose() * g * b)[0];
    let mut norm2 = 0.0;
    let mut mean = Vector6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let v = (ii2[i][j] * 4.0 - ii1[i][j]) / 3.0;
            norm2 += ip(&v, &v);
            if i == j {
                mean += v;
            }
        }
    }
    Ok(SecondFundamentalForm {
        cubic,
        norm: norm2.sqrt(),
        mean_curvature: ip(&mean, &mean).sqrt(),
        symmetry_residual: cubic.symmetry_residual(),
    })
}

/// Base point, generators, Gram matrix and structure constants of an su(2)-homogeneous orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitChart {
    pub p: ChartPoint,
    pub gens: Vec<CMat4>,
    pub gram: Matrix3<f64>,
    pub struct_consts: StructConsts,
}

impl OrbitChart {
    pub fn new(gens: &[CMat4], p: &ChartPoint) -> Result<Self> {
        let gram = induced_metric(gens, p)?;
        let (c, res) = structure_constants(gens)?;
        if res > 1e-10 {
            return Err(NkError::InvalidInput(format!("generators do not close (residual {res:.2e})")));
        }
        Ok(OrbitChart { p: *p, gens: gens.to_vec(), gram, struct_consts: c })
    }
    pub fn ricci_eigenvalues(&self) -> Result<[f64; 3]> {
        Ok(ricci_left_invariant(&self.struct_consts, &self.gram)?.1)
    }
}

/// Random rotation of a generator triple: `ξ'_i = Σ_j R_ij ξ_j`.
pub fn rotate_generators<R: Rng>(gens: &[CMat4; 3], rng: &mut R) -> [CMat4; 3] {
    let q = nalgebra::Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
    let r = nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix();
    [0, 1, 2].map(|i| {
        let mut x = CMat4::zeros();
        for j in 0..3 {
            x += gens[j] * crate::algebra::c(r[(i, j)], 0.0);
        }
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::levi_civita;

    fn eps(sign: f64) -> StructConsts {
        let mut c = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    c[k][i][j] = sign * levi_civita(i, j, k);
                }
            }
        }
        c
    }

    #[test]
    fn ricci_examples() {
        let (_, ev) = ricci_left_invariant(&eps(1.0), &Matrix3::identity()).unwrap();
        for e in ev {
            assert!((e - 0.5).abs() < 1e-14);
        }
        let (_, ev) = ricci_left_invariant(&[[[0.0; 3]; 3]; 3], &Matrix3::identity()).unwrap();
        assert_eq!(ev, [0.0; 3]);
        assert!(ricci_left_invariant(&eps(1.0), &Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0))).is_err());
        assert!(jacobi_residual(&eps(-1.0)) < 1e-15);
    }

    #[test]
    fn flat_metric_christoffels_vanish() {
        let gam = christoffels_fd(|_| Matrix6::identity() * 2.0, &Vector6::zeros(), 1e-3).unwrap();
        assert!(gam.iter().flatten().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn cubic_symmetry_examples() {
        assert_eq!(cubic_invariants(&CubicForm::zero(), 1e-6).symmetry, SymmetryOrder::Infinite);
        let chiang = CubicForm::from_polynomial(&[([3, 0, 0], 0.7), ([1, 2, 0], -2.1), ([0, 3, 0], 0.3), ([2, 1, 0], -0.9)]);
        assert_eq!(cubic_invariants(&chiang, 1e-6).symmetry, SymmetryOrder::Finite(6));
        let berger = CubicForm::from_polynomial(&[([3, 0, 0], -1.0), ([1, 2, 0], 1.5), ([1, 0, 2], 1.5)]);
        assert!(matches!(cubic_invariants(&berger, 1e-6).symmetry, SymmetryOrder::Continuous { .. }));
    }

    #[test]
    fn polynomial_tensor_roundtrip() {
        let c = CubicForm::from_polynomial(&[([1, 1, 1], 6.0), ([3, 0, 0], 2.0), ([1, 2, 0], -3.0)]);
        assert_eq!(c.h[0][1][2], 1.0);
        assert_eq!(c.h[0][0][0], 2.0);
        assert_eq!(c.h[1][0][1], -1.0);
        assert!((c.monomial_norm2() - (36.0 + 4.0 + 9.0)).abs() < 1e-12);
    }
}
