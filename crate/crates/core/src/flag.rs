//! Adjoint orbits of su(3) and the cohomogeneity-one test on the flag manifold.
//!
//! Orbits are separated by `ρ₁ = Tr A²` and `ρ₂ = Tr A³`; every orbit meets the slice
//! `A(λ, μ) = [[iμ, −λ, 0], [λ, iμ, 0], [0, 0, −2iμ]]`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{c, pauli, CMat3, I, ONE, ZERO};
use crate::rng::{normal, seeded, su3};
use crate::{NkError, Result};

/// The displayed Jacobian (with complex `ρ₂ = Tr A³ = i·ρ₂_im`) is this constant times
/// [`jacobian_det_slice`].
pub const DISPLAYED_JACOBIAN_FACTOR: crate::C64 = I;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su3Element(pub CMat3);

impl Su3Element {
    pub fn new(a: CMat3, tol: f64) -> Result<Self> {
        let skew = (a + a.adjoint()).camax();
        let tr = a.trace().norm();
        if skew > tol || tr > tol {
            return Err(NkError::InvalidInput(format!("not in su(3): skew {skew:.1e}, trace {tr:.1e}")));
        }
        Ok(Su3Element(a))
    }
    pub fn conjugated(&self, u: &CMat3) -> Self {
        Su3Element(u * self.0 * u.adjoint())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub lam: f64,
    pub mu_s: f64,
}

impl SlicePoint {
    pub fn new(lam: f64, mu_s: f64) -> Self {
        SlicePoint { lam, mu_s }
    }
}

/// `(Tr A², Im Tr A³)`. Errors if `A ∉ su(3)` or `Re Tr A³` is not negligible.
pub fn rho_invariants(a: &CMat3) -> Result<(f64, f64)> {
    let a = Su3Element::new(*a, 1e-12 * (1.0 + a.camax()))?.0;
    let a2 = a * a;
    let t2 = a2.trace();
    let t3 = (a2 * a).trace();
    let scale = 1.0 + a.camax().powi(3);
    if t3.re.abs() > 1e-12 * scale || t2.im.abs() > 1e-12 * scale {
        return Err(NkError::InvalidInput("power traces have the wrong reality".into()));
    }
    Ok((t2.re, t3.im))
}

pub fn slice_element(sp: SlicePoint) -> CMat3 {
    let (l, m) = (c(sp.lam, 0.0), sp.mu_s);
    CMat3::new(I * m, -l, ZERO, l, I * m, ZERO, ZERO, ZERO, I * (-2.0 * m))
}

/// Imaginary parts of the eigenvalues `{μ+λ, μ−λ, −2μ}`.
pub fn slice_eigenvalues(sp: SlicePoint) -> [f64; 3] {
    [sp.mu_s + sp.lam, sp.mu_s - sp.lam, -2.0 * sp.mu_s]
}

/// `ρ₁ = −(2λ² + 6μ²)`, `ρ₂_im = 6μ³ − 6μλ²` on the slice.
pub fn slice_rho(sp: SlicePoint) -> (f64, f64) {
    let (l, m) = (sp.lam, sp.mu_s);
    (-(2.0 * l * l + 6.0 * m * m), 6.0 * m.powi(3) - 6.0 * m * l * l)
}

/// `det ∂(ρ₁, ρ₂_im)/∂(λ, μ) = 24λ³ − 216λμ²`.
pub fn jacobian_det_slice(sp: SlicePoint) -> f64 {
    let (l, m) = (sp.lam, sp.mu_s);
    24.0 * l.powi(3) - 216.0 * l * m * m
}

/// The same determinant by central differences of [`rho_invariants`] on [`slice_element`].
pub fn jacobian_det_fd(sp: SlicePoint, h: f64) -> Result<f64> {
    let rho = |l: f64, m: f64| rho_invariants(&slice_element(SlicePoint::new(l, m)));
    let (a1, a2) = rho(sp.lam + h, sp.mu_s)?;
    let (b1, b2) = rho(sp.lam - h, sp.mu_s)?;
    let (c1, c2) = rho(sp.lam, sp.mu_s + h)?;
    let (d1, d2) = rho(sp.lam, sp.mu_s - h)?;
    let (r1l, r2l) = ((a1 - b1) / (2.0 * h), (a2 - b2) / (2.0 * h));
    let (r1m, r2m) = ((c1 - d1) / (2.0 * h), (c2 - d2) / (2.0 * h));
    Ok(r1l * r2m - r1m * r2l)
}

/// The displayed complex determinant `24iλ³ − 216iλμ²`.
pub fn jacobian_det_printed(sp: SlicePoint) -> crate::C64 {
    let (l, m) = (sp.lam, sp.mu_s);
    I * (24.0 * l.powi(3) - 216.0 * l * m * m)
}

pub fn min_eigenvalue_gap(sp: SlicePoint) -> f64 {
    let e = slice_eigenvalues(sp);
    (e[0] - e[1]).abs().min((e[0] - e[2]).abs()).min((e[1] - e[2]).abs())
}

pub fn degenerate_eigenvalues(sp: SlicePoint) -> bool {
    min_eigenvalue_gap(sp) < 1e-10
}

pub fn so3_basis() -> [CMat3; 3] {
    let e = |i: usize, j: usize| {
        let mut m = CMat3::zeros();
        m[(i, j)] = -ONE;
        m[(j, i)] = ONE;
        m
    };
    [e(0, 1), e(0, 2), e(1, 2)]
}

/// `su(2)` in the upper-left 2×2 block.
pub fn su2_block_basis() -> [CMat3; 3] {
    pauli().map(|s| {
        let mut m = CMat3::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(s * I));
        m
    })
}

/// `dim {ξ ∈ span(subalg) : [ξ, A] = 0}`.
pub fn stabilizer_dimension(subalg: &[CMat3], a: &CMat3, rel_tol: f64) -> usize {
    let cols: Vec<Vec<f64>> = subalg.iter().map(|x| crate::algebra::flatten_real(&(x * a - a * x))).collect();
    let m = DMatrix::from_fn(18, subalg.len(), |r, col| cols[col][r]);
    // Thresholds are relative to ‖A‖, the natural scale of ad_A.
    let scale = a.camax();
    if scale == 0.0 {
        return subalg.len();
    }
    let sv = crate::algebra::singular_values_real(&m);
    subalg.len() - sv.iter().filter(|&&s| s > rel_tol * scale).count()
}

/// Grid classification of the Jacobian zero locus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLocus {
    /// Interpolated sign-change points `(λ, μ, det)` on grid edges.
    pub crossings: Vec<[f64; 3]>,
    /// Max distance from a crossing to `{λ = 0} ∪ {λ = ±3μ}`.
    pub max_distance_to_lines: f64,
    /// Max distance from sampled points of the three lines to the nearest crossing.
    pub max_line_gap: f64,
    pub spacing: f64,
}

impl ZeroLocus {
    pub fn matches_lines(&self) -> bool {
        self.max_distance_to_lines < self.spacing && self.max_line_gap < 2.0 * self.spacing
    }
}

pub fn distance_to_lines(l: f64, m: f64) -> f64 {
    let d0 = l.abs();
    let d1 = (l - 3.0 * m).abs() / 10f64.sqrt();
    let d2 = (l + 3.0 * m).abs() / 10f64.sqrt();
    d0.min(d1).min(d2)
}

/// Sign changes of [`jacobian_det_slice`] along the edges of an `n×n` grid over `[lo, hi]²`.
pub fn jacobian_zero_locus(n: usize, lo: f64, hi: f64) -> ZeroLocus {
    let h = (hi - lo) / (n as f64 - 1.0);
    let node = |i: usize| lo + h * i as f64;
    let det = |i: usize, j: usize| jacobian_det_slice(SlicePoint::new(node(i), node(j)));
    let mut crossings = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = det(i, j);
            for (ii, jj) in [(i + 1, j), (i, j + 1)] {
                if ii >= n || jj >= n {
                    continue;
                }
                let e = det(ii, jj);
                if d == 0.0 || d.signum() != e.signum() {
                    let t = if d == e { 0.0 } else { d / (d - e) };
                    let l = node(i) + t * (node(ii) - node(i));
                    let m = node(j) + t * (node(jj) - node(j));
                    crossings.push([l, m, jacobian_det_slice(SlicePoint::new(l, m))]);
                }
            }
        }
    }
    let max_distance_to_lines = crossings.iter().map(|p| distance_to_lines(p[0], p[1])).fold(0.0, f64::max);
    let mut max_line_gap: f64 = 0.0;
    let samples = 4 * n;
    for k in 0..=samples {
        let m = lo + (hi - lo) * k as f64 / samples as f64;
        for l in [0.0, 3.0 * m, -3.0 * m] {
            if l < lo || l > hi {
                continue;
            }
            let near = crossings.iter().map(|p| ((p[0] - l).powi(2) + (p[1] - m).powi(2)).sqrt()).fold(f64::INFINITY, f64::min);
            max_line_gap = max_line_gap.max(near);
        }
    }
    ZeroLocus { crossings, max_distance_to_lines, max_line_gap, spacing: h }
}

/// On the grid `λ = a·h, μ = b·h` (integers `|a|, |b| ≤ k`): count nodes where the three
/// descriptions of the singular set (lines, zero Jacobian, repeated eigenvalues) disagree.
pub fn locus_predicate_disagreements(k: i64, h: f64) -> usize {
    let mut bad = 0;
    for a in -k..=k {
        for b in -k..=k {
            let sp = SlicePoint::new(a as f64 * h, b as f64 * h);
            let on_line = a == 0 || a == 3 * b || a == -3 * b;
            let scale = 1.0 + sp.lam.abs().powi(3) + sp.mu_s.abs().powi(3);
            let zero_det = jacobian_det_slice(sp).abs() <= 1e-9 * scale;
            if on_line != zero_det || on_line != degenerate_eigenvalues(sp) {
                bad += 1;
            }
        }
    }
    bad
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerProfile {
    pub samples: usize,
    /// Counts of stabiliser dimensions 0..=3 for so(3) and su(2), on conjugated slice points.
    pub so3_counts: [usize; 4],
    pub su2_counts: [usize; 4],
    /// Fraction of points with a 1-dimensional so(3)-stabiliser along random curves `t ↦ exp(tX)·A`.
    pub curve_fraction: f64,
}

impl StabilizerProfile {
    pub fn max_dim(&self) -> usize {
        (0..4).rev().find(|&d| self.so3_counts[d] + self.su2_counts[d] > 0).unwrap_or(0)
    }
}

fn random_nondegenerate<R: Rng>(rng: &mut R) -> SlicePoint {
    loop {
        let sp = SlicePoint::new(normal(rng), normal(rng));
        if min_eigenvalue_gap(sp) > 1e-3 {
            return sp;
        }
    }
}

/// Stabiliser dimensions of `so(3)` and the block `su(2)` at random conjugates of
/// nondegenerate slice points.
pub fn stabilizer_profile(samples: usize, seed: u64) -> StabilizerProfile {
    let mut rng = seeded(seed);
    let so3 = so3_basis();
    let su2 = su2_block_basis();
    let mut so3_counts = [0; 4];
    let mut su2_counts = [0; 4];
    for _ in 0..samples {
        let a = slice_element(random_nondegenerate(&mut rng));
        let u = su3(&mut rng);
        let b = u * a * u.adjoint();
        so3_counts[stabilizer_dimension(&so3, &b, 1e-8)] += 1;
        su2_counts[stabilizer_dimension(&su2, &b, 1e-8)] += 1;
    }
    let mut hits = 0;
    let mut total = 0;
    for _ in 0..samples.min(100) {
        let a = slice_element(random_nondegenerate(&mut rng));
        let u0 = su3(&mut rng);
        let x = crate::rng::skew_hermitian::<3, _>(&mut rng, 1.0);
        for s in 0..50 {
            let g = crate::algebra::expm(&(x * c(0.1 * s as f64, 0.0))) * u0;
            let b = g * a * g.adjoint();
            total += 1;
            if stabilizer_dimension(&so3, &b, 1e-8) >= 1 {
                hits += 1;
            }
        }
    }
    StabilizerProfile {
        samples,
        so3_counts,
        su2_counts,
        curve_fraction: if total == 0 { 0.0 } else { hits as f64 / total as f64 },
    }
}

/// CSV rows `lambda,mu,det` of the zero-locus crossings.
pub fn zero_locus_csv(z: &ZeroLocus) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "mu", "det"]).expect("in-memory csv");
    for p in &z.crossings {
        w.write_record(p.iter().map(|v| format!("{v:.12e}"))).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::skew_hermitian;

    #[test]
    fn rho_examples() {
        assert_eq!(rho_invariants(&CMat3::zeros()).unwrap(), (0.0, 0.0));
        let a = CMat3::from_diagonal(&nalgebra::Vector3::new(I, I, I * -2.0));
        let (r1, r2) = rho_invariants(&a).unwrap();
        assert!((r1 + 6.0).abs() < 1e-14 && (r2 - 6.0).abs() < 1e-14);
        assert!(rho_invariants(&CMat3::identity()).is_err());
    }

    #[test]
    fn slice_examples() {
        assert_eq!(slice_element(SlicePoint::new(0.0, 0.0)), CMat3::zeros());
        assert_eq!(slice_element(SlicePoint::new(1.0, 0.0)), so3_basis()[0]);
        let sp = SlicePoint::new(0.7, -0.4);
        let (r1, r2) = rho_invariants(&slice_element(sp)).unwrap();
        let (s1, s2) = slice_rho(sp);
        assert!((r1 - s1).abs() < 1e-14 && (r2 - s2).abs() < 1e-14);
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian_det_slice(SlicePoint::new(0.0, 0.3)), 0.0);
        assert!(jacobian_det_slice(SlicePoint::new(2.1, 0.7)).abs() < 1e-10);
        assert_eq!(jacobian_det_slice(SlicePoint::new(1.0, 1.0)), -192.0);
        let fd = jacobian_det_fd(SlicePoint::new(1.0, 1.0), 1e-4).unwrap();
        assert!((fd + 192.0).abs() < 1e-5);
    }

    #[test]
    fn degeneracy_examples() {
        assert!(degenerate_eigenvalues(SlicePoint::new(0.0, 1.0)));
        assert!(degenerate_eigenvalues(SlicePoint::new(3.0, 1.0)));
        assert!(!degenerate_eigenvalues(SlicePoint::new(1.0, 1.0)));
    }

    #[test]
    fn stabilizer_examples() {
        let a = slice_element(SlicePoint::new(0.8, 0.3));
        assert_eq!(stabilizer_dimension(&so3_basis(), &a, 1e-8), 1);
        let d = CMat3::from_diagonal(&nalgebra::Vector3::new(I, I, I * -2.0));
        assert_eq!(stabilizer_dimension(&su2_block_basis(), &d, 1e-8), 3);
        let mut rng = seeded(5);
        let mut r = skew_hermitian::<3, _>(&mut rng, 1.0);
        let tr = r.trace() / c(3.0, 0.0);
        for i in 0..3 {
            r[(i, i)] -= tr;
        }
        assert_eq!(stabilizer_dimension(&so3_basis(), &r, 1e-8), 0);
    }
}
