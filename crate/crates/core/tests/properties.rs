use std::f64::consts::FRAC_PI_4;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use nkslag::algebra::{c, embed_c4, expm, sym3_eigenvalues, CMat3, QuatMat2, Quaternion};
use nkslag::chart::{act, coframe, metric_g, nk_omega, omega_c3, omega_vertical, section_pullback_fd, TangentVec};
use nkslag::flag::rho_invariants;
use nkslag::homogeneous::{rotate_generators, second_fundamental_form, CubicForm, OrbitChart};
use nkslag::linear_model::{canonical_theta, circle_representative, random_h, random_slag_c2, w_theta};
use nkslag::rng::{self, complex_normal, normal};
use nkslag::structure_eqs::{
    alpha_beta_from_connection, connection_from_h, verify_structure_equations, NamedExample, SolutionConstants,
};
use nkslag::symmetry::{adjoint_rotation, complex_rank, moment, points, GeneratorSet, GroupId};
use nkslag::ChartPoint;
use proptest::prelude::*;

fn quat(r: &mut rng::SeededRng) -> Quaternion {
    Quaternion::new(complex_normal(r), complex_normal(r))
}

fn qmat(r: &mut rng::SeededRng) -> QuatMat2 {
    QuatMat2::new(quat(r), quat(r), quat(r), quat(r))
}

fn rotation(r: &mut rng::SeededRng) -> Matrix3<f64> {
    let q = nalgebra::Quaternion::new(normal(r), normal(r), normal(r), normal(r));
    UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner()
}

fn group() -> impl Strategy<Value = GroupId> {
    prop_oneof![Just(GroupId::K1), Just(GroupId::K2), Just(GroupId::K3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embed_is_multiplicative(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let (a, b) = (qmat(&mut r), qmat(&mut r));
        let d = embed_c4(&(a * b)) - embed_c4(&a) * embed_c4(&b);
        prop_assert!(d.camax() < 1e-12 * (1.0 + a.max_abs() * b.max_abs()));
    }

    #[test]
    fn expm_inverse(seed in any::<u64>(), s in 0.0f64..5.0) {
        let mut r = rng::seeded(seed);
        let mut a = nalgebra::Matrix4::from_fn(|_, _| complex_normal(&mut r));
        a *= c(s / a.norm().max(1e-12), 0.0);
        let e = expm(&a) * expm(&(-a)) - nalgebra::Matrix4::identity();
        prop_assert!(e.camax() < 1e-11);
    }

    #[test]
    fn sym3_eigenvalues_rotation_invariant(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let m = Matrix3::from_fn(|_, _| normal(&mut r));
        let s = m + m.transpose();
        let q = rotation(&mut r);
        let a = sym3_eigenvalues(&s).unwrap();
        let b = sym3_eigenvalues(&(q * s * q.transpose())).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_bounded_by_metric(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let p = rng::chart_point(&mut r, 1.0);
        let (x, y) = (rng::tangent(&mut r), rng::tangent(&mut r));
        let w = nk_omega(&p, &x, &y).abs();
        let bound = (metric_g(&p, &x, &x) * metric_g(&p, &y, &y)).sqrt();
        prop_assert!(w <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn horizontal_omega_uses_first_two_slots(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let p = rng::chart_point(&mut r, 1.0);
        let (x, y) = (rng::tangent(&mut r), rng::tangent(&mut r));
        let (mut a, mut b) = (coframe(&p, &x).c, coframe(&p, &y).c);
        a[2] = c(0.0, 0.0);
        b[2] = c(0.0, 0.0);
        let h = nk_omega(&p, &x, &y) - omega_vertical(&p, &x, &y);
        prop_assert!((h - omega_c3(&a, &b)).abs() < 1e-12 * (1.0 + h.abs()));
    }

    #[test]
    fn coframe_matches_section_pullback(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let p = rng::chart_point(&mut r, 0.7);
        for k in 0..6 {
            let a = section_pullback_fd(&p, k, 1e-3).unwrap();
            let b = coframe(&p, &TangentVec::coord(k));
            for i in 0..3 {
                prop_assert!((a.c[i] - b.c[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn moment_equivariance(id in group(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let gen = GeneratorSet::new(id);
        let p = rng::chart_point(&mut r, 0.7);
        let g = gen.group_element([normal(&mut r), normal(&mut r), normal(&mut r)]);
        let Ok(gp) = act(&g, &p) else { return Ok(()) };
        prop_assume!(gp.norm2() < 1e6);
        let (m0, m1) = (moment(&gen, &p).unwrap(), moment(&gen, &gp).unwrap());
        let rot = adjoint_rotation(&gen, &g);
        let rm = rot * Vector3::from(m0.mu);
        for i in 0..3 {
            prop_assert!((m1.mu[i] - rm[i]).abs() < 1e-9);
        }
        prop_assert!((m1.nu - m0.nu).abs() < 1e-9);
        prop_assert!((rot.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn moment_is_projectively_invariant(id in group(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let gen = GeneratorSet::new(id);
        let p = rng::chart_point(&mut r, 1.0);
        let s = complex_normal(&mut r);
        let q = nkslag::chart::hom_to_chart(&p.hom().scaled(s)).unwrap();
        let (a, b) = (moment(&gen, &p).unwrap(), moment(&gen, &q).unwrap());
        for i in 0..3 {
            prop_assert!((a.mu[i] - b.mu[i]).abs() < 1e-10);
            prop_assert!((a.mu_v[i] - b.mu_v[i]).abs() < 1e-10);
        }
        prop_assert!((a.nu - b.nu).abs() < 1e-10);
    }

    #[test]
    fn nu_vanishes_with_complex_rank(id in group(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let gen = GeneratorSet::new(id);
        let p = rng::chart_point(&mut r, 1.0);
        let nu = moment(&gen, &p).unwrap().nu;
        prop_assert_eq!(nu.abs() > 1e-9, complex_rank(&gen, &p, 1e-9) == 3);
    }

    #[test]
    fn canonical_theta_invariant_and_idempotent(theta in 0.0f64..FRAC_PI_4, seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let w = w_theta(theta).transformed(&random_h(&mut r));
        let cf = canonical_theta(&w).unwrap();
        prop_assert!((cf.theta - theta).abs() < 1e-9);
        let again = canonical_theta(&w_theta(cf.theta)).unwrap();
        prop_assert!((again.theta - cf.theta).abs() < 1e-12);
        prop_assert_eq!(again.n_w, cf.n_w);
    }

    #[test]
    fn circle_reaches_representative(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let v = random_slag_c2(&mut r);
        prop_assert!(circle_representative(&v).unwrap().residual < 1e-8);
    }

    #[test]
    fn ricci_independent_of_su2_basis(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let gen = GeneratorSet::new(GroupId::K3);
        let p = points::p32();
        let base = OrbitChart::new(&gen.xis, &p).unwrap().ricci_eigenvalues().unwrap();
        let rotated = rotate_generators(&gen.su2(), &mut r);
        let ev = OrbitChart::new(&rotated, &p).unwrap().ricci_eigenvalues().unwrap();
        for k in 0..3 {
            prop_assert!((ev[k] - base[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn cubic_norm_rotation_invariant(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let h = SolutionConstants::exotic().h;
        let q = rotation(&mut r);
        let rot: CubicForm = h.rotated(&q);
        prop_assert!((rot.norm2() - h.norm2()).abs() < 1e-12);
        prop_assert!(rot.trace_residual() < 1e-12);
    }

    #[test]
    fn rho_conjugation_invariant(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let mut a: CMat3 = rng::skew_hermitian::<3, _>(&mut r, 1.0);
        let tr = a.trace() / c(3.0, 0.0);
        for i in 0..3 {
            a[(i, i)] -= tr;
        }
        let u = rng::su3(&mut r);
        let (x, y) = (rho_invariants(&a).unwrap(), rho_invariants(&(u * a * u.adjoint())).unwrap());
        prop_assert!((x.0 - y.0).abs() < 1e-12 * (1.0 + x.0.abs()));
        prop_assert!((x.1 - y.1).abs() < 1e-12 * (1.0 + x.1.abs()));
    }
}

#[test]
fn different_spectra_differ_in_rho() {
    let d = |a: f64, b: f64| CMat3::from_diagonal(&Vector3::new(c(0.0, a), c(0.0, b), c(0.0, -a - b)));
    let x = rho_invariants(&d(1.0, 2.0)).unwrap();
    let y = rho_invariants(&d(1.0, 1.5)).unwrap();
    assert!((x.0 - y.0).abs() + (x.1 - y.1).abs() > 0.1);
}

#[test]
fn beta_symmetric_and_trace_free() {
    for ex in NamedExample::ALL {
        let sol = ex.solution();
        for k in 0..3 {
            let cv = connection_from_h(&sol, k, 1e-8).unwrap();
            let (alpha, beta) = alpha_beta_from_connection(sol.theta, &cv, 0.0);
            assert!((beta - beta.transpose()).amax() < 1e-14, "{}", ex.name());
            assert!(beta.trace().abs() < 1e-14, "{}", ex.name());
            assert!((alpha + alpha.transpose()).amax() < 1e-14, "{}", ex.name());
        }
    }
}

#[test]
fn beta_ideal_closed_at_quarter_pi() {
    let rep = verify_structure_equations(&SolutionConstants::rp3()).unwrap();
    assert!(rep.get("dbeta").unwrap() < 1e-12);
}

#[test]
fn mean_curvature_vanishes_on_named_orbits() {
    for ex in NamedExample::ALL {
        let (_, gen, p) = ex.orbit();
        let sff = second_fundamental_form(&gen.xis, &p, 1e-3).unwrap();
        assert!(sff.mean_curvature < 1e-4, "{}: {}", ex.name(), sff.mean_curvature);
        assert!(sff.symmetry_residual < 1e-4);
        assert!(sff.cubic.trace_residual() < 1e-4);
    }
}

#[test]
fn fixed_line_has_vanishing_nu() {
    let gen = GeneratorSet::new(GroupId::K1);
    let p = ChartPoint::new(c(0.3, 0.4), c(0.0, 0.0), c(0.0, 0.0));
    assert!(moment(&gen, &p).unwrap().nu.abs() < 1e-14);
    assert!(complex_rank(&gen, &p, 1e-9) < 3);
}
