//! Checks against independently derived values: hand expansions, closed forms and printed fixtures.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use nalgebra::Vector6;
use nkslag::algebra::c;
use nkslag::chart::{metric_matrix, section_s, ChartPoint};
use nkslag::cli::{basis_to_json, cmd_canon, cmd_identities, cmd_scan, cmd_verify, Tolerances};
use nkslag::flag::{jacobian_det_fd, jacobian_det_printed, jacobian_det_slice, SlicePoint, DISPLAYED_JACOBIAN_FACTOR};
use nkslag::homogeneous::{
    cubic_invariants, fit_s3_normal_form, nk_christoffels, second_fundamental_form, CubicForm, SymmetryOrder,
};
use nkslag::linear_model::{w_theta, LagBasis};
use nkslag::rng;
use nkslag::structure_eqs::{
    beta31_readings, verify_structure_equations, Beta31Reading, NamedExample, SolutionConstants,
};
use nkslag::symmetry::{
    fixture_fit, k1_closed_form, k2_nu_closed_form, k2_slice_mu, k3_slice_closed_form, k3_slice_point, moment,
    points, printed_killing_fixtures, FixtureStatus, GeneratorSet, GridSpec, GroupId,
};

#[test]
fn section_at_real_point() {
    let s = section_s(&ChartPoint::real(0.0, SQRT_2, 0.0)).unwrap().embed_c4();
    let (a, b) = (1.0 / 3f64.sqrt(), SQRT_2 / 3f64.sqrt());
    // [[a, −b], [b, a]] on real quaternions: the C⁴ embedding repeats each entry on the diagonal of its block.
    let expect = [[a, 0.0, -b, 0.0], [0.0, a, 0.0, -b], [b, 0.0, a, 0.0], [0.0, b, 0.0, a]];
    for i in 0..4 {
        for j in 0..4 {
            assert!((s[(i, j)] - c(expect[i][j], 0.0)).norm() < 1e-14, "({i},{j})");
        }
    }
}

#[test]
fn metric_compatibility_of_christoffels() {
    let mut r = rng::seeded(5);
    let h = 1e-3;
    for _ in 0..5 {
        let p = rng::chart_point(&mut r, 0.6);
        let gam = nk_christoffels(&p, h).unwrap();
        let x = p.to_real6();
        let g = metric_matrix(&p);
        let mut worst: f64 = 0.0;
        for k in 0..6 {
            let mut e = Vector6::zeros();
            e[k] = h;
            let gp = metric_matrix(&ChartPoint::from_real6(&(x + e)));
            let gm = metric_matrix(&ChartPoint::from_real6(&(x - e)));
            let dg = (gp - gm) / (2.0 * h);
            for i in 0..6 {
                for j in 0..6 {
                    let mut v = dg[(i, j)];
                    for m in 0..6 {
                        v -= gam[m][k][i] * g[(m, j)] + gam[m][k][j] * g[(i, m)];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        assert!(worst < 1e-5, "{worst}");
    }
}

#[test]
fn exotic_cubic_matches_displayed_polynomial() {
    let a = (2.0f64 / 5.0).sqrt();
    let poly = CubicForm::from_polynomial(&[
        ([3, 0, 0], 2.0 * a),
        ([1, 2, 0], -3.0 * a),
        ([1, 0, 2], -3.0 * a),
        ([1, 1, 1], -9.0 / 5.0 * 6f64.sqrt()),
    ]);
    // h111 = 2a, h122 = h133 = −a, h123 = −(3/10)√6: 4a² + 6a² + 6·(54/100) = 7.24.
    assert!((poly.norm2() - 7.24).abs() < 1e-12);
    let (_, gen, p) = NamedExample::Exotic.orbit();
    let sff = second_fundamental_form(&gen.xis, &p, 1e-3).unwrap();
    assert!((sff.cubic.norm2() - poly.norm2()).abs() < 1e-4);
    assert_eq!(cubic_invariants(&poly, 1e-6).symmetry, SymmetryOrder::Finite(2));
}

#[test]
fn chiang_cubic_has_s3_normal_form() {
    let (_, gen, p) = NamedExample::Chiang.orbit();
    let sff = second_fundamental_form(&gen.xis, &p, 1e-3).unwrap();
    let (a, b, res) = fit_s3_normal_form(&sff.cubic, 1e-6).expect("order-3 axis");
    assert!(res < 1e-4, "{res}");
    assert!(a.hypot(b) > 0.1);
    assert_eq!(cubic_invariants(&sff.cubic, 1e-6).symmetry, SymmetryOrder::Finite(6));
}

#[test]
fn berger_cubic_is_so2_invariant() {
    let f = 0.7;
    let poly = CubicForm::from_polynomial(&[([3, 0, 0], -f), ([1, 2, 0], 1.5 * f), ([1, 0, 2], 1.5 * f)]);
    assert!(poly.trace_residual() < 1e-14);
    assert_eq!(cubic_invariants(&poly, 1e-6).symmetry, SymmetryOrder::Continuous { dim: 1 });
    assert_eq!(cubic_invariants(&CubicForm::zero(), 1e-6).symmetry, SymmetryOrder::Infinite);
}

#[test]
fn closed_forms_match_contraction() {
    let mut r = rng::seeded(11);
    let k1 = GeneratorSet::new(GroupId::K1);
    let k2 = GeneratorSet::new(GroupId::K2);
    let k3 = GeneratorSet::new(GroupId::K3);
    for _ in 0..50 {
        let p = rng::chart_point(&mut r, 1.0);
        let (m, cf) = (moment(&k1, &p).unwrap(), k1_closed_form(&p));
        for i in 0..3 {
            assert!((m.mu[i] - cf.mu[i]).abs() < 1e-12);
        }
        assert!((m.nu - cf.nu).abs() < 1e-12);
        assert!((moment(&k2, &p).unwrap().nu - k2_nu_closed_form(&p)).abs() < 1e-12);

        let (a, b, phi) = (rng::normal(&mut r), rng::normal(&mut r), rng::normal(&mut r));
        let m = moment(&k3, &k3_slice_point(a, b, phi)).unwrap();
        let (mu, nu) = k3_slice_closed_form(a, b, phi);
        for i in 0..3 {
            assert!((m.mu[i] - mu[i]).abs() < 1e-12);
        }
        assert!((m.nu - nu).abs() < 1e-12);

        let z3 = rng::complex_normal(&mut r);
        let m = moment(&k2, &ChartPoint::new(c(a, 0.0), c(0.0, 0.0), z3)).unwrap();
        let mu = k2_slice_mu(a, z3);
        for i in 0..3 {
            assert!((m.mu[i] - mu[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn printed_killing_fixtures_fit() {
    let mut r = rng::seeded(12);
    let pts: Vec<_> = (0..20).map(|_| rng::chart_point(&mut r, 1.0)).collect();
    for fx in printed_killing_fixtures() {
        let (lam, misfit) = fixture_fit(&fx, &pts);
        match fx.status {
            FixtureStatus::Match => {
                assert!(misfit < 1e-12, "{}: misfit {misfit}", fx.label);
                assert!((lam - fx.ratio).abs() < 1e-12, "{}: ratio {lam}", fx.label);
            }
            FixtureStatus::MismatchDocumented => assert!(misfit > 1e-3, "{}", fx.label),
        }
    }
}

#[test]
fn named_moment_values() {
    let k3 = GeneratorSet::new(GroupId::K3);
    for p in [points::p31(), points::p32()] {
        let m = moment(&k3, &p).unwrap();
        assert!(m.mu.iter().all(|x| x.abs() < 1e-14));
    }
    let m = moment(&GeneratorSet::new(GroupId::K1), &points::p11()).unwrap();
    assert!(m.mu.iter().all(|x| x.abs() < 1e-14));
    assert!((m.nu + 2.0 / 27.0).abs() < 1e-14);
}

#[test]
fn jacobian_values() {
    let sp = SlicePoint::new(1.0, 1.0);
    assert!((jacobian_det_slice(sp) + 192.0).abs() < 1e-12);
    assert!((jacobian_det_fd(sp, 1e-4).unwrap() + 192.0).abs() < 1e-5);
    assert!((jacobian_det_printed(sp) - DISPLAYED_JACOBIAN_FACTOR * (-192.0)).norm() < 1e-12);
    assert!(jacobian_det_slice(SlicePoint::new(2.1, 0.7)).abs() < 1e-12);
    assert!(jacobian_det_slice(SlicePoint::new(0.0, 0.4)).abs() < 1e-12);
}

#[test]
fn structure_equation_sensitivity() {
    let mut sol = SolutionConstants::exotic();
    let (x, y, z, w) = (-(2.0f64 / 5.0).sqrt(), 0.0, 0.0, -0.6 * 1.5f64.sqrt() + 0.01);
    sol.h = nkslag::structure_eqs::h_from_xyzw(x, y, z, w);
    let rep = verify_structure_equations(&sol).unwrap();
    assert!(rep.max() > 1e-4, "{}", rep.max());

    let rep = verify_structure_equations(&SolutionConstants::theta0(0.5, Beta31Reading::WithF)).unwrap();
    assert!(rep.get("drho1").unwrap() < 1e-12);
}

#[test]
fn literal_beta31_reading_does_not_close() {
    for f in [-1.0, 0.5] {
        let reps = beta31_readings(f);
        let with_f = reps.iter().find(|r| r.reading == Beta31Reading::WithF).unwrap();
        let literal = reps.iter().find(|r| r.reading == Beta31Reading::Literal).unwrap();
        assert!(with_f.closure < 1e-12);
        assert!(literal.closure > 0.1, "f = {f}: {}", literal.closure);
    }
}

#[test]
fn cli_canon_round_trip() {
    let t = Tolerances::default();
    let r = cmd_canon(&basis_to_json(&w_theta(0.2)), &t).unwrap();
    assert!(r.pass);
    assert!((r.data["theta"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(r.data["n_w"], 1);

    let r = cmd_canon(&basis_to_json(&LagBasis::standard_r3()), &t).unwrap();
    assert!((r.data["theta"].as_f64().unwrap() - FRAC_PI_4).abs() < 1e-15);
    assert_eq!(r.data["n_w"], 2);

    assert!(cmd_canon("{\"matrix\": [1, 2", &t).is_err());
    assert!(cmd_canon("[[1, 2, 3]]", &t).is_err());
}

#[test]
fn cli_reports_are_stable() {
    let t = Tolerances::default();
    let a = cmd_identities(3, false, &t).unwrap().to_json();
    let b = cmd_identities(3, false, &t).unwrap().to_json();
    assert_eq!(a, b);
    assert!(a.contains("\"schema\": 1"));

    let empty = cmd_identities(0, false, &t).unwrap();
    assert!(empty.pass && empty.checks.is_empty());
    assert_eq!(empty.data["empty"], true);

    let bad = cmd_identities(3, true, &t).unwrap();
    assert!(!bad.pass);
    assert!(bad.failed().iter().all(|c| c.name.ends_with(".dnu")));
}

#[test]
fn cli_verify_and_scan() {
    let t = Tolerances::default();
    for ex in NamedExample::ALL {
        let r = cmd_verify(ex, &t).unwrap();
        assert!(r.pass, "{}: {:?}", ex.name(), r.failed());
    }
    for id in [GroupId::K1, GroupId::K2, GroupId::K3] {
        let r = cmd_scan(id, &GridSpec::default_for(id), &t).unwrap();
        assert!(r.pass, "{}: {:?}", id.name(), r.failed());
        assert_eq!(r.artifacts.len(), 1);
    }
}
