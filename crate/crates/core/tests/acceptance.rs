//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use nkslag::chart::{hom_to_chart, ChartPoint, HomPoint, TangentVec};
use nkslag::cli::{cmd_identities, Tolerances};
use nkslag::flag::{jacobian_zero_locus, locus_predicate_disagreements, stabilizer_profile};
use nkslag::homogeneous::{cubic_invariants, second_fundamental_form, OrbitChart, SymmetryOrder};
use nkslag::linear_model::{canonical_theta, omega_v_norm, random_h, stabilizer_algebra_dim, w_theta};
use nkslag::rng;
use nkslag::structure_eqs::{
    assemble_bonnet, connection_from_h, cross_route, solve_f_roots, theta0_generators, verify_structure_equations,
    NamedExample, SolutionConstants,
};
use nkslag::symmetry::{moment, points, scan_slice, theta_at, values, GeneratorSet, GridSpec, GroupId, SliceRoot};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn roots_near(roots: &[SliceRoot], expected: &[[f64; 2]]) -> f64 {
    expected
        .iter()
        .map(|e| {
            roots
                .iter()
                .map(|r| (r.coords[0] - e[0]).abs().max((r.coords[1] - e[1]).abs()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn k3_slice() -> Outcome {
    let start = Instant::now();
    let roots = scan_slice(GroupId::K3, &GridSpec::default_for(GroupId::K3), 1e-6).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let expected = [[0.0, 1.0], [3f64.sqrt(), 0.0], [1.0 / 5f64.sqrt(), 0.0]];
    let err = roots_near(&roots, &expected);
    outcome(
        roots.len() == 3 && err < 1e-8 && secs < 30.0,
        format!("{} roots, max error {err:.1e}, {secs:.2}s", roots.len()),
    )
}

fn k2_slice() -> Outcome {
    let roots = scan_slice(GroupId::K2, &GridSpec::default_for(GroupId::K2), 1e-6).unwrap();
    let expected = [[1.0, 0.0], [0.0, (2.0 + 3f64.sqrt()).sqrt()]];
    let err = roots_near(&roots, &expected);
    let unclassified = roots.iter().filter(|r| r.tag == "unclassified").count();
    let tags: Vec<_> = roots.iter().map(|r| r.tag.as_str()).collect();
    outcome(err < 1e-8 && unclassified == 0, format!("max error {err:.1e}, roots {tags:?}"))
}

fn theta_table() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for ex in NamedExample::ALL {
        let (label, gen, p) = ex.orbit();
        let th = theta_at(&gen.xis, &p).unwrap();
        let target = match ex {
            NamedExample::Berger | NamedExample::S1S2 => 0.0,
            NamedExample::Rp3 | NamedExample::Chiang => FRAC_PI_4,
            NamedExample::Exotic => 0.5 * (7.0 * 2f64.sqrt() / (5.0 * 5f64.sqrt())).acos(),
        };
        worst = worst.max((th - target).abs());
        parts.push(format!("{label}={th:.10}"));
    }
    outcome(worst < 1e-9, format!("{} (max error {worst:.1e})", parts.join(" ")))
}

fn f_roots() -> Outcome {
    let roots = solve_f_roots();
    let exact = roots == [-1.0, 0.5];
    let c: Vec<f64> = roots.iter().map(|&f| theta0_generators(f).closure).collect();
    let c0 = theta0_generators(0.0).closure;
    outcome(
        exact && c.iter().all(|&x| x < 1e-12) && c0 > 0.1,
        format!("roots {roots:?}, closure {:.1e}/{:.1e}, f=0 closure {c0:.3}", c[0], c[1]),
    )
}

fn exotic() -> Outcome {
    let sol = SolutionConstants::exotic();
    let conn = (0..3).map(|k| connection_from_h(&sol, k, 1e-8).unwrap().residual).fold(0.0, f64::max);
    let alg = assemble_bonnet(&sol, 1e-8).unwrap();
    let se = verify_structure_equations(&sol).unwrap().max();
    let (_, gen, p) = NamedExample::Exotic.orbit();
    let sff = second_fundamental_form(&gen.xis, &p, 1e-3).unwrap();
    let sym = cubic_invariants(&sff.cubic, 1e-6).symmetry;
    let ev = OrbitChart::new(&gen.xis, &p).unwrap().ricci_eigenvalues().unwrap();
    let s15 = 15f64.sqrt();
    let target = [-99.0 / 50.0, -27.0 / 50.0 * (-2.0 + s15), 27.0 / 50.0 * (2.0 + s15)];
    let ricci = (0..3).map(|i| (ev[i] - target[i]).abs()).fold(0.0, f64::max);
    let scale = (0..3).map(|i| ev[i] / target[i]).sum::<f64>() / 3.0;
    outcome(
        conn < 1e-12 && alg.closure < 1e-10 && se < 1e-9 && sym == SymmetryOrder::Finite(2) && ricci < 1e-6,
        format!(
            "connection {conn:.1e}, closure {:.1e}, structure {se:.1e}, symmetry {sym:?}, Ricci {ev:.6?} (error {ricci:.1e}, scale {scale:.9})",
            alg.closure
        ),
    )
}

fn totally_geodesic() -> Outcome {
    let ii = |ex: NamedExample| {
        let (_, gen, p) = ex.orbit();
        second_fundamental_form(&gen.xis, &p, 1e-3).unwrap().norm
    };
    let assembled = |sol: SolutionConstants| {
        let alg = assemble_bonnet(&sol, 1e-8).unwrap();
        second_fundamental_form(&alg.gens, &ChartPoint::origin(), 1e-3).unwrap().norm
    };
    let rp3 = ii(NamedExample::Rp3);
    let rp3_assembled = assembled(SolutionConstants::rp3());
    let others = [
        ("chiang", ii(NamedExample::Chiang)),
        ("berger", ii(NamedExample::Berger)),
        ("s1s2", ii(NamedExample::S1S2)),
        ("berger assembled", assembled(SolutionConstants::berger())),
        ("s1s2 assembled", assembled(SolutionConstants::s1s2())),
    ];
    let min_other = others.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    outcome(
        rp3 < 1e-4 && rp3_assembled < 1e-4 && min_other > 0.1,
        format!("RP3 |II| {rp3:.1e} (assembled {rp3_assembled:.1e}), others min {min_other:.3} {others:.3?}"),
    )
}

fn moment_identities() -> Outcome {
    let r = cmd_identities(100, false, &Tolerances::default()).unwrap();
    let worst = |suffix: &str| r.checks.iter().filter(|c| c.name.ends_with(suffix)).map(|c| c.residual).fold(0.0, f64::max);
    outcome(
        r.pass && r.checks.len() == 16,
        format!(
            "dnu {:.1e}, dmu {:.1e}, Re psi {:.1e}, equivariance {:.1e}, coframe {:.1e}",
            worst(".dnu"),
            worst(".dmu"),
            worst(".re_psi"),
            worst(".mu_equivariance").max(worst(".nu_invariance")),
            worst(".section_pullback")
        ),
    )
}

fn grad_nu(gen: &GeneratorSet, p: &ChartPoint) -> f64 {
    let h = 1e-3;
    (0..6)
        .map(|k| {
            let e = TangentVec::coord(k);
            let nu = |t: f64| moment(gen, &p.shifted(&e, t)).unwrap().nu;
            ((8.0 * (nu(h) - nu(-h)) - (nu(2.0 * h) - nu(-2.0 * h))) / (12.0 * h)).abs()
        })
        .fold(0.0, f64::max)
}

fn nu_extrema() -> Outcome {
    let gen = GeneratorSet::new(GroupId::K3);
    let (p31, p32) = (points::p31(), points::p32());
    let (n31, n32) = (moment(&gen, &p31).unwrap().nu, moment(&gen, &p32).unwrap().nu);
    let d = grad_nu(&gen, &p31).max(grad_nu(&gen, &p32));
    let mut rng = rng::seeded(8);
    let (mut lo, mut hi, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    while n < 10_000 {
        let h = HomPoint([0; 4].map(|_| rng::complex_normal(&mut rng)));
        let Ok(p) = hom_to_chart(&h) else { continue };
        let nu = moment(&gen, &p).unwrap().nu;
        lo = lo.min(nu);
        hi = hi.max(nu);
        n += 1;
    }
    let inside = lo >= n31 - 1e-12 && hi <= n32 + 1e-12;
    let doubled = gen.scaled(values::GENERATOR_SCALE_PRINTED);
    let printed_gap = (moment(&doubled, &p31).unwrap().nu - values::NU_P31_PRINTED)
        .abs()
        .max((moment(&doubled, &p32).unwrap().nu - values::NU_P32_PRINTED).abs());
    let direct_gap = (n31 - values::NU_P31).abs().max((n32 - values::NU_P32).abs());
    outcome(
        d < 1e-6 && inside && printed_gap < 1e-10 && direct_gap < 1e-12,
        format!(
            "|dnu| {d:.1e}; nu(P31)={n31:.6} nu(P32)={n32:.6}; samples in [{lo:.6}, {hi:.6}]; printed -18, 200/27 = 8 x direct (generators doubled), gap {printed_gap:.1e}"
        ),
    )
}

fn linear_model() -> Outcome {
    let omega = (0..50)
        .map(|i| {
            let th = FRAC_PI_2 * i as f64 / 49.0;
            (omega_v_norm(&w_theta(th)).unwrap() - 0.5 * (2.0 * th).cos().abs()).abs()
        })
        .fold(0.0, f64::max);
    let mut rng = rng::seeded(9);
    let mut inv: f64 = 0.0;
    for th in [0.0, 0.1, 0.2, 0.5, 0.7, FRAC_PI_4] {
        let w = w_theta(th);
        for _ in 0..100 {
            let cf = canonical_theta(&w.transformed(&random_h(&mut rng))).unwrap();
            inv = inv.max((cf.theta - th).abs());
        }
    }
    let dims = [stabilizer_algebra_dim(FRAC_PI_4), stabilizer_algebra_dim(0.17), stabilizer_algebra_dim(0.0)];
    outcome(
        omega < 1e-10 && inv < 1e-9 && dims == [1, 0, 1],
        format!("omega_V error {omega:.1e}, H-invariance error {inv:.1e}, stabiliser dims {dims:?}"),
    )
}

fn flag_manifold() -> Outcome {
    let z = jacobian_zero_locus(200, -3.0, 3.0);
    let dis = locus_predicate_disagreements(100, 0.03);
    let prof = stabilizer_profile(10_000, 10);
    outcome(
        z.matches_lines() && dis == 0 && prof.max_dim() <= 1,
        format!(
            "{} crossings, max distance {:.1e} (spacing {:.3}), predicate disagreements {dis}, stabiliser dims so3 {:?} su2 {:?}",
            z.crossings.len(),
            z.max_distance_to_lines,
            z.spacing,
            prof.so3_counts,
            prof.su2_counts
        ),
    )
}

fn cross_module() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for ex in NamedExample::ALL {
        let cr = cross_route(ex, 1e-3).unwrap();
        worst = worst.max(cr.max_gap());
        parts.push(format!("{}:{:.1e}", ex.name(), cr.max_gap()));
    }
    outcome(worst < 1e-4, format!("max gap {worst:.1e} [{}]", parts.join(" ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("K3 slice classification", k3_slice),
        ("K2 slice", k2_slice),
        ("theta table", theta_table),
        ("f-roots and theta=0 closure", f_roots),
        ("exotic solution", exotic),
        ("totally geodesic uniqueness", totally_geodesic),
        ("moment identities", moment_identities),
        ("nu extrema for K3", nu_extrema),
        ("linear model", linear_model),
        ("flag manifold", flag_manifold),
        ("cross-route agreement", cross_module),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
