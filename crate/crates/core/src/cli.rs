//! Report-producing drivers behind the `nkslag` binary.
//!
//! Every command returns a [`Report`]: a list of named checks with value, target,
//! residual and verdict, plus free-form data and optional file artifacts (CSV) that
//! the binary writes to `--out-dir`. Reports are deterministic for a fixed seed.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::C64;
use crate::chart::{act, coframe, section_pullback_fd, ChartPoint, TangentVec};
use crate::flag::{
    jacobian_det_fd, jacobian_det_printed, jacobian_det_slice, jacobian_zero_locus, locus_predicate_disagreements,
    stabilizer_profile, zero_locus_csv, SlicePoint, DISPLAYED_JACOBIAN_FACTOR,
};
use crate::homogeneous::{cubic_invariants, fit_s3_normal_form, second_fundamental_form, OrbitChart, SymmetryOrder};
use crate::linear_model::{canonical_theta, is_special_lagrangian_subspace, theta_by_formula, LagBasis};
use crate::structure_eqs::{assemble_bonnet, cross_route, verify_structure_equations, NamedExample};
use crate::symmetry::{
    adjoint_rotation, dmu_identity_residual, dnu_identity_residual_with, is_sl_orbit, moment, reps_vanishing_check,
    scan_slice, theta_at, values, GeneratorSet, GridSpec, GroupId, SliceRoot, DNU_COEFF,
};
use crate::{rng, NkError, Result};

pub const SCHEMA: u32 = 1;

/// Bounds used by the identity suite; five-point stencils make these reachable at step 1e-3.
pub mod bounds {
    pub const THETA: f64 = 1e-9;
    pub const IDENTITY_FD: f64 = 1e-6;
    pub const RE_PSI: f64 = 1e-10;
    pub const EQUIVARIANCE: f64 = 1e-9;
    pub const CONNECTION: f64 = 1e-12;
    pub const CLOSURE: f64 = 1e-10;
    pub const STRUCTURE: f64 = 1e-9;
    pub const RICCI: f64 = 1e-6;
    pub const NOT_GEODESIC: f64 = 0.1;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Algebraic checks.
    pub tol: f64,
    /// Checks limited by finite differences.
    pub fd_tol: f64,
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol: 1e-8, fd_tol: 1e-4, fd_step: 1e-3, seed: 42 }
    }
}

/// Where a target value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// A published value (classification table, displayed formula).
    Reference,
    /// An independent computation.
    Oracle,
    /// Holds by construction.
    Sanity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub target: Value,
    pub source: Source,
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    /// `|value − target| ≤ tol`.
    pub fn close(name: impl Into<String>, value: f64, target: f64, tol: f64, source: Source) -> Self {
        let residual = (value - target).abs();
        Check { name: name.into(), value: json!(value), target: json!(target), source, residual, pass: residual <= tol }
    }
    /// `value < bound` for a non-negative residual-like quantity.
    pub fn below(name: impl Into<String>, value: f64, bound: f64, source: Source) -> Self {
        Check {
            name: name.into(),
            value: json!(value),
            target: json!(format!("< {bound:e}")),
            source,
            residual: value,
            pass: value < bound,
        }
    }
    /// `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64, source: Source) -> Self {
        Check {
            name: name.into(),
            value: json!(value),
            target: json!(format!("> {bound:e}")),
            source,
            residual: (bound - value).max(0.0),
            pass: value > bound,
        }
    }
    pub fn equal<T: Serialize + PartialEq>(name: impl Into<String>, value: T, target: T, source: Source) -> Self {
        let pass = value == target;
        Check {
            name: name.into(),
            value: json!(value),
            target: json!(target),
            source,
            residual: if pass { 0.0 } else { 1.0 },
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    #[serde(skip)]
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub data: Value,
    pub notes: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Report {
    pub fn new(command: impl Into<String>, tolerances: Tolerances) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            tolerances,
            checks: Vec::new(),
            pass: true,
            data: json!({}),
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }
    pub fn push(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }
    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "target", "source", "residual", "pass"]).expect("csv write");
        for c in &self.checks {
            let src = serde_json::to_value(c.source).expect("source serialises");
            w.write_record([
                c.name.clone(),
                plain(&c.value),
                plain(&c.target),
                plain(&src),
                format!("{:e}", c.residual),
                c.pass.to_string(),
            ])
            .expect("csv write");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn symmetry_target(ex: NamedExample) -> (SymmetryOrder, &'static str) {
    match ex {
        NamedExample::Rp3 => (SymmetryOrder::Infinite, "SO(3)"),
        NamedExample::Berger | NamedExample::S1S2 => (SymmetryOrder::Continuous { dim: 1 }, "SO(2)"),
        NamedExample::Chiang => (SymmetryOrder::Finite(6), "S3"),
        NamedExample::Exotic => (SymmetryOrder::Finite(2), "Z2"),
    }
}

fn exotic_ricci() -> [f64; 3] {
    let s15 = 15f64.sqrt();
    [-99.0 / 50.0, -27.0 / 50.0 * (-2.0 + s15), 27.0 / 50.0 * (2.0 + s15)]
}

/// Full pipeline on one named example: orbit route, structure-equation route and their agreement.
pub fn cmd_verify(ex: NamedExample, t: &Tolerances) -> Result<Report> {
    let mut r = Report::new(format!("verify {}", ex.name()), *t);
    let (label, gen, p) = ex.orbit();
    let gens = &gen.xis;

    let sl = is_sl_orbit(gens, &p, t.tol);
    r.push(Check::equal("orbit.special_lagrangian", sl.is_sl, true, Source::Reference));
    r.push(Check::below("orbit.omega_max", sl.omega_max, t.tol, Source::Sanity));
    r.push(Check::equal("orbit.dimension", sl.dim, 3, Source::Reference));

    let theta = theta_at(gens, &p)?;
    r.push(Check::close("theta", theta, ex.theta(), bounds::THETA, Source::Reference));

    let sff = second_fundamental_form(gens, &p, t.fd_step)?;
    let inv = cubic_invariants(&sff.cubic, 1e-6);
    if ex == NamedExample::Rp3 {
        r.push(Check::below("second_fundamental_form.norm", sff.norm, t.fd_tol, Source::Reference));
    } else {
        r.push(Check::above("second_fundamental_form.norm", sff.norm, bounds::NOT_GEODESIC, Source::Reference));
    }
    r.push(Check::below("mean_curvature", sff.mean_curvature, t.fd_tol, Source::Reference));
    r.push(Check::below("cubic.trace_residual", inv.trace_residual, t.fd_tol, Source::Reference));
    r.push(Check::below("cubic.symmetry_residual", sff.symmetry_residual, t.fd_tol, Source::Sanity));
    let (sym, sym_name) = symmetry_target(ex);
    r.push(Check::equal("cubic.symmetry", inv.symmetry.clone(), sym, Source::Reference));
    if ex == NamedExample::Chiang {
        let fit = fit_s3_normal_form(&sff.cubic, 1e-6).map_or(f64::INFINITY, |f| f.2);
        r.push(Check::below("cubic.s3_normal_form_fit", fit, t.fd_tol, Source::Reference));
    }

    let mut ricci = Value::Null;
    if gens.len() == 3 {
        let ev = OrbitChart::new(gens, &p)?.ricci_eigenvalues()?;
        ricci = json!(ev);
        let gaps = [ev[1] - ev[0], ev[2] - ev[1]];
        let min_gap = gaps[0].abs().min(gaps[1].abs());
        if ex == NamedExample::Exotic {
            let target = exotic_ricci();
            for (k, (a, b)) in ev.iter().zip(target).enumerate() {
                r.push(Check::close(format!("ricci.eigenvalue{k}"), *a, b, bounds::RICCI, Source::Reference));
            }
            r.push(Check::above("ricci.min_gap", min_gap, 1e-3, Source::Reference));
        } else {
            // A continuous or S₃ symmetry of the cubic forces a repeated Ricci eigenvalue.
            r.push(Check::below("ricci.min_gap", min_gap, t.tol, Source::Oracle));
        }
    } else {
        r.notes.push(format!("{label} is a U(2) orbit; the su(2) part has 2-dimensional orbits, Ricci skipped"));
    }

    let sol = ex.solution();
    let alg = assemble_bonnet(&sol, t.tol)?;
    r.push(Check::below("bonnet.connection_residual", alg.connection_residual, bounds::CONNECTION, Source::Oracle));
    r.push(Check::below("bonnet.closure", alg.closure, bounds::CLOSURE, Source::Oracle));
    let se = verify_structure_equations(&sol)?;
    for (name, v) in &se.entries {
        r.push(Check::below(format!("structure.{name}"), *v, bounds::STRUCTURE, Source::Reference));
    }

    let cr = cross_route(ex, t.fd_step)?;
    r.push(Check::below("cross_route.max_gap", cr.max_gap(), t.fd_tol, Source::Oracle));

    r.data = json!({
        "example": ex.name(),
        "orbit": label,
        "group": gen.id.name(),
        "base_point": p,
        "theta": theta,
        "cubic": { "norm2": inv.norm2, "monomial_norm2": inv.monomial_norm2, "symmetry": inv.symmetry, "stabiliser": sym_name },
        "second_fundamental_form_norm": sff.norm,
        "ricci_eigenvalues": ricci,
        "solution": sol.to_json(),
        "bonnet_rank": alg.rank,
        "curvature_opposite_sign": se.curvature_opposite_sign,
        "cross_route": cr,
    });
    Ok(r)
}

fn roots_csv(roots: &[SliceRoot]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group", "a", "b", "mu1", "mu2", "mu3", "nu", "residual", "tag"]).expect("csv write");
    for s in roots {
        let mut row = vec![s.group.name().to_string(), s.coords[0].to_string(), s.coords[1].to_string()];
        row.extend(s.mu.iter().map(|m| m.to_string()));
        row.extend([s.nu.to_string(), format!("{:e}", s.residual), s.tag.clone()]);
        w.write_record(row).expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

fn expected_roots(id: GroupId) -> Vec<(&'static str, [f64; 2])> {
    let s3 = 3f64.sqrt();
    match id {
        GroupId::K3 => vec![
            ("P31 (U(1) orbit of the Chiang point)", [0.0, 1.0]),
            ("K3 orbit of P31", [s3, 0.0]),
            ("P32", [1.0 / 5f64.sqrt(), 0.0]),
        ],
        GroupId::K2 | GroupId::K2Ext => vec![("P22", [1.0, 0.0]), ("P21", [0.0, (2.0 + s3).sqrt()])],
        GroupId::K1 => vec![],
    }
}

/// Zeros of μ on the slice of `id`; passes iff the root set is the published one.
pub fn cmd_scan(id: GroupId, grid: &GridSpec, t: &Tolerances) -> Result<Report> {
    let mut r = Report::new(format!("scan {}", id.name()), *t);
    let roots = scan_slice(id, grid, 1e-6)?;
    if id == GroupId::K1 {
        r.push(Check::equal("roots.count", roots.len(), grid.n, Source::Sanity));
        let worst = roots.iter().map(|s| s.residual).fold(0.0, f64::max);
        let gap = roots.iter().map(|s| s.closed_form_gap).fold(0.0, f64::max);
        r.push(Check::below("locus.max_mu", worst, t.tol, Source::Reference));
        r.push(Check::below("locus.closed_form_gap", gap, t.tol, Source::Oracle));
    } else {
        for (tag, at) in expected_roots(id) {
            let hit = roots.iter().find(|s| s.tag == tag);
            let err = hit.map_or(f64::INFINITY, |s| (s.coords[0] - at[0]).abs().max((s.coords[1] - at[1]).abs()));
            r.push(Check::below(format!("root.{tag}"), err, t.tol, Source::Reference));
        }
        let extra: Vec<_> = roots.iter().filter(|s| s.tag == "unclassified").map(|s| s.coords).collect();
        r.push(Check::equal("roots.unclassified", extra.len(), 0, Source::Reference));
        let worst = roots.iter().map(|s| s.residual).fold(0.0, f64::max);
        r.push(Check::below("roots.max_residual", worst, t.tol, Source::Sanity));
        let gap = roots.iter().map(|s| s.closed_form_gap).fold(0.0, f64::max);
        r.push(Check::below("roots.closed_form_gap", gap, t.tol, Source::Oracle));
        if roots.iter().any(|s| s.tag == "P21 j-image") {
            r.notes.push("root at |Z3|² = 2 − √3 is the image of P21 under right multiplication by j".into());
        }
    }
    r.data = json!({ "group": id.name(), "grid": grid, "roots": roots });
    r.artifacts.push(Artifact { file: format!("scan_{}.csv", id.name()), contents: roots_csv(&roots) });
    Ok(r)
}

#[derive(Default)]
struct Worst {
    dnu: f64,
    dmu: f64,
    re_psi: f64,
    mu_equivariance: f64,
    nu_invariance: f64,
    points: usize,
    skipped: usize,
}

/// Identity suites at `samples` random chart points per group. With `corrupt` the dν
/// coefficient has the wrong sign, which must make the report fail.
pub fn cmd_identities(samples: usize, corrupt: bool, t: &Tolerances) -> Result<Report> {
    let mut r = Report::new(format!("identities --samples {samples}{}", if corrupt { " --corrupt" } else { "" }), *t);
    let coeff = if corrupt { -DNU_COEFF } else { DNU_COEFF };
    let mut rng = rng::seeded(t.seed);
    let mut data = serde_json::Map::new();

    let mut coframe_gap: f64 = 0.0;
    for _ in 0..samples {
        let p = rng::chart_point(&mut rng, 0.7);
        for k in 0..6 {
            let a = section_pullback_fd(&p, k, t.fd_step)?;
            let b = coframe(&p, &TangentVec::coord(k));
            coframe_gap = (0..3).map(|i| (a.c[i] - b.c[i]).norm()).fold(coframe_gap, f64::max);
        }
    }

    for id in [GroupId::K1, GroupId::K2, GroupId::K3] {
        let gen = GeneratorSet::new(id);
        let mut w = Worst::default();
        for _ in 0..samples {
            let p = rng::chart_point(&mut rng, 0.7);
            let g = gen.group_element([rng::normal(&mut rng), rng::normal(&mut rng), rng::normal(&mut rng)]);
            w.dnu = w.dnu.max(dnu_identity_residual_with(&gen, &p, t.fd_step, coeff)?);
            w.dmu = w.dmu.max(dmu_identity_residual(&gen, &p, t.fd_step)?);
            w.re_psi = w.re_psi.max(reps_vanishing_check(&gen, &p));
            let gp = match act(&g, &p) {
                Ok(q) if q.norm2() < 1e8 => q,
                _ => {
                    w.skipped += 1;
                    continue;
                }
            };
            let (m0, m1) = (moment(&gen, &p)?, moment(&gen, &gp)?);
            let rot = adjoint_rotation(&gen, &g);
            let rm = rot * nalgebra::Vector3::from(m0.mu);
            let eq = (0..3).map(|i| (m1.mu[i] - rm[i]).abs()).fold(0.0, f64::max);
            w.mu_equivariance = w.mu_equivariance.max(eq);
            w.nu_invariance = w.nu_invariance.max((m1.nu - m0.nu).abs());
            w.points += 1;
        }
        if samples > 0 {
            let g = id.name();
            r.push(Check::below(format!("{g}.dnu"), w.dnu, bounds::IDENTITY_FD, Source::Oracle));
            r.push(Check::below(format!("{g}.dmu"), w.dmu, bounds::IDENTITY_FD, Source::Reference));
            r.push(Check::below(format!("{g}.re_psi"), w.re_psi, bounds::RE_PSI, Source::Reference));
            r.push(Check::below(format!("{g}.mu_equivariance"), w.mu_equivariance, bounds::EQUIVARIANCE, Source::Oracle));
            r.push(Check::below(format!("{g}.nu_invariance"), w.nu_invariance, bounds::EQUIVARIANCE, Source::Oracle));
        }
        data.insert(id.name().into(), json!({ "points": w.points, "skipped": w.skipped }));
    }
    if samples > 0 {
        r.push(Check::below("coframe.section_pullback", coframe_gap, bounds::IDENTITY_FD, Source::Oracle));
    }
    data.insert("empty".into(), json!(samples == 0));
    data.insert("dnu_coefficient".into(), json!(coeff));
    if samples == 0 {
        r.notes.push("no samples requested: every suite is empty".into());
    }
    r.data = Value::Object(data);
    Ok(r)
}

/// Jacobian zero locus, degeneracy predicate, stabiliser profile and the conversion constant.
pub fn cmd_flag(grid: usize, samples: usize, t: &Tolerances) -> Result<Report> {
    let mut r = Report::new(format!("flag --grid {grid} --samples {samples}"), *t);
    let z = jacobian_zero_locus(grid, -3.0, 3.0);
    r.push(Check::equal("zero_locus.matches_lines", z.matches_lines(), true, Source::Reference));
    r.push(Check::below("zero_locus.max_distance", z.max_distance_to_lines, z.spacing, Source::Reference));
    r.push(Check::below("zero_locus.max_line_gap", z.max_line_gap, 2.0 * z.spacing, Source::Reference));
    let dis = locus_predicate_disagreements(100, 0.03);
    r.push(Check::equal("degeneracy_predicate.disagreements", dis, 0, Source::Reference));

    let mut rng = rng::seeded(t.seed);
    let (mut fd_gap, mut conv_gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let sp = SlicePoint::new(rng::normal(&mut rng), rng::normal(&mut rng));
        let d = jacobian_det_slice(sp);
        let scale = 1.0 + d.abs();
        fd_gap = fd_gap.max((jacobian_det_fd(sp, t.fd_step)? - d).abs() / scale);
        conv_gap = conv_gap.max((jacobian_det_printed(sp) - DISPLAYED_JACOBIAN_FACTOR * d).norm() / scale);
    }
    r.push(Check::below("jacobian.finite_difference", fd_gap, t.fd_tol, Source::Oracle));
    r.push(Check::below("jacobian.conversion_constant", conv_gap, t.tol, Source::Reference));

    let prof = stabilizer_profile(samples, t.seed);
    r.push(Check::below("stabiliser.max_dim", prof.max_dim() as f64, 2.0, Source::Reference));
    r.push(Check::below("stabiliser.curve_fraction", prof.curve_fraction, 0.5, Source::Reference));

    r.data = json!({
        "grid": grid,
        "crossings": z.crossings.len(),
        "spacing": z.spacing,
        "conversion_constant": [DISPLAYED_JACOBIAN_FACTOR.re, DISPLAYED_JACOBIAN_FACTOR.im],
        "stabiliser_profile": prof,
    });
    r.artifacts.push(Artifact { file: "flag_zero_locus.csv".into(), contents: zero_locus_csv(&z) });
    Ok(r)
}

/// A 3×3 complex matrix whose columns are the basis vectors. Accepted forms: a bare
/// row-major array of `[re, im]` pairs, or an object with a `"matrix"` key holding one.
pub fn parse_basis(text: &str) -> Result<LagBasis> {
    let v: Value = serde_json::from_str(text).map_err(|e| NkError::InvalidInput(format!("malformed JSON: {e}")))?;
    let m = match &v {
        Value::Object(o) => o.get("matrix").ok_or_else(|| NkError::InvalidInput("missing \"matrix\"".into()))?,
        other => other,
    };
    let rows: [[C64; 3]; 3] = serde_json::from_value(m.clone())
        .map_err(|e| NkError::InvalidInput(format!("expected 3×3 array of [re, im]: {e}")))?;
    Ok(LagBasis::from_rows(rows))
}

pub fn basis_to_json(b: &LagBasis) -> String {
    serde_json::to_string(&json!({ "matrix": b.rows() })).expect("basis serialises")
}

/// θ and `n_W` of a special Lagrangian subspace given as JSON.
pub fn cmd_canon(text: &str, t: &Tolerances) -> Result<Report> {
    let b = parse_basis(text)?;
    let mut r = Report::new("canon", *t);
    let chk = is_special_lagrangian_subspace(&b, t.tol)?;
    if !chk.is_slag {
        return Err(NkError::NotSpecialLagrangian(format!("{chk:?}")));
    }
    let cf = canonical_theta(&b)?;
    let by_formula = theta_by_formula(&b)?;
    r.push(Check::equal("n_w_iff_quarter_pi", cf.n_w == 2, (cf.theta - FRAC_PI_4).abs() < t.tol, Source::Reference));
    r.push(Check::close("theta.formula", by_formula, cf.theta, t.tol.sqrt(), Source::Oracle));
    r.data = json!({ "theta": cf.theta, "n_w": cf.n_w, "theta_formula": by_formula });
    Ok(r)
}

/// The printed ν extremes against direct contraction, with the generator normalisation reconciling them.
pub fn nu_normalisation() -> Value {
    let scale = values::GENERATOR_SCALE_PRINTED.powi(3);
    json!({
        "direct": [values::NU_P31, values::NU_P32],
        "printed": [values::NU_P31_PRINTED, values::NU_P32_PRINTED],
        "scale": scale,
    })
}

/// Base point fixtures of the named orbits.
pub fn named_points() -> Vec<(&'static str, ChartPoint)> {
    NamedExample::ALL.iter().map(|e| { let (l, _, p) = e.orbit(); (l, p) }).collect()
}
