//! Assemble Lie algebras from solution constants and compare them with the moment-map orbits.
use nkslag::structure_eqs::{assemble_bonnet, cross_route, solve_f_roots, theta0_generators, NamedExample};

fn main() {
    for f in solve_f_roots().into_iter().chain([0.0]) {
        let a = theta0_generators(f);
        println!("theta = 0, f = {f:+}: closure {:.2e}, rank {}", a.closure, a.rank);
    }
    println!();
    for ex in NamedExample::ALL {
        let alg = assemble_bonnet(&ex.solution(), 1e-8).unwrap();
        let cr = cross_route(ex, 1e-3).unwrap();
        println!(
            "{:7} {}: closure {:.1e}  theta {:.10}  |C|^2 {:.8}  gap {:.1e}",
            ex.name(),
            cr.orbit,
            alg.closure,
            cr.moment_orbit.theta,
            cr.moment_orbit.cubic_norm2,
            cr.max_gap()
        );
    }
}
