//! Canonical angle of special Lagrangian subspaces of C³ under S(U(2)×U(1)).
use nkslag::linear_model::{canonical_theta, cr_criterion, random_h, stabilizer_algebra_dim, w_theta};
use nkslag::rng;

fn main() {
    let mut r = rng::seeded(1);
    for theta in [0.0, 0.2, 0.5, std::f64::consts::FRAC_PI_4] {
        let w = w_theta(theta).transformed(&random_h(&mut r));
        let cf = canonical_theta(&w).unwrap();
        let cr = cr_criterion(&w, 1e-10).map(|c| c.invariant.to_string()).unwrap_or_else(|_| "-".into());
        println!(
            "theta {theta:.4}: recovered {:.12}  n_W {}  stabiliser dim {}  CR {cr}",
            cf.theta,
            cf.n_w,
            stabilizer_algebra_dim(theta)
        );
    }
}
