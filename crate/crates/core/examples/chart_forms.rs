//! Evaluate the SU(3)-structure (ω, Re ψ, Im ψ, g) on coordinate vectors at a chart point.
use nkslag::chart::{coframe, metric_g, nk_omega, nk_psi, section_s, ChartPoint, TangentVec};

fn main() {
    let p = ChartPoint::real(0.3, -0.5, 0.8);
    let s = section_s(&p).unwrap();
    println!("section unitary residual: {:.2e}", s.unitary_residual());

    let e: Vec<TangentVec> = (0..6).map(TangentVec::coord).collect();
    for k in 0..6 {
        let c = coframe(&p, &e[k]).c;
        println!("coframe(e{k}) = [{:.4}, {:.4}, {:.4}]", c[0], c[1], c[2]);
    }
    println!("omega(e0, e1) = {:.6}", nk_omega(&p, &e[0], &e[1]));
    println!("g(e2, e2)     = {:.6}", metric_g(&p, &e[2], &e[2]));
    let psi = nk_psi(&p, &e[0], &e[2], &e[4]);
    println!("psi(e0, e2, e4) = {:.6} {:+.6}i", psi.re, psi.im);
}
