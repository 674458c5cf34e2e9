//! Ricci spectrum, fundamental cubic and its symmetry group for the K3 orbits.
use nkslag::homogeneous::{cubic_invariants, second_fundamental_form, OrbitChart};
use nkslag::symmetry::{points, GeneratorSet, GroupId};

fn main() {
    let gen = GeneratorSet::new(GroupId::K3);
    for (name, p) in [("O31 (Chiang)", points::p31()), ("O32", points::p32())] {
        let chart = OrbitChart::new(&gen.xis, &p).unwrap();
        let ev = chart.ricci_eigenvalues().unwrap();
        let sff = second_fundamental_form(&gen.xis, &p, 1e-3).unwrap();
        let inv = cubic_invariants(&sff.cubic, 1e-6);
        println!("{name}");
        println!("  Ricci eigenvalues  {:.6?}", ev);
        println!("  |C|^2 = {:.8}  mean curvature = {:.1e}", inv.norm2, sff.mean_curvature);
        println!("  cubic symmetry: {:?}", inv.symmetry);
    }
}
