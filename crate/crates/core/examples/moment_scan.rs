//! Scan the K2 and K3 slices for zeros of μ and print ν and θ at each special Lagrangian orbit.
use nkslag::symmetry::{moment, scan_slice, theta_at, GeneratorSet, GridSpec, GroupId};

fn main() {
    for id in [GroupId::K2, GroupId::K3] {
        let roots = scan_slice(id, &GridSpec::default_for(id), 1e-6).unwrap();
        let gen = GeneratorSet::new(id);
        println!("{}: {} roots", id.name(), roots.len());
        for r in roots {
            let nu = moment(&gen, &r.point).unwrap().nu;
            // At r = 0 the SU(2) orbit is 2-dimensional; the special Lagrangian is the U(2) orbit.
            let theta = theta_at(&gen.xis, &r.point)
                .or_else(|_| theta_at(&GeneratorSet::new(GroupId::K2Ext).xis, &r.point))
                .unwrap();
            println!("  ({:.10}, {:.10})  nu = {nu:+.6}  theta = {theta:.10}  [{}]", r.coords[0], r.coords[1], r.tag);
        }
    }
}
