//! Zero locus of the invariant Jacobian on the su(3) slice, written as CSV to stdout.
use nkslag::flag::{jacobian_zero_locus, stabilizer_profile, zero_locus_csv};

fn main() {
    let z = jacobian_zero_locus(200, -3.0, 3.0);
    eprintln!(
        "{} sign changes, all within {:.2e} of the lines lambda = 0, +-3mu",
        z.crossings.len(),
        z.max_distance_to_lines
    );
    let prof = stabilizer_profile(2000, 3);
    eprintln!("so(3) stabiliser dims {:?}, su(2) {:?}", prof.so3_counts, prof.su2_counts);
    print!("{}", zero_locus_csv(&z));
}
