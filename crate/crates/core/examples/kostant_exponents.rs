//! Multiplicity of the adjoint representation in functions on the nilpotent
//! cone, degree by degree.
use std::time::Instant;

use nilcohom::cohom::euler_mult;
use nilcohom::rootsys::{RootSystem, Weight};
use nilcohom::subspace::RootSet;

fn main() {
    let rs = RootSystem::e6();
    let u = RootSet::full(&rs);
    let zero = Weight::zero(rs.rank());
    let theta = rs.highest_root().clone();
    for n in 0..=12 {
        let t = Instant::now();
        let m = euler_mult(&u, n, &zero, &theta);
        println!("n = {n:2}  mult = {m}  ({:.2?})", t.elapsed());
    }
}
