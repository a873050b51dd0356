//! The Koszul resolution of an inclusion of subspaces and the alternating
//! sum of Euler multiplicities along it.
use nilcohom::cohom::{euler_mult, euler_mult_module};
use nilcohom::replay::{koszul_terms, rootset_expression};
use nilcohom::rootsys::{RootSystem, Weight};

fn main() {
    let rs = RootSystem::e6();
    let sub = rootset_expression("[0 1 1 2 0 / 2]").unwrap();
    let sup = rootset_expression("[0 2 0 2 0 / 2]").unwrap();
    let zero = Weight::zero(6);
    let terms = koszul_terms(&sub, &sup, 0, &zero).unwrap();
    for (j, q) in &terms {
        println!("K_{j}: {}", q.describe());
    }
    let mu = rs.highest_root().clone();
    for n in 0..=6usize {
        let lhs = euler_mult(&sub, n, &zero, &mu);
        let mut rhs = num_bigint::BigInt::from(0);
        for (j, q) in &terms {
            let k = n as i64 + q.offset;
            if k < 0 {
                continue;
            }
            let m = match &q.factor {
                None => euler_mult(&q.rootset, k as usize, &q.twist, &mu),
                Some(f) => euler_mult_module(&q.rootset, k as usize, &f.character(), &q.twist, &mu),
            };
            rhs += if j % 2 == 0 { m } else { -m };
        }
        println!("n = {n}: adjoint in S^n sub* {lhs}, alternating sum over terms {rhs}");
    }
}
