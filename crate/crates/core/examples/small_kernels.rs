//! Small representations never occur in low degrees of the four kernels.
use nilcohom::verify::{small, KERNELS};

fn main() {
    for k in KERNELS {
        println!("{:22} H^0(S^(n{}) {}* ⊗ {}){}", k.pair, k.offset, k.diagram, k.twist, if k.exact { "" } else { " (quotient of)" });
    }
    let r = small(&[]).unwrap();
    println!("{} rows, passed: {}", r.rows.len(), r.passed);
}
