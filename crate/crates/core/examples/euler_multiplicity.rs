//! Euler multiplicities of irreducibles in S^n V* ⊗ λ for diagram subspaces.
//!
//! `cargo run --release --example euler_multiplicity -- "[0 0 2 0 0 / 0]" "{2 4 6 4 2 / 4}"`
use nilcohom::cohom::{default_probes, euler_mult};
use nilcohom::replay::rootset_expression;
use nilcohom::rootsys::{RootSystem, Weight};

fn main() {
    let rs = RootSystem::e6();
    let mut args = std::env::args().skip(1);
    let v = rootset_expression(&args.next().unwrap_or_else(|| "[2 0 0 0 2 / 0]".into())).unwrap();
    let twist = args.next().map(|s| rs.parse_weight(&s).unwrap()).unwrap_or_else(|| Weight::zero(6));
    println!("V = {} (dim {}), twist {}", v.describe(), v.dim(), rs.format_weight(&twist));
    for mu in default_probes(&rs) {
        let row: Vec<String> = (0..=6).map(|n| euler_mult(&v, n, &twist, &mu).to_string()).collect();
        println!("  {:24} n=0..6: {}", rs.format_weight(&mu), row.join(" "));
    }
}
