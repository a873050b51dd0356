//! Line-bundle cohomology on G/B by Bott–Borel–Weil.
use nilcohom::cohom::{bbw, weyl_dimension, BbwResult};
use nilcohom::rootsys::{CartanType, RootSystem};

fn show(rs: &RootSystem, s: &str) {
    let w = rs.parse_weight(s).unwrap();
    match bbw(rs, &w) {
        BbwResult::Singular => println!("{s:24} -> 0"),
        BbwResult::Regular { degree, highest } => {
            let dim = weyl_dimension(rs, &highest).unwrap();
            println!("{s:24} -> H^{degree} = V({}), dim {dim}", rs.format_weight(&highest));
        }
    }
}

fn main() {
    let e6 = RootSystem::e6();
    for s in ["{0 0 0 0 0 / 0}", "{1 2 3 2 1 / 2}", "{-1 0 0 0 0 / 0}", "{-2 -2 -2 -2 -2 / -2}", "{2 4 6 4 2 / 4}"] {
        show(&e6, s);
    }
    let a1 = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
    for s in ["(-2,-2,0)@fund", "(0,0,-2)@fund", "(-1,3,0)@fund"] {
        show(&a1, s);
    }
}
