//! The exclusion argument for SL2^3 and its use on an E6 Koszul term.
use nilcohom::bmodule::{BModule, Origin};
use nilcohom::charmod::WeightMultiset;
use nilcohom::replay::product::{exclusion_argument, product_type_vanish};
use nilcohom::replay::{koszul_terms, rootset_expression};
use nilcohom::rootsys::{CartanType, RootSystem, Weight};

fn main() {
    let rs = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
    let mut u = Vec::new();
    for a in [-1, 1] {
        for b in [-1, 1] {
            for c in [-1, 1] {
                u.push(rs.from_fundamental_coords(&[a, b, c]));
            }
        }
    }
    let low: Vec<Weight> = [[-1, -1, -1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
        .iter()
        .map(|c| rs.from_fundamental_coords(c))
        .collect();
    let lower = low
        .iter()
        .map(|w| (0..3).map(|a| low.iter().position(|x| *x == w - &rs.simple_root(a)).into_iter().collect()).collect())
        .collect();
    let base = BModule { weights: low, lower, origin: Origin::Plain };
    let rep = exclusion_argument(&rs, &WeightMultiset::from_weights(u), &base, 2, None).unwrap();
    println!("SL2^3, wedge^2 of the four lowest weights");
    println!("  candidates (degree, highest): {:?}", rep.candidates);
    println!("  S^2 U dimensions: {:?}", rep.sym_dimension_profile());

    let e6 = RootSystem::e6();
    let sub = rootset_expression("edit([0 0 1 0 0 / 0], -{0 -1 -2 -1 0 / -1}, +{-1 -1 -1 -1 -1 / -1})").unwrap();
    let sup = rootset_expression("meet([0 0 0 0 0 / 2], [0 1 0 1 0 / 0])").unwrap();
    let terms = koszul_terms(&sub, &sup, 0, &Weight::zero(6)).unwrap();
    for (j, q) in terms.iter().filter(|(j, _)| *j == 2 || *j == 3) {
        let m = q.factor.as_ref().unwrap();
        let r = product_type_vanish(&e6, &q.rootset, &q.twist, m, &[0, 2, 4]).unwrap();
        println!("E6 term j = {j}: Levi {}, candidates {:?}, vanishes", r.levi_type, r.candidates);
    }
}
