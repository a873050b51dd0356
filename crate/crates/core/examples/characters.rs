//! Characters: symmetric and exterior powers and their decomposition into
//! irreducibles.
use nilcohom::charmod::{decompose, irreducible_character, WeightMultiset};
use nilcohom::cohom::weyl_dimension;
use nilcohom::rootsys::{CartanType, RootSystem};

fn main() {
    // U = standard ⊗ standard ⊗ standard for SL2^3
    let rs = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
    let mut u = WeightMultiset::new();
    for a in [-1, 1] {
        for b in [-1, 1] {
            for c in [-1, 1] {
                u.insert(rs.from_fundamental_coords(&[a, b, c]), 1);
            }
        }
    }
    for n in 1..=3 {
        let s = u.symmetric_power(n, 1 << 20).unwrap();
        let parts: Vec<String> = decompose(&rs, &s)
            .iter()
            .map(|(w, m)| format!("{m} x V{:?} (dim {})", rs.fundamental_coords(w), weyl_dimension(&rs, w).unwrap()))
            .collect();
        println!("S^{n} U (dim {}): {}", s.dim(), parts.join(" + "));
    }
    let w2 = u.exterior_power(2);
    println!("wedge^2 U has dim {}", w2.dim());

    let e6 = RootSystem::e6();
    let adj = irreducible_character(&e6, e6.highest_root()).unwrap();
    println!("E6 adjoint: dim {}, zero weight multiplicity {}", adj.dim(), adj.get(&nilcohom::rootsys::Weight::zero(6)));
}
