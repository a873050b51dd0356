//! Basic root-system data for E6 and a few reducible types.
use nilcohom::rootsys::{CartanType, RootSystem};

fn main() {
    for ty in ["E6", "A2", "B2", "A1xA1xA1", "A2xA2xA1"] {
        let t = CartanType::parse(ty).unwrap();
        let rs = if t.is_e6() { RootSystem::e6() } else { RootSystem::new(&t).unwrap() };
        let w = rs.weyl_group();
        println!(
            "{:10} rank {}  roots {:3}  |W| {:6}  rho {}",
            rs.cartan_type().to_string(),
            rs.rank(),
            rs.num_roots(),
            w.order(),
            rs.format_weight(rs.rho())
        );
        for t in rs.highest_roots() {
            println!("{:10} highest root {}", "", rs.format_weight(t));
        }
    }
    let rs = RootSystem::e6();
    println!("E6 length distribution of W: {:?}", rs.weyl_group().length_distribution());
}
