//! B-stable subspaces of u from weighted diagrams, intersections and
//! root-space edits.
use nilcohom::rootsys::RootSystem;
use nilcohom::subspace::{grading_parts, nilradical_of_parabolic, subspace_from_diagram, RootSet, WeightedDiagram};

fn main() {
    let rs = RootSystem::e6();
    let diag = |s: &str| subspace_from_diagram(&rs, &WeightedDiagram::parse(s).unwrap()).unwrap();

    for s in ["[2 2 2 2 2 / 2]", "[0 2 0 2 0 / 2]", "[1 0 1 0 1 / 0]", "[0 0 1 0 0 / 0]"] {
        let v = diag(s);
        let p: Vec<usize> = (0..6).filter(|&j| v.is_p_stable(j)).map(|j| j + 1).collect();
        let g = grading_parts(&rs, &WeightedDiagram::parse(s).unwrap()).unwrap();
        println!("{s}: dim {:2}, P-stable for {p:?}, omega {}", v.dim(), rs.format_weight(&g.omega));
    }

    let levi = nilradical_of_parabolic(&rs, &[0, 2, 4]);
    println!("nilradical for Levi {{1,3,5}} equals [0 2 0 2 0 / 2]: {}", levi == diag("[0 2 0 2 0 / 2]"));

    let u2 = diag("[0 0 0 0 0 / 2]").intersect(&diag("[0 1 0 1 0 / 0]"));
    println!("[0 0 0 0 0 / 2] meet [0 1 0 1 0 / 0]: {} (dim {})", u2.describe(), u2.dim());

    let u1 = diag("[1 0 1 0 1 / 0]");
    let drop = [rs.parse_weight("{-1 -1 -1 0 0 / 0}").unwrap(), rs.parse_weight("{0 0 -1 -1 -1 / 0}").unwrap()];
    let u = u1.edit(&[], &drop).unwrap();
    println!("codimension-two edit: {} (dim {}, B-stable {})", u.describe(), u.dim(), u.is_b_stable());

    let q = RootSet::quotient_weights(&diag("[0 1 1 2 0 / 2]"), &diag("[0 2 0 2 0 / 2]")).unwrap();
    let ws: Vec<String> = q.expanded().iter().map(|w| rs.format_weight(w)).collect();
    println!("dual weights of [0 2 0 2 0 / 2] / [0 1 1 2 0 / 2]: {}", ws.join(", "));
}
