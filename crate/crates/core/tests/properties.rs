use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use nilcohom::cohom::{bbw, default_probes, euler_mult, euler_mult_module, BbwResult};
use nilcohom::charmod::sym_power_count;
use nilcohom::replay::product::product_type_residual;
use nilcohom::replay::{builtin_script, koszul_terms, rootset_expression, run_source, ReplayOptions};
use nilcohom::rootsys::{RootSystem, Weight};
use nilcohom::subspace::{subspace_from_diagram, RootSet, WeightedDiagram};

const DIAGRAMS: &[&str] = &[
    "[2 2 2 2 2 / 2]", "[2 2 0 2 2 / 2]", "[0 2 0 2 0 / 2]", "[0 0 2 0 0 / 2]", "[0 0 2 0 0 / 0]",
    "[1 0 1 0 1 / 0]", "[0 1 0 1 0 / 1]", "[0 0 0 0 0 / 2]", "[2 0 0 0 2 / 0]", "[0 0 1 0 0 / 0]",
];

fn e6() -> Arc<RootSystem> {
    RootSystem::e6()
}

fn diagram(i: usize) -> RootSet {
    subspace_from_diagram(&e6(), &WeightedDiagram::parse(DIAGRAMS[i]).unwrap()).unwrap()
}

fn small_twist() -> impl Strategy<Value = Weight> {
    prop::collection::vec(-3i64..=3, 6).prop_map(|raw| e6().from_root_coords(&raw))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    /// `χ(λ) = -χ(s·λ)` for a parabolic-stable `V`, and `χ = 0` when `⟨λ, α∨⟩ = -1`.
    #[test]
    fn demazure_reflection(i in 0..DIAGRAMS.len(), a in 0usize..6, tw in small_twist(), n in 0usize..4) {
        let rs = e6();
        let v = diagram(i);
        prop_assume!(v.is_p_stable(a));
        let reflected = rs.dot_reflect(&tw, a);
        for mu in default_probes(&rs) {
            let x = euler_mult(&v, n, &tw, &mu);
            if rs.pairing(&tw, a) == -1 {
                prop_assert_eq!(x, BigInt::from(0));
            } else {
                prop_assert_eq!(x, -euler_mult(&v, n, &reflected, &mu));
            }
        }
    }

    /// Alternating sum over the Koszul terms of an inclusion equals the
    /// smaller subspace's multiplicity.
    #[test]
    fn koszul_alternating_sum(i in 0..DIAGRAMS.len(), k in 0..DIAGRAMS.len(), tw in small_twist(), n in 0i64..5) {
        let (a, b) = (diagram(i), diagram(k));
        let sub = a.intersect(&b);
        prop_assume!(b.dim() - sub.dim() <= 6);
        let terms = koszul_terms(&sub, &b, 0, &tw).unwrap();
        let mu = e6().highest_root().clone();
        let mut sum = BigInt::from(0);
        for (j, q) in &terms {
            let d = n + q.offset;
            if d < 0 {
                continue;
            }
            let m = match &q.factor {
                None => euler_mult(&q.rootset, d as usize, &q.twist, &mu),
                Some(f) => euler_mult_module(&q.rootset, d as usize, &f.character(), &q.twist, &mu),
            };
            sum += if j % 2 == 0 { m } else { -m };
        }
        prop_assert_eq!(sum, euler_mult(&sub, n as usize, &tw, &mu));
    }

    /// The knapsack counts of all weights of `S^n V*` add up to the dimension.
    #[test]
    fn knapsack_total(i in 0..DIAGRAMS.len(), n in 0usize..4) {
        let v = diagram(i);
        let dual: Vec<Weight> = v.roots().iter().map(|b| -b).collect();
        let mut weights = std::collections::BTreeSet::new();
        let mut frontier = vec![Weight::zero(6)];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &frontier {
                for d in &dual {
                    let x = w + d;
                    if !next.contains(&x) {
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        weights.extend(frontier);
        let total: BigUint = weights.iter().map(|w| sym_power_count(&v, n, w)).sum();
        let m = v.dim() as u64;
        let mut binom = BigUint::from(1u32);
        for t in 0..n as u64 {
            binom = binom * BigUint::from(m + t) / BigUint::from(t + 1);
        }
        prop_assert_eq!(total, binom);
    }

    /// BBW: dominant weights have `H^0 = V_λ`; the dot action by a simple
    /// reflection moves cohomology by one degree.
    #[test]
    fn bbw_dot_shift(tw in small_twist(), a in 0usize..6) {
        let rs = e6();
        let (dom, _) = rs.to_dominant(&tw);
        prop_assert_eq!(bbw(&rs, &dom), BbwResult::Regular { degree: 0, highest: dom.clone() });
        let x = bbw(&rs, &tw);
        let y = bbw(&rs, &rs.dot_reflect(&tw, a));
        match (x, y) {
            (BbwResult::Singular, BbwResult::Singular) => {}
            (BbwResult::Regular { degree: d1, highest: h1 }, BbwResult::Regular { degree: d2, highest: h2 }) => {
                prop_assert_eq!(h1, h2);
                prop_assert_eq!((d1 as i64 - d2 as i64).abs(), 1);
            }
            _ => prop_assert!(false, "singularity is not preserved by the dot action"),
        }
    }
}

#[test]
fn replay_is_deterministic() {
    let src = builtin_script("d5a1").unwrap();
    let opts = ReplayOptions::default();
    let a = serde_json::to_string(&run_source("d5a1", src, &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&run_source("d5a1", src, &opts).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn broken_claim_fails_replay() {
    let src = "[query rootset=[0 2 0 2 0 / 2]]\n[step kind=demazure alpha=1 expect=vanish]\n";
    let r = run_source("bad", src, &ReplayOptions::default()).unwrap();
    assert!(!r.passed);
}

/// Levi-trivial part left over by the exclusion argument on the j = 3 term
/// of `[0 0 1 0 0 / 0] ∩ [1 0 0 0 1 / 0] ⊂ [0 0 1 0 0 / 0]`.
#[test]
fn residual_exclusion_single_character() {
    let rs = e6();
    let sub = rootset_expression("meet([0 0 1 0 0 / 0], [1 0 0 0 1 / 0])").unwrap();
    let sup = rootset_expression("[0 0 1 0 0 / 0]").unwrap();
    let terms = koszul_terms(&sub, &sup, 0, &Weight::zero(6)).unwrap();
    let (_, q) = &terms[3];
    let rep = product_type_residual(&rs, &q.rootset, &q.twist, q.factor.as_ref().unwrap(), &[0, 1, 3, 4, 5]).unwrap();
    assert_eq!(rep.residual.len(), 1);
    let (deg, mu, mult) = &rep.residual[0];
    assert_eq!(*deg, 2);
    assert!(mu.iter().all(|&x| x == 0));
    assert_eq!(*mult, 1);
}
