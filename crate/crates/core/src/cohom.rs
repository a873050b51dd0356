//! Line-bundle cohomology on `G/B` (Bott–Borel–Weil), Euler-characteristic
//! multiplicities of irreducibles in `S^n V* ⊗ λ`, the Weyl dimension
//! formula, the small-representation predicate and the two sufficient
//! conditions for vanishing of higher cohomology on `G ×^B V`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::charmod::{irreducible_dominant_weights, WeightMultiset};
use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::{grading_parts, nilradical_of_parabolic, subspace_from_diagram, RootSet, WeightedDiagram};

/// Cohomology of the line bundle `L_λ` on `G/B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BbwResult {
    /// `λ + ρ` is singular: all cohomology vanishes.
    Singular,
    /// Only `H^degree` is nonzero, and it is irreducible with this highest weight.
    Regular { degree: usize, highest: Weight },
}

/// Bott–Borel–Weil, normalized so that `H^0(L_λ) = V_λ` for dominant `λ`.
pub fn bbw(rs: &RootSystem, lambda: &Weight) -> BbwResult {
    let shifted = lambda + rs.rho();
    if (0..rs.num_positive_roots()).any(|k| rs.coroot_pairing(&shifted, k) == 0) {
        return BbwResult::Singular;
    }
    let (dom, steps) = rs.to_dominant(&shifted);
    BbwResult::Regular { degree: steps, highest: &dom - rs.rho() }
}

/// Coefficient of `V_μ` in `χ(G/B, S^n V* ⊗ λ)`, where `V` is spanned by the
/// root set `s`:
/// `Σ_w (-1)^ℓ(w) · #{multisets of n dual weights summing to w·μ − λ}`.
pub fn euler_mult(s: &RootSet, n: usize, twist: &Weight, mu: &Weight) -> BigInt {
    let rs = s.root_system();
    let counter = s.counter();
    let d = rs.denom();
    let htw: i64 = twist.coords().iter().sum();
    let (lo, hi) = match counter.height_range() {
        Some((a, b)) => (n as i64 * a * d + htw, n as i64 * b * d + htw),
        None => (htw, htw),
    };
    let orbit = rs.dot_orbit(mu);
    let window = orbit.height_window(lo, hi);
    if counter.num_generators() == 0 {
        if n > 0 {
            return BigInt::zero();
        }
        return window.iter().filter(|(_, _, w)| w == twist).map(|(_, s, _)| BigInt::from(*s)).sum();
    }
    let fast: Option<i128> = window
        .par_iter()
        .map(|(_, sign, w)| counter.count_u64(n, &(w - twist)).map(|c| *sign as i128 * c as i128))
        .try_reduce(|| 0i128, |a, b| Some(a + b));
    match fast {
        Some(v) => BigInt::from(v),
        None => window
            .iter()
            .map(|(_, sign, w)| BigInt::from(*sign) * BigInt::from(counter.count(n, &(w - twist))))
            .sum(),
    }
}

/// `euler_mult` for `S^n V* ⊗ M ⊗ λ`, with `M` given by its character.
pub fn euler_mult_module(s: &RootSet, n: usize, module: &WeightMultiset, twist: &Weight, mu: &Weight) -> BigInt {
    module
        .iter()
        .map(|(w, m)| BigInt::from(m) * euler_mult(s, n, &(twist + w), mu))
        .sum()
}

/// Weyl dimension formula.
pub fn weyl_dimension(rs: &RootSystem, mu: &Weight) -> Result<BigUint> {
    rs.check_lattice(mu)?;
    if !rs.is_dominant(mu) {
        return Err(Error::NotDominant(rs.format_weight(mu)));
    }
    let shifted = mu + rs.rho();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in 0..rs.num_positive_roots() {
        num *= BigUint::from(rs.coroot_pairing(&shifted, k) as u64);
        den *= BigUint::from(rs.coroot_pairing(rs.rho(), k) as u64);
    }
    Ok(num / den)
}

/// True when no weight of `V_μ` is twice a root. Twice a root is a weight
/// iff twice the dominant root of that length and component is.
pub fn is_small(rs: &RootSystem, mu: &Weight) -> Result<bool> {
    let dom = irreducible_dominant_weights(rs, mu)?;
    Ok(rs
        .highest_roots()
        .iter()
        .chain(rs.highest_short_roots())
        .all(|t| dom.get(&t.scale(2)) == 0))
}

/// Default probe representations: trivial, the highest root, and every
/// minuscule fundamental weight.
pub fn default_probes(rs: &RootSystem) -> Vec<Weight> {
    let mut out = vec![Weight::zero(rs.rank())];
    out.extend(rs.highest_roots().iter().cloned());
    for j in 0..rs.rank() {
        let w = rs.fundamental(j);
        if irreducible_dominant_weights(rs, w).map(|d| d.len() == 1).unwrap_or(false) {
            out.push(w.clone());
        }
    }
    out
}

/// Which sufficient condition licenses `H^{>0} = 0` for every `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BroerCase {
    /// `V = u_P` and the twist is a dominant character of `P`.
    Case1 { levi: Vec<usize> },
    /// `V` is the grade `>= 2` part of the diagram and `twist − ω` is a
    /// dominant character of the grade-0 parabolic.
    Case2 { diagram: WeightedDiagram, lambda: Weight },
    NotApplicable { reason: String },
}

impl BroerCase {
    pub fn applies(&self) -> bool {
        !matches!(self, BroerCase::NotApplicable { .. })
    }

    pub fn case_number(&self) -> Option<u8> {
        match self {
            BroerCase::Case1 { .. } => Some(1),
            BroerCase::Case2 { .. } => Some(2),
            BroerCase::NotApplicable { .. } => None,
        }
    }
}

/// Checks the character-of-`P` condition: pairing 0 on `levi`, `>= 0`
/// elsewhere. Returns a description of the first failure.
fn dominant_character_of(rs: &RootSystem, w: &Weight, levi: &[usize]) -> std::result::Result<(), String> {
    for j in 0..rs.rank() {
        let m = rs.pairing(w, j);
        if levi.contains(&j) && m != 0 {
            let near = if m > 0 { " (near miss: dominant but not a character of P)" } else { "" };
            return Err(format!("pairing with simple coroot {} is {m}, need 0{near}", j + 1));
        }
        if m < 0 {
            return Err(format!("pairing with simple coroot {} is {m} < 0", j + 1));
        }
    }
    Ok(())
}

/// Tries the nilradical condition, then the diagram condition. When
/// `diagram` is `None`, diagrams with labels in `0..=2` are searched.
pub fn broer_case_check(s: &RootSet, twist: &Weight, diagram: Option<&WeightedDiagram>) -> BroerCase {
    let rs = s.root_system();
    let levi = s.levi_simples();
    let mut reasons = Vec::new();
    if nilradical_of_parabolic(rs, &levi) == *s {
        match dominant_character_of(rs, twist, &levi) {
            Ok(()) => return BroerCase::Case1 { levi },
            Err(e) => reasons.push(format!("case 1: {e}")),
        }
    } else {
        reasons.push("case 1: not the nilradical of a parabolic".to_string());
    }
    let candidates: Vec<WeightedDiagram> = match diagram {
        Some(d) => vec![d.clone()],
        None => all_small_diagrams(rs.rank()),
    };
    let mut matched = false;
    for d in candidates {
        if subspace_from_diagram(rs, &d).ok().as_ref() != Some(s) {
            continue;
        }
        matched = true;
        let Ok(parts) = grading_parts(rs, &d) else { continue };
        let lambda = twist - &parts.omega;
        let zero: Vec<usize> = (0..rs.rank()).filter(|&j| d.labels[j] == 0).collect();
        match dominant_character_of(rs, &lambda, &zero) {
            Ok(()) => return BroerCase::Case2 { diagram: d, lambda },
            Err(e) => reasons.push(format!("case 2 {}: {e}", d.format(rs))),
        }
    }
    if !matched {
        reasons.push("case 2: no matching diagram".to_string());
    }
    BroerCase::NotApplicable { reason: reasons.join("; ") }
}

fn all_small_diagrams(rank: usize) -> Vec<WeightedDiagram> {
    if rank > 8 {
        return Vec::new();
    }
    let total = 3usize.pow(rank as u32);
    (0..total)
        .map(|mut code| {
            let mut labels = vec![0i64; rank];
            for slot in labels.iter_mut().rev() {
                *slot = (code % 3) as i64;
                code /= 3;
            }
            WeightedDiagram { labels }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::CartanType;
    use std::sync::Arc;

    fn e6() -> Arc<RootSystem> {
        RootSystem::e6()
    }

    fn diag(rs: &Arc<RootSystem>, s: &str) -> RootSet {
        subspace_from_diagram(rs, &WeightedDiagram::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn bbw_basics() {
        let rs = e6();
        assert_eq!(bbw(&rs, &Weight::zero(6)), BbwResult::Regular { degree: 0, highest: Weight::zero(6) });
        assert_eq!(bbw(&rs, &-rs.rho()), BbwResult::Singular);
        let a3 = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
        let w = a3.from_fundamental_coords(&[-2, -2, 0]);
        assert_eq!(bbw(&a3, &w), BbwResult::Regular { degree: 2, highest: Weight::zero(3) });
        let w = a3.from_fundamental_coords(&[0, 0, -2]);
        assert_eq!(bbw(&a3, &w), BbwResult::Regular { degree: 1, highest: Weight::zero(3) });
        let w = a3.from_fundamental_coords(&[0, -1, 3]);
        assert_eq!(bbw(&a3, &w), BbwResult::Singular);
    }

    #[test]
    fn dimensions() {
        let rs = e6();
        assert_eq!(weyl_dimension(&rs, &Weight::zero(6)).unwrap(), BigUint::one());
        assert_eq!(weyl_dimension(&rs, rs.highest_root()).unwrap(), BigUint::from(78u32));
        assert_eq!(weyl_dimension(&rs, rs.fundamental(0)).unwrap(), BigUint::from(27u32));
        let a1 = RootSystem::new(&CartanType::parse("A1").unwrap()).unwrap();
        assert_eq!(weyl_dimension(&a1, a1.fundamental(0)).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn smallness() {
        let rs = e6();
        assert!(is_small(&rs, &Weight::zero(6)).unwrap());
        assert!(is_small(&rs, rs.highest_root()).unwrap());
        assert!(!is_small(&rs, &rs.highest_root().scale(2)).unwrap());
        assert_eq!(default_probes(&rs).len(), 4);
    }

    #[test]
    fn euler_small_cases() {
        let rs = e6();
        let u = RootSet::full(&rs);
        let theta = rs.highest_root().clone();
        let zero = Weight::zero(6);
        assert_eq!(euler_mult(&u, 0, &zero, &zero), BigInt::one());
        assert_eq!(euler_mult(&u, 1, &zero, &theta), BigInt::one());
        assert_eq!(euler_mult(&u, 2, &zero, &theta), BigInt::zero());
        let empty = RootSet::empty(&rs);
        assert_eq!(euler_mult(&empty, 0, &zero, &zero), BigInt::one());
        assert_eq!(euler_mult(&empty, 1, &zero, &zero), BigInt::zero());
    }

    #[test]
    fn broer_cases() {
        let rs = e6();
        let zero = Weight::zero(6);
        assert_eq!(broer_case_check(&RootSet::full(&rs), &zero, None).case_number(), Some(1));
        let t = rs.parse_weight("{2 3 4 3 2 / 2}").unwrap();
        let s = diag(&rs, "[1 0 1 0 1 / 0]");
        match broer_case_check(&s, &t, None) {
            BroerCase::Case2 { lambda, .. } => assert_eq!(rs.format_weight(&lambda), "{4 8 12 8 4 / 6}"),
            other => panic!("{other:?}"),
        }
        assert!(broer_case_check(&diag(&rs, "[2 0 2 0 2 / 0]"), &t, None).applies());
        let bad = rs.parse_weight("{1 2 2 2 1 / 0}").unwrap();
        assert!(!broer_case_check(&diag(&rs, "[0 2 0 2 0 / 2]"), &bad, None).applies());
    }
}
