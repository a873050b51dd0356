//! Vanishing for modules over a product-type Levi by the exclusion argument.
//!
//! Setting: `U' ⊂ U` with `U` a module for the Levi `L` and `U'` a
//! `B_L`-submodule. The Koszul complex
//! `0 → ∧^j U' → ∧^{j-1} U' ⊗ U → … → S^j U → S^j(U/U') → 0`
//! with acyclic middle terms `∧^k U'` (`0 < k < j`) gives
//! `H^d(∧^j U') = 0` for `d < j - 1` and `H^{j-1}(∧^j U') ↪ S^j U`.
//! Candidates come from a filtration of `∧^j U'` by lines and wall blocks;
//! an isotypic part whose surviving candidates sit in a single degree and
//! whose Euler characteristic is zero must vanish.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bmodule::{greedy_filtration, levi_closure, restrict_weight, BModule, Origin, Piece};
use crate::charmod::{decompose, WeightMultiset};
use crate::cohom::{bbw, weyl_dimension, BbwResult};
use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::RootSet;

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionReport {
    pub levi_type: String,
    pub witness: usize,
    /// `(degree, highest weight in fundamental coordinates)` per surviving line
    pub candidates: Vec<(usize, Vec<i64>)>,
    /// irreducible constituents of `S^j U`: highest weight, multiplicity, dimension
    pub sym_power: Vec<(Vec<i64>, i64, String)>,
    /// isotypic parts left in degree `j - 1`: `(degree, highest weight, multiplicity)`
    pub residual: Vec<(usize, Vec<i64>, i64)>,
    pub notes: Vec<String>,
}

impl ExclusionReport {
    /// Dimensions of the constituents of `S^j U`, with multiplicity, sorted.
    pub fn sym_dimension_profile(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (_, m, d) in &self.sym_power {
            let d: u64 = d.parse().unwrap_or(0);
            out.extend(std::iter::repeat(d).take(*m as usize));
        }
        out.sort_unstable();
        out
    }
}

/// Candidate cohomology of a module over `rs` (no line-bundle base):
/// filtration pieces, singular lines and wall blocks dropped.
pub fn candidates(rs: &RootSystem, m: &BModule) -> Vec<(usize, Weight)> {
    let pieces = greedy_filtration(
        m,
        |i| bbw(rs, &m.weights[i]) == BbwResult::Singular,
        |t, _b, a| rs.pairing(&m.weights[t], a) == 0,
    );
    let mut out = Vec::new();
    for (p, vanishes) in pieces {
        if let (Piece::Line { index }, false) = (p, vanishes) {
            if let BbwResult::Regular { degree, highest } = bbw(rs, &m.weights[index]) {
                out.push((degree, highest));
            }
        }
    }
    out.sort();
    out
}

/// The exclusion argument on `rs` itself. `base` is `U'`, `ambient` the
/// character of `U`; `split` optionally names a submodule `Q` of `∧^j U'`
/// (indices) so that the argument is run on the quotient `∧^j U' / Q`.
pub fn exclusion_argument(
    rs: &RootSystem,
    ambient: &WeightMultiset,
    base: &BModule,
    j: usize,
    split: Option<&[usize]>,
) -> Result<ExclusionReport> {
    exclusion_core(rs, ambient, base, j, split, false)
}

/// As [`exclusion_argument`], but an isotypic part confined to degree
/// `j - 1` is reported in `residual` with its exact multiplicity (the Euler
/// characteristic, bounded by its multiplicity in `S^j U`) instead of failing.
pub fn exclusion_residual(
    rs: &RootSystem,
    ambient: &WeightMultiset,
    base: &BModule,
    j: usize,
    split: Option<&[usize]>,
) -> Result<ExclusionReport> {
    exclusion_core(rs, ambient, base, j, split, true)
}

fn exclusion_core(
    rs: &RootSystem,
    ambient: &WeightMultiset,
    base: &BModule,
    j: usize,
    split: Option<&[usize]>,
    allow_residual: bool,
) -> Result<ExclusionReport> {
    let mut notes = Vec::new();
    let mut by_exclusion = Vec::new();
    for k in 1..j {
        let c = candidates(rs, &base.exterior_power(k));
        if c.is_empty() {
            continue;
        }
        // a middle term with candidates may still be acyclic by the same argument one degree down
        if exclusion_argument(rs, ambient, base, k, None).is_err() {
            return Err(Error::pre(
                "middle_terms_acyclic",
                format!("∧^{k} of the submodule has candidate cohomology {}", fmt_cands(rs, &c)),
            ));
        }
        by_exclusion.push(k);
    }
    if j > 1 {
        notes.push(format!("∧^k U' acyclic for 0 < k < {j}"));
    }
    if !by_exclusion.is_empty() {
        notes.push(format!("acyclic by exclusion rather than by filtration: k in {by_exclusion:?}"));
    }
    let wedge = base.exterior_power(j);
    let (module, q_cands) = match split {
        Some(qs) => {
            if !wedge.is_submodule(qs) {
                return Err(Error::pre("split_submodule", "split set is not closed under lowering"));
            }
            let qc = candidates(rs, &wedge.submodule(qs));
            notes.push(format!("split-off submodule candidates: {}", fmt_cands(rs, &qc)));
            (wedge.quotient(qs), qc)
        }
        None => (wedge, Vec::new()),
    };
    let cands = candidates(rs, &module);
    let mut by_mu: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    for (d, mu) in &cands {
        by_mu.entry(mu.clone()).or_default().push(*d);
    }
    let sym = if cands.is_empty() {
        BTreeMap::new()
    } else {
        let s = ambient.symmetric_power(j, 50_000_000)?;
        decompose(rs, &s)
    };
    let mut residual = Vec::new();
    for (mu, degs) in &by_mu {
        let chi: i64 = degs.iter().map(|&d| if d % 2 == 0 { 1 } else { -1 }).sum();
        let in_sym = sym.get(mu).copied().unwrap_or(0);
        let q_has = |d: usize| q_cands.iter().any(|(e, m)| *e == d && m == mu);
        let mut left: Vec<usize> = Vec::new();
        for &d in degs {
            let excluded = if d + 1 < j {
                !q_has(d + 1)
            } else if d + 1 == j {
                in_sym == 0 && !q_has(j)
            } else {
                false
            };
            if !excluded {
                left.push(d);
            }
        }
        left.sort_unstable();
        left.dedup();
        let name = format!("({})", crate::rootsys::join_ints(&rs.fundamental_coords(mu), ","));
        if allow_residual && left == [j - 1] && chi != 0 {
            let mult = if (j - 1) % 2 == 0 { chi } else { -chi };
            if mult < 0 || mult > in_sym {
                return Err(Error::pre(
                    "exclusion",
                    format!("candidate {name} in degree {} has Euler multiplicity {mult} but {in_sym} copies in S^{j}U", j - 1),
                ));
            }
            notes.push(format!("{name}: degrees {degs:?}, multiplicity {in_sym} in S^{j}U, Euler {chi} → {mult} copies in degree {}", j - 1));
            residual.push((j - 1, rs.fundamental_coords(mu), mult));
            continue;
        }
        if left.len() > 1 || (left.len() == 1 && chi != 0) {
            return Err(Error::pre(
                "exclusion",
                format!(
                    "candidate {name} in degrees {degs:?} survives (multiplicity in S^{j}U: {in_sym}, Euler {chi})"
                ),
            ));
        }
        notes.push(format!(
            "{name}: degrees {degs:?}, multiplicity {in_sym} in S^{j}U, Euler {chi} → zero"
        ));
    }
    let sym_power = sym
        .iter()
        .map(|(w, m)| {
            let d = weyl_dimension(rs, w).map(|d| d.to_string()).unwrap_or_else(|_| "?".into());
            (rs.fundamental_coords(w), *m, d)
        })
        .collect();
    Ok(ExclusionReport {
        levi_type: rs.cartan_type().to_string(),
        witness: j,
        candidates: cands.iter().map(|(d, w)| (*d, rs.fundamental_coords(w))).collect(),
        sym_power,
        residual,
        notes,
    })
}

fn fmt_cands(rs: &RootSystem, c: &[(usize, Weight)]) -> String {
    if c.is_empty() {
        return "none".into();
    }
    c.iter()
        .map(|(d, w)| format!("H^{d}({})", crate::rootsys::join_ints(&rs.fundamental_coords(w), ",")))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Runs the exclusion argument for a term `S V* ⊗ twist ⊗ M` over the Levi
/// `levi`, where `M` is `∧^j` of a dual quotient (optionally modulo a split
/// submodule). Vanishing over the Levi gives total vanishing upstairs because
/// the rootset is stable under every parabolic in the Levi.
pub fn product_type_vanish(
    rs: &Arc<RootSystem>,
    rootset: &RootSet,
    twist: &Weight,
    module: &BModule,
    levi: &[usize],
) -> Result<ExclusionReport> {
    product_type(rs, rootset, twist, module, levi, false)
}

/// [`product_type_vanish`] allowing residual Levi cohomology in degree `j - 1`.
pub fn product_type_residual(
    rs: &Arc<RootSystem>,
    rootset: &RootSet,
    twist: &Weight,
    module: &BModule,
    levi: &[usize],
) -> Result<ExclusionReport> {
    product_type(rs, rootset, twist, module, levi, true)
}

fn product_type(
    rs: &Arc<RootSystem>,
    rootset: &RootSet,
    twist: &Weight,
    module: &BModule,
    levi: &[usize],
    allow_residual: bool,
) -> Result<ExclusionReport> {
    for &a in levi {
        if !rootset.is_p_stable(a) {
            return Err(Error::pre("p_stable", format!("rootset is not stable under the parabolic of simple root {}", a + 1)));
        }
        if rs.pairing(twist, a) != 0 {
            return Err(Error::pre("twist_levi_trivial", format!("twist pairs nonzero with simple coroot {}", a + 1)));
        }
    }
    let (base, j, split) = match &module.origin {
        Origin::Wedge { base, j } => (base.as_ref(), *j, None),
        Origin::Quotient { parent, sub } => match &parent.origin {
            Origin::Wedge { base, j } => (base.as_ref(), *j, Some(sub.as_slice())),
            _ => return Err(Error::pre("module_shape", "quotient of something other than an exterior power")),
        },
        Origin::Plain => return Err(Error::pre("module_shape", "module is not an exterior power of a dual quotient")),
    };
    let closure = levi_closure(rs, &base.weights, levi);
    for g in &base.weights {
        for &a in levi {
            let l = g - &rs.simple_root(a);
            if closure.contains(&l) && !base.weights.contains(&l) {
                return Err(Error::pre(
                    "submodule_of_ambient",
                    format!("{} lowers out of the submodule", rs.format_weight(g)),
                ));
            }
        }
    }
    let sub = rs.subsystem(levi)?;
    let ambient = WeightMultiset::from_weights(closure.iter().map(|w| restrict_weight(rs, &sub, levi, w)));
    for (w, m) in ambient.iter() {
        for a in 0..sub.rank() {
            if ambient.get(&sub.reflect(w, a)) != m {
                return Err(Error::pre("ambient_levi_module", "closure character is not Weyl-invariant"));
            }
        }
    }
    let base_levi = base.restrict(rs, &sub, levi);
    let mut rep = exclusion_core(&sub, &ambient, &base_levi, j, split, allow_residual)?;
    rep.notes.insert(0, format!("ambient: {} roots closed under the Levi, submodule of dimension {}", closure.len(), base.dim()));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::CartanType;

    /// `U = V(1)^{⊗3}` for `SL2^3`, `U'` its four lowest weights.
    fn a1_cubed() -> (Arc<RootSystem>, WeightMultiset, BModule) {
        let rs = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
        let mut u = Vec::new();
        for a in [-1, 1] {
            for b in [-1, 1] {
                for c in [-1, 1] {
                    u.push(rs.from_fundamental_coords(&[a, b, c]));
                }
            }
        }
        let ambient = WeightMultiset::from_weights(u);
        let low: Vec<Weight> = [[-1, -1, -1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
            .iter()
            .map(|c| rs.from_fundamental_coords(c))
            .collect();
        let lower = low
            .iter()
            .map(|w| {
                (0..3)
                    .map(|a| {
                        let t = w - &rs.simple_root(a);
                        low.iter().position(|x| *x == t).into_iter().collect()
                    })
                    .collect()
            })
            .collect();
        (rs.clone(), ambient, BModule { weights: low, lower, origin: Origin::Plain })
    }

    #[test]
    fn three_copies_of_sl2() {
        let (rs, ambient, base) = a1_cubed();
        let rep = exclusion_argument(&rs, &ambient, &base, 2, None).unwrap();
        assert_eq!(rep.sym_dimension_profile(), vec![3, 3, 3, 27]);
        let degs: Vec<usize> = rep.candidates.iter().map(|c| c.0).collect();
        assert_eq!(degs, vec![1, 2]);
        assert!(rep.candidates.iter().all(|c| c.1 == vec![0, 0, 0]));
    }
}
