//! Finite-dimensional B-modules with a weight basis and an explicit
//! lowering pattern: for each basis vector and simple root, the set of basis
//! vectors occurring in its image with nonzero coefficient.
//!
//! This is enough structure for the dual quotients `(V2/V1)*`, their
//! exterior powers and subquotients cut out by weight conditions, which are
//! the only modules the replay engine filters.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::charmod::{combinations, WeightMultiset};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::RootSet;

#[derive(Clone, Debug)]
pub enum Origin {
    Plain,
    /// `∧^j` of the base module.
    Wedge { base: Box<BModule>, j: usize },
    /// Quotient of `parent` by the submodule spanned by `sub` (indices into parent).
    Quotient { parent: Box<BModule>, sub: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct BModule {
    pub weights: Vec<Weight>,
    /// `lower[i][a]`: basis vectors in `f_a(v_i)`.
    pub lower: Vec<Vec<Vec<usize>>>,
    pub origin: Origin,
}

impl BModule {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn character(&self) -> WeightMultiset {
        WeightMultiset::from_weights(self.weights.iter().cloned())
    }

    /// `(sup/sub)*`: basis the positive roots `γ = -β`, `β ∈ sup \ sub`, with
    /// `f_a(γ) = γ - α_a` whenever that is again a basis weight.
    pub fn dual_quotient(sub: &RootSet, sup: &RootSet) -> BModule {
        let rs = sup.root_system();
        let idx = sup.difference_indices(sub);
        let weights: Vec<Weight> = idx.iter().map(|&k| rs.positive_root(k)).collect();
        let pos: HashMap<&Weight, usize> = weights.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let lower = weights
            .iter()
            .map(|w| {
                (0..rs.rank())
                    .map(|a| {
                        let t = w - &rs.simple_root(a);
                        pos.get(&t).map(|&i| vec![i]).unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        BModule { weights, lower, origin: Origin::Plain }
    }

    /// `∧^j` with the wedge basis; `f_a(v_S)` is the sum over `s ∈ S` of
    /// `v_{S - s + t}` for `t ∈ f_a(s) \ S`, and these are distinct basis vectors.
    pub fn exterior_power(&self, j: usize) -> BModule {
        let rank = self.weights.first().map(|w| w.rank()).unwrap_or(0);
        let nsimple = self.lower.first().map(|l| l.len()).unwrap_or(0);
        let subsets = combinations(self.dim(), j);
        let index: HashMap<&Vec<usize>, usize> = subsets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut weights = Vec::with_capacity(subsets.len());
        let mut lower = Vec::with_capacity(subsets.len());
        for s in &subsets {
            let mut w = Weight::zero(rank);
            for &i in s {
                w = &w + &self.weights[i];
            }
            weights.push(w);
            let mut per_a = Vec::with_capacity(nsimple);
            for a in 0..nsimple {
                let mut targets = Vec::new();
                for &i in s {
                    for &t in &self.lower[i][a] {
                        if s.contains(&t) {
                            continue;
                        }
                        let mut ns: Vec<usize> = s.iter().copied().filter(|&x| x != i).collect();
                        ns.push(t);
                        ns.sort_unstable();
                        targets.push(index[&ns]);
                    }
                }
                targets.sort_unstable();
                per_a.push(targets);
            }
            lower.push(per_a);
        }
        BModule { weights, lower, origin: Origin::Wedge { base: Box::new(self.clone()), j } }
    }

    /// True when the index set is closed under lowering.
    pub fn is_submodule(&self, set: &[usize]) -> bool {
        let s: HashSet<usize> = set.iter().copied().collect();
        set.iter().all(|&i| self.lower[i].iter().flatten().all(|t| s.contains(t)))
    }

    /// Restriction to the given basis vectors (a submodule), reindexed.
    pub fn submodule(&self, set: &[usize]) -> BModule {
        let map: HashMap<usize, usize> = set.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        BModule {
            weights: set.iter().map(|&i| self.weights[i].clone()).collect(),
            lower: set
                .iter()
                .map(|&i| self.lower[i].iter().map(|ts| ts.iter().map(|t| map[t]).collect()).collect())
                .collect(),
            origin: Origin::Plain,
        }
    }

    /// Quotient by a submodule.
    pub fn quotient(&self, sub: &[usize]) -> BModule {
        let in_sub: HashSet<usize> = sub.iter().copied().collect();
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !in_sub.contains(i)).collect();
        let map: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        BModule {
            weights: keep.iter().map(|&i| self.weights[i].clone()).collect(),
            lower: keep
                .iter()
                .map(|&i| {
                    self.lower[i]
                        .iter()
                        .map(|ts| ts.iter().filter_map(|t| map.get(t).copied()).collect())
                        .collect()
                })
                .collect(),
            origin: Origin::Quotient { parent: Box::new(self.clone()), sub: sub.to_vec() },
        }
    }

    /// Restricts to the Levi subsystem on `levi` (indices of simple roots):
    /// weights become Levi weights with the same pairings, and only the
    /// Levi lowering operators are kept.
    pub fn restrict(&self, rs: &RootSystem, sub: &RootSystem, levi: &[usize]) -> BModule {
        BModule {
            weights: self.weights.iter().map(|w| restrict_weight(rs, sub, levi, w)).collect(),
            lower: self.lower.iter().map(|l| levi.iter().map(|&a| l[a].clone()).collect()).collect(),
            origin: Origin::Plain,
        }
    }
}

/// The Levi weight with the same pairings against the Levi simple coroots.
pub fn restrict_weight(rs: &RootSystem, sub: &RootSystem, levi: &[usize], w: &Weight) -> Weight {
    let c: Vec<i64> = levi.iter().map(|&a| rs.pairing(w, a)).collect();
    sub.from_fundamental_coords(&c)
}

/// One piece of a filtration by B-submodules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// A one-dimensional quotient.
    Line { index: usize },
    /// A two-dimensional quotient `t → b = t - α` with `⟨t, α∨⟩ = 0`
    /// (after twisting), which is `P_α`-module twisted by a wall character.
    Block { top: usize, bottom: usize, alpha: usize },
}

/// Greedy filtration: repeatedly take an available piece, preferring lines
/// that `line_vanishes`, then blocks accepted by `block_ok`, then any other
/// line. Available means all lowerings land in the current prefix (for a
/// block, all lowerings of the top except `bottom`).
///
/// Returns the pieces in order and, for each, whether it vanishes.
pub fn greedy_filtration(
    m: &BModule,
    mut line_vanishes: impl FnMut(usize) -> bool,
    mut block_ok: impl FnMut(usize, usize, usize) -> bool,
) -> Vec<(Piece, bool)> {
    let n = m.dim();
    let mut in_prefix = vec![false; n];
    let mut out = Vec::new();
    let mut vanish_cache: HashMap<usize, bool> = HashMap::new();
    let mut remaining = n;
    // canonical scan order: by height then weight
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ha: i64 = m.weights[a].coords().iter().sum();
        let hb: i64 = m.weights[b].coords().iter().sum();
        ha.cmp(&hb).then_with(|| m.weights[a].cmp(&m.weights[b])).then(a.cmp(&b))
    });
    while remaining > 0 {
        let available: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| !in_prefix[i] && m.lower[i].iter().flatten().all(|&t| in_prefix[t]))
            .collect();
        if let Some(&i) = available.iter().find(|&&i| *vanish_cache.entry(i).or_insert_with(|| line_vanishes(i))) {
            in_prefix[i] = true;
            remaining -= 1;
            out.push((Piece::Line { index: i }, true));
            continue;
        }
        let mut block = None;
        'outer: for &b in &available {
            for &t in &order {
                if in_prefix[t] || t == b {
                    continue;
                }
                for (a, targets) in m.lower[t].iter().enumerate() {
                    if !targets.contains(&b) {
                        continue;
                    }
                    let rest_ok = m.lower[t]
                        .iter()
                        .enumerate()
                        .all(|(a2, ts)| ts.iter().all(|&x| in_prefix[x] || (x == b && a2 == a)));
                    if rest_ok && block_ok(t, b, a) {
                        block = Some((t, b, a));
                        break 'outer;
                    }
                }
            }
        }
        if let Some((t, b, a)) = block {
            in_prefix[t] = true;
            in_prefix[b] = true;
            remaining -= 2;
            out.push((Piece::Block { top: t, bottom: b, alpha: a }, true));
            continue;
        }
        match available.first() {
            Some(&i) => {
                in_prefix[i] = true;
                remaining -= 1;
                out.push((Piece::Line { index: i }, false));
            }
            None => break,
        }
    }
    out
}

/// Result of searching for a chain of Demazure moves that kills a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishWitness {
    /// simple roots (0-based) of the dot reflections applied before the wall is hit
    pub moves: Vec<usize>,
    /// the simple root whose pairing is `-1` at the end
    pub wall: usize,
}

/// Breadth-first search over dot reflections by simple roots `α` in
/// `allowed` for a twist with pairing `-1` against some allowed `α`.
pub fn demazure_vanish_search(
    rs: &RootSystem,
    allowed: &[usize],
    twist: &Weight,
    depth: usize,
) -> Option<VanishWitness> {
    let mut seen: HashSet<Weight> = HashSet::from([twist.clone()]);
    let mut queue: VecDeque<(Weight, Vec<usize>)> = VecDeque::from([(twist.clone(), Vec::new())]);
    while let Some((w, path)) = queue.pop_front() {
        if let Some(&a) = allowed.iter().find(|&&a| rs.pairing(&w, a) == -1) {
            return Some(VanishWitness { moves: path, wall: a });
        }
        if path.len() >= depth {
            continue;
        }
        for &a in allowed {
            let nw = rs.dot_reflect(&w, a);
            if seen.insert(nw.clone()) {
                let mut p = path.clone();
                p.push(a);
                queue.push_back((nw, p));
            }
        }
    }
    None
}

/// Levi closure of a set of positive roots inside the nilradical of the
/// parabolic with Levi `levi`: closes under adding and subtracting Levi
/// simple roots while staying among roots with a non-Levi coefficient.
pub fn levi_closure(rs: &Arc<RootSystem>, seeds: &[Weight], levi: &[usize]) -> Vec<Weight> {
    let outside = |w: &Weight| -> bool {
        rs.to_root_coords(w)
            .map(|c| c.iter().enumerate().any(|(j, &x)| x != 0 && !levi.contains(&j)))
            .unwrap_or(false)
    };
    let mut seen: BTreeSet<Weight> = seeds.iter().cloned().collect();
    let mut queue: VecDeque<Weight> = seeds.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for &a in levi {
            for sign in [1, -1] {
                let nw = w.add_scaled(&rs.simple_root(a), sign);
                if rs.positive_index_of(&nw).is_some() && outside(&nw) && seen.insert(nw.clone()) {
                    queue.push_back(nw);
                }
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{subspace_from_diagram, WeightedDiagram};

    fn sub(rs: &Arc<RootSystem>, s: &str) -> RootSet {
        subspace_from_diagram(rs, &WeightedDiagram::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn dual_quotient_structure() {
        let rs = RootSystem::e6();
        let m = BModule::dual_quotient(&sub(&rs, "[0 1 1 2 0 / 2]"), &sub(&rs, "[0 2 0 2 0 / 2]"));
        assert_eq!(m.dim(), 2);
        // {1 1 0 0 0 / 0} lowers by α1 to {0 1 0 0 0 / 0}
        let top = m.weights.iter().position(|w| rs.format_weight(w) == "{1 1 0 0 0 / 0}").unwrap();
        assert_eq!(m.lower[top][0].len(), 1);
        let w2 = m.exterior_power(2);
        assert_eq!(w2.dim(), 1);
        assert!(w2.lower[0].iter().all(|t| t.is_empty()));
    }

    #[test]
    fn wedge_edges_are_distinct() {
        let rs = RootSystem::e6();
        let m = BModule::dual_quotient(&sub(&rs, "[2 1 0 1 2 / 1]"), &sub(&rs, "[2 0 2 0 2 / 0]"));
        assert_eq!(m.dim(), 4);
        for j in 0..=4 {
            let w = m.exterior_power(j);
            assert_eq!(w.dim(), combinations(4, j).len());
            for l in &w.lower {
                for ts in l {
                    let set: HashSet<_> = ts.iter().collect();
                    assert_eq!(set.len(), ts.len());
                }
            }
        }
    }

    #[test]
    fn vanish_search() {
        let rs = RootSystem::e6();
        let w = rs.parse_weight("{0 1 0 0 0 / 0}").unwrap();
        let wit = demazure_vanish_search(&rs, &[2], &w, 3).unwrap();
        assert!(wit.moves.is_empty());
        assert_eq!(wit.wall, 2);
        assert!(demazure_vanish_search(&rs, &[4], &w, 3).is_none());
    }
}
