//! T-stable subspaces of the nilradical `u`, which is spanned by the
//! negative root spaces. Subspaces are named by bracketed weighted Dynkin
//! diagrams `[a1 a2 a3 a4 a5 / a6]`: a negative root `-Σ c_j α_j` has grade
//! `Σ c_j d_j`, and the bracket is the span of all grades `>= 2`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::charmod::{SymPowerCounter, WeightMultiset};
use crate::error::{Error, Result};
use crate::rootsys::{join_ints, parse_e6_layout, parse_int_list, RootSystem, Weight};

/// Non-negative integer labels, one per simple root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightedDiagram {
    pub labels: Vec<i64>,
}

impl WeightedDiagram {
    pub fn new(labels: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&x| x < 0) {
            return Err(Error::NegativeLabel(bad));
        }
        Ok(WeightedDiagram { labels })
    }

    /// Parses `[a1 a2 a3 a4 a5 / a6]` (six labels) or `[c1,...,cr]`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let lead = s.len() - s.trim_start().len();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::parse(lead, "diagram must be enclosed in `[` `]`"))?;
        let labels = if inner.contains('/') {
            parse_e6_layout(inner, lead + 1)?
        } else if inner.contains(',') {
            parse_int_list(inner, ',', lead + 1)?
        } else {
            parse_int_list(inner, ' ', lead + 1)?
        };
        if labels.is_empty() {
            return Err(Error::parse(lead, "empty diagram"));
        }
        Self::new(labels)
    }

    pub fn is_even(&self) -> bool {
        self.labels.iter().all(|x| x % 2 == 0)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Grade of the negative root `-raw` (raw in positive root coordinates).
    pub fn grade_of(&self, raw: &[i64]) -> i64 {
        raw.iter().zip(&self.labels).map(|(c, d)| c * d).sum()
    }

    pub fn format(&self, rs: &RootSystem) -> String {
        if rs.cartan_type().is_e6() && self.labels.len() == 6 {
            let l = &self.labels;
            format!("[{} {} {} {} {} / {}]", l[0], l[1], l[2], l[3], l[4], l[5])
        } else {
            format!("[{}]", join_ints(&self.labels, ","))
        }
    }
}

/// Grade pieces of a diagram, keyed by positive grade, together with the
/// weight `ω` of the top exterior power of the grade-1 piece.
#[derive(Clone, Debug)]
pub struct GradedParts {
    pub parts: BTreeMap<i64, Vec<Weight>>,
    pub omega: Weight,
}

impl GradedParts {
    pub fn grade(&self, i: i64) -> &[Weight] {
        self.parts.get(&i).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// A set of negative roots spanning a T-stable subspace of `u`.
///
/// Members are stored by the index of the corresponding positive root, in
/// the root system's canonical order (height, then lexicographic).
#[derive(Clone)]
pub struct RootSet {
    rs: Arc<RootSystem>,
    mask: Vec<bool>,
    members: Vec<usize>,
    b_stable: bool,
    p_stable: Vec<bool>,
    counter: Arc<OnceLock<Arc<SymPowerCounter>>>,
}

impl PartialEq for RootSet {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask && self.rs.cartan_matrix() == other.rs.cartan_matrix()
    }
}

impl Eq for RootSet {}

impl Hash for RootSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.mask.hash(state);
    }
}

impl fmt::Debug for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSet{:?}", self.members)
    }
}

impl RootSet {
    /// Builds a root set from positive-root indices; `-β_k` is the member.
    pub fn from_indices(rs: &Arc<RootSystem>, indices: impl IntoIterator<Item = usize>) -> RootSet {
        let mut mask = vec![false; rs.num_positive_roots()];
        for k in indices {
            mask[k] = true;
        }
        Self::from_mask(rs, mask)
    }

    fn from_mask(rs: &Arc<RootSystem>, mask: Vec<bool>) -> RootSet {
        let members: Vec<usize> = (0..mask.len()).filter(|&k| mask[k]).collect();
        let raw = rs.positive_roots_raw();
        let r = rs.rank();
        let shifted = |k: usize, j: usize, d: i64| -> Option<usize> {
            let mut v = raw[k].clone();
            v[j] += d;
            rs.positive_root_index(&v)
        };
        // member -γ lowered by α_j is -(γ+α_j)
        let b_stable = members
            .iter()
            .all(|&k| (0..r).all(|j| shifted(k, j, 1).map_or(true, |up| mask[up])));
        // e_α sends e_{-α} into the Cartan, so -α itself must be absent
        let p_stable = (0..r)
            .map(|j| {
                let simple = (0..r).map(|i| i64::from(i == j)).collect::<Vec<_>>();
                b_stable
                    && !rs.positive_root_index(&simple).is_some_and(|k| mask[k])
                    && members.iter().all(|&k| shifted(k, j, -1).map_or(true, |dn| mask[dn]))
            })
            .collect();
        RootSet { rs: rs.clone(), mask, members, b_stable, p_stable, counter: Arc::new(OnceLock::new()) }
    }

    pub fn empty(rs: &Arc<RootSystem>) -> RootSet {
        Self::from_indices(rs, [])
    }

    /// All negative roots.
    pub fn full(rs: &Arc<RootSystem>) -> RootSet {
        Self::from_indices(rs, 0..rs.num_positive_roots())
    }

    /// Builds a set from explicit negative roots.
    pub fn from_roots(rs: &Arc<RootSystem>, roots: &[Weight]) -> Result<RootSet> {
        let mut mask = vec![false; rs.num_positive_roots()];
        for w in roots {
            let k = rs.negative_index_of(w).ok_or_else(|| Error::NotARoot(rs.format_weight(w)))?;
            if mask[k] {
                return Err(Error::BadEdit(format!("duplicate root {}", rs.format_weight(w))));
            }
            mask[k] = true;
        }
        Ok(Self::from_mask(rs, mask))
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Positive-root indices of the members.
    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn contains_index(&self, k: usize) -> bool {
        self.mask[k]
    }

    pub fn contains(&self, w: &Weight) -> bool {
        self.rs.negative_index_of(w).is_some_and(|k| self.mask[k])
    }

    /// Member negative roots, canonical order.
    pub fn roots(&self) -> Vec<Weight> {
        self.members.iter().map(|&k| -&self.rs.positive_root(k)).collect()
    }

    /// Weights of the dual space: the positive roots `-β`.
    pub fn dual_weights(&self) -> WeightMultiset {
        WeightMultiset::from_weights(self.members.iter().map(|&k| self.rs.positive_root(k)))
    }

    pub fn is_b_stable(&self) -> bool {
        self.b_stable
    }

    pub fn is_p_stable(&self, j: usize) -> bool {
        self.p_stable[j]
    }

    pub fn is_subset_of(&self, other: &RootSet) -> bool {
        self.members.iter().all(|&k| other.mask[k])
    }

    pub fn intersect(&self, other: &RootSet) -> RootSet {
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect();
        Self::from_mask(&self.rs, mask)
    }

    pub fn union(&self, other: &RootSet) -> RootSet {
        let mask = self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect();
        Self::from_mask(&self.rs, mask)
    }

    /// Removes and adds single root spaces. Removed roots must be present,
    /// added roots absent, and nothing may be listed twice.
    pub fn edit(&self, add: &[Weight], remove: &[Weight]) -> Result<RootSet> {
        let mut mask = self.mask.clone();
        let mut touched = vec![false; mask.len()];
        for w in remove {
            let k = self.rs.negative_index_of(w).ok_or_else(|| Error::NotARoot(self.rs.format_weight(w)))?;
            if touched[k] || !mask[k] {
                return Err(Error::BadEdit(format!("cannot remove {}", self.rs.format_weight(w))));
            }
            touched[k] = true;
            mask[k] = false;
        }
        for w in add {
            let k = self.rs.negative_index_of(w).ok_or_else(|| Error::NotARoot(self.rs.format_weight(w)))?;
            if touched[k] || mask[k] {
                return Err(Error::BadEdit(format!("cannot add {}", self.rs.format_weight(w))));
            }
            touched[k] = true;
            mask[k] = true;
        }
        Ok(Self::from_mask(&self.rs, mask))
    }

    /// Dual weights `{-β : β ∈ sup \ sub}` of the quotient `sup / sub`.
    pub fn quotient_weights(sub: &RootSet, sup: &RootSet) -> Result<WeightMultiset> {
        if !sub.is_subset_of(sup) {
            return Err(Error::NotSubset(format!("{} ⊄ {}", sub.describe(), sup.describe())));
        }
        Ok(WeightMultiset::from_weights(
            sup.members.iter().filter(|&&k| !sub.mask[k]).map(|&k| sup.rs.positive_root(k)),
        ))
    }

    /// Indices in `self` but not in `other`.
    pub fn difference_indices(&self, other: &RootSet) -> Vec<usize> {
        self.members.iter().copied().filter(|&k| !other.mask[k]).collect()
    }

    /// Simple roots `j` with `-α_j` not in the set.
    pub fn levi_simples(&self) -> Vec<usize> {
        let r = self.rs.rank();
        (0..r)
            .filter(|&j| {
                let mut e = vec![0i64; r];
                e[j] = 1;
                !self.rs.positive_root_index(&e).is_some_and(|k| self.mask[k])
            })
            .collect()
    }

    /// Shared knapsack counter for the characters of `S^n` of the dual.
    pub fn counter(&self) -> Arc<SymPowerCounter> {
        self.counter.get_or_init(|| Arc::new(SymPowerCounter::new(self))).clone()
    }

    /// Smallest even diagram (all labels 0 or 2) producing this set, then
    /// any diagram with labels in `0..=2`, searched in lexicographic order.
    pub fn as_diagram(&self) -> Option<WeightedDiagram> {
        let r = self.rs.rank();
        let levi = self.levi_simples();
        let even = WeightedDiagram { labels: (0..r).map(|j| if levi.contains(&j) { 0 } else { 2 }).collect() };
        if subspace_from_diagram(&self.rs, &even).ok().as_ref() == Some(self) {
            return Some(even);
        }
        if r > 8 {
            return None;
        }
        let mut labels = vec![0i64; r];
        loop {
            let d = WeightedDiagram { labels: labels.clone() };
            if subspace_from_diagram(&self.rs, &d).ok().as_ref() == Some(self) {
                return Some(d);
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if labels[i] < 2 {
                    labels[i] += 1;
                    break;
                }
                labels[i] = 0;
            }
        }
    }

    /// A diagram when one reproduces the set, else the nearest diagram with
    /// up to four single-root edits, else the member list.
    pub fn describe(&self) -> String {
        if let Some(d) = self.as_diagram() {
            return d.format(&self.rs);
        }
        if let Some((d, add, remove)) = self.nearest_diagram(4) {
            let mut s = d.format(&self.rs);
            for k in remove {
                s.push_str(&format!(" -{}", self.rs.format_weight(&-&self.rs.positive_root(k))));
            }
            for k in add {
                s.push_str(&format!(" +{}", self.rs.format_weight(&-&self.rs.positive_root(k))));
            }
            return format!("({s})");
        }
        let roots: Vec<String> = self.roots().iter().map(|w| self.rs.format_weight(w)).collect();
        format!("<{}>", roots.join(", "))
    }

    /// Diagram with labels in `0..=2` closest in symmetric difference, with
    /// the root indices to add to and remove from it.
    fn nearest_diagram(&self, limit: usize) -> Option<(WeightedDiagram, Vec<usize>, Vec<usize>)> {
        let r = self.rs.rank();
        if r > 8 {
            return None;
        }
        let mut best: Option<(usize, WeightedDiagram, Vec<usize>, Vec<usize>)> = None;
        let mut labels = vec![0i64; r];
        loop {
            let d = WeightedDiagram { labels: labels.clone() };
            if let Ok(set) = subspace_from_diagram(&self.rs, &d) {
                let add = self.difference_indices(&set);
                let remove = set.difference_indices(self);
                let cost = add.len() + remove.len();
                if cost <= limit && best.as_ref().is_none_or(|b| cost < b.0) {
                    best = Some((cost, d, add, remove));
                }
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return best.map(|(_, d, a, rm)| (d, a, rm));
                }
                i -= 1;
                if labels[i] < 2 {
                    labels[i] += 1;
                    break;
                }
                labels[i] = 0;
            }
        }
    }
}

/// The negative roots of grade `>= 2`.
pub fn subspace_from_diagram(rs: &Arc<RootSystem>, d: &WeightedDiagram) -> Result<RootSet> {
    if d.rank() != rs.rank() {
        return Err(Error::RankMismatch { expected: rs.rank(), got: d.rank() });
    }
    let raw = rs.positive_roots_raw();
    let set = RootSet::from_indices(rs, (0..raw.len()).filter(|&k| d.grade_of(&raw[k]) >= 2));
    assert!(set.is_b_stable(), "diagram subspaces are B-stable");
    Ok(set)
}

/// Negative roots grouped by positive grade, with `ω` the sum of grade-1
/// weights.
pub fn grading_parts(rs: &Arc<RootSystem>, d: &WeightedDiagram) -> Result<GradedParts> {
    if d.rank() != rs.rank() {
        return Err(Error::RankMismatch { expected: rs.rank(), got: d.rank() });
    }
    let mut parts: BTreeMap<i64, Vec<Weight>> = BTreeMap::new();
    let mut omega = Weight::zero(rs.rank());
    for (k, raw) in rs.positive_roots_raw().iter().enumerate() {
        let g = d.grade_of(raw);
        if g > 0 {
            let w = -&rs.positive_root(k);
            if g == 1 {
                omega = &omega + &w;
            }
            parts.entry(g).or_default().push(w);
        }
    }
    Ok(GradedParts { parts, omega })
}

/// Nilradical of the parabolic whose Levi has the given simple roots.
pub fn nilradical_of_parabolic(rs: &Arc<RootSystem>, levi: &[usize]) -> RootSet {
    let raw = rs.positive_roots_raw();
    let set = RootSet::from_indices(
        rs,
        (0..raw.len()).filter(|&k| raw[k].iter().enumerate().any(|(j, &c)| c != 0 && !levi.contains(&j))),
    );
    let d = WeightedDiagram { labels: (0..rs.rank()).map(|j| if levi.contains(&j) { 0 } else { 2 }).collect() };
    debug_assert!(subspace_from_diagram(rs, &d).map(|s| s == set).unwrap_or(false));
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e6() -> Arc<RootSystem> {
        RootSystem::e6()
    }

    fn sub(s: &str) -> RootSet {
        subspace_from_diagram(&e6(), &WeightedDiagram::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn extreme_diagrams() {
        assert_eq!(sub("[2 2 2 2 2 / 2]").dim(), 36);
        assert!(sub("[0 0 0 0 0 / 0]").is_empty());
        assert!(WeightedDiagram::parse("[0 -1 0 0 0 / 0]").is_err());
        assert_eq!(WeightedDiagram::parse("[1,2,0]").unwrap().labels, vec![1, 2, 0]);
    }

    #[test]
    fn nilradicals_match_even_diagrams() {
        let rs = e6();
        assert!(nilradical_of_parabolic(&rs, &[0, 1, 2, 3, 4, 5]).is_empty());
        assert_eq!(nilradical_of_parabolic(&rs, &[]).dim(), 36);
        assert_eq!(nilradical_of_parabolic(&rs, &[0, 2, 4]), sub("[0 2 0 2 0 / 2]"));
        let s = sub("[0 2 0 2 0 / 2]");
        assert!(s.is_b_stable() && s.is_p_stable(2));
        assert!(!s.is_p_stable(1));
    }

    #[test]
    fn omega_of_odd_diagram() {
        let rs = e6();
        let g = grading_parts(&rs, &WeightedDiagram::parse("[1 0 1 0 1 / 0]").unwrap()).unwrap();
        assert_eq!(rs.format_weight(&g.omega), "{-2 -5 -8 -5 -2 / -4}");
        let even = grading_parts(&rs, &WeightedDiagram::parse("[2 0 2 0 0 / 2]").unwrap()).unwrap();
        assert!(even.grade(1).is_empty() && even.omega.is_zero());
    }

    #[test]
    fn quotients() {
        let rs = e6();
        let q = RootSet::quotient_weights(&sub("[0 1 1 2 0 / 2]"), &sub("[0 2 0 2 0 / 2]")).unwrap();
        let ws: Vec<String> = q.iter().map(|(w, _)| rs.format_weight(w)).collect();
        assert_eq!(ws, vec!["{0 1 0 0 0 / 0}", "{1 1 0 0 0 / 0}"]);
        let q = RootSet::quotient_weights(&sub("[0 1 1 2 0 / 2]"), &sub("[0 0 2 2 0 / 2]")).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.iter().next().unwrap().0, &rs.simple_root(2));
        assert!(RootSet::quotient_weights(&sub("[0 2 0 2 0 / 2]"), &sub("[0 1 1 2 0 / 2]")).is_err());
    }

    #[test]
    fn edits() {
        let rs = e6();
        let u1 = sub("[1 0 1 0 1 / 0]");
        let a = rs.parse_weight("{-1 -1 -1 0 0 / 0}").unwrap();
        let b = rs.parse_weight("{0 0 -1 -1 -1 / 0}").unwrap();
        let u = u1.edit(&[], &[a.clone(), b.clone()]).unwrap();
        assert_eq!(u.dim(), u1.dim() - 2);
        assert_eq!(u.edit(&[a.clone(), b], &[]).unwrap(), u1);
        assert!(u.edit(&[], &[a.clone()]).is_err());
        assert!(u1.edit(&[a.clone()], &[]).is_err());
        assert!(u1.edit(&[], &[a.clone(), a]).is_err());
        let not_root = rs.parse_weight("{-1 0 -1 0 0 / 0}").unwrap();
        assert!(matches!(u1.edit(&[], &[not_root]), Err(Error::NotARoot(_))));
    }

    #[test]
    fn diagram_roundtrip() {
        assert_eq!(sub("[2 0 2 0 2 / 0]").describe(), "[2 0 2 0 2 / 0]");
        assert_eq!(sub("[0 0 0 0 0 / 2]").describe(), "[0 0 0 0 0 / 2]");
    }
}
