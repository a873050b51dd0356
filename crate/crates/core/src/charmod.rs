//! Characters of T-modules: weight multisets, exterior and symmetric
//! powers, and highest-weight characters via Freudenthal's recursion.
//!
//! [`SymPowerCounter`] answers point queries "how many multisets of `n`
//! dual weights sum to `ν`" with a shared memo, which is what the Weyl-sum
//! multiplicity computation spends its time on.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Mutex;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::RootSet;

/// Weight → positive multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WeightMultiset {
    map: BTreeMap<Weight, u64>,
}

impl WeightMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(w: Weight) -> Self {
        let mut m = Self::new();
        m.insert(w, 1);
        m
    }

    pub fn from_weights(ws: impl IntoIterator<Item = Weight>) -> Self {
        let mut m = Self::new();
        for w in ws {
            m.insert(w, 1);
        }
        m
    }

    pub fn insert(&mut self, w: Weight, mult: u64) {
        if mult > 0 {
            *self.map.entry(w).or_insert(0) += mult;
        }
    }

    pub fn get(&self, w: &Weight) -> u64 {
        self.map.get(w).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Weight, u64)> {
        self.map.iter().map(|(w, &m)| (w, m))
    }

    /// Number of distinct weights.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Dimension of the module (sum of multiplicities).
    pub fn dim(&self) -> u64 {
        self.map.values().sum()
    }

    /// The weight when the module is one-dimensional.
    pub fn single(&self) -> Option<&Weight> {
        if self.dim() == 1 {
            self.map.keys().next()
        } else {
            None
        }
    }

    /// Weights repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Weight> {
        self.map.iter().flat_map(|(w, &m)| std::iter::repeat_n(w.clone(), m as usize)).collect()
    }

    /// Character of `M ⊗ C_λ`.
    pub fn twist(&self, lambda: &Weight) -> WeightMultiset {
        WeightMultiset { map: self.map.iter().map(|(w, &m)| (w + lambda, m)).collect() }
    }

    pub fn sum(&self, other: &WeightMultiset) -> WeightMultiset {
        let mut out = self.clone();
        for (w, m) in other.iter() {
            out.insert(w.clone(), m);
        }
        out
    }

    /// Character of `∧^j M`.
    pub fn exterior_power(&self, j: usize) -> WeightMultiset {
        let ws = self.expanded();
        let rank = ws.first().map(|w| w.rank()).unwrap_or(0);
        let mut out = WeightMultiset::new();
        if j > ws.len() {
            return out;
        }
        if j == 0 {
            out.insert(Weight::zero(rank), 1);
            return out;
        }
        for subset in combinations(ws.len(), j) {
            let mut acc = Weight::zero(rank);
            for i in subset {
                acc = &acc + &ws[i];
            }
            out.insert(acc, 1);
        }
        out
    }

    /// Character of `S^n M`, guarded by a bound on the number of monomials.
    pub fn symmetric_power(&self, n: usize, budget: u64) -> Result<WeightMultiset> {
        let ws = self.expanded();
        let rank = ws.first().map(|w| w.rank()).unwrap_or(0);
        let monomials = binomial(ws.len() as u64 + n as u64 - 1, n as u64);
        if n > 0 && monomials.is_none_or(|m| m > budget) {
            return Err(Error::Budget(format!("S^{n} of a {}-dimensional module", ws.len())));
        }
        let mut layers: Vec<BTreeMap<Weight, u64>> = vec![BTreeMap::new(); n + 1];
        layers[0].insert(Weight::zero(rank), 1);
        for g in &ws {
            for d in 1..=n {
                let shifted: Vec<(Weight, u64)> = layers[d - 1].iter().map(|(w, &m)| (w + g, m)).collect();
                for (w, m) in shifted {
                    *layers[d].entry(w).or_insert(0) += m;
                }
            }
        }
        Ok(WeightMultiset { map: layers.swap_remove(n) })
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Index subsets of size `k` of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for t in i + 1..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Memoized counter of multisets of dual weights of a root set.
///
/// Generators are the positive roots `-β` for `β` in the set, in unscaled
/// root coordinates, sorted by height descending. The recursion on
/// `(generator index, n, remaining weight)` is pruned by per-suffix height and
/// coordinate bounds.
pub struct SymPowerCounter {
    rank: usize,
    denom: i64,
    gens: Vec<Vec<i64>>,
    suffix_min_height: Vec<i64>,
    suffix_max_height: Vec<i64>,
    suffix_max_coord: Vec<Vec<i64>>,
    memo: DashMap<u128, u64>,
    wide_memo: DashMap<Vec<i64>, u64>,
    big_memo: Mutex<HashMap<Vec<i64>, BigUint>>,
}

impl SymPowerCounter {
    pub fn new(set: &RootSet) -> Self {
        let rs = set.root_system();
        let mut gens: Vec<Vec<i64>> = set.indices().iter().map(|&k| rs.positive_roots_raw()[k].clone()).collect();
        gens.sort_by(|a, b| b.iter().sum::<i64>().cmp(&a.iter().sum::<i64>()).then_with(|| b.cmp(a)));
        let rank = rs.rank();
        let len = gens.len();
        let mut suffix_min_height = vec![i64::MAX; len + 1];
        let mut suffix_max_height = vec![0; len + 1];
        let mut suffix_max_coord = vec![vec![0; rank]; len + 1];
        for i in (0..len).rev() {
            let h: i64 = gens[i].iter().sum();
            suffix_min_height[i] = suffix_min_height[i + 1].min(h);
            suffix_max_height[i] = suffix_max_height[i + 1].max(h);
            for c in 0..rank {
                suffix_max_coord[i][c] = suffix_max_coord[i + 1][c].max(gens[i][c]);
            }
        }
        SymPowerCounter {
            rank,
            denom: rs.denom(),
            gens,
            suffix_min_height,
            suffix_max_height,
            suffix_max_coord,
            memo: DashMap::new(),
            wide_memo: DashMap::new(),
            big_memo: Mutex::new(HashMap::new()),
        }
    }

    /// Smallest and largest generator height (unscaled); `None` when empty.
    pub fn height_range(&self) -> Option<(i64, i64)> {
        if self.gens.is_empty() {
            None
        } else {
            Some((self.suffix_min_height[0], self.suffix_max_height[0]))
        }
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Converts a scaled weight into unscaled non-negative coordinates, or
    /// `None` when no multiset can reach it.
    fn target(&self, nu: &Weight) -> Option<Vec<i64>> {
        let mut v = Vec::with_capacity(self.rank);
        for &x in nu.coords() {
            if x < 0 || x % self.denom != 0 {
                return None;
            }
            v.push(x / self.denom);
        }
        Some(v)
    }

    /// Multiplicity of the scaled weight `nu` in `S^n` of the dual, as `u64`
    /// when it fits.
    pub fn count_u64(&self, n: usize, nu: &Weight) -> Option<u64> {
        match self.target(nu) {
            None => Some(0),
            Some(mut v) => self.rec(0, n as i64, &mut v),
        }
    }

    /// Exact multiplicity, escalating to arbitrary precision on overflow.
    pub fn count(&self, n: usize, nu: &Weight) -> BigUint {
        match self.count_u64(n, nu) {
            Some(c) => BigUint::from(c),
            None => match self.target(nu) {
                None => BigUint::zero(),
                Some(mut v) => self.rec_big(0, n as i64, &mut v),
            },
        }
    }

    fn feasible(&self, idx: usize, n: i64, v: &[i64]) -> bool {
        let h: i64 = v.iter().sum();
        if h < n * self.suffix_min_height[idx] || h > n * self.suffix_max_height[idx] {
            return false;
        }
        v.iter().zip(&self.suffix_max_coord[idx]).all(|(&x, &m)| x <= n * m)
    }

    fn key(&self, idx: usize, n: i64, v: &[i64]) -> Option<u128> {
        if self.rank > 14 || idx > 255 || n > 255 {
            return None;
        }
        let mut k: u128 = (idx as u128) << 8 | n as u128;
        for &x in v {
            if x > 255 {
                return None;
            }
            k = k << 8 | x as u128;
        }
        Some(k)
    }

    fn rec(&self, idx: usize, n: i64, v: &mut Vec<i64>) -> Option<u64> {
        if n == 0 {
            return Some(v.iter().all(|&x| x == 0) as u64);
        }
        if idx == self.gens.len() || !self.feasible(idx, n, v) {
            return Some(0);
        }
        let key = self.key(idx, n, v);
        let wide_key = key.is_none().then(|| {
            let mut k = vec![idx as i64, n];
            k.extend_from_slice(v);
            k
        });
        if let Some(k) = key {
            if let Some(c) = self.memo.get(&k) {
                return Some(*c);
            }
        } else if let Some(c) = self.wide_memo.get(wide_key.as_ref().unwrap()) {
            return Some(*c);
        }
        let skip = self.rec(idx + 1, n, v)?;
        let g = &self.gens[idx];
        let take = if v.iter().zip(g).all(|(&x, &y)| x >= y) {
            for (x, y) in v.iter_mut().zip(g) {
                *x -= y;
            }
            let t = self.rec(idx, n - 1, v);
            for (x, y) in v.iter_mut().zip(g) {
                *x += y;
            }
            t?
        } else {
            0
        };
        let total = skip.checked_add(take)?;
        match key {
            Some(k) => {
                self.memo.insert(k, total);
            }
            None => {
                self.wide_memo.insert(wide_key.unwrap(), total);
            }
        }
        Some(total)
    }

    fn rec_big(&self, idx: usize, n: i64, v: &mut Vec<i64>) -> BigUint {
        if n == 0 {
            return if v.iter().all(|&x| x == 0) { BigUint::one() } else { BigUint::zero() };
        }
        if idx == self.gens.len() || !self.feasible(idx, n, v) {
            return BigUint::zero();
        }
        let mut key = vec![idx as i64, n];
        key.extend_from_slice(v);
        if let Some(c) = self.big_memo.lock().unwrap().get(&key) {
            return c.clone();
        }
        let mut total = self.rec_big(idx + 1, n, v);
        let g = self.gens[idx].clone();
        if v.iter().zip(&g).all(|(&x, &y)| x >= y) {
            for (x, y) in v.iter_mut().zip(&g) {
                *x -= y;
            }
            total += self.rec_big(idx, n - 1, v);
            for (x, y) in v.iter_mut().zip(&g) {
                *x += y;
            }
        }
        self.big_memo.lock().unwrap().insert(key, total.clone());
        total
    }
}

/// Number of multisets of `n` dual weights of `s` summing to `nu`.
pub fn sym_power_count(s: &RootSet, n: usize, nu: &Weight) -> BigUint {
    s.counter().count(n, nu)
}

/// Full character of `S^n` of the dual of `s`, for small instances.
pub fn full_sym_character(s: &RootSet, n: usize, budget: u64) -> Result<WeightMultiset> {
    let dual = s.dual_weights();
    if dual.is_empty() {
        let mut out = WeightMultiset::new();
        if n == 0 {
            out.insert(Weight::zero(s.root_system().rank()), 1);
        }
        return Ok(out);
    }
    dual.symmetric_power(n, budget)
}

/// Dominant weights of the irreducible module with highest weight `mu`,
/// with multiplicities (Freudenthal).
pub fn irreducible_dominant_weights(rs: &RootSystem, mu: &Weight) -> Result<WeightMultiset> {
    rs.check_lattice(mu)?;
    if !rs.is_dominant(mu) {
        return Err(Error::NotDominant(rs.format_weight(mu)));
    }
    // saturated set of dominant weights below mu, by depth
    let pos = rs.positive_roots();
    let mut order: Vec<Weight> = vec![mu.clone()];
    let mut seen: HashSet<Weight> = HashSet::from([mu.clone()]);
    let mut queue = VecDeque::from([mu.clone()]);
    while let Some(w) = queue.pop_front() {
        for b in &pos {
            let nxt = &w - b;
            if rs.is_dominant(&nxt) && seen.insert(nxt.clone()) {
                order.push(nxt.clone());
                queue.push_back(nxt);
            }
        }
    }
    order.sort_by_key(|w| std::cmp::Reverse(w.coords().iter().sum::<i64>()));

    let rho = rs.rho();
    let norm = |w: &Weight| rs.scaled_form(w, w) as i128;
    let top = norm(&(mu + rho));
    let mut mult: HashMap<Weight, i128> = HashMap::new();
    for lam in &order {
        if lam == mu {
            mult.insert(lam.clone(), 1);
            continue;
        }
        let mut num: i128 = 0;
        for b in &pos {
            let mut k = 1;
            loop {
                let shifted = lam.add_scaled(b, k);
                let (dom, _) = rs.to_dominant(&shifted);
                let m = match mult.get(&dom) {
                    Some(&m) => m,
                    None => break,
                };
                num += m * rs.scaled_form(&shifted, b) as i128;
                k += 1;
            }
        }
        let den = top - norm(&(lam + rho));
        let m = 2 * num / den;
        debug_assert_eq!((2 * num) % den, 0);
        mult.insert(lam.clone(), m);
    }
    let mut out = WeightMultiset::new();
    for lam in order {
        let m = mult[&lam];
        out.insert(lam, m as u64);
    }
    Ok(out)
}

/// W-orbit of a weight under the linear action.
pub fn weyl_orbit(rs: &RootSystem, w: &Weight) -> Vec<Weight> {
    let mut seen: HashSet<Weight> = HashSet::from([w.clone()]);
    let mut out = vec![w.clone()];
    let mut i = 0;
    while i < out.len() {
        for j in 0..rs.rank() {
            let r = rs.reflect(&out[i], j);
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

/// Full character of the irreducible module with highest weight `mu`.
pub fn irreducible_character(rs: &RootSystem, mu: &Weight) -> Result<WeightMultiset> {
    let dom = irreducible_dominant_weights(rs, mu)?;
    let mut out = WeightMultiset::new();
    for (w, m) in dom.iter() {
        for x in weyl_orbit(rs, w) {
            out.insert(x, m);
        }
    }
    Ok(out)
}

/// Multiplicities of irreducibles in a W-invariant (virtual) character,
/// `m_μ = Σ_w (-1)^ℓ(w) ch[w·μ]`. Only nonzero entries are returned.
pub fn decompose(rs: &RootSystem, ch: &WeightMultiset) -> BTreeMap<Weight, i64> {
    let mut out = BTreeMap::new();
    for (mu, _) in ch.iter() {
        if !rs.is_dominant(mu) {
            continue;
        }
        let orbit = rs.dot_orbit(mu);
        let m: i64 = orbit.entries.iter().map(|(_, sign, w)| *sign as i64 * ch.get(w) as i64).sum();
        if m != 0 {
            out.insert(mu.clone(), m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::CartanType;
    use crate::subspace::{subspace_from_diagram, WeightedDiagram};
    use std::sync::Arc;

    fn e6() -> Arc<RootSystem> {
        RootSystem::e6()
    }

    #[test]
    fn exterior_powers() {
        let rs = e6();
        let v = WeightMultiset::from_weights(
            ["{0 1 0 0 0 / 0}", "{1 1 0 0 0 / 0}"].iter().map(|s| rs.parse_weight(s).unwrap()),
        );
        let top = v.exterior_power(2);
        assert_eq!(rs.format_weight(top.single().unwrap()), "{1 2 0 0 0 / 0}");
        assert_eq!(v.exterior_power(0).single().unwrap(), &Weight::zero(6));
        assert!(v.exterior_power(3).is_empty());
        let total: u64 = (0..=2).map(|j| v.exterior_power(j).dim()).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn counts_on_u() {
        let rs = e6();
        let u = subspace_from_diagram(&rs, &WeightedDiagram::parse("[2 2 2 2 2 / 2]").unwrap()).unwrap();
        let theta = rs.highest_root().clone();
        assert_eq!(sym_power_count(&u, 0, &Weight::zero(6)), BigUint::one());
        assert_eq!(sym_power_count(&u, 0, &theta), BigUint::zero());
        assert_eq!(sym_power_count(&u, 1, &theta), BigUint::one());
        // brute force over ordered pairs
        let pos = rs.positive_roots();
        let two_theta = theta.scale(2);
        let mut pairs = 0;
        for a in 0..pos.len() {
            for b in a..pos.len() {
                if &pos[a] + &pos[b] == two_theta {
                    pairs += 1;
                }
            }
        }
        assert_eq!(sym_power_count(&u, 2, &two_theta), BigUint::from(pairs as u32));
    }

    #[test]
    fn full_character_matches_counter() {
        let rs = e6();
        let s = subspace_from_diagram(&rs, &WeightedDiagram::parse("[2 0 2 0 2 / 0]").unwrap()).unwrap();
        for n in 0..4 {
            let ch = full_sym_character(&s, n, 1_000_000).unwrap();
            for (w, m) in ch.iter() {
                assert_eq!(sym_power_count(&s, n, w), BigUint::from(m));
            }
        }
    }

    #[test]
    fn adjoint_character() {
        let rs = e6();
        let dom = irreducible_dominant_weights(&rs, rs.highest_root()).unwrap();
        assert_eq!(dom.len(), 2);
        assert_eq!(dom.get(rs.highest_root()), 1);
        assert_eq!(dom.get(&Weight::zero(6)), 6);
        let full = irreducible_character(&rs, rs.highest_root()).unwrap();
        assert_eq!(full.dim(), 78);
        for (w, m) in full.iter() {
            assert!(w.is_zero() || (rs.is_root(w) && m == 1));
        }
        assert!(irreducible_dominant_weights(&rs, &-rs.highest_root()).is_err());
    }

    #[test]
    fn b2_adjoint_reproduces_roots() {
        let rs = RootSystem::new(&CartanType::parse("B2").unwrap()).unwrap();
        let full = irreducible_character(&rs, rs.highest_root()).unwrap();
        assert_eq!(full.dim(), 10);
        assert_eq!(full.get(&Weight::zero(2)), 2);
        for (w, m) in full.iter() {
            assert!(w.is_zero() || (rs.is_root(w) && m == 1));
        }
    }

    #[test]
    fn combos() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
