//! Root systems, weights and Weyl groups for finite (possibly reducible)
//! crystallographic Cartan types.
//!
//! Weights are stored as integer vectors in the simple-root basis scaled by a
//! per-system denominator ([`RootSystem::denom`]). For `E6` the denominator is
//! 3 ("third-units"), which makes both the fundamental weights and `rho`
//! integral; for other types it is the smallest integer that clears the
//! denominators of the inverse Cartan matrix and of `rho`.
//!
//! The `E6` vertex numbering puts `α1 .. α5` on a chain with `α6` attached
//! to `α3`, so weights print as `{a1 a2 a3 a4 a5 / a6}`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Lie family letter of a simple component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub family: Family,
    pub rank: usize,
}

impl Component {
    fn validate(&self) -> Result<()> {
        let ok = match self.family {
            Family::A => self.rank >= 1,
            Family::B | Family::C => self.rank >= 2,
            Family::D => self.rank >= 4,
            Family::E => (6..=8).contains(&self.rank),
            Family::F => self.rank == 4,
            Family::G => self.rank == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidType(self.to_string()))
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

/// A product of simple Cartan types. Vertices are numbered globally by
/// concatenating the components in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanType {
    pub components: Vec<Component>,
}

impl CartanType {
    pub fn simple(family: Family, rank: usize) -> Self {
        CartanType { components: vec![Component { family, rank }] }
    }

    pub fn e6() -> Self {
        Self::simple(Family::E, 6)
    }

    /// Parses `E6`, `A1xA1xA1`, `A2+A2+A1`, `B2` and similar.
    pub fn parse(s: &str) -> Result<Self> {
        let mut components = Vec::new();
        for part in s.split(['x', '+', '*', '×']) {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::InvalidType(s.to_string()));
            }
            let mut chars = part.chars();
            let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
                Some('A') => Family::A,
                Some('B') => Family::B,
                Some('C') => Family::C,
                Some('D') => Family::D,
                Some('E') => Family::E,
                Some('F') => Family::F,
                Some('G') => Family::G,
                _ => return Err(Error::InvalidType(s.to_string())),
            };
            let rank: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::InvalidType(s.to_string()))?;
            let c = Component { family, rank };
            c.validate()?;
            components.push(c);
        }
        Ok(CartanType { components })
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    /// True when this is exactly `E6` (enables the bracket weight syntax).
    pub fn is_e6(&self) -> bool {
        self.components.len() == 1 && self.components[0] == Component { family: Family::E, rank: 6 }
    }

    /// Gram matrix `(α_i, α_j)` of the simple roots, with the shortest
    /// roots of every component normalized to squared length 2.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.rank();
        let mut gram = vec![vec![0i64; n]; n];
        let mut offset = 0;
        for c in &self.components {
            c.validate()?;
            let (norms, bonds) = component_shape(*c);
            for (i, &nm) in norms.iter().enumerate() {
                gram[offset + i][offset + i] = nm;
            }
            for (i, j) in bonds {
                let (ni, nj) = (norms[i], norms[j]);
                // single bond between equal lengths: -N/2; otherwise -short*ratio/..
                let ip = if ni == nj { -ni / 2 } else { -ni.min(nj) * (ni.max(nj) / ni.min(nj)) / 2 };
                gram[offset + i][offset + j] = ip;
                gram[offset + j][offset + i] = ip;
            }
            offset += c.rank;
        }
        Ok(gram)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Squared lengths and bonds (0-based, within the component).
fn component_shape(c: Component) -> (Vec<i64>, Vec<(usize, usize)>) {
    let n = c.rank;
    let chain = |k: usize| (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
    match c.family {
        Family::A => (vec![2; n], chain(n)),
        Family::B => {
            let mut norms = vec![4; n];
            norms[n - 1] = 2;
            (norms, chain(n))
        }
        Family::C => {
            let mut norms = vec![2; n];
            norms[n - 1] = 4;
            (norms, chain(n))
        }
        Family::D => {
            let mut bonds = chain(n - 1);
            bonds.push((n - 3, n - 1));
            (vec![2; n], bonds)
        }
        Family::E => {
            // chain α1..α_{n-1}, with α_n attached to α3
            let mut bonds = chain(n - 1);
            bonds.push((2, n - 1));
            (vec![2; n], bonds)
        }
        Family::F => (vec![4, 4, 2, 2], chain(4)),
        Family::G => (vec![2, 6], chain(2)),
    }
}

/// Integer vector in the scaled simple-root basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub SmallVec<[i64; 8]>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(SmallVec::from_elem(0, rank))
    }

    pub fn from_vec(v: Vec<i64>) -> Self {
        Weight(SmallVec::from_vec(v))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|&x| x * k).collect())
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &Weight, k: i64) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(&a, &b)| a + k * b).collect())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.0.as_slice())
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

/// The orbit `{ w·μ : w ∈ W }` under the dot action, with signs `(-1)^ℓ(w)`,
/// sorted by height so that callers can restrict to a height window.
#[derive(Debug)]
pub struct DotOrbit {
    /// `(scaled height, sign, scaled weight)`
    pub entries: Vec<(i64, i8, Weight)>,
}

impl DotOrbit {
    /// Entries whose scaled height lies in `lo..=hi`.
    pub fn height_window(&self, lo: i64, hi: i64) -> &[(i64, i8, Weight)] {
        let start = self.entries.partition_point(|e| e.0 < lo);
        let end = self.entries.partition_point(|e| e.0 <= hi);
        if start >= end {
            &[]
        } else {
            &self.entries[start..end]
        }
    }
}

/// Cartan data, roots and cached Weyl group of a finite root system.
pub struct RootSystem {
    ty: CartanType,
    rank: usize,
    /// `cartan[i][j] = ⟨α_i, α_j∨⟩`
    cartan: Vec<Vec<i64>>,
    gram: Vec<Vec<i64>>,
    denom: i64,
    /// positive roots in unscaled simple-root coordinates, by height then lex
    pos_roots: Vec<Vec<i64>>,
    /// `coroot_pairs[k][i] = ⟨α_i, β_k∨⟩`
    coroot_pairs: Vec<Vec<i64>>,
    root_lookup: HashMap<Vec<i64>, usize>,
    rho: Weight,
    fundamentals: Vec<Weight>,
    highest_roots: Vec<Weight>,
    highest_short_roots: Vec<Weight>,
    component_of: Vec<usize>,
    weyl: OnceLock<WeylGroup>,
    orbit_cache: Mutex<HashMap<Weight, Arc<DotOrbit>>>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RootSystem")
            .field("type", &self.ty.to_string())
            .field("rank", &self.rank)
            .field("roots", &(2 * self.pos_roots.len()))
            .finish()
    }
}

impl RootSystem {
    /// Builds the root system of `t`, generating all roots by closure from
    /// the simple roots.
    pub fn new(t: &CartanType) -> Result<Arc<RootSystem>> {
        let gram = t.gram_matrix()?;
        Self::from_gram(t.clone(), gram)
    }

    pub fn e6() -> Arc<RootSystem> {
        static E6: OnceLock<Arc<RootSystem>> = OnceLock::new();
        E6.get_or_init(|| RootSystem::new(&CartanType::e6()).expect("E6 is valid")).clone()
    }

    /// Builds a root system directly from a Gram matrix of simple roots. The
    /// type label is informational.
    pub fn from_gram(ty: CartanType, gram: Vec<Vec<i64>>) -> Result<Arc<RootSystem>> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::InvalidType("rank 0".into()));
        }
        let mut cartan = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                let num = 2 * gram[i][j];
                if num % gram[j][j] != 0 {
                    return Err(Error::InvalidType(format!("non-integral Cartan entry ({i},{j})")));
                }
                cartan[i][j] = num / gram[j][j];
            }
            if cartan[i][i] != 2 {
                return Err(Error::InvalidType("Cartan diagonal must be 2".into()));
            }
        }

        let pos_roots = enumerate_positive_roots(&cartan)?;
        let root_lookup: HashMap<Vec<i64>, usize> =
            pos_roots.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();

        let coroot_pairs: Vec<Vec<i64>> = pos_roots
            .iter()
            .map(|beta| {
                let norm = form(&gram, beta, beta);
                (0..rank)
                    .map(|i| {
                        let ip: i64 = (0..rank).map(|k| gram[i][k] * beta[k]).sum();
                        debug_assert_eq!((2 * ip) % norm, 0);
                        2 * ip / norm
                    })
                    .collect()
            })
            .collect();

        // (Cᵀ)^{-1} over the rationals: fundamental weights in root coordinates
        let ct: Vec<Vec<i64>> = (0..rank).map(|i| (0..rank).map(|j| cartan[j][i]).collect()).collect();
        let inv = rational_inverse(&ct).ok_or_else(|| Error::InvalidType("singular Cartan matrix".into()))?;
        let mut rho_root = vec![Ratio::from_integer(0i64); rank];
        for r in &pos_roots {
            for i in 0..rank {
                rho_root[i] += Ratio::new(r[i], 2);
            }
        }
        let mut denom = 1i64;
        for x in inv.iter().flatten().chain(rho_root.iter()) {
            denom = num_integer_lcm(denom, *x.denom());
        }
        let scale = |v: &[Ratio<i64>]| -> Weight {
            Weight(v.iter().map(|x| (x * denom).to_integer()).collect())
        };
        let rho = scale(&rho_root);
        // column j of (Cᵀ)^{-1} is ω_j
        let fundamentals: Vec<Weight> = (0..rank)
            .map(|j| scale(&(0..rank).map(|i| inv[i][j]).collect::<Vec<_>>()))
            .collect();

        // components by connectivity
        let mut component_of = vec![usize::MAX; rank];
        let mut ncomp = 0;
        for s in 0..rank {
            if component_of[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            component_of[s] = ncomp;
            while let Some(v) = stack.pop() {
                for u in 0..rank {
                    if u != v && cartan[v][u] != 0 && component_of[u] == usize::MAX {
                        component_of[u] = ncomp;
                        stack.push(u);
                    }
                }
            }
            ncomp += 1;
        }
        let mut highest_roots = Vec::new();
        let mut highest_short_roots = Vec::new();
        for c in 0..ncomp {
            let in_c = |r: &Vec<i64>| r.iter().enumerate().all(|(i, &x)| x == 0 || component_of[i] == c);
            let long = pos_roots.iter().filter(|r| in_c(r)).map(|r| form(&gram, r, r)).max().unwrap();
            let short = pos_roots.iter().filter(|r| in_c(r)).map(|r| form(&gram, r, r)).min().unwrap();
            let best = |len: i64| {
                pos_roots
                    .iter()
                    .filter(|r| in_c(r) && form(&gram, r, r) == len)
                    .max_by_key(|r| r.iter().sum::<i64>())
                    .unwrap()
            };
            highest_roots.push(Weight(best(long).iter().map(|x| x * denom).collect()));
            if short != long {
                highest_short_roots.push(Weight(best(short).iter().map(|x| x * denom).collect()));
            }
        }

        Ok(Arc::new(RootSystem {
            ty,
            rank,
            cartan,
            gram,
            denom,
            pos_roots,
            coroot_pairs,
            root_lookup,
            rho,
            fundamentals,
            highest_roots,
            highest_short_roots,
            component_of,
            weyl: OnceLock::new(),
            orbit_cache: Mutex::new(HashMap::new()),
        }))
    }

    /// The root system spanned by a subset of the simple roots (a Levi
    /// subsystem), with vertices renumbered `0..indices.len()`.
    pub fn subsystem(&self, indices: &[usize]) -> Result<Arc<RootSystem>> {
        let gram: Vec<Vec<i64>> =
            indices.iter().map(|&i| indices.iter().map(|&j| self.gram[i][j]).collect()).collect();
        let ty = classify_gram(&gram);
        RootSystem::from_gram(ty, gram)
    }

    pub fn cartan_type(&self) -> &CartanType {
        &self.ty
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn gram_matrix(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Scale factor between stored coordinates and simple-root coordinates.
    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn num_roots(&self) -> usize {
        2 * self.pos_roots.len()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.pos_roots.len()
    }

    /// Positive roots in unscaled simple-root coordinates.
    pub fn positive_roots_raw(&self) -> &[Vec<i64>] {
        &self.pos_roots
    }

    pub fn positive_root(&self, k: usize) -> Weight {
        self.from_root_coords(&self.pos_roots[k])
    }

    pub fn positive_roots(&self) -> Vec<Weight> {
        (0..self.pos_roots.len()).map(|k| self.positive_root(k)).collect()
    }

    /// All roots, positive first.
    pub fn roots(&self) -> Vec<Weight> {
        let pos = self.positive_roots();
        let neg: Vec<Weight> = pos.iter().map(|w| -w).collect();
        pos.into_iter().chain(neg).collect()
    }

    /// Index of a positive root given in unscaled coordinates.
    pub fn positive_root_index(&self, raw: &[i64]) -> Option<usize> {
        self.root_lookup.get(raw).copied()
    }

    /// `Some(k)` when `w` is the positive root with index `k`.
    pub fn positive_index_of(&self, w: &Weight) -> Option<usize> {
        self.to_root_coords(w).and_then(|r| self.positive_root_index(&r))
    }

    /// `Some(k)` when `w` is the negative of positive root `k`.
    pub fn negative_index_of(&self, w: &Weight) -> Option<usize> {
        self.positive_index_of(&-w)
    }

    pub fn is_root(&self, w: &Weight) -> bool {
        self.positive_index_of(w).is_some() || self.negative_index_of(w).is_some()
    }

    pub fn simple_root(&self, j: usize) -> Weight {
        let mut w = Weight::zero(self.rank);
        w.0[j] = self.denom;
        w
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn fundamental(&self, j: usize) -> &Weight {
        &self.fundamentals[j]
    }

    /// Highest (long) root of each simple component.
    pub fn highest_roots(&self) -> &[Weight] {
        &self.highest_roots
    }

    /// Highest short root of each non-simply-laced component.
    pub fn highest_short_roots(&self) -> &[Weight] {
        &self.highest_short_roots
    }

    /// Highest root of the first component; for simple types this is θ.
    pub fn highest_root(&self) -> &Weight {
        &self.highest_roots[0]
    }

    pub fn component_of(&self, j: usize) -> usize {
        self.component_of[j]
    }

    pub fn neighbors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank).filter(move |&i| i != j && self.cartan[i][j] != 0)
    }

    pub fn from_root_coords(&self, raw: &[i64]) -> Weight {
        Weight(raw.iter().map(|x| x * self.denom).collect())
    }

    /// Unscaled simple-root coordinates when integral.
    pub fn to_root_coords(&self, w: &Weight) -> Option<Vec<i64>> {
        if w.0.iter().all(|x| x % self.denom == 0) {
            Some(w.0.iter().map(|x| x / self.denom).collect())
        } else {
            None
        }
    }

    pub fn is_root_integral(&self, w: &Weight) -> bool {
        w.0.iter().all(|x| x % self.denom == 0)
    }

    /// Builds `Σ c_j ω_j`.
    pub fn from_fundamental_coords(&self, c: &[i64]) -> Weight {
        let mut w = Weight::zero(self.rank);
        for (j, &cj) in c.iter().enumerate() {
            w = w.add_scaled(&self.fundamentals[j], cj);
        }
        w
    }

    /// Whether `α_i ↦ α_{perm[i]}` preserves the Cartan matrix.
    pub fn is_diagram_automorphism(&self, perm: &[usize]) -> bool {
        let mut seen = vec![false; self.rank];
        if perm.len() != self.rank || perm.iter().any(|&p| p >= self.rank || std::mem::replace(&mut seen[p], true)) {
            return false;
        }
        (0..self.rank).all(|i| (0..self.rank).all(|j| self.cartan[perm[i]][perm[j]] == self.cartan[i][j]))
    }

    /// Image of `w` under the automorphism `α_i ↦ α_{perm[i]}`.
    pub fn permute_weight(&self, w: &Weight, perm: &[usize]) -> Weight {
        let mut out = vec![0; self.rank];
        for (i, &p) in perm.iter().enumerate() {
            out[p] = w.0[i];
        }
        Weight::from_vec(out)
    }

    /// `(⟨λ, α_1∨⟩, …, ⟨λ, α_r∨⟩)`
    pub fn fundamental_coords(&self, w: &Weight) -> Vec<i64> {
        (0..self.rank).map(|j| self.pairing(w, j)).collect()
    }

    /// Checks that `w` pairs integrally with every simple coroot.
    pub fn check_lattice(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: w.rank() });
        }
        for j in 0..self.rank {
            let num: i64 = (0..self.rank).map(|i| w.0[i] * self.cartan[i][j]).sum();
            if num % self.denom != 0 {
                return Err(Error::NotInLattice(self.format_weight(w)));
            }
        }
        Ok(())
    }

    /// `⟨λ, α_j∨⟩`
    pub fn pairing(&self, w: &Weight, j: usize) -> i64 {
        let num: i64 = (0..self.rank).map(|i| w.0[i] * self.cartan[i][j]).sum();
        debug_assert_eq!(num % self.denom, 0, "weight outside lattice");
        num / self.denom
    }

    /// `⟨λ, β∨⟩` for the positive root with index `k`.
    pub fn coroot_pairing(&self, w: &Weight, k: usize) -> i64 {
        let num: i64 = (0..self.rank).map(|i| w.0[i] * self.coroot_pairs[k][i]).sum();
        num / self.denom
    }

    /// Symmetric form on stored coordinates (scaled by `denom²`).
    pub fn scaled_form(&self, a: &Weight, b: &Weight) -> i64 {
        form(&self.gram, &a.0, &b.0)
    }

    pub fn height(&self, w: &Weight) -> Ratio<i64> {
        Ratio::new(w.0.iter().sum::<i64>(), self.denom)
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        (0..self.rank).all(|j| self.pairing(w, j) >= 0)
    }

    /// `s_j(λ) = λ - ⟨λ, α_j∨⟩ α_j`
    pub fn reflect(&self, w: &Weight, j: usize) -> Weight {
        let m = self.pairing(w, j);
        let mut out = w.clone();
        out.0[j] -= m * self.denom;
        out
    }

    /// `s_j·λ = λ - (⟨λ, α_j∨⟩ + 1) α_j`
    pub fn dot_reflect(&self, w: &Weight, j: usize) -> Weight {
        let m = self.pairing(w, j);
        let mut out = w.clone();
        out.0[j] -= (m + 1) * self.denom;
        out
    }

    /// Reflects `w` into the dominant chamber, returning the dominant weight
    /// and the number of simple reflections used.
    pub fn to_dominant(&self, w: &Weight) -> (Weight, usize) {
        let mut cur = w.clone();
        let mut steps = 0;
        while let Some(j) = (0..self.rank).find(|&j| self.pairing(&cur, j) < 0) {
            cur = self.reflect(&cur, j);
            steps += 1;
        }
        (cur, steps)
    }

    /// Longest element of the parabolic subgroup generated by `simples`,
    /// applied linearly to `w`.
    pub fn longest_element_apply(&self, simples: &[usize], w: &Weight) -> Weight {
        // reduced word: drive a regular dominant vector of the subgroup to antidominant
        let mut probe: Weight = simples.iter().fold(Weight::zero(self.rank), |acc, &j| &acc + &self.fundamentals[j]);
        let mut word = Vec::new();
        while let Some(&j) = simples.iter().find(|&&j| self.pairing(&probe, j) > 0) {
            probe = self.reflect(&probe, j);
            word.push(j);
        }
        // probe = w0(ρ_sub) with w0 = s_{word[k-1]} ... s_{word[0]}
        word.iter().fold(w.clone(), |acc, &j| self.reflect(&acc, j))
    }

    pub fn weyl_group(&self) -> &WeylGroup {
        self.weyl.get_or_init(|| WeylGroup::generate(self))
    }

    /// Cached dot-orbit of `mu`.
    pub fn dot_orbit(&self, mu: &Weight) -> Arc<DotOrbit> {
        if let Some(o) = self.orbit_cache.lock().unwrap().get(mu) {
            return o.clone();
        }
        let wg = self.weyl_group();
        let shifted = mu + &self.rho;
        let mut entries: Vec<(i64, i8, Weight)> = wg
            .iter()
            .map(|w| {
                let img = &w.apply(&shifted) - &self.rho;
                let h = img.0.iter().sum::<i64>();
                (h, if w.length() % 2 == 0 { 1 } else { -1 }, img)
            })
            .collect();
        entries.sort();
        let orbit = Arc::new(DotOrbit { entries });
        self.orbit_cache.lock().unwrap().insert(mu.clone(), orbit.clone());
        orbit
    }

    /// Parses `{a1 a2 a3 a4 a5 / a6}` (E6 only), `(c1,...,cr)@root` or
    /// `(c1,...,cr)@fund`. A bare `(c1,...,cr)` means root coordinates.
    pub fn parse_weight(&self, s: &str) -> Result<Weight> {
        let t = s.trim();
        let lead = s.len() - s.trim_start().len();
        let w = if t.starts_with('{') {
            if !self.ty.is_e6() {
                return Err(Error::parse(lead, "bracket weight syntax is only defined for E6"));
            }
            let inner = t
                .strip_prefix('{')
                .and_then(|x| x.strip_suffix('}'))
                .ok_or_else(|| Error::parse(lead, "unterminated `{`"))?;
            let raw = parse_e6_layout(inner, lead + 1)?;
            self.from_root_coords(&raw)
        } else if t.starts_with('(') {
            let close = t.find(')').ok_or_else(|| Error::parse(lead, "unterminated `(`"))?;
            let nums = parse_int_list(&t[1..close], ',', lead + 1)?;
            if nums.len() != self.rank {
                return Err(Error::RankMismatch { expected: self.rank, got: nums.len() });
            }
            match t[close + 1..].trim() {
                "" | "@root" => self.from_root_coords(&nums),
                "@fund" => self.from_fundamental_coords(&nums),
                other => return Err(Error::parse(lead + close + 1, format!("unknown basis suffix `{other}`"))),
            }
        } else {
            return Err(Error::parse(lead, "expected `{` or `(`"));
        };
        self.check_lattice(&w)?;
        Ok(w)
    }

    pub fn format_weight(&self, w: &Weight) -> String {
        if let Some(raw) = self.to_root_coords(w) {
            if self.ty.is_e6() {
                format!("{{{} {} {} {} {} / {}}}", raw[0], raw[1], raw[2], raw[3], raw[4], raw[5])
            } else {
                format!("({})@root", join_ints(&raw, ","))
            }
        } else {
            let f: Vec<i64> = (0..self.rank)
                .map(|j| {
                    let num: i64 = (0..self.rank).map(|i| w.0[i] * self.cartan[i][j]).sum();
                    num / self.denom
                })
                .collect();
            format!("({})@fund", join_ints(&f, ","))
        }
    }
}

pub(crate) fn join_ints(v: &[i64], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Parses `a1 a2 a3 a4 a5 / a6`.
pub(crate) fn parse_e6_layout(inner: &str, pos: usize) -> Result<Vec<i64>> {
    let (chain, branch) = inner
        .split_once('/')
        .ok_or_else(|| Error::parse(pos, "expected `/` separating the branch label"))?;
    let mut raw = parse_int_list(chain, ' ', pos)?;
    let b = parse_int_list(branch, ' ', pos + chain.len() + 1)?;
    if raw.len() != 5 || b.len() != 1 {
        return Err(Error::parse(pos, "E6 layout needs five chain labels and one branch label"));
    }
    raw.push(b[0]);
    Ok(raw)
}

pub(crate) fn parse_int_list(s: &str, sep: char, pos: usize) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    let mut col = pos;
    for tok in s.split(|c: char| c == sep || (sep == ' ' && c.is_whitespace())) {
        let t = tok.trim();
        if !t.is_empty() {
            out.push(t.parse::<i64>().map_err(|_| Error::parse(col, format!("bad integer `{t}`")))?);
        }
        col += tok.len() + 1;
    }
    Ok(out)
}

fn form(gram: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let n = gram.len();
    let mut s = 0;
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            s += a[i] * gram[i][j] * b[j];
        }
    }
    s
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

fn rational_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<Ratio<i64>>>> {
    let n = m.len();
    let mut a: Vec<Vec<Ratio<i64>>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Ratio<i64>> = row.iter().map(|&x| Ratio::from_integer(x)).collect();
            r.extend((0..n).map(|j| Ratio::from_integer(if i == j { 1 } else { 0 })));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != Ratio::from_integer(0))?;
        a.swap(col, piv);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && a[r][col] != Ratio::from_integer(0) {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Root-string closure: `β + α_j` is a root iff `q > 0` where
/// `p - q = ⟨β, α_j∨⟩` and `p` counts how far `β - kα_j` stays a root.
fn enumerate_positive_roots(cartan: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = cartan.len();
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut v = vec![0; n];
            v[j] = 1;
            v
        })
        .collect();
    let mut seen: std::collections::HashSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut layer = roots.clone();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for beta in &layer {
            for j in 0..n {
                let pair: i64 = (0..n).map(|i| beta[i] * cartan[i][j]).sum();
                let mut p = 0;
                let mut probe = beta.clone();
                loop {
                    probe[j] -= 1;
                    if seen.contains(&probe) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pair > 0 {
                    let mut up = beta.clone();
                    up[j] += 1;
                    if seen.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        roots.extend(next.iter().cloned());
        layer = next;
        if roots.len() > 10_000 {
            return Err(Error::InvalidType("root closure did not terminate".into()));
        }
    }
    roots.sort_by(|a, b| a.iter().sum::<i64>().cmp(&b.iter().sum::<i64>()).then_with(|| a.cmp(b)));
    Ok(roots)
}

/// Best-effort Dynkin classification of a Gram matrix, used to label Levi
/// subsystems.
pub fn classify_gram(gram: &[Vec<i64>]) -> CartanType {
    let n = gram.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            for u in 0..n {
                if !seen[u] && gram[v][u] != 0 {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            k += 1;
        }
        let r = comp.len();
        let norms: Vec<i64> = comp.iter().map(|&i| gram[i][i]).collect();
        let lmax = *norms.iter().max().unwrap();
        let lmin = *norms.iter().min().unwrap();
        let degree = |v: usize| comp.iter().filter(|&&u| u != v && gram[v][u] != 0).count();
        let family = if lmax == lmin {
            if comp.iter().any(|&v| degree(v) == 3) {
                let arms = branch_arms(gram, &comp);
                if arms.contains(&1) && arms.iter().filter(|&&a| a == 1).count() >= 2 {
                    Family::D
                } else {
                    Family::E
                }
            } else {
                Family::A
            }
        } else if lmax == 3 * lmin {
            Family::G
        } else if r == 4 && norms.iter().filter(|&&x| x == lmax).count() == 2 {
            Family::F
        } else if norms.iter().filter(|&&x| x == lmax).count() == 1 && r > 2 {
            Family::C
        } else {
            Family::B
        };
        components.push(Component { family, rank: r });
    }
    CartanType { components }
}

fn branch_arms(gram: &[Vec<i64>], comp: &[usize]) -> Vec<usize> {
    let adj = |v: usize| comp.iter().copied().filter(move |&u| u != v && gram[v][u] != 0);
    let center = *comp.iter().find(|&&v| adj(v).count() == 3).unwrap();
    adj(center)
        .map(|start| {
            let (mut prev, mut cur, mut len) = (center, start, 1);
            loop {
                let nxt: Vec<usize> = adj(cur).filter(|&u| u != prev).collect();
                if nxt.is_empty() {
                    break len;
                }
                prev = cur;
                cur = nxt[0];
                len += 1;
            }
        })
        .collect()
}

/// The full Weyl group as integer matrices on stored coordinates,
/// enumerated breadth-first by length; within a length, elements appear in
/// lexicographic order of their lexicographically smallest reduced word.
pub struct WeylGroup {
    rank: usize,
    mats: Vec<i32>,
    lengths: Vec<u8>,
    parent: Vec<u32>,
    letter: Vec<u8>,
}

/// A borrowed view of one Weyl group element.
#[derive(Clone, Copy)]
pub struct WeylElement<'a> {
    group: &'a WeylGroup,
    index: usize,
}

impl WeylGroup {
    fn generate(rs: &RootSystem) -> WeylGroup {
        let r = rs.rank;
        // s_j on column vectors: coordinate j ↦ x_j - Σ_i x_i C[i][j]
        let simple_mats: Vec<Vec<i32>> = (0..r)
            .map(|j| {
                let mut m = vec![0i32; r * r];
                for i in 0..r {
                    m[i * r + i] = 1;
                }
                for i in 0..r {
                    m[j * r + i] -= rs.cartan[i][j] as i32;
                }
                m
            })
            .collect();
        let key_vec: Vec<i64> = rs.rho.0.to_vec();
        let apply = |m: &[i32], v: &[i64]| -> Vec<i64> {
            (0..r).map(|row| (0..r).map(|c| m[row * r + c] as i64 * v[c]).sum()).collect()
        };
        let mut identity = vec![0i32; r * r];
        for i in 0..r {
            identity[i * r + i] = 1;
        }
        let mut wg = WeylGroup { rank: r, mats: identity.clone(), lengths: vec![0], parent: vec![0], letter: vec![u8::MAX] };
        let mut seen: HashMap<Vec<i64>, u32> = HashMap::new();
        seen.insert(key_vec.clone(), 0);
        let mut queue: VecDeque<u32> = VecDeque::from([0]);
        while let Some(idx) = queue.pop_front() {
            let idx = idx as usize;
            let base = wg.mats[idx * r * r..(idx + 1) * r * r].to_vec();
            for (j, sm) in simple_mats.iter().enumerate() {
                // w' = w s_j
                let mut prod = vec![0i32; r * r];
                for a in 0..r {
                    for b in 0..r {
                        let mut s = 0i32;
                        for c in 0..r {
                            s += base[a * r + c] * sm[c * r + b];
                        }
                        prod[a * r + b] = s;
                    }
                }
                let key = apply(&prod, &key_vec);
                if !seen.contains_key(&key) {
                    let new_idx = wg.lengths.len() as u32;
                    seen.insert(key, new_idx);
                    wg.mats.extend_from_slice(&prod);
                    wg.lengths.push(wg.lengths[idx] + 1);
                    wg.parent.push(idx as u32);
                    wg.letter.push(j as u8);
                    queue.push_back(new_idx);
                }
            }
        }
        wg
    }

    pub fn order(&self) -> usize {
        self.lengths.len()
    }

    pub fn max_length(&self) -> usize {
        self.lengths.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn element(&self, index: usize) -> WeylElement<'_> {
        WeylElement { group: self, index }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = WeylElement<'_>> + '_ {
        (0..self.order()).map(move |index| WeylElement { group: self, index })
    }

    /// Number of elements of each length.
    pub fn length_distribution(&self) -> Vec<usize> {
        let mut d = vec![0; self.max_length() + 1];
        for &l in &self.lengths {
            d[l as usize] += 1;
        }
        d
    }
}

impl<'a> WeylElement<'a> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn length(&self) -> usize {
        self.group.lengths[self.index] as usize
    }

    /// Row-major `rank × rank` matrix acting on stored coordinates.
    pub fn matrix(&self) -> &'a [i32] {
        let r = self.group.rank;
        &self.group.mats[self.index * r * r..(self.index + 1) * r * r]
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        let r = self.group.rank;
        let m = self.matrix();
        Weight((0..r).map(|row| (0..r).map(|c| m[row * r + c] as i64 * w.0[c]).sum()).collect())
    }

    /// `w·λ = w(λ + ρ) - ρ`
    pub fn dot(&self, rs: &RootSystem, w: &Weight) -> Weight {
        &self.apply(&(w + rs.rho())) - rs.rho()
    }

    /// Lexicographically smallest reduced word, as simple-root indices
    /// (the element is `s_{w[0]} s_{w[1]} …`).
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::new();
        let mut i = self.index;
        while i != 0 {
            word.push(self.group.letter[i] as usize);
            i = self.group.parent[i] as usize;
        }
        word.reverse();
        word
    }

    /// Length computed from the action: positive roots sent to negative roots.
    pub fn inversions(&self, rs: &RootSystem) -> usize {
        rs.positive_roots()
            .iter()
            .filter(|b| {
                let img = self.apply(b);
                img.0.iter().any(|&x| x < 0)
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e6() -> Arc<RootSystem> {
        RootSystem::e6()
    }

    #[test]
    fn e6_basic_counts() {
        let rs = e6();
        assert_eq!(rs.num_roots(), 72);
        assert_eq!(rs.num_positive_roots(), 36);
        assert_eq!(rs.denom(), 3);
        assert_eq!(rs.format_weight(rs.highest_root()), "{1 2 3 2 1 / 2}");
        assert_eq!(rs.format_weight(rs.rho()), "{8 15 21 15 8 / 11}");
    }

    #[test]
    fn pairing_examples() {
        let rs = e6();
        for j in 0..6 {
            assert_eq!(rs.pairing(&rs.simple_root(j), j), 2);
            assert_eq!(rs.pairing(rs.rho(), j), 1);
        }
        assert_eq!(rs.pairing(&rs.simple_root(2), 1), -1);
        let w = rs.parse_weight("{1 2 2 2 1 / 0}").unwrap();
        assert_eq!(rs.pairing(&w, 5), -2);
    }

    #[test]
    fn reflections() {
        let rs = e6();
        let a3 = rs.simple_root(2);
        assert_eq!(rs.reflect(&a3, 2), -&a3);
        let w = rs.parse_weight("{1 2 0 0 0 / 0}").unwrap();
        let w2 = rs.parse_weight("{1 2 1 0 0 / 0}").unwrap();
        assert_eq!(rs.dot_reflect(&w, 2), w2);
        // fixed point of the dot reflection
        let fixed = rs.parse_weight("{0 1 0 0 0 / 0}").unwrap();
        assert_eq!(rs.pairing(&fixed, 2), -1);
        assert_eq!(rs.dot_reflect(&fixed, 2), fixed);
    }

    #[test]
    fn small_types() {
        let a1 = RootSystem::new(&CartanType::parse("A1").unwrap()).unwrap();
        assert_eq!(a1.num_roots(), 2);
        assert_eq!(a1.denom(), 2);
        assert_eq!(a1.rho().coords(), &[1]);
        let a111 = RootSystem::new(&CartanType::parse("A1xA1xA1").unwrap()).unwrap();
        assert_eq!(a111.num_roots(), 6);
        assert_eq!(a111.num_positive_roots(), 3);
        assert_eq!(a111.highest_roots().len(), 3);
        let b2 = RootSystem::new(&CartanType::parse("B2").unwrap()).unwrap();
        assert_eq!(b2.num_roots(), 8);
        let g2 = RootSystem::new(&CartanType::parse("G2").unwrap()).unwrap();
        assert_eq!(g2.num_roots(), 12);
        let f4 = RootSystem::new(&CartanType::parse("F4").unwrap()).unwrap();
        assert_eq!(f4.num_roots(), 48);
        let e8 = RootSystem::new(&CartanType::parse("E8").unwrap()).unwrap();
        assert_eq!(e8.num_roots(), 240);
        let d5 = RootSystem::new(&CartanType::parse("D5").unwrap()).unwrap();
        assert_eq!(d5.num_roots(), 40);
        assert!(CartanType::parse("D3").is_err());
        assert!(CartanType::parse("E9").is_err());
        assert!(CartanType::parse("Q2").is_err());
    }

    #[test]
    fn weyl_small() {
        let a1 = RootSystem::new(&CartanType::parse("A1").unwrap()).unwrap();
        assert_eq!(a1.weyl_group().length_distribution(), vec![1, 1]);
        let a2 = RootSystem::new(&CartanType::parse("A2").unwrap()).unwrap();
        assert_eq!(a2.weyl_group().length_distribution(), vec![1, 2, 2, 1]);
        for w in a2.weyl_group().iter() {
            assert_eq!(w.length(), w.inversions(&a2));
            assert_eq!(w.length(), w.reduced_word().len());
        }
    }

    #[test]
    fn weight_syntax() {
        let rs = e6();
        let w = rs.parse_weight("{ 2 4 6 4 2 / 4 }").unwrap();
        assert_eq!(w, rs.highest_root().scale(2));
        let f = rs.parse_weight("(0,0,0,0,0,1)@fund").unwrap();
        assert_eq!(f, *rs.highest_root());
        let m = rs.parse_weight("(1,0,0,0,0,0)@fund").unwrap();
        assert!(!rs.is_root_integral(&m));
        assert_eq!(rs.format_weight(&m), "(1,0,0,0,0,0)@fund");
        assert!(rs.parse_weight("{1 2 3}").is_err());
        assert!(rs.parse_weight("(1,2)").is_err());
        let a1 = RootSystem::new(&CartanType::parse("A1").unwrap()).unwrap();
        assert!(a1.parse_weight("{1 2 3 4 5 / 6}").is_err());
    }

    #[test]
    fn longest_element_on_a2_chain() {
        let rs = e6();
        let lam = rs.parse_weight("{1 2 2 2 1 / 0}").unwrap();
        let out = rs.longest_element_apply(&[2, 5], &lam);
        assert_eq!(rs.format_weight(&out), "{1 2 4 2 1 / 2}");
    }

    #[test]
    fn subsystem_labels() {
        let rs = e6();
        let levi = rs.subsystem(&[0, 1, 3, 4, 5]).unwrap();
        assert_eq!(levi.cartan_type().to_string(), "A2xA2xA1");
        let d5 = rs.subsystem(&[0, 1, 2, 3, 5]).unwrap();
        assert_eq!(d5.cartan_type().to_string(), "D5");
        assert_eq!(d5.num_roots(), 40);
    }
}
