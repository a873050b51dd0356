use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::product::{product_type_residual, product_type_vanish};
use super::script::{split_args, Directive, Item, KoszulBlock, SplitBlock};
use super::{CohQuery, KernelRecord, ReplayOptions, ReplayReport, Statement, StepRecord, StepStatus};
use crate::bmodule::{demazure_vanish_search, greedy_filtration, BModule, Origin, Piece, VanishWitness};
use crate::cohom::{bbw, broer_case_check, default_probes, euler_mult, BbwResult};
use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::{nilradical_of_parabolic, subspace_from_diagram, RootSet, WeightedDiagram};

/// What a chain of steps established about the query it started from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainOutcome {
    Vanish,
    /// cohomology confined to these degrees
    Support(BTreeSet<i64>),
    Open,
}

struct ChainEnd {
    outcome: ChainOutcome,
    last: CohQuery,
    /// every step was an isomorphism (up to degree shift)
    iso: bool,
}

enum Value {
    Roots(RootSet),
    Weight(Weight),
}

enum StepOut {
    Vanish,
    Query(CohQuery),
}

type CacheKey = (Vec<usize>, usize, Weight, Weight);

struct Engine<'a> {
    rs: Arc<RootSystem>,
    opts: &'a ReplayOptions,
    n_max: usize,
    probes: Vec<Weight>,
    lets: HashMap<String, Value>,
    cache: DashMap<CacheKey, BigInt>,
    report: ReplayReport,
}

/// The terms `K_j = S^{n+offset-j} sup* ⊗ twist ⊗ ∧^j (sup/sub)*` of the
/// Koszul resolution, `j = 0..=dim(sup/sub)`. One-dimensional exterior
/// powers are folded into the twist.
pub fn koszul_terms(sub: &RootSet, sup: &RootSet, offset: i64, twist: &Weight) -> Result<Vec<(usize, CohQuery)>> {
    if !sub.is_subset_of(sup) {
        return Err(Error::NotSubset(format!("{} ⊄ {}", sub.describe(), sup.describe())));
    }
    let base = BModule::dual_quotient(sub, sup);
    Ok((0..=base.dim())
        .map(|j| {
            let w = base.exterior_power(j);
            let (tw, factor) = match w.dim() {
                _ if j == 0 => (twist.clone(), None),
                1 => (twist + &w.weights[0], None),
                _ => (twist.clone(), Some(w)),
            };
            (j, CohQuery { rootset: sup.clone(), offset: offset - j as i64, twist: tw, shift: 0, factor, frame: None })
        })
        .collect())
}

/// Evaluates a rootset expression outside a script: a diagram `[...]`,
/// `meet(..)`, `join(..)`, `edit(base, -{..}, +{..})` or `nil(i, ..)`.
pub fn rootset_expression(src: &str) -> Result<RootSet> {
    let opts = ReplayOptions::default();
    let rs = RootSystem::e6();
    let eng = Engine {
        rs,
        opts: &opts,
        n_max: 0,
        probes: Vec::new(),
        lets: HashMap::new(),
        cache: DashMap::new(),
        report: ReplayReport {
            script: String::new(),
            meta: Vec::new(),
            n_max: 0,
            probes: Vec::new(),
            steps: Vec::new(),
            statements: Vec::new(),
            euler_checks: 0,
            unverified: 0,
            passed: false,
            failure: None,
        },
    };
    let d = Directive { head: "rootset".into(), attrs: Vec::new(), line: 0 };
    eng.rootset_expr(src, &d)
}

pub(super) fn run(name: &str, items: &[Item], opts: &ReplayOptions) -> Result<ReplayReport> {
    let rs = RootSystem::e6();
    let mut eng = Engine {
        rs: rs.clone(),
        opts,
        n_max: opts.n_max.unwrap_or(8),
        probes: Vec::new(),
        lets: HashMap::new(),
        cache: DashMap::new(),
        report: ReplayReport {
            script: name.to_string(),
            meta: Vec::new(),
            n_max: 0,
            probes: Vec::new(),
            steps: Vec::new(),
            statements: Vec::new(),
            euler_checks: 0,
            unverified: 0,
            passed: false,
            failure: None,
        },
    };
    let mut extra_probes = Vec::new();
    // header: config and meta before the first query
    for it in items {
        if let Item::Directive(d) = it {
            if d.head == "config" {
                if let Some(n) = d.int("n_max")? {
                    if opts.n_max.is_none() {
                        eng.n_max = n.max(0) as usize;
                    }
                }
                if let Some(p) = d.get("probe") {
                    extra_probes.push(rs.parse_weight(p).map_err(|e| d.err(e.to_string()))?);
                }
            }
        }
    }
    eng.probes = if opts.probes.is_empty() {
        let mut p = default_probes(&rs);
        for w in extra_probes {
            if !p.contains(&w) {
                p.push(w);
            }
        }
        p
    } else {
        opts.probes.clone()
    };
    eng.report.n_max = eng.n_max;
    eng.report.probes = eng.probes.iter().map(|w| rs.format_weight(w)).collect();

    let res = eng.run_top(items);
    match res {
        Ok(()) => eng.report.passed = true,
        Err(e) => {
            eng.report.passed = false;
            eng.report.failure = Some(e.to_string());
        }
    }
    eng.report.euler_checks = eng.report.steps.iter().map(|s| s.euler_checks).sum();
    eng.report.unverified = eng.report.steps.iter().filter(|s| s.status == StepStatus::Unverified).count();
    Ok(eng.report)
}

fn parity(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Engine<'_> {
    fn fmt_w(&self, w: &Weight) -> String {
        self.rs.format_weight(w)
    }

    fn push(&mut self, path: &str, d: &Directive, kind: &str, status: StepStatus, result: String, details: Vec<String>, checks: usize) {
        self.report.steps.push(StepRecord {
            path: if path.is_empty() { "top".into() } else { path.to_string() },
            line: d.line,
            kind: kind.to_string(),
            status,
            result,
            details,
            euler_checks: checks,
        });
    }

    // ---------- expressions ----------

    fn rootset_expr(&self, s: &str, d: &Directive) -> Result<RootSet> {
        let s = s.trim();
        if s.starts_with('[') {
            let diag = WeightedDiagram::parse(s).map_err(|e| d.err(e.to_string()))?;
            return subspace_from_diagram(&self.rs, &diag).map_err(|e| d.err(e.to_string()));
        }
        if let Some(name) = s.strip_prefix('$') {
            return match self.lets.get(name) {
                Some(Value::Roots(r)) => Ok(r.clone()),
                _ => Err(d.err(format!("unknown rootset `${name}`"))),
            };
        }
        let open = s.find('(').ok_or_else(|| d.err(format!("cannot parse rootset `{s}`")))?;
        let func = &s[..open];
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| d.err("missing `)`"))?;
        let args = split_args(inner);
        match func {
            "meet" | "join" => {
                let mut it = args.iter().map(|a| self.rootset_expr(a, d));
                let mut acc = it.next().ok_or_else(|| d.err("empty argument list"))??;
                for r in it {
                    let r = r?;
                    acc = if func == "meet" { acc.intersect(&r) } else { acc.union(&r) };
                }
                Ok(acc)
            }
            "edit" => {
                let base = self.rootset_expr(args.first().ok_or_else(|| d.err("edit needs a base"))?, d)?;
                let mut add = Vec::new();
                let mut remove = Vec::new();
                for a in &args[1..] {
                    let (sign, w) = a.split_at(1);
                    let w = self.weight_expr(w, d)?;
                    match sign {
                        "+" => add.push(w),
                        "-" => remove.push(w),
                        _ => return Err(d.err(format!("edit entries start with + or -: `{a}`"))),
                    }
                }
                let r = base.edit(&add, &remove).map_err(|e| d.err(e.to_string()))?;
                if !r.is_b_stable() {
                    return Err(d.err(format!("edited set {} is not B-stable", r.describe())));
                }
                Ok(r)
            }
            "nil" => {
                let levi: Vec<usize> = args
                    .iter()
                    .map(|a| a.parse::<usize>().ok().filter(|&x| x >= 1 && x <= self.rs.rank()).map(|x| x - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| d.err("nil takes simple-root indices"))?;
                Ok(nilradical_of_parabolic(&self.rs, &levi))
            }
            _ => Err(d.err(format!("unknown rootset function `{func}`"))),
        }
    }

    fn weight_expr(&self, s: &str, d: &Directive) -> Result<Weight> {
        let s = s.trim();
        if let Some(name) = s.strip_prefix('$') {
            return match self.lets.get(name) {
                Some(Value::Weight(w)) => Ok(w.clone()),
                _ => Err(d.err(format!("unknown weight `${name}`"))),
            };
        }
        let w = self.rs.parse_weight(s).map_err(|e| d.err(e.to_string()))?;
        if !self.rs.is_root_integral(&w) {
            return Err(d.err(format!("twist {s} is not in the root lattice")));
        }
        Ok(w)
    }

    fn simple_index(&self, d: &Directive, v: i64) -> Result<usize> {
        if v < 1 || v as usize > self.rs.rank() {
            return Err(d.err(format!("simple root index {v} out of range")));
        }
        Ok(v as usize - 1)
    }

    fn simple_list(&self, d: &Directive, key: &str) -> Result<Vec<usize>> {
        d.int_list(key)?
            .ok_or_else(|| d.err(format!("missing `{key}`")))?
            .into_iter()
            .map(|v| self.simple_index(d, v))
            .collect()
    }

    fn misc(&mut self, d: &Directive) -> Result<bool> {
        match d.head.as_str() {
            "meta" => {
                self.report.meta.push(d.get("text").unwrap_or("").to_string());
                Ok(true)
            }
            "config" => Ok(true),
            "let" => {
                let name = d.require("name")?.to_string();
                let v = if let Some(r) = d.get("rootset") {
                    Value::Roots(self.rootset_expr(r, d)?)
                } else if let Some(w) = d.get("weight") {
                    Value::Weight(self.weight_expr(w, d)?)
                } else {
                    return Err(d.err("let needs rootset= or weight="));
                };
                self.lets.insert(name, v);
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    // ---------- numeric cross-checks ----------

    fn em(&self, s: &RootSet, n: usize, twist: &Weight, mu: &Weight) -> BigInt {
        let key = (s.indices().to_vec(), n, twist.clone(), mu.clone());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let v = euler_mult(s, n, twist, mu);
        self.cache.insert(key, v.clone());
        v
    }

    fn chi(&self, q: &CohQuery, n: usize, mu: &Weight) -> BigInt {
        let deg = n as i64 + q.offset;
        if deg < 0 {
            return BigInt::zero();
        }
        match &q.factor {
            None => self.em(&q.rootset, deg as usize, &q.twist, mu),
            Some(m) => m
                .character()
                .iter()
                .map(|(w, k)| self.em(&q.rootset, deg as usize, &(&q.twist + w), mu) * BigInt::from(k))
                .sum(),
        }
    }

    /// Highest weights met by `χ` of each term in its lowest degrees. Large
    /// twists never reach the fixed probes, so these keep the check honest.
    fn local_probes(&self, terms: &[(i64, &CohQuery)]) -> Vec<Weight> {
        let per_term = (24 / terms.len().max(1)).clamp(2, 12);
        let mut out: Vec<Weight> = Vec::new();
        for (_, q) in terms {
            let mut base: Vec<Weight> = match &q.factor {
                None => vec![q.twist.clone()],
                Some(m) => m.character().iter().map(|(w, _)| &q.twist + w).collect(),
            };
            base.sort();
            let dual: Vec<Weight> = q.rootset.dual_weights().iter().map(|(w, _)| w.clone()).collect();
            let mut found: BTreeSet<Weight> = BTreeSet::new();
            let mut layer = base;
            for _ in 0..3 {
                for w in &layer {
                    if let BbwResult::Regular { highest, .. } = bbw(&self.rs, w) {
                        if !self.probes.contains(&highest) && !out.contains(&highest) {
                            found.insert(highest);
                        }
                    }
                }
                if found.len() >= per_term || layer.len() > 4096 {
                    break;
                }
                let next: BTreeSet<Weight> = layer.iter().flat_map(|w| dual.iter().map(move |d| w + d)).collect();
                layer = next.into_iter().collect();
            }
            out.extend(found.into_iter().take(per_term));
        }
        out
    }

    /// Checks `Σ c·χ(q) = 0` on the window, for the fixed probes and the
    /// local ones.
    fn check(&self, terms: &[(i64, &CohQuery)]) -> std::result::Result<usize, String> {
        let mut probes = self.probes.clone();
        probes.extend(self.local_probes(terms));
        // every term reaches degree 4 at least
        let low = terms.iter().map(|(_, q)| q.offset).min().unwrap_or(0);
        let hi = self.n_max.max((4 - low).max(0) as usize);
        let pairs: Vec<(usize, usize)> =
            (0..=hi).flat_map(|n| (0..probes.len()).map(move |p| (n, p))).collect();
        let bad: Vec<Option<String>> = pairs
            .par_iter()
            .map(|&(n, p)| {
                let mu = &probes[p];
                let vals: Vec<BigInt> = terms.iter().map(|(_, q)| self.chi(q, n, mu)).collect();
                let total: BigInt = vals.iter().zip(terms).map(|(v, (c, _))| v * BigInt::from(*c)).sum();
                if total.is_zero() {
                    None
                } else {
                    let vs: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
                    Some(format!("n={n}, probe {}: values [{}]", self.fmt_w(mu), vs.join(", ")))
                }
            })
            .collect();
        match bad.into_iter().flatten().next() {
            Some(m) => Err(m),
            None => Ok(pairs.len()),
        }
    }

    fn check_iso(&self, d: &Directive, a: &CohQuery, b: &CohQuery) -> Result<usize> {
        let sign = parity(b.shift - a.shift);
        self.check(&[(1, a), (-sign, b)]).map_err(|m| d.err(format!("euler cross-check failed for claimed isomorphism: {m}")))
    }

    fn check_vanish(&self, d: &Directive, a: &CohQuery) -> Result<usize> {
        self.check(&[(1, a)]).map_err(|m| d.err(format!("euler cross-check failed for claimed vanishing: {m}")))
    }

    fn check_nonneg(&self, d: &Directive, q: &CohQuery) -> Result<usize> {
        let pairs: Vec<(usize, usize)> =
            (0..=self.n_max).flat_map(|n| (0..self.probes.len()).map(move |p| (n, p))).collect();
        let sign = parity(q.shift);
        let bad = pairs.par_iter().find_first(|&&(n, p)| (self.chi(q, n, &self.probes[p]) * sign).is_negative());
        match bad {
            Some((n, p)) => Err(d.err(format!(
                "euler characteristic has the wrong sign for cohomology in one degree (n={n}, probe {})",
                self.fmt_w(&self.probes[*p])
            ))),
            None => Ok(pairs.len()),
        }
    }

    // ---------- top level ----------

    fn run_top(&mut self, items: &[Item]) -> Result<()> {
        let is_query = |it: &Item| matches!(it, Item::Directive(d) if d.head == "query");
        let first = items.iter().position(is_query);
        for it in &items[..first.unwrap_or(items.len())] {
            match it {
                Item::Directive(d) => {
                    if !self.misc(d)? {
                        return Err(d.err(format!("`{}` before any query", d.head)));
                    }
                }
                _ => return Err(Error::Script { line: 0, msg: "block before any query".into() }),
            }
        }
        let Some(mut idx) = first else {
            self.report.statements.push(Statement {
                kind: "annotation".into(),
                text: "no derivation; geometric inputs recorded as annotations only".into(),
                kernel: None,
            });
            return Ok(());
        };
        // each query opens an independent derivation running to the next one
        while idx < items.len() {
            let Item::Directive(d) = &items[idx] else { unreachable!() };
            let end = items[idx + 1..].iter().position(is_query).map(|k| idx + 1 + k).unwrap_or(items.len());
            let q = self.parse_query(d)?;
            self.push("", d, "query", StepStatus::Verified, q.describe(), vec![], 0);
            let res = self.run_chain(&items[idx + 1..end], q.clone(), "", true)?;
            match &res.outcome {
                ChainOutcome::Support(s) => self.report.statements.push(Statement {
                    kind: "support".into(),
                    text: format!("H^i({}) vanishes outside degrees {s:?}", q.describe()),
                    kernel: None,
                }),
                ChainOutcome::Vanish => self.report.statements.push(Statement {
                    kind: "vanishing".into(),
                    text: format!("H^i({}) = 0 for all i", q.describe()),
                    kernel: None,
                }),
                ChainOutcome::Open => {}
            }
            idx = end;
        }
        Ok(())
    }

    fn parse_query(&self, d: &Directive) -> Result<CohQuery> {
        let r = d.get("rootset").or_else(|| d.get("diagram")).ok_or_else(|| d.err("query needs rootset="))?;
        let rootset = self.rootset_expr(r, d)?;
        let twist = match d.get("twist") {
            Some(w) => self.weight_expr(w, d)?,
            None => Weight::zero(self.rs.rank()),
        };
        Ok(CohQuery {
            rootset,
            offset: d.int("offset")?.unwrap_or(0),
            twist,
            shift: d.int("shift")?.unwrap_or(0),
            factor: None,
            frame: None,
        })
    }

    // ---------- chains ----------

    fn run_chain(&mut self, items: &[Item], start: CohQuery, path: &str, top: bool) -> Result<ChainEnd> {
        let mut q = start;
        let mut iso = true;
        let mut ended: Option<ChainOutcome> = None;
        for (k, it) in items.iter().enumerate() {
            if let Some(o) = &ended {
                // only a confirming conclusion may follow a terminal step
                match it {
                    Item::Directive(d) if d.head == "conclude" && d.kind() == Some("vanish") && *o == ChainOutcome::Vanish => continue,
                    Item::Directive(d) if d.head == "meta" => {
                        self.misc(d)?;
                        continue;
                    }
                    Item::Directive(d) => return Err(d.err("step after the chain has already concluded")),
                    _ => return Err(Error::Script { line: 0, msg: format!("{path}: block after conclusion") }),
                }
            }
            match it {
                Item::Directive(d) => {
                    if self.misc(d)? {
                        continue;
                    }
                    let here = format!("{path}{}{}@{}", if path.is_empty() { "" } else { "/" }, d.kind().unwrap_or(&d.head), d.line);
                    match d.head.as_str() {
                        "step" => match self.apply_step(d, &q, &here)? {
                            StepOut::Vanish => ended = Some(ChainOutcome::Vanish),
                            StepOut::Query(nq) => {
                                if d.kind() == Some("assume") {
                                    iso &= d.get("relation").unwrap_or("isomorphism") == "isomorphism";
                                }
                                q = nq;
                            }
                        },
                        "conclude" => ended = Some(self.conclude(d, &q, &here)?),
                        "query" => return Err(d.err("a second query is not allowed")),
                        h => return Err(d.err(format!("unknown directive `{h}`"))),
                    }
                }
                Item::Koszul(b) => {
                    let here = format!("{path}{}koszul@{}", if path.is_empty() { "" } else { "/" }, b.open.line);
                    let end = self.run_koszul(b, &q, &here, top)?;
                    iso &= end.iso;
                    match end.outcome {
                        ChainOutcome::Open => q = end.last,
                        o => {
                            ended = Some(o);
                            q = end.last;
                        }
                    }
                }
                Item::Split(b) => {
                    let here = format!("{path}{}split@{}", if path.is_empty() { "" } else { "/" }, b.open.line);
                    let end = self.run_split(b, &q, &here)?;
                    iso &= end.iso;
                    match end.outcome {
                        ChainOutcome::Open => q = end.last,
                        o => {
                            ended = Some(o);
                            q = end.last;
                        }
                    }
                }
            }
            let _ = k;
        }
        Ok(ChainEnd { outcome: ended.unwrap_or(ChainOutcome::Open), last: q, iso })
    }

    fn apply_step(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        let kind = d.kind().ok_or_else(|| d.err("step needs kind="))?;
        match kind {
            "demazure" => self.step_demazure(d, q, path),
            "sommers" => self.step_sommers(d, q, path),
            "filtration" => self.step_filtration(d, q, path),
            "product" => self.step_product(d, q, path),
            "edit_chain" => self.step_edit_chain(d, q, path),
            "assume" => self.step_assume(d, q, path),
            "automorphism" => self.step_automorphism(d, q, path),
            k => Err(d.err(format!("unknown step kind `{k}`"))),
        }
    }

    fn require_line(&self, d: &Directive, q: &CohQuery) -> Result<()> {
        if q.factor.is_some() {
            return Err(d.err(Error::pre("line_query", "the query still carries a non-line factor; filter it first").to_string()));
        }
        Ok(())
    }

    fn pre(&self, d: &Directive, name: &'static str, detail: impl Into<String>) -> Error {
        d.err(Error::pre(name, detail).to_string())
    }

    fn step_demazure(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        self.require_line(d, q)?;
        let a = self.simple_index(d, d.int("alpha")?.ok_or_else(|| d.err("demazure needs alpha="))?)?;
        if !q.rootset.is_p_stable(a) {
            return Err(self.pre(d, "p_stable", format!("rootset is not stable under the parabolic of simple root {}", a + 1)));
        }
        let m = self.rs.pairing(&q.twist, a);
        let expect = d.require("expect")?;
        let detail = format!("m = <{}, coroot {}> = {m}", self.fmt_w(&q.twist), a + 1);
        if m == -1 {
            if expect != "vanish" {
                return Err(self.pre(d, "expect", format!("{detail}: the term vanishes, script expected `{expect}`")));
            }
            let c = self.check_vanish(d, q)?;
            self.push(path, d, "demazure", StepStatus::Verified, "vanishes".into(), vec![detail], c);
            return Ok(StepOut::Vanish);
        }
        if expect != "shift" {
            return Err(self.pre(d, "expect", format!("{detail}: no vanishing, script expected `{expect}`")));
        }
        let twist = self.rs.dot_reflect(&q.twist, a);
        // m >= 0: H^i(λ) = H^{i+1}(s·λ); m <= -2 is the same statement read backwards
        let shift = if m >= 0 { q.shift - 1 } else { q.shift + 1 };
        let nq = CohQuery { twist, shift, ..q.clone() };
        if let Some(w) = d.get("expect_twist") {
            let w = self.weight_expr(w, d)?;
            if w != nq.twist {
                return Err(self.pre(d, "expect_twist", format!("got {}, script expected {}", self.fmt_w(&nq.twist), self.fmt_w(&w))));
            }
        }
        let c = self.check_iso(d, q, &nq)?;
        let res = format!("{} (shift {:+})", nq.describe(), nq.shift - q.shift);
        self.push(path, d, "demazure", StepStatus::Verified, res, vec![detail], c);
        Ok(StepOut::Query(nq))
    }

    fn step_sommers(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        self.require_line(d, q)?;
        let rs = self.rs.clone();
        let chain = self.simple_list(d, "chain")?;
        let l = chain.len();
        let m = d.int("m")?.ok_or_else(|| d.err("sommers needs m="))?;
        if m < 1 || m as usize > l {
            return Err(self.pre(d, "position", format!("m = {m} outside 1..={l}")));
        }
        let m = m as usize;
        let cm = rs.cartan_matrix();
        for i in 0..l {
            for k in i + 1..l {
                let joined = cm[chain[i]][chain[k]] != 0;
                let simple_bond = cm[chain[i]][chain[k]] == -1 && cm[chain[k]][chain[i]] == -1;
                if (k == i + 1 && !simple_bond) || (k > i + 1 && joined) || chain[i] == chain[k] {
                    return Err(self.pre(d, "chain_type_a", "chain is not a path of simply-laced simple roots"));
                }
            }
        }
        let levi = q.rootset.levi_simples();
        if nilradical_of_parabolic(&rs, &levi) != q.rootset {
            return Err(self.pre(d, "nilradical", format!("{} is not the nilradical of a parabolic", q.rootset.describe())));
        }
        for (i, &c) in chain.iter().enumerate() {
            if (i + 1 == m) == levi.contains(&c) {
                return Err(self.pre(
                    d,
                    "levi_meets_chain",
                    format!("the Levi must contain exactly the chain roots other than position {m}"),
                ));
            }
        }
        for &c in &chain {
            for nb in rs.neighbors(c) {
                if !chain.contains(&nb) && levi.contains(&nb) {
                    return Err(self.pre(
                        d,
                        "levi_commutes",
                        format!("simple root {} is adjacent to the chain and lies in the Levi", nb + 1),
                    ));
                }
            }
        }
        for (i, &c) in chain.iter().enumerate() {
            if i + 1 != m && rs.pairing(&q.twist, c) != 0 {
                return Err(self.pre(d, "twist_on_chain", format!("twist pairs nonzero with simple coroot {}", c + 1)));
            }
        }
        let r = rs.pairing(&q.twist, chain[m - 1]);
        let mp = m.min(l + 1 - m) as i64;
        let lo = 2 * mp - 2 - l as i64;
        if r < lo || r > 0 {
            return Err(self.pre(d, "pairing_range", format!("r = {r} outside [{lo}, 0]")));
        }
        // the excluded chain root moves from position m to l + 1 - m
        let mut new_levi: Vec<usize> = levi.iter().copied().filter(|x| !chain.contains(x)).collect();
        new_levi.extend(chain.iter().copied().filter(|&c| c != chain[l - m]));
        new_levi.sort_unstable();
        new_levi.dedup();
        let nq = CohQuery {
            rootset: nilradical_of_parabolic(&rs, &new_levi),
            offset: q.offset + r * mp,
            twist: rs.longest_element_apply(&chain, &q.twist),
            shift: q.shift,
            factor: None,
            frame: q.frame.clone(),
        };
        if let Some(c) = d.int("expect_offset")? {
            if c != nq.offset {
                return Err(self.pre(d, "expect_offset", format!("got {}, script expected {c}", nq.offset)));
            }
        }
        if let Some(w) = d.get("expect_twist") {
            let w = self.weight_expr(w, d)?;
            if w != nq.twist {
                return Err(self.pre(d, "expect_twist", format!("got {}, script expected {}", self.fmt_w(&nq.twist), self.fmt_w(&w))));
            }
        }
        if let Some(r2) = d.get("expect_rootset") {
            let want = self.rootset_expr(r2, d)?;
            if want != nq.rootset {
                return Err(self.pre(d, "expect_rootset", format!("got {}, script expected {}", nq.rootset.describe(), want.describe())));
            }
        }
        let c = self.check_iso(d, q, &nq)?;
        let det = vec![format!("l = {l}, m = {m}, m' = {mp}, r = {r}")];
        self.push(path, d, "sommers", StepStatus::Verified, nq.describe(), det, c);
        Ok(StepOut::Query(nq))
    }

    fn witness_text(&self, w: &VanishWitness) -> String {
        let mv: Vec<String> = w.moves.iter().map(|a| format!("s{}", a + 1)).collect();
        if mv.is_empty() {
            format!("wall {}", w.wall + 1)
        } else {
            format!("{} then wall {}", mv.join(" "), w.wall + 1)
        }
    }

    fn step_filtration(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        let rs = self.rs.clone();
        let module = q.factor.clone().unwrap_or_else(|| BModule {
            weights: vec![Weight::zero(rs.rank())],
            lower: vec![vec![Vec::new(); rs.rank()]],
            origin: Origin::Plain,
        });
        let allowed: Vec<usize> = (0..rs.rank()).filter(|&a| q.rootset.is_p_stable(a)).collect();
        let depth = d.int("depth")?.map(|x| x as usize).unwrap_or(self.opts.search_depth);
        let totals: Vec<Weight> = module.weights.iter().map(|w| &q.twist + w).collect();
        let mut witnesses: HashMap<usize, VanishWitness> = HashMap::new();
        let pieces = greedy_filtration(
            &module,
            |i| match demazure_vanish_search(&rs, &allowed, &totals[i], depth) {
                Some(w) => {
                    witnesses.insert(i, w);
                    true
                }
                None => false,
            },
            |t, _b, a| allowed.contains(&a) && rs.pairing(&totals[t], a) == 0,
        );
        let mut details = Vec::new();
        let mut survivors = Vec::new();
        for (p, vanishes) in &pieces {
            let line = match p {
                Piece::Line { index } if *vanishes => {
                    format!("line {}: {}", self.fmt_w(&totals[*index]), self.witness_text(&witnesses[index]))
                }
                Piece::Line { index } => {
                    survivors.push(*index);
                    format!("line {}: survives", self.fmt_w(&totals[*index]))
                }
                Piece::Block { top, bottom, alpha } => format!(
                    "block {} -> {}: wall block for simple root {}",
                    self.fmt_w(&totals[*top]),
                    self.fmt_w(&totals[*bottom]),
                    alpha + 1
                ),
            };
            details.push(line);
        }
        if details.len() > 24 {
            let extra = details.len() - 24;
            details.truncate(24);
            details.push(format!("... {extra} more pieces"));
        }
        details.insert(0, format!("{} pieces over {} weights, each prefix closed under lowering", pieces.len(), module.dim()));
        let placed: usize = pieces.iter().map(|(p, _)| if matches!(p, Piece::Block { .. }) { 2 } else { 1 }).sum();
        if placed != module.dim() {
            return Err(self.pre(d, "filtration_order", "greedy filtration did not exhaust the module"));
        }
        match d.get("keep") {
            Some(k) => {
                let k = self.weight_expr(k, d)?;
                if survivors.len() != 1 || totals[survivors[0]] != k {
                    let s: Vec<String> = survivors.iter().map(|&i| self.fmt_w(&totals[i])).collect();
                    return Err(self.pre(
                        d,
                        "filtration_survivors",
                        format!("expected the single surviving line {}, found [{}]", self.fmt_w(&k), s.join(", ")),
                    ));
                }
                let nq = CohQuery { twist: k, factor: None, ..q.clone() };
                let c = self.check_iso(d, q, &nq)?;
                self.push(path, d, "filtration", StepStatus::Verified, nq.describe(), details, c);
                Ok(StepOut::Query(nq))
            }
            None => {
                if !survivors.is_empty() {
                    let s: Vec<String> = survivors.iter().map(|&i| self.fmt_w(&totals[i])).collect();
                    return Err(self.pre(
                        d,
                        "filtration_survivors",
                        format!("lines not killed within depth {depth}: [{}]", s.join(", ")),
                    ));
                }
                let c = self.check_vanish(d, q)?;
                self.push(path, d, "filtration", StepStatus::Verified, "vanishes".into(), details, c);
                Ok(StepOut::Vanish)
            }
        }
    }

    fn step_product(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        let levi = self.simple_list(d, "levi")?;
        let m = q.factor.as_ref().ok_or_else(|| self.pre(d, "module_shape", "product step needs a module factor"))?;
        if d.get("expect") == Some("line") {
            return self.step_product_line(d, q, m, &levi, path);
        }
        let rep = product_type_vanish(&self.rs, &q.rootset, &q.twist, m, &levi).map_err(|e| d.err(e.to_string()))?;
        let c = self.check_vanish(d, q)?;
        let mut det = rep.notes.clone();
        det.insert(0, format!("Levi {} with witness degree {}", rep.levi_type, rep.witness));
        let cands: Vec<String> = rep.candidates.iter().map(|(dg, w)| format!("H^{dg}({w:?})")).collect();
        det.push(format!("candidates: [{}]", cands.join(", ")));
        let total: i64 = rep.sym_power.iter().map(|(_, m, _)| m).sum();
        det.push(format!("S^{}U: {} constituents, dimensions {}", rep.witness, total, short_profile(&rep.sym_dimension_profile())));
        self.push(path, d, "product", StepStatus::Verified, "vanishes".into(), det, c);
        Ok(StepOut::Vanish)
    }

    /// The exclusion argument leaves one copy of a Levi-trivial part in
    /// degree `d`: pushing forward to `G/P` turns the term into
    /// `H^{i-d}(S V* ⊗ ν)` for the character `ν` of `P` it restricts to.
    fn step_product_line(&mut self, d: &Directive, q: &CohQuery, m: &BModule, levi: &[usize], path: &str) -> Result<StepOut> {
        let rep = product_type_residual(&self.rs, &q.rootset, &q.twist, m, levi).map_err(|e| d.err(e.to_string()))?;
        let (deg, mu, mult) = match rep.residual.as_slice() {
            [one] => one.clone(),
            r => return Err(self.pre(d, "residual", format!("{} residual parts, need exactly one", r.len()))),
        };
        if mult != 1 || mu.iter().any(|&x| x != 0) {
            return Err(self.pre(d, "residual", format!("residual part ({mu:?}) x{mult} is not a single Levi character")));
        }
        let nu = self.weight_expr(d.require("expect_twist")?, d)?;
        if let Some(&a) = levi.iter().find(|&&a| self.rs.pairing(&nu, a) != 0) {
            return Err(self.pre(d, "character", format!("twist pairs nonzero with simple coroot {}", a + 1)));
        }
        // the Levi dot action moves only Levi coordinates
        let rep_w = &q.twist + &m.weights[0];
        let outside = |w: &Weight| -> Vec<i64> { (0..self.rs.rank()).filter(|k| !levi.contains(k)).map(|k| w.coords()[k]).collect() };
        if m.weights.iter().any(|w| outside(w) != outside(&m.weights[0])) {
            return Err(self.pre(d, "character", "module weights differ outside the Levi"));
        }
        if (0..self.rs.rank()).any(|k| !levi.contains(&k) && nu.coords()[k] != rep_w.coords()[k]) {
            return Err(self.pre(d, "character", "twist differs from the term outside the Levi"));
        }
        let nq = CohQuery { twist: nu, shift: q.shift + deg as i64, factor: None, ..q.clone() };
        let c = self.check_iso(d, q, &nq)?;
        let mut det = rep.notes.clone();
        det.insert(0, format!("Levi {} with witness degree {}; one character in degree {deg}", rep.levi_type, rep.witness));
        self.push(path, d, "product", StepStatus::Verified, format!("{} (shift +{deg})", nq.describe()), det, c);
        Ok(StepOut::Query(nq))
    }

    /// Adds or removes single root spaces, each move justified by the
    /// vanishing of the one extra Koszul term.
    fn step_edit_chain(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        self.require_line(d, q)?;
        let target = self.rootset_expr(d.require("target")?, d)?;
        let depth = d.int("depth")?.map(|x| x as usize).unwrap_or(self.opts.edit_depth);
        let rs = self.rs.clone();
        let cur: BTreeSet<usize> = q.rootset.indices().iter().copied().collect();
        let tgt: BTreeSet<usize> = target.indices().iter().copied().collect();
        let diff: Vec<usize> = cur.symmetric_difference(&tgt).copied().collect();
        let found = if diff.len() > depth || diff.len() > 60 {
            None
        } else {
            self.edit_search(&q.rootset, &diff, &q.twist)
        };
        match found {
            Some(moves) => {
                let nq = CohQuery { rootset: target, ..q.clone() };
                let c = self.check_iso(d, q, &nq)?;
                let det: Vec<String> = moves
                    .iter()
                    .map(|(add, k, w)| {
                        format!(
                            "{} {}: {}",
                            if *add { "add" } else { "remove" },
                            self.fmt_w(&-&rs.positive_root(*k)),
                            self.witness_text(w)
                        )
                    })
                    .collect();
                self.push(path, d, "edit_chain", StepStatus::Verified, nq.describe(), det, c);
                Ok(StepOut::Query(nq))
            }
            None => {
                if d.get("on_fail") != Some("unverified") {
                    return Err(self.pre(d, "edit_chain", format!("no justified chain of {} edits within depth {depth}", diff.len())));
                }
                let nq = CohQuery { rootset: target, ..q.clone() };
                let c = self.check_iso(d, q, &nq)?;
                let det = vec![format!("bounded search over {} edits found no justified chain", diff.len())];
                self.push(path, d, "edit_chain", StepStatus::Unverified, nq.describe(), det, c);
                Ok(StepOut::Query(nq))
            }
        }
    }

    fn edit_search(&self, start: &RootSet, diff: &[usize], twist: &Weight) -> Option<Vec<(bool, usize, VanishWitness)>> {
        let rs = &self.rs;
        let full: u64 = if diff.len() == 64 { u64::MAX } else { (1u64 << diff.len()) - 1 };
        let set_of = |mask: u64| -> RootSet {
            let mut s: BTreeSet<usize> = start.indices().iter().copied().collect();
            for (b, &k) in diff.iter().enumerate() {
                if mask >> b & 1 == 1 && !s.remove(&k) {
                    s.insert(k);
                }
            }
            RootSet::from_indices(rs, s)
        };
        let mut prev: HashMap<u64, (u64, bool, usize, VanishWitness)> = HashMap::new();
        let mut seen: HashSet<u64> = HashSet::from([0]);
        let mut queue = VecDeque::from([0u64]);
        while let Some(mask) = queue.pop_front() {
            if mask == full {
                let mut out = Vec::new();
                let mut m = mask;
                while m != 0 {
                    let (p, add, k, w) = prev[&m].clone();
                    out.push((add, k, w));
                    m = p;
                }
                out.reverse();
                return Some(out);
            }
            if seen.len() > 200_000 {
                return None;
            }
            let v = set_of(mask);
            for (b, &k) in diff.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    continue;
                }
                let nmask = mask | 1 << b;
                if seen.contains(&nmask) {
                    continue;
                }
                let nv = set_of(nmask);
                if !nv.is_b_stable() {
                    continue;
                }
                let add = !v.contains_index(k);
                let big = if add { &nv } else { &v };
                let allowed: Vec<usize> = (0..rs.rank()).filter(|&a| big.is_p_stable(a)).collect();
                let line = twist + &rs.positive_root(k);
                if let Some(w) = demazure_vanish_search(rs, &allowed, &line, self.opts.search_depth) {
                    seen.insert(nmask);
                    prev.insert(nmask, (mask, add, k, w));
                    queue.push_back(nmask);
                }
            }
        }
        None
    }

    fn step_automorphism(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        self.require_line(d, q)?;
        let perm: Vec<usize> = self.simple_list(d, "perm")?;
        if !self.rs.is_diagram_automorphism(&perm) {
            return Err(self.pre(d, "automorphism", "permutation does not preserve the Cartan matrix"));
        }
        let nq = CohQuery {
            rootset: permute_rootset(&q.rootset, &perm),
            twist: self.rs.permute_weight(&q.twist, &perm),
            frame: Some(compose(q.frame.as_deref(), &perm)),
            ..q.clone()
        };
        let c = self.check_permuted(&q, &nq, &perm).map_err(|m| d.err(format!("euler cross-check failed for diagram automorphism: {m}")))?;
        let det = vec![format!("simple roots sent to {}", perm.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(","))];
        self.push(path, d, "automorphism", StepStatus::Verified, nq.describe(), det, c);
        Ok(StepOut::Query(nq))
    }

    fn check_permuted(&self, a: &CohQuery, b: &CohQuery, perm: &[usize]) -> std::result::Result<usize, String> {
        self.check_permuted_signed(a, b, perm, 1)
    }

    /// `χ(a; μ) = sign · χ(b; σμ)` on the window.
    fn check_permuted_signed(&self, a: &CohQuery, b: &CohQuery, perm: &[usize], sign: i64) -> std::result::Result<usize, String> {
        let pairs: Vec<(usize, usize)> =
            (0..=self.n_max).flat_map(|n| (0..self.probes.len()).map(move |p| (n, p))).collect();
        let bad = pairs.par_iter().find_first(|&&(n, p)| {
            let mu = &self.probes[p];
            self.chi(a, n, mu) != self.chi(b, n, &self.rs.permute_weight(mu, perm)) * sign
        });
        match bad {
            Some(&(n, p)) => Err(format!("n={n}, probe {}", self.fmt_w(&self.probes[p]))),
            None => Ok(pairs.len()),
        }
    }

    fn step_assume(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<StepOut> {
        let text = d.require("text")?.to_string();
        let rootset = match d.get("rootset") {
            Some(r) => self.rootset_expr(r, d)?,
            None => q.rootset.clone(),
        };
        let twist = match d.get("twist") {
            Some(w) => self.weight_expr(w, d)?,
            None => q.twist.clone(),
        };
        let nq = CohQuery {
            rootset,
            offset: d.int("offset")?.unwrap_or(q.offset),
            twist,
            shift: q.shift + d.int("shift")?.unwrap_or(0),
            factor: None,
            frame: q.frame.clone(),
        };
        let c = self.check_iso(d, q, &nq)?;
        self.push(path, d, "assume", StepStatus::Unverified, nq.describe(), vec![text], c);
        Ok(StepOut::Query(nq))
    }

    fn conclude(&mut self, d: &Directive, q: &CohQuery, path: &str) -> Result<ChainOutcome> {
        match d.kind().ok_or_else(|| d.err("conclude needs kind="))? {
            "broer" => {
                self.require_line(d, q)?;
                let diag = d.get("diagram").map(WeightedDiagram::parse).transpose().map_err(|e| d.err(e.to_string()))?;
                let bc = broer_case_check(&q.rootset, &q.twist, diag.as_ref());
                let Some(case) = bc.case_number() else {
                    let reason = match &bc {
                        crate::cohom::BroerCase::NotApplicable { reason } => reason.clone(),
                        _ => String::new(),
                    };
                    return Err(self.pre(d, "broer", format!("{}: {reason}", q.describe())));
                };
                if let Some(want) = d.int("case")? {
                    if want != case as i64 {
                        return Err(self.pre(d, "broer_case", format!("case {case} applies, script claimed case {want}")));
                    }
                }
                let c = self.check_nonneg(d, q)?;
                let det = match &bc {
                    crate::cohom::BroerCase::Case2 { diagram, lambda } => {
                        vec![format!("diagram {}, λ = {}", diagram.format(&self.rs), self.fmt_w(lambda))]
                    }
                    _ => vec![],
                };
                let res = format!("H^k = 0 for k > 0 (case {case}); support {{{}}} in term degrees", q.shift);
                self.push(path, d, "broer", StepStatus::Verified, res, det, c);
                Ok(ChainOutcome::Support(BTreeSet::from([q.shift])))
            }
            "vanish" => Err(d.err("`conclude kind=vanish` must follow a vanishing step")),
            "open" => Ok(ChainOutcome::Open),
            "unverified" => {
                let text = d.require("text")?.to_string();
                let degs: BTreeSet<i64> = d.int_list("support")?.unwrap_or_default().into_iter().map(|x| x + q.shift).collect();
                let res = format!("support {degs:?} in term degrees (not established)");
                self.push(path, d, "unverified", StepStatus::Unverified, res, vec![text], 0);
                Ok(if degs.is_empty() { ChainOutcome::Vanish } else { ChainOutcome::Support(degs) })
            }
            k => Err(d.err(format!("unknown conclusion `{k}`"))),
        }
    }

    // ---------- blocks ----------

    fn run_koszul(&mut self, b: &KoszulBlock, q: &CohQuery, path: &str, top: bool) -> Result<ChainEnd> {
        let d = &b.open;
        self.require_line(d, q)?;
        let (sub, sup, sub_mode) = match (d.get("sub"), d.get("sup")) {
            (Some(s), None) => (self.rootset_expr(s, d)?, q.rootset.clone(), true),
            (None, Some(s)) => (q.rootset.clone(), self.rootset_expr(s, d)?, false),
            _ => return Err(d.err("koszul needs exactly one of sub= or sup=")),
        };
        if !sub.is_subset_of(&sup) {
            return Err(self.pre(d, "subset", format!("{} ⊄ {}", sub.describe(), sup.describe())));
        }
        if sub == sup {
            return Err(self.pre(d, "subset", "inclusion is an equality"));
        }
        // `at=top`: the query is the last term `K_d`, a line since `∧^d` is
        let at_top = match d.get("at") {
            None => false,
            Some("top") if sub_mode => true,
            Some(v) => return Err(d.err(format!("at={v}: only at=top with sub= is supported"))),
        };
        let (base_offset, base_twist) = if at_top {
            let top = BModule::dual_quotient(&sub, &sup);
            let w: Weight = top.weights.iter().fold(Weight::zero(self.rs.rank()), |a, b| &a + b);
            (q.offset + top.dim() as i64, &q.twist - &w)
        } else {
            (q.offset, q.twist.clone())
        };
        let qq = CohQuery { rootset: sub.clone(), offset: base_offset, twist: base_twist.clone(), shift: 0, factor: None, frame: q.frame.clone() };
        let terms = koszul_terms(&sub, &sup, base_offset, &base_twist)?;
        let dim = terms.len() - 1;
        let mut rel: Vec<(i64, &CohQuery)> = vec![(1, &qq)];
        for (j, t) in &terms {
            rel.push((-parity(*j as i64), t));
        }
        let checks = self.check(&rel).map_err(|m| d.err(format!("koszul additivity failed: {m}")))?;
        let conclude = b.close.require("conclude")?;
        self.push(
            path,
            d,
            "koszul",
            StepStatus::Verified,
            format!("{} ⊂ {}, {} terms", sub.describe(), sup.describe(), dim + 1),
            vec![format!("quotient weights: {}", fmt_list(&self.rs, &BModule::dual_quotient(&sub, &sup).weights))],
            checks,
        );
        for (j, td, _) in &b.terms {
            if *j > dim {
                return Err(td.err(format!("term j={j} but the resolution has length {dim}")));
            }
        }
        let sub_end = match &b.sub_term {
            Some((td, _)) if !sub_mode => return Err(td.err("term j=sub needs the sub= form")),
            Some((_, body)) => Some(self.run_chain(body, qq.clone(), &format!("{path}/j=sub"), false)?),
            None => None,
        };
        if at_top {
            if let Some((_, td, _)) = b.terms.iter().find(|(k, _, _)| *k == dim) {
                return Err(td.err(format!("with at=top the j={dim} term is the query itself")));
            }
            if conclude != "support" {
                return Err(b.close.err("at=top only supports conclude=support"));
            }
        }
        let mut results: Vec<ChainEnd> = Vec::new();
        for (j, t) in terms.iter() {
            if at_top && *j == dim {
                results.push(ChainEnd { outcome: ChainOutcome::Open, last: t.clone(), iso: true });
                continue;
            }
            let sub_path = format!("{path}/j={j}");
            let scripted = b.terms.iter().find(|(k, _, _)| k == j);
            let end = match scripted {
                Some((_, _, body)) => self.run_chain(body, t.clone(), &sub_path, false)?,
                None if *j == 0 => ChainEnd { outcome: ChainOutcome::Open, last: t.clone(), iso: true },
                None => {
                    let auto = Directive { line: d.line, head: "step".into(), attrs: vec![("kind".into(), "filtration".into())] };
                    match self.step_filtration(&auto, t, &sub_path)? {
                        StepOut::Vanish => ChainEnd { outcome: ChainOutcome::Vanish, last: t.clone(), iso: true },
                        StepOut::Query(_) => unreachable!("filtration without keep never returns a query"),
                    }
                }
            };
            results.push(end);
        }
        // degrees of each term's contribution to the cohomology of the query
        let total = |j: usize, o: &ChainOutcome| -> Option<BTreeSet<i64>> {
            match o {
                ChainOutcome::Vanish => Some(BTreeSet::new()),
                ChainOutcome::Support(s) => Some(s.iter().map(|x| x - j as i64).collect()),
                ChainOutcome::Open => None,
            }
        };
        let close = &b.close;
        let desc_sub = sub.describe();
        let desc_sup = sup.describe();
        match conclude {
            "isomorphism" => {
                for (j, r) in results.iter().enumerate().skip(1) {
                    if r.outcome != ChainOutcome::Vanish {
                        return Err(self.pre(close, "isomorphism", format!("term j={j} is not shown to vanish")));
                    }
                }
                let (last, text) = if sub_mode {
                    let nq = CohQuery { shift: q.shift, ..qq.clone() };
                    (nq, format!("H^i(S^n {desc_sub}* ⊗ λ) ≅ H^i(S^n {desc_sup}* ⊗ λ) for all i"))
                } else {
                    let nq = CohQuery { shift: q.shift, ..terms[0].1.clone() };
                    (nq, format!("H^i(S^n {desc_sub}* ⊗ λ) ≅ H^i(S^n {desc_sup}* ⊗ λ) for all i"))
                };
                if top {
                    self.report.statements.push(Statement { kind: "isomorphism".into(), text, kernel: None });
                }
                Ok(ChainEnd { outcome: ChainOutcome::Open, last, iso: true })
            }
            "surjective" => {
                if !sub_mode {
                    return Err(close.err("surjective conclusions need the sub= form"));
                }
                let mut minus1 = Vec::new();
                let mut minus2 = false;
                for (j, r) in results.iter().enumerate().skip(1) {
                    let t = total(j, &r.outcome)
                        .ok_or_else(|| self.pre(close, "surjective", format!("term j={j} has no conclusion")))?;
                    if t.contains(&0) {
                        return Err(self.pre(close, "surjective", format!("term j={j} contributes in degree 0")));
                    }
                    if t.contains(&-1) {
                        minus1.push(j);
                    }
                    if t.iter().any(|&x| x <= -2) {
                        minus2 = true;
                    }
                }
                let base = format!("H^0(S^n {desc_sup}* ⊗ {}) → H^0(S^n {desc_sub}* ⊗ {}) is surjective", self.fmt_w(&q.twist), self.fmt_w(&q.twist));
                let mut kernel = None;
                let text = match minus1.as_slice() {
                    [] => format!("{base} and injective"),
                    [j] => {
                        let r = &results[*j];
                        if !r.iso {
                            return Err(self.pre(close, "kernel", format!("term j={j} was not reduced by isomorphisms")));
                        }
                        let f = &r.last;
                        if f.factor.is_some() {
                            return Err(self.pre(close, "kernel", "kernel term still carries a module factor"));
                        }
                        if let Some(p) = f.frame.as_deref().filter(|p| !is_identity(p)) {
                            if permute_rootset(&f.rootset, p) != f.rootset || self.rs.permute_weight(&f.twist, p) != f.twist {
                                return Err(self.pre(close, "kernel", "kernel term is only known up to a diagram automorphism"));
                            }
                        }
                        let exact = !minus2;
                        let rec = KernelRecord {
                            rootset: f.rootset.describe(),
                            rootset_indices: f.rootset.indices().to_vec(),
                            offset: f.offset,
                            twist: self.fmt_w(&f.twist),
                            twist_coords: f.twist.coords().to_vec(),
                            exact,
                        };
                        let kt = format!("H^0({})", f.describe());
                        let t = if exact {
                            format!("{base} with kernel {kt}")
                        } else {
                            format!("{base} with kernel a quotient of {kt}")
                        };
                        kernel = Some(rec);
                        t
                    }
                    js => format!("{base}; kernel filtered by the terms j in {js:?}"),
                };
                if let Some(want) = close.get("kernel_rootset") {
                    let want = self.rootset_expr(want, close)?;
                    let k = kernel.as_ref().ok_or_else(|| self.pre(close, "kernel", "no single kernel term"))?;
                    let got = RootSet::from_indices(&self.rs, k.rootset_indices.iter().copied());
                    if got != want {
                        return Err(self.pre(close, "kernel", format!("kernel rootset {} differs from {}", got.describe(), want.describe())));
                    }
                    if let Some(o) = close.int("kernel_offset")? {
                        if o != k.offset {
                            return Err(self.pre(close, "kernel", format!("kernel offset {} differs from {o}", k.offset)));
                        }
                    }
                    if let Some(w) = close.get("kernel_twist") {
                        let w = self.weight_expr(w, close)?;
                        if w.coords() != k.twist_coords.as_slice() {
                            return Err(self.pre(close, "kernel", format!("kernel twist {} differs from {}", k.twist, self.fmt_w(&w))));
                        }
                    }
                    if let Some(e) = close.get("kernel") {
                        if (e == "exact") != k.exact {
                            return Err(self.pre(close, "kernel", format!("kernel exactness is {}, script expected {e}", k.exact)));
                        }
                    }
                }
                self.push(path, close, "conclude", StepStatus::Verified, text.clone(), vec![], 0);
                if top {
                    self.report.statements.push(Statement { kind: "surjective".into(), text, kernel });
                }
                Ok(ChainEnd { outcome: ChainOutcome::Open, last: CohQuery { shift: 0, ..qq }, iso: false })
            }
            "support" if at_top => {
                // H(K_d) sits between H^{+d-j-1}(K_j) and H^{+d}(sub end)
                let e = sub_end.as_ref().ok_or_else(|| self.pre(close, "support", "at=top needs `[term j=sub]`"))?;
                let t = total(0, &e.outcome).ok_or_else(|| self.pre(close, "support", "term j=sub has no conclusion"))?;
                let mut s: BTreeSet<i64> = t.into_iter().map(|x| x + dim as i64).filter(|&x| x >= 0).collect();
                for (j, r) in results.iter().enumerate().take(dim) {
                    let t = total(j, &r.outcome)
                        .ok_or_else(|| self.pre(close, "support", format!("term j={j} has no conclusion")))?;
                    s.extend(t.into_iter().map(|x| x + dim as i64 - 1).filter(|&x| x >= 0));
                }
                let shifted: BTreeSet<i64> = s.iter().map(|x| x + q.shift).collect();
                let res = format!("cohomology in degrees {s:?}");
                self.push(path, close, "conclude", StepStatus::Verified, res, vec![], 0);
                let outcome = if shifted.is_empty() { ChainOutcome::Vanish } else { ChainOutcome::Support(shifted) };
                Ok(ChainEnd { outcome, last: q.clone(), iso: false })
            }
            "support" => {
                let mut s = BTreeSet::new();
                if sub_mode {
                    // the query is K_0: H(K_0) sits between H(sub end) and H^{+j-1}(K_j)
                    let e = sub_end.as_ref().ok_or_else(|| self.pre(close, "support", "the sub= form needs `[term j=sub]`"))?;
                    let t = total(0, &e.outcome).ok_or_else(|| self.pre(close, "support", "term j=sub has no conclusion"))?;
                    s.extend(t.into_iter().filter(|&x| x >= 0));
                    if b.terms.iter().any(|(k, _, _)| *k == 0) {
                        return Err(self.pre(close, "support", "in the sub= form the j=0 term is the query itself"));
                    }
                }
                for (j, r) in results.iter().enumerate() {
                    if sub_mode && j == 0 {
                        continue;
                    }
                    let t = total(j, &r.outcome)
                        .ok_or_else(|| self.pre(close, "support", format!("term j={j} has no conclusion")))?;
                    let lift = if sub_mode { 1 } else { 0 };
                    s.extend(t.into_iter().map(|x| x + lift).filter(|&x| x >= 0));
                }
                let shifted: BTreeSet<i64> = s.iter().map(|x| x + q.shift).collect();
                let res = format!("cohomology in degrees {s:?}");
                self.push(path, close, "conclude", StepStatus::Verified, res, vec![], 0);
                let outcome = if shifted.is_empty() { ChainOutcome::Vanish } else { ChainOutcome::Support(shifted) };
                Ok(ChainEnd { outcome, last: CohQuery { shift: q.shift, ..qq }, iso: true })
            }
            "rewrite" => {
                // sub= form: the query is K_0 and the subspace end must be acyclic
                let first = if sub_mode {
                    if sub_end.as_ref().map(|e| &e.outcome) != Some(&ChainOutcome::Vanish) {
                        return Err(self.pre(close, "rewrite", "the sub= form needs `[term j=sub]` shown to vanish"));
                    }
                    if b.terms.iter().any(|(k, _, _)| *k == 0) {
                        return Err(self.pre(close, "rewrite", "in the sub= form the j=0 term is the query itself"));
                    }
                    1
                } else {
                    0
                };
                let live: Vec<usize> = results
                    .iter()
                    .enumerate()
                    .skip(first)
                    .filter(|(_, r)| r.outcome != ChainOutcome::Vanish)
                    .map(|(j, _)| j)
                    .collect();
                let [j] = live.as_slice() else {
                    return Err(self.pre(close, "rewrite", format!("need exactly one surviving term, found {live:?}")));
                };
                let r = &results[*j];
                if !r.iso || r.outcome != ChainOutcome::Open {
                    return Err(self.pre(close, "rewrite", format!("term j={j} must be reduced by isomorphisms only")));
                }
                // sup= form: H^t(Q) = H^{t+j}(K_j); sub= form: H^t(K_0) = H^{t+j-1}(K_j)
                let lag = if sub_mode { *j as i64 - 1 } else { *j as i64 };
                let mut nq = r.last.clone();
                nq.shift = q.shift + r.last.shift - lag;
                nq.frame = match &r.last.frame {
                    Some(f) => Some(compose(q.frame.as_deref(), f)),
                    None => q.frame.clone(),
                };
                let c = match &r.last.frame {
                    Some(f) => self
                        .check_permuted_signed(q, &nq, f, parity(nq.shift - q.shift))
                        .map_err(|m| close.err(format!("euler cross-check failed for rewrite: {m}")))?,
                    None => self.check_iso(close, q, &nq)?,
                };
                self.push(path, close, "conclude", StepStatus::Verified, nq.describe(), vec![format!("single surviving term j={j}")], c);
                Ok(ChainEnd { outcome: ChainOutcome::Open, last: nq, iso: true })
            }
            other => Err(close.err(format!("unknown koszul conclusion `{other}`"))),
        }
    }

    fn run_split(&mut self, b: &SplitBlock, q: &CohQuery, path: &str) -> Result<ChainEnd> {
        let d = &b.open;
        let m = q.factor.as_ref().ok_or_else(|| self.pre(d, "module_shape", "split needs a module factor"))?;
        let a = self.simple_index(d, d.int("alpha")?.ok_or_else(|| d.err("split needs alpha="))?)?;
        let values = d.int_list("values")?.ok_or_else(|| d.err("split needs values="))?;
        let set: Vec<usize> = (0..m.dim()).filter(|&i| values.contains(&self.rs.pairing(&m.weights[i], a))).collect();
        if set.is_empty() || set.len() == m.dim() {
            return Err(self.pre(d, "split_submodule", "the selected weights are empty or everything"));
        }
        if !m.is_submodule(&set) {
            return Err(self.pre(d, "split_submodule", "selected weights are not closed under lowering"));
        }
        let subq = CohQuery { factor: Some(m.submodule(&set)), ..q.clone() };
        let quot = CohQuery { factor: Some(m.quotient(&set)), ..q.clone() };
        let c = self.check(&[(1, q), (-1, &subq), (-1, &quot)]).map_err(|e| d.err(format!("split additivity failed: {e}")))?;
        self.push(
            path,
            d,
            "split",
            StepStatus::Verified,
            format!("submodule of dimension {}, quotient of dimension {}", set.len(), m.dim() - set.len()),
            vec![],
            c,
        );
        let s = self.run_chain(&b.sub, subq, &format!("{path}/sub"), false)?;
        let t = self.run_chain(&b.quotient, quot, &format!("{path}/quotient"), false)?;
        if t.outcome == ChainOutcome::Vanish {
            return Ok(ChainEnd { outcome: s.outcome, last: s.last, iso: s.iso });
        }
        let outcome = match (&s.outcome, &t.outcome) {
            (ChainOutcome::Open, _) | (_, ChainOutcome::Open) => ChainOutcome::Open,
            (a, b) => {
                let mut u = BTreeSet::new();
                for o in [a, b] {
                    if let ChainOutcome::Support(x) = o {
                        u.extend(x.iter().copied());
                    }
                }
                ChainOutcome::Support(u)
            }
        };
        Ok(ChainEnd { outcome, last: q.clone(), iso: false })
    }
}

fn permute_rootset(set: &RootSet, perm: &[usize]) -> RootSet {
    let rs = set.root_system();
    let raw = rs.positive_roots_raw();
    let idx = set.indices().iter().map(|&k| {
        let mut r = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            r[p] = raw[k][i];
        }
        rs.positive_root_index(&r).expect("diagram automorphisms permute the roots")
    });
    RootSet::from_indices(rs, idx.collect::<Vec<_>>())
}

/// The frame after applying `perm` on top of `prev`.
fn compose(prev: Option<&[usize]>, perm: &[usize]) -> Vec<usize> {
    match prev {
        None => perm.to_vec(),
        Some(p) => p.iter().map(|&i| perm[i]).collect(),
    }
}

fn is_identity(perm: &[usize]) -> bool {
    perm.iter().enumerate().all(|(i, &p)| i == p)
}

fn short_profile(p: &[u64]) -> String {
    let head: Vec<String> = p.iter().take(10).map(|d| d.to_string()).collect();
    if p.len() > 10 {
        format!("{}, ...", head.join(", "))
    } else {
        head.join(", ")
    }
}

fn fmt_list(rs: &RootSystem, ws: &[Weight]) -> String {
    ws.iter().map(|w| rs.format_weight(w)).collect::<Vec<_>>().join(", ")
}
