//! Named verification suites: the degrees where the adjoint representation
//! occurs in functions on the nilpotent cone, the obstructions to normality,
//! vanishing of small representations in the four kernels, and replay of
//! every shipped script.

use serde::Serialize;

use crate::cohom::{default_probes, euler_mult, is_small};
use crate::error::{Error, Result};
use crate::replay::{run_source, ReplayOptions, BUILTIN_SCRIPTS};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::{subspace_from_diagram, RootSet, WeightedDiagram};

pub const SUITES: &[&str] = &["exponents", "nonnormal", "small", "replay-all"];

/// Degrees `n` where the adjoint representation occurs in `H^0(S^n u*)`.
pub const E6_EXPONENTS: [usize; 6] = [1, 4, 5, 7, 8, 11];

/// Orbits with non-normal closure: label, weighted diagram, and the degree
/// where the adjoint representation first shows up in `H^0(S^n V*)`.
pub const NONNORMAL: &[(&str, &str, usize)] = &[
    ("A4", "[2 0 0 0 2 / 2]", 3),
    ("A3+A1", "[0 1 0 1 0 / 1]", 3),
    ("A3", "[1 0 0 0 1 / 2]", 3),
    ("2A2", "[2 0 0 0 2 / 0]", 2),
    ("A2+A1", "[1 0 0 0 1 / 1]", 2),
];

/// Kernel of the restriction from the larger orbit closure to the smaller:
/// `H^0(S^{n+offset} V* ⊗ twist)`, exactly or up to a quotient.
#[derive(Clone, Copy, Debug)]
pub struct KernelSpec {
    pub script: &'static str,
    pub pair: &'static str,
    pub diagram: &'static str,
    pub offset: i64,
    pub twist: &'static str,
    pub exact: bool,
}

pub const KERNELS: &[KernelSpec] = &[
    KernelSpec { script: "a5", pair: "A5 / E6(a3)", diagram: "[0 2 0 2 0 / 2]", offset: -10, twist: "{2 4 6 4 2 / 4}", exact: true },
    KernelSpec { script: "2a2a1", pair: "2A2+A1 / D4(a1)", diagram: "[0 0 2 0 0 / 0]", offset: -6, twist: "{2 4 6 4 2 / 4}", exact: false },
    KernelSpec { script: "a3a1", pair: "A3+A1 / D4(a1) cover", diagram: "[0 0 2 0 0 / 0]", offset: -6, twist: "{2 4 6 4 2 / 4}", exact: true },
    KernelSpec { script: "3a1", pair: "3A1 / A2", diagram: "[0 0 0 0 0 / 2]", offset: -4, twist: "{2 4 6 4 2 / 4}", exact: true },
];

impl KernelSpec {
    pub fn rootset(&self, rs: &std::sync::Arc<RootSystem>) -> RootSet {
        subspace_from_diagram(rs, &WeightedDiagram::parse(self.diagram).expect("table diagram")).expect("table diagram")
    }

    pub fn twist(&self, rs: &RootSystem) -> Weight {
        rs.parse_weight(self.twist).expect("table weight")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub label: String,
    pub n: Option<i64>,
    pub value: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<SuiteRow>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, rows: Vec<SuiteRow>) -> Self {
        let passed = rows.iter().all(|r| r.ok);
        SuiteReport { suite: suite.to_string(), rows, passed }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for r in &self.rows {
            let n = r.n.map(|n| format!(" n={n}")).unwrap_or_default();
            out.push_str(&format!(
                "  [{}] {}{}: {} (expected {})\n",
                if r.ok { "ok" } else { "FAIL" },
                r.label,
                n,
                r.value,
                r.expected
            ));
        }
        out.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// largest degree for `exponents` (default 12)
    pub n_max: Option<usize>,
    /// probe representations for `small` and `replay-all`
    pub probes: Vec<Weight>,
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    match name {
        "exponents" => Ok(exponents(opts.n_max.unwrap_or(12))),
        "nonnormal" => Ok(nonnormal()),
        "small" => small(&opts.probes),
        "replay-all" => replay_all(opts),
        _ => Err(Error::Io(format!("unknown suite `{name}`; expected one of {}", SUITES.join(", ")))),
    }
}

pub fn exponents(n_max: usize) -> SuiteReport {
    let rs = RootSystem::e6();
    let u = RootSet::full(&rs);
    let zero = Weight::zero(rs.rank());
    let rows = (0..=n_max)
        .map(|n| {
            let m = euler_mult(&u, n, &zero, rs.highest_root());
            let want = u8::from(E6_EXPONENTS.contains(&n));
            SuiteRow {
                label: "adjoint in S^n u*".into(),
                n: Some(n as i64),
                value: m.to_string(),
                expected: want.to_string(),
                ok: m == want.into(),
            }
        })
        .collect();
    SuiteReport::new("exponents", rows)
}

pub fn nonnormal() -> SuiteReport {
    let rs = RootSystem::e6();
    let zero = Weight::zero(rs.rank());
    let mut rows = Vec::new();
    for &(label, diagram, first) in NONNORMAL {
        let v = subspace_from_diagram(&rs, &WeightedDiagram::parse(diagram).expect("table diagram")).expect("table diagram");
        for n in 0..=first {
            let m = euler_mult(&v, n, &zero, rs.highest_root());
            // below `first` the orbit agrees with the nilpotent cone (linear
            // functions give the adjoint at n = 1); at `first` the cone has none
            let cone = u8::from(E6_EXPONENTS.contains(&n));
            let (ok, expected) = if n == first {
                (cone == 0 && m >= 1.into(), ">= 1".to_string())
            } else {
                (m == cone.into(), cone.to_string())
            };
            rows.push(SuiteRow {
                label: format!("{label} {diagram}"),
                n: Some(n as i64),
                value: m.to_string(),
                expected,
                ok,
            });
        }
    }
    SuiteReport::new("nonnormal", rows)
}

/// Small probes pair to zero with every kernel in degrees `≤ 4`.
pub fn small(probes: &[Weight]) -> Result<SuiteReport> {
    let rs = RootSystem::e6();
    let probes = if probes.is_empty() { default_probes(&rs) } else { probes.to_vec() };
    let mut rows = Vec::new();
    for mu in &probes {
        let ok = is_small(&rs, mu)?;
        rows.push(SuiteRow {
            label: format!("small {}", rs.format_weight(mu)),
            n: None,
            value: ok.to_string(),
            expected: "true".into(),
            ok,
        });
    }
    let two_theta = rs.highest_root().scale(2);
    for k in KERNELS {
        let v = k.rootset(&rs);
        let tw = k.twist(&rs);
        rows.push(SuiteRow {
            label: format!("{} twist", k.pair),
            n: None,
            value: rs.format_weight(&tw),
            expected: rs.format_weight(&two_theta),
            ok: tw == two_theta,
        });
        for mu in &probes {
            for deg in 0..=4i64 {
                let m = euler_mult(&v, deg as usize, &tw, mu);
                rows.push(SuiteRow {
                    label: format!("{} probe {}", k.pair, rs.format_weight(mu)),
                    n: Some(deg - k.offset),
                    value: m.to_string(),
                    expected: "0".into(),
                    ok: m == 0.into(),
                });
            }
        }
    }
    Ok(SuiteReport::new("small", rows))
}

pub fn replay_all(opts: &SuiteOptions) -> Result<SuiteReport> {
    let ropts = ReplayOptions { n_max: opts.n_max, probes: opts.probes.clone(), ..ReplayOptions::default() };
    let mut rows = Vec::new();
    for (name, src) in BUILTIN_SCRIPTS {
        let r = run_source(name, src, &ropts)?;
        rows.push(SuiteRow {
            label: (*name).to_string(),
            n: None,
            value: format!("{} steps, {} euler checks, {} unverified", r.steps.len(), r.euler_checks, r.unverified),
            expected: "pass".into(),
            ok: r.passed,
        });
    }
    Ok(SuiteReport::new("replay-all", rows))
}
