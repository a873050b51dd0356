//! Replays derivations written as scripts: each step transforms a
//! cohomology query `H^i(S^{n+c} V* ⊗ λ [⊗ M])`, with its preconditions
//! checked exactly and its claim cross-checked against Euler multiplicities
//! on a window of `n` and a set of probe representations.

mod engine;
pub mod product;
pub mod script;

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::bmodule::BModule;
use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Weight};
use crate::subspace::RootSet;

pub use engine::{koszul_terms, rootset_expression, ChainOutcome};

/// `H^{i + shift}(start) = H^i(S^{n+offset} V* ⊗ twist ⊗ factor)`, where
/// `start` is the query the current chain began with.
#[derive(Clone, Debug)]
pub struct CohQuery {
    pub rootset: RootSet,
    pub offset: i64,
    pub twist: Weight,
    pub shift: i64,
    pub factor: Option<BModule>,
    /// simple-root permutation `σ` when the current query computes the
    /// `σ`-twist of the start's cohomology
    pub frame: Option<Vec<usize>>,
}

impl CohQuery {
    pub fn line(rootset: RootSet, offset: i64, twist: Weight) -> Self {
        CohQuery { rootset, offset, twist, shift: 0, factor: None, frame: None }
    }

    /// `S^{n-8} [2 0 2 0 2 / 0]* ⊗ {2 3 4 3 2 / 2}`
    pub fn describe(&self) -> String {
        let rs = self.rootset.root_system();
        let deg = match self.offset {
            0 => "S^n".to_string(),
            c if c > 0 => format!("S^{{n+{c}}}"),
            c => format!("S^{{n{c}}}"),
        };
        let mut s = format!("{deg} {}* ⊗ {}", self.rootset.describe(), rs.format_weight(&self.twist));
        if let Some(m) = &self.factor {
            s.push_str(&format!(" ⊗ M[dim {}]", m.dim()));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct ReplayOptions {
    /// cross-check window `0 ≤ n ≤ n_max`; the script's `[config]` or 8 when unset
    pub n_max: Option<usize>,
    /// replaces the default probe set when non-empty
    pub probes: Vec<Weight>,
    /// bound on Demazure chains searched for a vanishing witness
    pub search_depth: usize,
    /// bound on single-root edits in an edit-chain search
    pub edit_depth: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions { n_max: None, probes: Vec::new(), search_depth: 8, edit_depth: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    /// preconditions checked exactly
    Verified,
    /// claim rests on a structural assumption checked only numerically
    Numeric,
    /// claim not established; recorded with its Euler cross-check
    Unverified,
}

impl fmt::Display for StepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepStatus::Verified => "ok",
            StepStatus::Numeric => "numeric",
            StepStatus::Unverified => "UNVERIFIED",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub path: String,
    pub line: usize,
    pub kind: String,
    pub status: StepStatus,
    pub result: String,
    pub details: Vec<String>,
    pub euler_checks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelRecord {
    pub rootset: String,
    pub rootset_indices: Vec<usize>,
    pub offset: i64,
    pub twist: String,
    pub twist_coords: Vec<i64>,
    /// false when the kernel is only known to be a quotient of this space
    pub exact: bool,
}

impl KernelRecord {
    pub fn rootset(&self, rs: &std::sync::Arc<RootSystem>) -> RootSet {
        RootSet::from_indices(rs, self.rootset_indices.iter().copied())
    }

    pub fn twist(&self) -> Weight {
        Weight::from_vec(self.twist_coords.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Statement {
    pub kind: String,
    pub text: String,
    pub kernel: Option<KernelRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub script: String,
    pub meta: Vec<String>,
    pub n_max: usize,
    pub probes: Vec<String>,
    pub steps: Vec<StepRecord>,
    pub statements: Vec<Statement>,
    pub euler_checks: usize,
    pub unverified: usize,
    pub passed: bool,
    pub failure: Option<String>,
}

impl ReplayReport {
    pub fn kernels(&self) -> Vec<&KernelRecord> {
        self.statements.iter().filter_map(|s| s.kernel.as_ref()).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("script {}\n", self.script);
        for m in &self.meta {
            out.push_str(&format!("  meta: {m}\n"));
        }
        out.push_str(&format!("  window: 0 <= n <= {}, probes: {}\n", self.n_max, self.probes.join(" ")));
        for s in &self.steps {
            out.push_str(&format!("[{}] {} (line {}) {}: {}\n", s.status, s.path, s.line, s.kind, s.result));
            for d in &s.details {
                out.push_str(&format!("      {d}\n"));
            }
            if s.euler_checks > 0 {
                out.push_str(&format!("      euler checks: {}\n", s.euler_checks));
            }
        }
        for st in &self.statements {
            out.push_str(&format!("=> {}: {}\n", st.kind, st.text));
        }
        if let Some(f) = &self.failure {
            out.push_str(&format!("FAILED: {f}\n"));
        }
        out.push_str(&format!(
            "{}: {} steps, {} euler checks, {} unverified\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.steps.len(),
            self.euler_checks,
            self.unverified
        ));
        out
    }
}

/// Parses and replays a script. Parse errors are returned as `Err`; a
/// failed precondition or cross-check yields a report with `passed = false`.
pub fn run_source(name: &str, src: &str, opts: &ReplayOptions) -> Result<ReplayReport> {
    let items = script::parse(src)?;
    engine::run(name, &items, opts)
}

pub fn run_script(path: &Path, opts: &ReplayOptions) -> Result<ReplayReport> {
    let src = std::fs::read_to_string(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    run_source(&name, &src, opts)
}

/// Scripts shipped with the crate, by name.
pub const BUILTIN_SCRIPTS: &[(&str, &str)] = &[
    ("e6", include_str!("../../../../scripts/e6.txt")),
    ("e6a1", include_str!("../../../../scripts/e6a1.txt")),
    ("d5", include_str!("../../../../scripts/d5.txt")),
    ("e6a3", include_str!("../../../../scripts/e6a3.txt")),
    ("d5a1", include_str!("../../../../scripts/d5a1.txt")),
    ("a5", include_str!("../../../../scripts/a5.txt")),
    ("a4a1", include_str!("../../../../scripts/a4a1.txt")),
    ("d4", include_str!("../../../../scripts/d4.txt")),
    ("d4a1", include_str!("../../../../scripts/d4a1.txt")),
    ("a3a1", include_str!("../../../../scripts/a3a1.txt")),
    ("2a2a1", include_str!("../../../../scripts/2a2a1.txt")),
    ("a22a1", include_str!("../../../../scripts/a22a1.txt")),
    ("a2", include_str!("../../../../scripts/a2.txt")),
    ("3a1", include_str!("../../../../scripts/3a1.txt")),
    ("2a1", include_str!("../../../../scripts/2a1.txt")),
    ("a1", include_str!("../../../../scripts/a1.txt")),
];

pub fn builtin_script(name: &str) -> Option<&'static str> {
    BUILTIN_SCRIPTS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Runs a built-in script by name, or a script file when `name` is a path.
pub fn run_named(name: &str, opts: &ReplayOptions) -> Result<ReplayReport> {
    if let Some(src) = builtin_script(name) {
        return run_source(name, src, opts);
    }
    let p = Path::new(name);
    if p.exists() {
        return run_script(p, opts);
    }
    Err(Error::Io(format!("no built-in script or file named `{name}`")))
}
