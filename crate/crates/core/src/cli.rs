//! Command-line front end. Every command builds a JSON-serializable result;
//! text output is rendered from the same value.

use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohom::{bbw, euler_mult, weyl_dimension, BbwResult};
use crate::error::{Error, Result};
use crate::replay::{rootset_expression, run_named, ReplayOptions};
use crate::rootsys::{CartanType, RootSystem, Weight};
use crate::subspace::{grading_parts, subspace_from_diagram, RootSet, WeightedDiagram};
use crate::verify::{run_suite, SuiteOptions};

#[derive(Parser, Debug)]
#[command(name = "nilcohom", version, about = "Line-bundle cohomology on flag varieties and normality derivations in E6")]
pub struct Cli {
    /// machine-readable output
    #[arg(long, global = true)]
    pub json: bool,
    /// upper end of the degree window
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// probe representation (highest weight); repeatable
    #[arg(long, global = true)]
    pub probe: Vec<String>,
    /// worker threads for Weyl sums
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root system data
    Info {
        #[arg(default_value = "E6")]
        cartan_type: String,
    },
    /// Inspect a subspace given by a diagram or rootset expression
    Subspace {
        expr: String,
        #[arg(long = "type", default_value = "E6")]
        cartan_type: String,
    },
    /// Cohomology of a line bundle on G/B
    Bbw {
        weight: String,
        #[arg(long = "type", default_value = "E6")]
        cartan_type: String,
    },
    /// Euler multiplicity of V_rep in S^n V* ⊗ twist
    Mult {
        expr: String,
        /// single degree; omit for 0..=n-max
        #[arg(short, long)]
        n: Option<usize>,
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        twist: Option<String>,
        #[arg(long = "type", default_value = "E6")]
        cartan_type: String,
    },
    /// Replay a shipped script by name, or a script file
    Replay { script: String },
    /// Run a named suite: exponents, nonnormal, small, replay-all
    Verify { suite: String },
}

#[derive(Serialize)]
struct Envelope {
    command: String,
    inputs: Value,
    results: Value,
    timing_ms: f64,
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let start = Instant::now();
    match dispatch(&cli) {
        Ok((name, inputs, results, text, ok)) => {
            if cli.json {
                let env = Envelope { command: name, inputs, results, timing_ms: start.elapsed().as_secs_f64() * 1e3 };
                println!("{}", serde_json::to_string_pretty(&env).expect("serializable"));
            } else {
                print!("{text}");
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            2
        }
    }
}

type Outcome = (String, Value, Value, String, bool);

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Info { cartan_type } => info(cartan_type),
        Command::Subspace { expr, cartan_type } => subspace(expr, cartan_type),
        Command::Bbw { weight, cartan_type } => cmd_bbw(weight, cartan_type),
        Command::Mult { expr, n, rep, twist, cartan_type } => {
            mult(expr, *n, rep.as_deref(), twist.as_deref(), cartan_type, cli.n_max.unwrap_or(8))
        }
        Command::Replay { script } => {
            let rs = RootSystem::e6();
            let opts = ReplayOptions { n_max: cli.n_max, probes: parse_probes(&rs, &cli.probe)?, ..ReplayOptions::default() };
            let r = run_named(script, &opts)?;
            let text = r.render_text();
            let ok = r.passed;
            Ok(("replay".into(), json!({ "script": script, "n_max": cli.n_max, "probes": cli.probe }), to_value(&r), text, ok))
        }
        Command::Verify { suite } => {
            let rs = RootSystem::e6();
            let opts = SuiteOptions { n_max: cli.n_max, probes: parse_probes(&rs, &cli.probe)? };
            let r = run_suite(suite, &opts)?;
            let text = r.render_text();
            let ok = r.passed;
            Ok(("verify".into(), json!({ "suite": suite, "n_max": cli.n_max, "probes": cli.probe }), to_value(&r), text, ok))
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn root_system(ty: &str) -> Result<std::sync::Arc<RootSystem>> {
    let t = CartanType::parse(ty)?;
    if t.is_e6() {
        Ok(RootSystem::e6())
    } else {
        RootSystem::new(&t)
    }
}

fn parse_probes(rs: &RootSystem, probes: &[String]) -> Result<Vec<Weight>> {
    probes.iter().map(|p| rs.parse_weight(p)).collect()
}

fn parse_rootset(rs: &std::sync::Arc<RootSystem>, expr: &str) -> Result<RootSet> {
    if rs.cartan_type().is_e6() {
        rootset_expression(expr)
    } else {
        subspace_from_diagram(rs, &WeightedDiagram::parse(expr)?)
    }
}

fn info(ty: &str) -> Result<Outcome> {
    let rs = root_system(ty)?;
    let w = rs.weyl_group();
    let fw: Vec<String> = (0..rs.rank()).map(|j| rs.format_weight(rs.fundamental(j))).collect();
    let rho_pairings: Vec<i64> = (0..rs.rank()).map(|j| rs.pairing(rs.rho(), j)).collect();
    let results = json!({
        "type": rs.cartan_type().to_string(),
        "rank": rs.rank(),
        "roots": rs.num_roots(),
        "positive_roots": rs.num_positive_roots(),
        "weyl_order": w.order(),
        "longest_length": w.max_length(),
        "highest_roots": rs.highest_roots().iter().map(|t| rs.format_weight(t)).collect::<Vec<_>>(),
        "rho": rs.format_weight(rs.rho()),
        "rho_pairings": rho_pairings,
        "fundamental_weights": fw,
        "cartan_matrix": rs.cartan_matrix(),
    });
    let mut text = format!(
        "type {}  rank {}\nroots {} ({} positive)\n|W| = {}  longest length {}\n",
        rs.cartan_type(),
        rs.rank(),
        rs.num_roots(),
        rs.num_positive_roots(),
        w.order(),
        w.max_length()
    );
    for t in rs.highest_roots() {
        text.push_str(&format!("highest root {}\n", rs.format_weight(t)));
    }
    text.push_str(&format!("rho {}  pairings {:?}\n", rs.format_weight(rs.rho()), rho_pairings));
    for (j, f) in fw.iter().enumerate() {
        text.push_str(&format!("  omega_{} = {f}\n", j + 1));
    }
    Ok(("info".into(), json!({ "type": ty }), results, text, true))
}

fn subspace(expr: &str, ty: &str) -> Result<Outcome> {
    let rs = root_system(ty)?;
    let v = parse_rootset(&rs, expr)?;
    let p_stable: Vec<usize> = (0..rs.rank()).filter(|&j| v.is_p_stable(j)).map(|j| j + 1).collect();
    let roots: Vec<String> = v.roots().iter().map(|r| rs.format_weight(r)).collect();
    let mut results = json!({
        "describe": v.describe(),
        "dim": v.dim(),
        "b_stable": v.is_b_stable(),
        "p_stable_simples": p_stable,
        "roots": roots,
    });
    let mut text = format!(
        "{}\ndim {}  B-stable {}  P-stable for simples {:?}\n",
        v.describe(),
        v.dim(),
        v.is_b_stable(),
        p_stable
    );
    if let Ok(d) = WeightedDiagram::parse(expr) {
        let g = grading_parts(&rs, &d)?;
        let sizes: Vec<(i64, usize)> = g.parts.iter().map(|(k, v)| (*k, v.len())).collect();
        results["grades"] = json!(sizes);
        results["omega"] = json!(rs.format_weight(&g.omega));
        text.push_str("grade sizes:");
        for (k, n) in &sizes {
            text.push_str(&format!(" {k}:{n}"));
        }
        text.push_str(&format!("\nomega (top wedge of grade 1) {}\n", rs.format_weight(&g.omega)));
    }
    for r in &roots {
        text.push_str(&format!("  {r}\n"));
    }
    Ok(("subspace".into(), json!({ "expr": expr, "type": ty }), results, text, true))
}

fn cmd_bbw(weight: &str, ty: &str) -> Result<Outcome> {
    let rs = root_system(ty)?;
    let w = rs.parse_weight(weight)?;
    let r = bbw(&rs, &w);
    let (results, text) = match &r {
        BbwResult::Singular => (json!({ "singular": true }), "all cohomology vanishes (lambda + rho singular)\n".to_string()),
        BbwResult::Regular { degree, highest } => {
            let dim = weyl_dimension(&rs, highest)?;
            (
                json!({
                    "singular": false,
                    "degree": degree,
                    "highest": rs.format_weight(highest),
                    "highest_fund": rs.fundamental_coords(highest),
                    "dim": dim.to_string(),
                }),
                format!("H^{} = V({})  dim {}\n", degree, rs.format_weight(highest), dim),
            )
        }
    };
    Ok(("bbw".into(), json!({ "weight": rs.format_weight(&w), "type": ty }), results, text, true))
}

fn mult(expr: &str, n: Option<usize>, rep: Option<&str>, twist: Option<&str>, ty: &str, n_max: usize) -> Result<Outcome> {
    let rs = root_system(ty)?;
    let v = parse_rootset(&rs, expr)?;
    let mu = match rep {
        Some(s) => rs.parse_weight(s)?,
        None => Weight::zero(rs.rank()),
    };
    if !rs.is_dominant(&mu) {
        return Err(Error::NotDominant(rs.format_weight(&mu)));
    }
    let lambda = match twist {
        Some(s) => rs.parse_weight(s)?,
        None => Weight::zero(rs.rank()),
    };
    let degrees: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (0..=n_max).collect(),
    };
    let values: Vec<(usize, String)> = degrees.iter().map(|&k| (k, euler_mult(&v, k, &lambda, &mu).to_string())).collect();
    let mut text = format!("V = {}  rep {}  twist {}\n", v.describe(), rs.format_weight(&mu), rs.format_weight(&lambda));
    for (k, m) in &values {
        text.push_str(&format!("  n = {k:2}  {m}\n"));
    }
    let inputs = json!({
        "rootset": v.describe(),
        "rep": rs.format_weight(&mu),
        "twist": rs.format_weight(&lambda),
        "degrees": degrees,
        "type": ty,
    });
    let results = json!(values.iter().map(|(k, m)| json!({ "n": k, "mult": m })).collect::<Vec<_>>());
    Ok(("mult".into(), inputs, results, text, true))
}
