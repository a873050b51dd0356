//! Replays a shipped derivation script (or a script file) and prints the report.
//!
//! `cargo run --release --example replay_script -- d5a1`

use nilcohom::replay::{run_named, ReplayOptions};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "d5a1".to_string());
    let json = std::env::args().any(|a| a == "--json");
    match run_named(&name, &ReplayOptions::default()) {
        Ok(r) if json => println!("{}", serde_json::to_string_pretty(&r).unwrap()),
        Ok(r) => print!("{}", r.render_text()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
