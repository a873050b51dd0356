use clap::Parser;

fn main() {
    std::process::exit(nilcohom::cli::run(nilcohom::cli::Cli::parse()));
}
