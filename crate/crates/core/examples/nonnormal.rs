//! Adjoint multiplicities that obstruct normality of five orbit closures.
use nilcohom::verify::nonnormal;

fn main() {
    print!("{}", nonnormal().render_text());
}
