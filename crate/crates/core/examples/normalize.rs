//! Continuation threading, padding and λ-lifting of a closed disjunctive formula.

use hflz::normalize::{check_normalized, normalize, readable_names};
use hflz::parse::parse_formula;
use hflz::print::print_system;

fn main() -> hflz::Result<()> {
    let f = parse_formula(include_str!("data/sum_neg1.hfl"))?;
    let es = normalize(&f)?;
    let m = check_normalized(&es)?;
    println!("# maximal predicate arity {m}");
    print!("{}", print_system(&readable_names(&es)));
    Ok(())
}
