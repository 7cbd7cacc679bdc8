//! Lower the continuation-passing sum system to order 0.

use hflz::fromdisj::{lower, LowerOptions};
use hflz::parse::parse_system;
use hflz::print::print_system;
use hflz::semantics::kleene_eval;

fn main() -> hflz::Result<()> {
    let es = parse_system(include_str!("data/d_sum.hes"))?;
    let (out, stats) = lower(&es, LowerOptions { check: true, ..LowerOptions::default() })?;
    print!("{}", print_system(&out));
    print!("{stats}");
    println!("kleene (box 16): {}", kleene_eval(&out, 16, 1000)?);
    Ok(())
}
