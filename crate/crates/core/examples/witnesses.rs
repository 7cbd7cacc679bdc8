//! The F/G/H system: the lowered `S~1 z` holds exactly for the values that
//! the source passes to its continuation.

use hflz::formula::{Formula, IntExpr};
use hflz::fromdisj::{lower, LowerOptions};
use hflz::parse::parse_system;
use hflz::print::print_system;
use hflz::semantics::{search_valid, SearchBudget};
use hflz::{eqsys::to_mu_formula, Ident};

fn main() -> hflz::Result<()> {
    let es = parse_system(include_str!("data/fgh.hes"))?;
    let (out, _) = lower(&es, LowerOptions::default())?;
    print!("{}", print_system(&out));
    let budget = SearchBudget::with_box(8);
    let mut witnesses = Vec::new();
    for n in -8..=8 {
        let mut probe = out.clone();
        probe.main = Formula::app_int(Formula::Var(Ident::new("S~1")), IntExpr::lit(n));
        if search_valid(&to_mu_formula(&probe)?, &budget)?.is_valid() {
            witnesses.push(n);
        }
    }
    println!("S~1 n holds for n in {witnesses:?}");
    Ok(())
}
