//! raise, normalize, lower: an order-0 game becomes an order-0 system after
//! passing through order 1, and its verdict is preserved.

use hflz::fromdisj::{lower, LowerOptions};
use hflz::normalize::normalize;
use hflz::parse::parse_formula;
use hflz::semantics::{kleene_eval, search_valid, SearchBudget};
use hflz::todisj::raise_top_simplified;

fn main() -> hflz::Result<()> {
    let b = SearchBudget::default();
    for n in [2, 7] {
        // The opponent picks x in {n, n+1}; the player must then count up to 5.
        let f = parse_formula(&format!(
            "(mu c : int -> prop. \\i : int. i = 5 \\/ i <= 4 /\\ c (i + 1)) {n} \
             /\\ (mu c : int -> prop. \\i : int. i = 5 \\/ i <= 4 /\\ c (i + 1)) ({n} + 1)"
        ))?;
        let raised = raise_top_simplified(&f)?;
        let es = normalize(&raised)?;
        let (low, stats) = lower(&es, LowerOptions::default())?;
        println!(
            "n = {n}: source {}, raised {}, lowered (order {}) {}",
            search_valid(&f, &b)?,
            search_valid(&raised, &b)?,
            stats.order_out,
            kleene_eval(&low, 16, 1000)?
        );
    }
    Ok(())
}
