//! Decide the sum example for several `n` by reduction search and show a
//! winning trace.

use hflz::parse::parse_formula;
use hflz::semantics::{replay_trace, search_trace, SearchBudget};

const SUM: &str = "(mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. \
    x < 0 \\/ x = 0 /\\ k 0 \\/ x > 0 /\\ sum (x - 1) (\\y : int. k (x + y)))";

fn main() -> hflz::Result<()> {
    let budget = SearchBudget::default();
    for n in -3..=3 {
        let f = parse_formula(&format!("{SUM} ({n}) (\\r : int. r < {n})"))?;
        let (v, trace) = search_trace(&f, &budget)?;
        println!("n = {n:>2}: {v}");
        if n == -1 {
            let trace = trace.expect("valid verdicts carry a trace");
            assert!(replay_trace(&trace, &budget));
            for (i, g) in trace.iter().enumerate().skip(trace.len().saturating_sub(3)) {
                println!("    {i}: {g}");
            }
        }
    }
    Ok(())
}
