//! Game terms: angelic choice is the player's, demonic the opponent's.

use hflz::frontend::{parse_term, to_formula};
use hflz::semantics::{search_valid, SearchBudget};

fn main() -> hflz::Result<()> {
    let b = SearchBudget::default();
    for src in [include_str!("data/sum.term"), include_str!("data/choice.term"), "fail <&> ()"] {
        let t = parse_term(src)?;
        let f = to_formula(&t)?;
        println!("{}", src.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join(" "));
        println!("  = {f}");
        println!("  order {}, {}", t.order(), search_valid(&f, &b)?);
    }
    Ok(())
}
