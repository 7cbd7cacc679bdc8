//! Raise an order-1 formula to an order-2 disjunctive one; verdicts agree.

use hflz::parse::parse_formula;
use hflz::semantics::{search_valid, SearchBudget};
use hflz::todisj::{raise_sort, raise_top_simplified};
use hflz::{is_disjunctive, order_of_formula, Sort};

fn main() -> hflz::Result<()> {
    let s = hflz::parse::parse_sort("int -> (int -> prop) -> prop")?;
    println!("{s}  ~>  {}", raise_sort(&s));
    assert_eq!(raise_sort(&Sort::Prop), Sort::arrow(Sort::Prop, Sort::Prop));

    // A demonic choice between two guarded branches.
    let f = parse_formula(
        "(mu f : int -> prop. \\x : int. x >= 3 \\/ f (x + 1)) 0 /\\ (\\y : int. y <= 5) 2",
    )?;
    let g = raise_top_simplified(&f)?;
    println!("source : {f}");
    println!("raised : {g}");
    println!(
        "order {} -> {}, disjunctive: {} -> {}",
        order_of_formula(&f),
        order_of_formula(&g),
        is_disjunctive(&f),
        is_disjunctive(&g)
    );
    let b = SearchBudget::default();
    println!("verdicts: {} / {}", search_valid(&f, &b)?, search_valid(&g, &b)?);
    Ok(())
}
