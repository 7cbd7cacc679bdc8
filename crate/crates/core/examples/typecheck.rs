//! Parse and type-check a formula, an equation system and a game term.

use hflz::frontend::{parse_term, typecheck_term};
use hflz::parse::{parse_formula, parse_system};
use hflz::typeck::check_closed_prop;
use hflz::order_of_formula;

fn main() -> hflz::Result<()> {
    let f = parse_formula(include_str!("data/sum_neg1.hfl"))?;
    check_closed_prop(&f)?;
    println!("sum_neg1.hfl: closed prop formula of order {}", order_of_formula(&f));

    let es = parse_system(include_str!("data/fgh.hes"))?;
    es.typecheck()?;
    for (x, s) in &es.env {
        println!("fgh.hes: {x} : {s}");
    }

    let t = parse_term(include_str!("data/sum.term"))?;
    println!("sum.term: {}", typecheck_term(&Vec::new(), &t)?);

    match parse_formula("(\\x : int. x <= 0) (\\y : int. true)") {
        Err(e) => println!("ill-typed: {e}"),
        Ok(f) => println!("unexpectedly parsed {f}"),
    }
    Ok(())
}
