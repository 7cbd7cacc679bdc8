//! m-th approximations of a recursive system converge from below.

use hflz::eqsys::{m_approximation, to_mu_formula};
use hflz::parse::parse_system;
use hflz::semantics::{search_valid, SearchBudget};

fn main() -> hflz::Result<()> {
    let es = parse_system(include_str!("data/d_sum.hes"))?;
    let b = SearchBudget::default();
    for m in 0..=4 {
        let a = m_approximation(&es, m)?;
        println!("m = {m}: {} definitions, {}", a.defs.len(), search_valid(&to_mu_formula(&a)?, &b)?);
    }
    println!("unapproximated: {}", search_valid(&to_mu_formula(&es)?, &b)?);
    Ok(())
}
