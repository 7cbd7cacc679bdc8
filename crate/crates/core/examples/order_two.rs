//! An order-2 system with a higher-order argument lowers to order 1; tuple
//! parameters are curried.

use hflz::fromdisj::{lower, LowerOptions};
use hflz::parse::parse_system;
use hflz::Ident;

fn main() -> hflz::Result<()> {
    let es = parse_system(include_str!("data/sum_plus.hes"))?;
    let opts = LowerOptions { flatten: false, ..LowerOptions::default() };
    let (tupled, _) = lower(&es, opts)?;
    let (flat, stats) = lower(&es, LowerOptions::default())?;
    let sum0 = Ident::new("Sum~0");
    println!("Sum~0 : {}", tupled.env[&sum0]);
    println!("Sum~0 : {}  (flattened)", flat.env[&sum0]);
    print!("{stats}");
    Ok(())
}
