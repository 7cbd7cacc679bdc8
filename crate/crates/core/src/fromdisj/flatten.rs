//! Currying of tuple parameters: `F (a, b, c) x` becomes `F a b c x`.

use crate::eqsys::{Definition, EquationSystem, Param};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::sort::Sort;
use crate::typeck::SimpleTypeEnv;

/// `(A × B) → R` becomes `A → B → R`, recursively.
pub fn flatten_sort(s: &Sort) -> Result<Sort> {
    match s {
        Sort::Int | Sort::Prop => Ok(s.clone()),
        Sort::Arrow(a, r) => {
            let r = flatten_sort(r)?;
            match &**a {
                Sort::Product(cs) => {
                    let cs = cs.iter().map(flatten_sort).collect::<Result<Vec<_>>>()?;
                    Ok(Sort::arrows(cs, r))
                }
                a => Ok(Sort::arrow(flatten_sort(a)?, r)),
            }
        }
        Sort::Product(_) => Err(Error::HigherOrderTupleEscape(format!(
            "product sort {s} outside an argument position"
        ))),
    }
}

fn formula(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Var(_) | Formula::Le(..) => f.clone(),
        Formula::Or(a, b) => Formula::or(formula(a)?, formula(b)?),
        Formula::And(a, b) => Formula::and(formula(a)?, formula(b)?),
        Formula::Mu(x, s, b) => Formula::mu(x.clone(), flatten_sort(s)?, formula(b)?),
        Formula::Abs(x, s, b) => Formula::abs(x.clone(), flatten_sort(s)?, formula(b)?),
        Formula::Exists(x, b) => Formula::exists(x.clone(), formula(b)?),
        Formula::AppInt(h, e) => Formula::app_int(formula(h)?, e.clone()),
        Formula::App(h, a) => {
            let h = formula(h)?;
            match &**a {
                Formula::Tuple(cs) => {
                    let mut acc = h;
                    for c in cs.iter() {
                        acc = Formula::app(acc, formula(c)?);
                    }
                    acc
                }
                a => Formula::app(h, formula(a)?),
            }
        }
        Formula::Tuple(_) => {
            let mut shown = f.to_string();
            shown.truncate(120);
            return Err(Error::HigherOrderTupleEscape(shown));
        }
    })
}

/// Splices tuple parameters and tuple arguments positionally.
pub fn flatten_tuples(es: &EquationSystem) -> Result<EquationSystem> {
    let mut env = SimpleTypeEnv::new();
    for (x, s) in &es.env {
        env.insert(x.clone(), flatten_sort(s)?);
    }
    let mut defs = Vec::with_capacity(es.defs.len());
    for d in &es.defs {
        let mut params = Vec::new();
        for p in &d.params {
            for (x, s) in p.bindings() {
                if matches!(s, Sort::Product(_)) {
                    return Err(Error::HigherOrderTupleEscape(format!(
                        "nested tuple parameter `{x}` of `{}`",
                        d.name
                    )));
                }
                params.push(Param::Var(x, flatten_sort(&s)?));
            }
        }
        defs.push(Definition {
            name: d.name.clone(),
            params,
            body: formula(&d.body)?,
        });
    }
    Ok(EquationSystem {
        env,
        defs,
        main: formula(&es.main)?,
        maxar: es.maxar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_arguments_are_curried() {
        let p = Sort::int_pred(2);
        let s = Sort::arrow(
            Sort::Product(vec![p.clone(), p.clone(), p.clone()]),
            Sort::arrow(Sort::Int, p.clone()),
        );
        let f = flatten_sort(&s).unwrap();
        assert_eq!(f, Sort::arrows([p.clone(), p.clone(), p.clone(), Sort::Int], p));
    }

    #[test]
    fn tuple_arguments_are_spliced() {
        let f = Formula::app(
            Formula::var("F"),
            Formula::Tuple(vec![Formula::var("a"), Formula::var("b")]),
        );
        let g = formula(&f).unwrap();
        assert_eq!(
            g,
            Formula::app(Formula::app(Formula::var("F"), Formula::var("a")), Formula::var("b"))
        );
    }

    #[test]
    fn escaping_tuple_is_rejected() {
        let f = Formula::or(
            Formula::Tuple(vec![Formula::var("a"), Formula::var("b")]),
            Formula::var("c"),
        );
        assert!(matches!(formula(&f), Err(Error::HigherOrderTupleEscape(_))));
    }

    #[test]
    fn system_without_products_is_unchanged() {
        let es = crate::parse::parse_system(
            "%ENV\nF : int -> prop;\n%DEFS\nF x =mu x <= 0 /\\ F (x + 1);\n%MAIN F 0;\n",
        )
        .unwrap();
        assert_eq!(flatten_tuples(&es).unwrap(), es);
    }
}
