//! Order-raising translation: an order-n formula becomes an order-(n+1)
//! disjunctive formula by passing the "rest of the conjunction" as an
//! extra `Prop` argument.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;
use crate::typeck::{check_closed_prop, SimpleTypeEnv};

/// Memoized `⌈·⌉` on sorts.
#[derive(Default)]
pub struct RaisedSortMap {
    memo: HashMap<Sort, Sort>,
}

impl RaisedSortMap {
    pub fn raise(&mut self, s: &Sort) -> Sort {
        if let Some(r) = self.memo.get(s) {
            return r.clone();
        }
        let r = match s {
            Sort::Int => Sort::Int,
            Sort::Prop => Sort::arrow(Sort::Prop, Sort::Prop),
            Sort::Arrow(a, b) => Sort::arrow(self.raise(a), self.raise(b)),
            Sort::Product(cs) => Sort::Product(cs.iter().map(|c| self.raise(c)).collect()),
        };
        self.memo.insert(s.clone(), r.clone());
        r
    }

    pub fn raise_env(&mut self, env: &SimpleTypeEnv) -> SimpleTypeEnv {
        env.iter().map(|(x, s)| (x.clone(), self.raise(s))).collect()
    }
}

/// `⌈INT⌉ = INT`, `⌈Prop⌉ = Prop → Prop`, homomorphic on arrows.
pub fn raise_sort(s: &Sort) -> Sort {
    RaisedSortMap::default().raise(s)
}

fn cont() -> Ident {
    Ident::fresh("x")
}

fn lam_prop(x: &Ident, body: Formula) -> Formula {
    Formula::abs(x.clone(), Sort::Prop, body)
}

fn body_rec(f: &Formula, sorts: &mut RaisedSortMap) -> Result<Formula> {
    Ok(match f {
        Formula::Var(_) => f.clone(),
        Formula::Le(..) => {
            let x = cont();
            lam_prop(&x, Formula::and(f.clone(), Formula::Var(x.clone())))
        }
        Formula::And(a, b) => {
            let x = cont();
            let inner = Formula::app(body_rec(b, sorts)?, Formula::Var(x.clone()));
            lam_prop(&x, Formula::app(body_rec(a, sorts)?, inner))
        }
        Formula::Or(a, b) => {
            let x = cont();
            let l = Formula::app(body_rec(a, sorts)?, Formula::Var(x.clone()));
            let r = Formula::app(body_rec(b, sorts)?, Formula::Var(x.clone()));
            lam_prop(&x, Formula::or(l, r))
        }
        Formula::Mu(y, s, b) => Formula::mu(y.clone(), sorts.raise(s), body_rec(b, sorts)?),
        Formula::Abs(y, s, b) => Formula::abs(y.clone(), sorts.raise(s), body_rec(b, sorts)?),
        Formula::App(a, b) => Formula::app(body_rec(a, sorts)?, body_rec(b, sorts)?),
        Formula::AppInt(a, e) => Formula::app_int(body_rec(a, sorts)?, e.clone()),
        Formula::Exists(z, b) => {
            let x = cont();
            let inner = Formula::app(body_rec(b, sorts)?, Formula::Var(x.clone()));
            lam_prop(&x, Formula::exists(z.clone(), inner))
        }
        Formula::Tuple(_) => {
            return Err(Error::Unsupported("tuples cannot be raised".into()));
        }
    })
}

/// The `(·)♯` translation.
pub fn raise_body(f: &Formula) -> Result<Formula> {
    body_rec(f, &mut RaisedSortMap::default())
}

/// `⌈φ⌉ = φ♯ TRUE` for a closed formula of sort prop.
pub fn raise_top(f: &Formula) -> Result<Formula> {
    check_closed_prop(f)?;
    Ok(Formula::app(raise_body(f)?, Formula::tt()))
}

/// `raise_top` followed by administrative β-reduction.
pub fn raise_top_simplified(f: &Formula) -> Result<Formula> {
    Ok(beta_simplify(&raise_top(f)?))
}

/// Reduces β-redexes whose argument is a variable, a truth literal or
/// used at most once (plus all integer redexes).
pub fn beta_simplify(f: &Formula) -> Formula {
    crate::fromdisj::simplify::beta_admin(f)
}

/// Integer substitution `[e/z]`, for checking that raising commutes with it.
pub fn subst_int(f: &Formula, z: &Ident, e: IntExpr) -> Formula {
    f.subst1(z, crate::formula::Arg::I(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alpha_eq, is_disjunctive, order_of_formula};
    use crate::parse::parse_formula;
    use crate::semantics::{search_valid, SearchBudget};
    use crate::typeck::typecheck;

    #[test]
    fn sorts() {
        assert_eq!(raise_sort(&Sort::Prop), Sort::arrow(Sort::Prop, Sort::Prop));
        assert_eq!(raise_sort(&Sort::Int), Sort::Int);
        assert_eq!(
            raise_sort(&Sort::int_pred(1)),
            Sort::arrow(Sort::Int, Sort::arrow(Sort::Prop, Sort::Prop))
        );
    }

    #[test]
    fn comparison_clause() {
        let f = raise_body(&Formula::tt()).unwrap();
        assert!(alpha_eq(&f, &parse_formula("\\x : prop. true /\\ x").unwrap()));
    }

    #[test]
    fn conjunction_clause() {
        let f = Formula::and(Formula::var("p"), Formula::var("q"));
        let g = raise_body(&f).unwrap();
        let want = parse_formula("\\x : prop. p (q x)").unwrap();
        let mut env = SimpleTypeEnv::new();
        env.insert(Ident::new("p"), Sort::arrow(Sort::Prop, Sort::Prop));
        env.insert(Ident::new("q"), Sort::arrow(Sort::Prop, Sort::Prop));
        let want = want.substitute(&HashMap::new());
        assert!(alpha_eq(&g, &want), "{g}");
        assert_eq!(
            typecheck(&env, &g).unwrap(),
            Sort::arrow(Sort::Prop, Sort::Prop)
        );
    }

    #[test]
    fn mu_example_simplifies_to_the_displayed_form() {
        let src = "(mu p : int -> prop. \\y : int. y = 0 \\/ p (y - 1) /\\ p (y + 1)) n";
        let mut env = SimpleTypeEnv::new();
        env.insert(Ident::new("n"), Sort::Int);
        let f = crate::parse::parse_formula_in(&env, src).unwrap();
        let g = beta_simplify(&raise_body(&f).unwrap());
        let want = crate::parse::parse_formula_in(
            &env,
            "(mu p : int -> prop -> prop. \\y : int. \\x : prop. \
             (y <= 0 /\\ 0 <= y /\\ x) \\/ p (y - 1) (p (y + 1) x)) n",
        )
        .unwrap();
        assert!(alpha_eq(&g, &want), "{g}");
    }

    #[test]
    fn raise_top_shifts_order_and_is_disjunctive() {
        let f = parse_formula(
            "(mu p : int -> prop. \\y : int. y = 0 \\/ p (y - 1) /\\ p (y + 1)) 0",
        )
        .unwrap();
        let g = raise_top(&f).unwrap();
        assert!(is_disjunctive(&g));
        assert_eq!(order_of_formula(&g), order_of_formula(&f) + 1);
        assert_eq!(typecheck(&SimpleTypeEnv::new(), &g).unwrap(), Sort::Prop);
        assert!(search_valid(&g, &SearchBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn raise_top_of_true() {
        let g = raise_top(&Formula::tt()).unwrap();
        assert!(search_valid(&g, &SearchBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn open_formulas_are_rejected() {
        assert!(matches!(raise_top(&Formula::var("q")), Err(Error::NotClosed(_))));
    }
}
