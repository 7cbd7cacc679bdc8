//! The simple type system, extended with primitive `∃` and tuples.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;

pub type SimpleTypeEnv = IndexMap<Ident, Sort>;

struct Ctx<'a> {
    base: &'a SimpleTypeEnv,
    locals: Vec<(Ident, Sort)>,
}

impl Ctx<'_> {
    fn lookup(&self, x: &Ident) -> Result<&Sort> {
        self.locals
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, s)| s)
            .or_else(|| self.base.get(x))
            .ok_or_else(|| Error::UnboundVariable(x.clone()))
    }

    fn int(&self, e: &IntExpr) -> Result<()> {
        match e {
            IntExpr::Lit(_) => Ok(()),
            IntExpr::Var(x) => match self.lookup(x)? {
                Sort::Int => Ok(()),
                s => Err(Error::type_error(x, "int", s)),
            },
            IntExpr::Add(a, b) | IntExpr::Mul(a, b) => {
                self.int(a)?;
                self.int(b)
            }
        }
    }

    fn with<T>(&mut self, x: &Ident, s: Sort, k: impl FnOnce(&mut Self) -> T) -> T {
        self.locals.push((x.clone(), s));
        let r = k(self);
        self.locals.pop();
        r
    }

    fn sort(&mut self, f: &Formula) -> Result<Sort> {
        match f {
            Formula::Var(x) => match self.lookup(x)? {
                Sort::Int => Err(Error::type_error(f, "a predicate sort", "int")),
                s => Ok(s.clone()),
            },
            Formula::Or(a, b) | Formula::And(a, b) => {
                self.expect(a, &Sort::Prop)?;
                self.expect(b, &Sort::Prop)?;
                Ok(Sort::Prop)
            }
            Formula::Mu(x, s, b) => {
                if !s.is_predicate() {
                    return Err(Error::type_error(f, "a predicate sort on mu", s));
                }
                self.with(x, s.clone(), |c| c.expect(b, s))?;
                Ok(s.clone())
            }
            Formula::Abs(x, s, b) => {
                if !s.well_formed() {
                    return Err(Error::type_error(f, "a well-formed binder sort", s));
                }
                let t = self.with(x, s.clone(), |c| c.sort(b))?;
                Ok(Sort::arrow(s.clone(), t))
            }
            Formula::App(h, a) => match self.sort(h)? {
                Sort::Arrow(s, t) if *s != Sort::Int => {
                    self.expect(a, &s)?;
                    Ok((*t).clone())
                }
                other => Err(Error::type_error(f, "a function over predicates", other)),
            },
            Formula::AppInt(h, e) => match self.sort(h)? {
                Sort::Arrow(s, t) if *s == Sort::Int => {
                    self.int(e)?;
                    Ok((*t).clone())
                }
                other => Err(Error::type_error(f, "int -> ...", other)),
            },
            Formula::Le(a, b) => {
                self.int(a)?;
                self.int(b)?;
                Ok(Sort::Prop)
            }
            Formula::Exists(z, b) => {
                self.with(z, Sort::Int, |c| c.expect(b, &Sort::Prop))?;
                Ok(Sort::Prop)
            }
            Formula::Tuple(cs) => {
                if cs.len() < 2 {
                    return Err(Error::type_error(f, "a tuple of width at least 2", cs.len()));
                }
                let mut ss = Vec::with_capacity(cs.len());
                for c in cs {
                    let s = self.sort(c)?;
                    if !s.is_predicate() {
                        return Err(Error::type_error(c, "a predicate component", s));
                    }
                    ss.push(s);
                }
                Ok(Sort::Product(ss))
            }
        }
    }

    fn expect(&mut self, f: &Formula, want: &Sort) -> Result<()> {
        let got = self.sort(f)?;
        if &got == want {
            Ok(())
        } else {
            Err(Error::type_error(f, want, got))
        }
    }
}

/// Γ ⊢ f : σ
pub fn typecheck(env: &SimpleTypeEnv, f: &Formula) -> Result<Sort> {
    Ctx {
        base: env,
        locals: Vec::new(),
    }
    .sort(f)
}

/// Typechecks `f` under `env` extended with `locals` (innermost last).
pub fn typecheck_with(
    env: &SimpleTypeEnv,
    locals: &[(Ident, Sort)],
    f: &Formula,
) -> Result<Sort> {
    Ctx {
        base: env,
        locals: locals.to_vec(),
    }
    .sort(f)
}

pub fn check_int(env: &SimpleTypeEnv, e: &IntExpr) -> Result<()> {
    Ctx {
        base: env,
        locals: Vec::new(),
    }
    .int(e)
}

/// Checks a closed formula of sort prop.
pub fn check_closed_prop(f: &Formula) -> Result<()> {
    let fv = f.free_vars();
    if !fv.is_empty() {
        let names: Vec<_> = fv.iter().map(|x| x.to_string()).collect();
        return Err(Error::NotClosed(names.join(", ")));
    }
    match typecheck(&SimpleTypeEnv::new(), f)? {
        Sort::Prop => Ok(()),
        _ => Err(Error::NotProp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn ty(s: &str) -> Result<Sort> {
        typecheck(&SimpleTypeEnv::new(), &parse_formula(s).unwrap())
    }

    #[test]
    fn mu_identity_is_prop() {
        assert_eq!(ty("mu x : prop. x").unwrap(), Sort::Prop);
    }

    #[test]
    fn sum_function_sort() {
        let src = "mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. \
                   (x < 0 /\\ k 0) \\/ (x = 0 /\\ k 0) \\/ (x > 0 /\\ sum (x - 1) (\\y : int. k (x + y)))";
        let want = Sort::arrows([Sort::Int, Sort::int_pred(1)], Sort::Prop);
        assert_eq!(ty(src).unwrap(), want);
    }

    #[test]
    fn applying_prop_is_an_error() {
        let f = Formula::app(Formula::tt(), Formula::tt());
        assert!(matches!(
            typecheck(&SimpleTypeEnv::new(), &f),
            Err(Error::TypeError { .. })
        ));
    }

    #[test]
    fn unbound_is_reported() {
        assert!(matches!(
            typecheck(&SimpleTypeEnv::new(), &Formula::var("q")),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn tuples_match_product_parameters() {
        let p = Sort::Product(vec![Sort::int_pred(1), Sort::int_pred(1)]);
        let mut env = SimpleTypeEnv::new();
        env.insert(Ident::new("F"), Sort::arrow(p, Sort::Prop));
        let k = parse_formula("\\z : int. z <= 0").unwrap();
        let ok = Formula::app(Formula::var("F"), Formula::Tuple(vec![k.clone(), k.clone()]));
        assert_eq!(typecheck(&env, &ok).unwrap(), Sort::Prop);
        let bad = Formula::app(Formula::var("F"), k);
        assert!(typecheck(&env, &bad).is_err());
    }

    #[test]
    fn exists_body_must_be_prop() {
        assert_eq!(ty("exists z. z <= 3").unwrap(), Sort::Prop);
        assert!(ty("exists z. \\y : int. y <= z").is_err());
    }
}
