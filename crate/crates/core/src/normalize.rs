//! Turns a closed disjunctive formula into an equation system that satisfies
//! the three input assumptions of the lowering translation:
//!
//! 1. bodies follow `x | φ ∨ φ | e ≤ e ∧ φ | φ φ | φ e`,
//! 2. every order-0 predicate argument has the same arity `M`,
//! 3. the main formula is `S (λz̄_M. TRUE)`.

use std::collections::{HashMap, HashSet};

use crate::eqsys::{Definition, EquationSystem, Param};
use crate::error::{Error, Result};
use crate::formula::{freshen_binders, is_disjunctive, Arg, Formula, IntExpr};
use crate::fromdisj::simplify::beta_admin;
use crate::fromdisj::{main_shape, uniform_arity};
use crate::ident::Ident;
use crate::semantics::encode_exists;
use crate::sort::Sort;
use crate::typeck::{check_closed_prop, typecheck_with, SimpleTypeEnv};

fn arg_arities(s: &Sort, out: &mut Vec<usize>) {
    if let Sort::Arrow(a, r) = s {
        match a.int_pred_arity() {
            Some(l) => out.push(l),
            None => arg_arities(a, out),
        }
        arg_arities(r, out);
    }
}

/// Largest arity of an integer predicate in an argument position, at least 1.
pub fn compute_maxar(f: &Formula) -> usize {
    fn go(f: &Formula, out: &mut Vec<usize>) {
        match f {
            Formula::Var(_) | Formula::Le(..) => {}
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::AppInt(a, _) | Formula::Exists(_, a) => go(a, out),
            Formula::Abs(_, s, b) => {
                if let Some(l) = s.int_pred_arity() {
                    out.push(l);
                }
                arg_arities(s, out);
                go(b, out);
            }
            Formula::Mu(_, s, b) => {
                arg_arities(s, out);
                go(b, out);
            }
            Formula::Tuple(cs) => cs.iter().for_each(|c| go(c, out)),
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out.into_iter().max().unwrap_or(0).max(1)
}

/// Assumption I for one body.
pub fn satisfies_grammar(f: &Formula) -> bool {
    match f {
        Formula::Var(_) => true,
        Formula::Or(a, b) | Formula::App(a, b) => satisfies_grammar(a) && satisfies_grammar(b),
        Formula::And(g, b) => matches!(**g, Formula::Le(..)) && satisfies_grammar(b),
        Formula::AppInt(a, _) => satisfies_grammar(a),
        _ => false,
    }
}

/// Checks all three assumptions; returns `M`.
pub fn check_normalized(es: &EquationSystem) -> Result<usize> {
    let (s, m) = main_shape(&es.main)
        .ok_or_else(|| Error::NotNormalized(format!("main formula `{}`", es.main)))?;
    if es.def(&s).is_none() {
        return Err(Error::NotNormalized(format!("entry `{s}` is not defined")));
    }
    for (x, sort) in &es.env {
        if !uniform_arity(sort, m) {
            return Err(Error::NotNormalized(format!("`{x} : {sort}` breaks uniform arity {m}")));
        }
    }
    for d in &es.defs {
        if !satisfies_grammar(&d.body) {
            return Err(Error::NotNormalized(format!("body of `{}`", d.name)));
        }
        if es.residual_sort(d)? != Sort::Prop {
            return Err(Error::NotNormalized(format!("`{}` is not eta-expanded", d.name)));
        }
    }
    es.typecheck()?;
    Ok(m)
}

fn zeros(n: usize) -> impl Iterator<Item = IntExpr> {
    std::iter::repeat_with(|| IntExpr::lit(0)).take(n)
}

/// Every success leaf `e1 ≤ e2` becomes `e1 ≤ e2 ∧ t 0̄`; guards are kept.
fn thread(f: &Formula, t: &Formula, m: usize) -> Result<Formula> {
    let call = || zeros(m).fold(t.clone(), Formula::app_int);
    Ok(match f {
        Formula::Var(_) => f.clone(),
        Formula::Le(..) if f.is_true() => call(),
        Formula::Le(..) => Formula::and(f.clone(), call()),
        Formula::And(g, b) if matches!(**g, Formula::Le(..)) => {
            Formula::and((**g).clone(), thread(b, t, m)?)
        }
        Formula::And(..) => return Err(Error::NotDisjunctive(f.to_string())),
        Formula::Or(a, b) => Formula::or(thread(a, t, m)?, thread(b, t, m)?),
        Formula::App(a, b) => Formula::app(thread(a, t, m)?, thread(b, t, m)?),
        Formula::AppInt(a, e) => Formula::app_int(thread(a, t, m)?, e.clone()),
        Formula::Mu(x, s, b) => Formula::mu(x.clone(), s.clone(), thread(b, t, m)?),
        Formula::Abs(x, s, b) => Formula::abs(x.clone(), s.clone(), thread(b, t, m)?),
        Formula::Exists(x, b) => Formula::exists(x.clone(), thread(b, t, m)?),
        Formula::Tuple(_) => return Err(Error::Unsupported("tuples in a formula".into())),
    })
}

struct Padder {
    m: usize,
}

impl Padder {
    fn arg(&self, s: &Sort) -> Sort {
        match s.int_pred_arity() {
            Some(_) => Sort::int_pred(self.m),
            None => self.sort(s),
        }
    }

    fn sort(&self, s: &Sort) -> Sort {
        match s {
            Sort::Arrow(a, r) => Sort::arrow(self.arg(a), self.sort(r)),
            _ => s.clone(),
        }
    }

    fn short(&self, s: &Sort) -> Option<usize> {
        s.int_pred_arity().filter(|l| *l < self.m)
    }

    /// Returns the padded formula and the original sort. `locals` maps each
    /// bound name to its original sort and whether it was padded.
    fn pad(&self, f: &Formula, locals: &mut Vec<(Ident, Sort, bool)>) -> Result<(Formula, Sort)> {
        Ok(match f {
            Formula::Var(x) => {
                let (s, padded) = locals
                    .iter()
                    .rev()
                    .find(|(y, _, _)| y == x)
                    .map(|(_, s, p)| (s.clone(), *p))
                    .ok_or_else(|| Error::UnboundVariable(x.clone()))?;
                if padded {
                    let l = s.int_pred_arity().unwrap_or(0);
                    let zs: Vec<Ident> = (0..l).map(|_| Ident::fresh("z")).collect();
                    let mut body = Formula::Var(x.clone());
                    for z in &zs {
                        body = Formula::app_int(body, IntExpr::Var(z.clone()));
                    }
                    body = zeros(self.m - l).fold(body, Formula::app_int);
                    (Formula::abs_many(zs.into_iter().map(|z| (z, Sort::Int)), body), s)
                } else {
                    (f.clone(), s)
                }
            }
            Formula::Le(..) => (f.clone(), Sort::Prop),
            Formula::Or(a, b) | Formula::And(a, b) => {
                let (a2, _) = self.pad(a, locals)?;
                let (b2, _) = self.pad(b, locals)?;
                let g = if matches!(f, Formula::Or(..)) {
                    Formula::or(a2, b2)
                } else {
                    Formula::and(a2, b2)
                };
                (g, Sort::Prop)
            }
            Formula::Exists(x, b) => {
                locals.push((x.clone(), Sort::Int, false));
                let (b2, _) = self.pad(b, locals)?;
                locals.pop();
                (Formula::exists(x.clone(), b2), Sort::Prop)
            }
            Formula::Mu(x, s, b) => {
                locals.push((x.clone(), s.clone(), false));
                let (b2, _) = self.pad(b, locals)?;
                locals.pop();
                (Formula::mu(x.clone(), self.sort(s), b2), s.clone())
            }
            Formula::Abs(x, s, b) => {
                locals.push((x.clone(), s.clone(), self.short(s).is_some()));
                let (b2, r) = self.pad(b, locals)?;
                locals.pop();
                (Formula::abs(x.clone(), self.arg(s), b2), Sort::arrow(s.clone(), r))
            }
            Formula::AppInt(h, e) => {
                let (h2, s) = self.pad(h, locals)?;
                let Sort::Arrow(_, r) = s else {
                    return Err(Error::SortMismatch(format!("`{h}` applied to an integer")));
                };
                (Formula::app_int(h2, e.clone()), (*r).clone())
            }
            Formula::App(h, a) => {
                let (h2, s) = self.pad(h, locals)?;
                let (a2, sa) = self.pad(a, locals)?;
                let Sort::Arrow(_, r) = s else {
                    return Err(Error::SortMismatch(format!("`{h}` applied to a formula")));
                };
                let a3 = match self.short(&sa) {
                    Some(l) => {
                        let zs: Vec<Ident> = (0..self.m).map(|_| Ident::fresh("z")).collect();
                        let call = zs[..l]
                            .iter()
                            .fold(a2, |acc, z| Formula::app_int(acc, IntExpr::Var(z.clone())));
                        Formula::abs_many(zs.into_iter().map(|z| (z, Sort::Int)), call)
                    }
                    None => a2,
                };
                (Formula::app(h2, a3), (*r).clone())
            }
            Formula::Tuple(_) => return Err(Error::Unsupported("tuples in a formula".into())),
        })
    }
}

struct Lifter {
    env: SimpleTypeEnv,
    defs: Vec<Definition>,
    used: HashSet<Ident>,
}

fn apply_vars(head: Formula, vars: &[(Ident, Sort)]) -> Formula {
    vars.iter().fold(head, |acc, (x, s)| {
        if *s == Sort::Int {
            Formula::app_int(acc, IntExpr::Var(x.clone()))
        } else {
            Formula::app(acc, Formula::Var(x.clone()))
        }
    })
}

impl Lifter {
    fn name_for(&mut self, x: &Ident) -> Ident {
        let n = if x.is_generated() || self.used.contains(x) {
            Ident::fresh(x.stem())
        } else {
            x.clone()
        };
        self.used.insert(n.clone());
        n
    }

    fn free_locals(f: &Formula, locals: &[(Ident, Sort)]) -> Vec<(Ident, Sort)> {
        locals
            .iter()
            .filter(|(x, _)| f.occurs_free(x))
            .cloned()
            .collect()
    }

    /// Adds `name params = body` with extra parameters up to sort prop.
    /// Definitions are listed in the order they are first reached.
    fn define(&mut self, name: Ident, mut params: Vec<(Ident, Sort)>, residual: Sort, body: Formula) -> Result<()> {
        let slot = self.defs.len();
        self.defs.push(Definition {
            name: name.clone(),
            params: Vec::new(),
            body: Formula::ff(),
        });
        let mut body = self.lift(&body, &params)?;
        let (extra, _) = residual.uncurry();
        let extra: Vec<(Ident, Sort)> = extra
            .into_iter()
            .map(|s| (Ident::fresh("a"), s.clone()))
            .collect();
        body = apply_vars(body, &extra);
        params.extend(extra);
        self.defs[slot] = Definition {
            name,
            params: params.into_iter().map(|(x, s)| Param::Var(x, s)).collect(),
            body,
        };
        Ok(())
    }

    fn lift(&mut self, f: &Formula, locals: &[(Ident, Sort)]) -> Result<Formula> {
        Ok(match f {
            Formula::Var(_) | Formula::Le(..) => f.clone(),
            Formula::Or(a, b) => Formula::or(self.lift(a, locals)?, self.lift(b, locals)?),
            Formula::And(a, b) => Formula::and(self.lift(a, locals)?, self.lift(b, locals)?),
            Formula::App(a, b) => Formula::app(self.lift(a, locals)?, self.lift(b, locals)?),
            Formula::AppInt(a, e) => Formula::app_int(self.lift(a, locals)?, e.clone()),
            Formula::Abs(..) => {
                let fvs = Self::free_locals(f, locals);
                let mut xs = Vec::new();
                let mut body = f;
                while let Formula::Abs(x, s, b) = body {
                    xs.push((x.clone(), s.clone()));
                    body = b;
                }
                let mut inner = fvs.clone();
                inner.extend(xs.iter().cloned());
                let residual = typecheck_with(&self.env, &inner, body)?;
                let name = Ident::fresh_lift();
                self.used.insert(name.clone());
                let mut all: Vec<Sort> = inner.iter().map(|(_, s)| s.clone()).collect();
                let (rest, _) = residual.uncurry();
                all.extend(rest.into_iter().cloned());
                self.env.insert(name.clone(), Sort::arrows(all, Sort::Prop));
                self.define(name.clone(), inner, residual, body.clone())?;
                apply_vars(Formula::Var(name), &fvs)
            }
            Formula::Mu(x, s, b) => {
                let fvs = Self::free_locals(f, locals);
                let name = self.name_for(x);
                let sort = Sort::arrows(fvs.iter().map(|(_, s)| s.clone()), s.clone());
                self.env.insert(name.clone(), sort);
                let call = apply_vars(Formula::Var(name.clone()), &fvs);
                let b1 = b.subst1(x, Arg::F(call.clone()));
                let mut xs = Vec::new();
                let mut body = &b1;
                while let Formula::Abs(y, ys, bb) = body {
                    xs.push((y.clone(), ys.clone()));
                    body = bb;
                }
                let mut inner = fvs.clone();
                inner.extend(xs);
                let residual = typecheck_with(&self.env, &inner, body)?;
                self.define(name, inner, residual, body.clone())?;
                call
            }
            Formula::Exists(..) => {
                return Err(Error::Invariant("existential left after encoding".into()))
            }
            Formula::Tuple(_) => return Err(Error::Unsupported("tuples in a formula".into())),
        })
    }
}

/// [`normalize_with`] using [`compute_maxar`].
pub fn normalize(f: &Formula) -> Result<EquationSystem> {
    normalize_with(f, None)
}

/// Continuation threading, arity padding to `M` and λ-lifting.
/// `maxar` may raise `M` above the computed value but not lower it.
pub fn normalize_with(f: &Formula, maxar: Option<usize>) -> Result<EquationSystem> {
    check_closed_prop(f)?;
    if !is_disjunctive(f) {
        return Err(Error::NotDisjunctive(f.to_string()));
    }
    let t = Ident::new("$t");
    let top = Ident::new("$S");
    let mut taken: HashSet<Ident> = [t.clone(), top.clone()].into_iter().collect();
    let f = freshen_binders(&encode_exists(f), &mut taken);
    let computed = compute_maxar(&f);
    let m = match maxar {
        Some(m) if m < computed => {
            return Err(Error::NotNormalized(format!(
                "--maxar {m} is below the largest predicate arity {computed}"
            )))
        }
        Some(m) => m.max(1),
        None => computed,
    };
    let threaded = thread(&f, &Formula::Var(t.clone()), m)?;
    let tsort = Sort::int_pred(m);
    let mut locals = vec![(t.clone(), tsort.clone(), false)];
    let (padded, _) = Padder { m }.pad(&threaded, &mut locals)?;
    let padded = beta_admin(&padded);

    let mut lifter = Lifter {
        env: SimpleTypeEnv::new(),
        defs: Vec::new(),
        used: taken.clone(),
    };
    let ssort = Sort::arrow(tsort.clone(), Sort::Prop);
    lifter.env.insert(top.clone(), ssort);
    let params = vec![(t.clone(), tsort)];
    lifter.define(top.clone(), params, Sort::Prop, padded)?;

    let zs: Vec<(Ident, Sort)> = (0..m).map(|_| (Ident::fresh("z"), Sort::Int)).collect();
    let main = Formula::app(Formula::Var(top), Formula::abs_many(zs, Formula::tt()));
    let mut env = SimpleTypeEnv::new();
    for d in &lifter.defs {
        env.insert(d.name.clone(), lifter.env[&d.name].clone());
    }
    let es = EquationSystem {
        env,
        defs: lifter.defs,
        main,
        maxar: Some(m),
    };
    check_normalized(&es).map_err(|e| Error::Invariant(format!("normalize output: {e}")))?;
    Ok(es)
}

/// Renames generated definition names to `F1, F2, …` in order, for display.
pub fn readable_names(es: &EquationSystem) -> EquationSystem {
    let mut map = HashMap::new();
    let mut n = 0;
    let user: HashSet<&Ident> = es.defs.iter().map(|d| &d.name).filter(|x| !x.is_generated()).collect();
    for d in &es.defs {
        if d.name.is_generated() {
            let name = loop {
                n += 1;
                let c = Ident::new(&format!("F{n}"));
                if !user.contains(&c) {
                    break c;
                }
            };
            map.insert(d.name.clone(), Arg::F(Formula::Var(name)));
        }
    }
    let rename = |x: &Ident| match map.get(x) {
        Some(Arg::F(Formula::Var(y))) => y.clone(),
        _ => x.clone(),
    };
    EquationSystem {
        env: es.env.iter().map(|(x, s)| (rename(x), s.clone())).collect(),
        defs: es
            .defs
            .iter()
            .map(|d| Definition {
                name: rename(&d.name),
                params: d.params.clone(),
                body: d.body.substitute(&map),
            })
            .collect(),
        main: es.main.substitute(&map),
        maxar: es.maxar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::semantics::{search_valid, SearchBudget};

    const SUM: &str = "(mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. \
        x < 0 \\/ x = 0 /\\ k 0 \\/ x > 0 /\\ sum (x - 1) (\\y : int. k (x + y))) N (\\r : int. r < N)";

    fn sum(n: i64) -> Formula {
        parse_formula(&SUM.replace('N', &format!("({n})"))).unwrap()
    }

    #[test]
    fn maxar_examples() {
        assert_eq!(compute_maxar(&sum(1)), 1);
        let f = parse_formula(
            "(\\f : int -> prop. f 1) ((\\g : int -> int -> prop. g 1) (\\x : int. \\y : int. x <= y))",
        )
        .unwrap();
        assert_eq!(compute_maxar(&f), 2);
        assert_eq!(compute_maxar(&Formula::tt()), 1);
    }

    #[test]
    fn true_becomes_a_call_of_the_continuation() {
        let es = normalize(&Formula::tt()).unwrap();
        assert_eq!(es.defs.len(), 1);
        assert_eq!(es.defs[0].body.to_string(), "$t 0");
        assert_eq!(es.maxar, Some(1));
    }

    #[test]
    fn sum_normalizes_to_four_definitions() {
        let es = normalize(&sum(-1)).unwrap();
        assert_eq!(es.defs.len(), 4);
        assert_eq!(check_normalized(&es).unwrap(), 1);
        let f = crate::eqsys::to_mu_formula(&es).unwrap();
        assert!(search_valid(&f, &SearchBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn padding_example() {
        let f = parse_formula(
            "(\\f : int -> prop. f 1) ((\\g : int -> int -> prop. g 1) (\\x : int. \\y : int. x <= y))",
        )
        .unwrap();
        let es = normalize(&f).unwrap();
        assert_eq!(es.maxar, Some(2));
        let g = crate::eqsys::to_mu_formula(&es).unwrap();
        assert!(search_valid(&g, &SearchBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn non_disjunctive_input_is_rejected() {
        let f = parse_formula("(\\x : prop. x) true /\\ true").unwrap();
        assert!(matches!(normalize(&f), Err(Error::NotDisjunctive(_))));
        assert!(matches!(normalize(&Formula::var("q")), Err(Error::NotClosed(_))));
    }
}
