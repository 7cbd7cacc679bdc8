//! Administrative β-reduction, equality-driven ∃ elimination and removal of
//! branches that are syntactically FALSE.

use std::collections::{HashMap, HashSet};

use crate::eqsys::EquationSystem;
use crate::formula::{Arg, Formula, IntExpr};
use crate::ident::Ident;

/// Reduces `(λx.b) a` when `a` is a variable, a truth literal, or `x` occurs
/// at most once in `b`; integer redexes are always reduced.
pub fn beta_admin(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) => f.clone(),
        Formula::Le(a, b) => Formula::le(a.fold(), b.fold()),
        Formula::Or(a, b) => Formula::or(beta_admin(a), beta_admin(b)),
        Formula::And(a, b) => Formula::and(beta_admin(a), beta_admin(b)),
        Formula::Mu(x, s, b) => Formula::mu(x.clone(), s.clone(), beta_admin(b)),
        Formula::Abs(x, s, b) => Formula::abs(x.clone(), s.clone(), beta_admin(b)),
        Formula::Exists(x, b) => Formula::exists(x.clone(), beta_admin(b)),
        Formula::Tuple(cs) => Formula::Tuple(cs.iter().map(beta_admin).collect()),
        Formula::App(h, a) => {
            let h = beta_admin(h);
            let a = beta_admin(a);
            if let Formula::Abs(x, _, b) = &h {
                let cheap = matches!(a, Formula::Var(_)) || a.as_bool().is_some();
                if cheap || b.count_free(x) <= 1 {
                    return beta_admin(&b.subst1(x, Arg::F(a)));
                }
            }
            Formula::app(h, a)
        }
        Formula::AppInt(h, e) => {
            let h = beta_admin(h);
            let e = e.fold();
            if let Formula::Abs(x, _, b) = &h {
                return beta_admin(&b.subst1(x, Arg::I(e)));
            }
            Formula::app_int(h, e)
        }
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f.clone()),
    }
}

fn rebuild_and(mut cs: Vec<Formula>) -> Formula {
    let Some(mut acc) = cs.pop() else {
        return Formula::tt();
    };
    while let Some(c) = cs.pop() {
        acc = Formula::and(c, acc);
    }
    acc
}

fn trivially_true(f: &Formula) -> bool {
    match f {
        Formula::Le(a, b) => a == b || f.is_true(),
        _ => false,
    }
}

/// Finds `e` with `u ≤ e` and `e ≤ u` both among the conjuncts, `u ∉ fv(e)`.
fn equation_for(u: &Ident, cs: &[Formula]) -> Option<IntExpr> {
    let is_u = |e: &IntExpr| matches!(e, IntExpr::Var(v) if v == u);
    for c in cs {
        if let Formula::Le(a, e) = c {
            if is_u(a) && !e.mentions(u) {
                let back = cs
                    .iter()
                    .any(|d| matches!(d, Formula::Le(l, r) if l == e && is_u(r)));
                if back {
                    return Some(e.clone());
                }
            }
        }
    }
    None
}

struct Simp<'a> {
    dead: &'a HashSet<Ident>,
    arity: &'a HashMap<Ident, usize>,
}

impl Simp<'_> {
    fn go(&self, f: &Formula) -> Formula {
        match f {
            Formula::Var(_) => f.clone(),
            Formula::Le(a, b) => {
                let g = Formula::le(a.fold(), b.fold());
                match g.as_bool() {
                    Some(true) => Formula::tt(),
                    Some(false) => Formula::ff(),
                    None if a == b => Formula::tt(),
                    None => g,
                }
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                if a.is_false() {
                    b
                } else if b.is_false() {
                    a
                } else if a.is_true() || b.is_true() {
                    Formula::tt()
                } else {
                    Formula::or(a, b)
                }
            }
            Formula::And(a, b) => {
                let (a, b) = (self.go(a), self.go(b));
                if a.is_false() || b.is_false() {
                    Formula::ff()
                } else if a.is_true() {
                    b
                } else if b.is_true() {
                    a
                } else {
                    Formula::and(a, b)
                }
            }
            Formula::Exists(u, b) => self.exists(u, self.go(b)),
            Formula::Mu(x, s, b) => Formula::mu(x.clone(), s.clone(), self.go(b)),
            Formula::Abs(x, s, b) => Formula::abs(x.clone(), s.clone(), self.go(b)),
            Formula::Tuple(cs) => Formula::Tuple(cs.iter().map(|c| self.go(c)).collect()),
            Formula::App(..) | Formula::AppInt(..) => {
                let g = beta_admin(&match f {
                    Formula::App(h, a) => Formula::app(self.go(h), self.go(a)),
                    Formula::AppInt(h, e) => Formula::app_int(self.go(h), e.fold()),
                    _ => unreachable!(),
                });
                if !matches!(g, Formula::App(..) | Formula::AppInt(..)) {
                    return self.go(&g);
                }
                let (head, args) = g.spine();
                if let Formula::Var(h) = head {
                    if self.dead.contains(h) && self.arity.get(h) == Some(&args.len()) {
                        return Formula::ff();
                    }
                }
                g
            }
        }
    }

    fn exists(&self, u: &Ident, b: Formula) -> Formula {
        if !b.occurs_free(u) {
            return b;
        }
        if let Formula::Or(l, r) = &b {
            let l = self.exists(u, (**l).clone());
            let r = self.exists(u, (**r).clone());
            return self.go(&Formula::or(l, r));
        }
        let mut cs = Vec::new();
        conjuncts(&b, &mut cs);
        if let Some(e) = equation_for(u, &cs) {
            let cs: Vec<Formula> = cs
                .iter()
                .map(|c| c.subst1(u, Arg::I(e.clone())))
                .filter(|c| !trivially_true(c))
                .collect();
            return self.go(&rebuild_and(cs));
        }
        Formula::exists(u.clone(), b)
    }
}

fn strip_abs(f: &Formula) -> &Formula {
    match f {
        Formula::Abs(_, _, b) => strip_abs(b),
        _ => f,
    }
}

/// Simplifies a single formula with no knowledge of definitions.
pub fn simplify_formula(f: &Formula) -> Formula {
    let none = HashSet::new();
    let arity = HashMap::new();
    let s = Simp {
        dead: &none,
        arity: &arity,
    };
    let mut cur = s.go(&beta_admin(f));
    loop {
        let next = s.go(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Simplifies every body and the main formula until nothing changes.
/// Fully applied calls of definitions whose body is `λ̄.FALSE` become FALSE.
pub fn simplify(es: &EquationSystem) -> EquationSystem {
    let mut out = es.clone();
    let arity: HashMap<Ident, usize> = out
        .env
        .iter()
        .map(|(x, s)| (x.clone(), s.arity()))
        .collect();
    for d in &mut out.defs {
        d.body = beta_admin(&d.body);
    }
    out.main = beta_admin(&out.main);
    loop {
        let dead: HashSet<Ident> = out
            .defs
            .iter()
            .filter(|d| strip_abs(&d.body).is_false())
            .map(|d| d.name.clone())
            .collect();
        let s = Simp {
            dead: &dead,
            arity: &arity,
        };
        let mut changed = false;
        for d in &mut out.defs {
            let b = s.go(&d.body);
            if b != d.body {
                d.body = b;
                changed = true;
            }
        }
        let m = s.go(&out.main);
        if m != out.main {
            out.main = m;
            changed = true;
        }
        if !changed {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_eq;
    use crate::parse::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn administrative_redexes() {
        let f = p("(\\x : int -> prop. x 1 \\/ x 2) q");
        assert!(alpha_eq(&beta_admin(&f), &p("q 1 \\/ q 2")));
        let g = p("(\\z : int. z <= 3) (1 + 1)");
        assert_eq!(beta_admin(&g), p("2 <= 3"));
    }

    #[test]
    fn shared_argument_is_kept() {
        let f = p("(\\x : int -> prop. x 1 \\/ x 2) (\\y : int. y <= 0 /\\ q y)");
        assert!(matches!(beta_admin(&f), Formula::App(..)));
    }

    #[test]
    fn exists_with_equation_is_eliminated() {
        let f = p("\\z : int. exists u. k x u /\\ u <= z /\\ z <= u");
        assert!(alpha_eq(&simplify_formula(&f), &p("\\z : int. k x z")));
        let g = p("exists u. u <= z + 1 /\\ z + 1 <= u /\\ k u");
        assert!(alpha_eq(&simplify_formula(&g), &p("k (z + 1)")));
    }

    #[test]
    fn false_branches_disappear() {
        let f = p("(\\w : int. false) 3 \\/ q 1");
        assert!(alpha_eq(&simplify_formula(&f), &p("q 1")));
        let g = p("exists u. k u /\\ false");
        assert!(simplify_formula(&g).is_false());
    }

    #[test]
    fn dead_definitions_are_folded() {
        let es = crate::parse::parse_system(
            "%ENV\nF : int -> prop;\nG : int -> prop;\n%DEFS\nF x =mu false;\nG x =mu F x \\/ x <= 0 /\\ G (x + 1);\n%MAIN G 0;\n",
        )
        .unwrap();
        let s = simplify(&es);
        assert!(!s.defs[1].body.occurs_free(&Ident::new("F")));
        assert!(matches!(s.defs[1].body, Formula::And(..)));
        assert_eq!(simplify(&s), s);
    }
}
