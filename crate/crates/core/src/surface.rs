//! Surface syntax tree produced by the parser and its elaboration into core
//! formulas. Elaboration removes comparison sugar and uses sort information
//! to tell integer arguments from formula arguments.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::formula::{Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;
use crate::typeck::SimpleTypeEnv;

pub type Pos = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Gt,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Ident(Ident),
    Num(BigInt),
    True,
    False,
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Mu(Ident, Sort, Box<Expr>),
    Lam(Ident, Sort, Box<Expr>),
    Exists(Ident, Box<Expr>),
    Tuple(Vec<Expr>),
    Paren(Box<Expr>),
}

fn err(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.0,
        col: pos.1,
        msg: msg.into(),
    }
}

/// `e1 op e2` as a single comparison, or as a two-atom conjunction for `=`.
fn compare(op: CmpOp, a: IntExpr, b: IntExpr) -> Vec<(IntExpr, IntExpr)> {
    let one = || IntExpr::lit(1);
    match op {
        CmpOp::Le => vec![(a, b)],
        CmpOp::Lt => vec![(IntExpr::add(a, one()), b)],
        CmpOp::Gt => vec![(IntExpr::add(b, one()), a)],
        CmpOp::Ge => vec![(b, a)],
        CmpOp::Eq => vec![(a.clone(), b.clone()), (b, a)],
    }
}

pub struct Elaborator<'a> {
    globals: &'a SimpleTypeEnv,
    scope: Vec<(Ident, Sort)>,
}

impl<'a> Elaborator<'a> {
    pub fn new(globals: &'a SimpleTypeEnv) -> Self {
        Elaborator {
            globals,
            scope: Vec::new(),
        }
    }

    pub fn with_locals(globals: &'a SimpleTypeEnv, locals: Vec<(Ident, Sort)>) -> Self {
        Elaborator {
            globals,
            scope: locals,
        }
    }

    fn lookup(&self, x: &Ident) -> Option<&Sort> {
        self.scope
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, s)| s)
            .or_else(|| self.globals.get(x))
    }

    pub fn int(&mut self, e: &Expr) -> Result<IntExpr> {
        Ok(match &e.kind {
            ExprKind::Num(n) => IntExpr::Lit(n.clone()),
            ExprKind::Ident(x) => match self.lookup(x) {
                None | Some(Sort::Int) => IntExpr::Var(x.clone()),
                Some(s) => {
                    return Err(err(e.pos, format!("`{x}` has sort {s}, expected int")));
                }
            },
            ExprKind::Add(a, b) => IntExpr::Add(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            ExprKind::Sub(a, b) => {
                let a = self.int(a)?;
                let b = self.int(b)?;
                IntExpr::Add(Box::new(a), Box::new(IntExpr::neg(b)))
            }
            ExprKind::Mul(a, b) => IntExpr::Mul(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            ExprKind::Neg(a) => IntExpr::neg(self.int(a)?),
            ExprKind::Paren(a) => self.int(a)?,
            _ => return Err(err(e.pos, "expected an integer expression")),
        })
    }

    fn looks_int(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Num(_)
            | ExprKind::Add(..)
            | ExprKind::Sub(..)
            | ExprKind::Mul(..)
            | ExprKind::Neg(_) => true,
            ExprKind::Ident(x) => matches!(self.lookup(x), Some(Sort::Int)),
            ExprKind::Paren(a) => self.looks_int(a),
            _ => false,
        }
    }

    fn bind<T>(&mut self, x: &Ident, s: Sort, k: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push((x.clone(), s));
        let r = k(self);
        self.scope.pop();
        r
    }

    /// Elaborates in formula position; the sort is reported when it is
    /// determined locally.
    pub fn formula(&mut self, e: &Expr) -> Result<(Formula, Option<Sort>)> {
        Ok(match &e.kind {
            ExprKind::Ident(x) => match self.lookup(x) {
                Some(Sort::Int) => {
                    return Err(err(e.pos, format!("integer `{x}` used as a formula")));
                }
                s => (Formula::Var(x.clone()), s.cloned()),
            },
            ExprKind::True => (Formula::tt(), Some(Sort::Prop)),
            ExprKind::False => (Formula::ff(), Some(Sort::Prop)),
            ExprKind::Or(a, b) => {
                let (a, _) = self.formula(a)?;
                let (b, _) = self.formula(b)?;
                (Formula::or(a, b), Some(Sort::Prop))
            }
            ExprKind::And(..) => (self.conjunction(e)?, Some(Sort::Prop)),
            ExprKind::Cmp(op, a, b) => {
                let a = self.int(a)?;
                let b = self.int(b)?;
                let atoms = compare(*op, a, b);
                let f = guard_chain(atoms, None);
                (f, Some(Sort::Prop))
            }
            ExprKind::App(h, a) => {
                let (hf, hs) = self.formula(h)?;
                let (arg_is_int, res) = match &hs {
                    Some(Sort::Arrow(s, r)) => (**s == Sort::Int, Some((**r).clone())),
                    _ => (self.looks_int(a), None),
                };
                if arg_is_int {
                    (Formula::app_int(hf, self.int(a)?), res)
                } else {
                    let (af, _) = self.formula(a)?;
                    (Formula::app(hf, af), res)
                }
            }
            ExprKind::Mu(x, s, b) => {
                let (bf, _) = self.bind(x, s.clone(), |el| el.formula(b))?;
                (Formula::mu(x.clone(), s.clone(), bf), Some(s.clone()))
            }
            ExprKind::Lam(x, s, b) => {
                let (bf, bs) = self.bind(x, s.clone(), |el| el.formula(b))?;
                let st = bs.map(|t| Sort::arrow(s.clone(), t));
                (Formula::abs(x.clone(), s.clone(), bf), st)
            }
            ExprKind::Exists(x, b) => {
                let (bf, _) = self.bind(x, Sort::Int, |el| el.formula(b))?;
                (Formula::exists(x.clone(), bf), Some(Sort::Prop))
            }
            ExprKind::Tuple(cs) => {
                let mut fs = Vec::new();
                let mut ss = Some(Vec::new());
                for c in cs {
                    let (f, s) = self.formula(c)?;
                    fs.push(f);
                    ss = match (ss, s) {
                        (Some(mut v), Some(s)) => {
                            v.push(s);
                            Some(v)
                        }
                        _ => None,
                    };
                }
                (Formula::Tuple(fs), ss.map(Sort::Product))
            }
            ExprKind::Paren(a) => self.formula(a)?,
            ExprKind::Num(_)
            | ExprKind::Add(..)
            | ExprKind::Sub(..)
            | ExprKind::Mul(..)
            | ExprKind::Neg(_) => {
                return Err(err(e.pos, "integer expression used as a formula"));
            }
        })
    }

    /// An unparenthesized `/\` chain is rebuilt right-nested, so that a
    /// sequence of comparison guards stays in `e1 <= e2 /\ φ` shape.
    fn conjunction(&mut self, e: &Expr) -> Result<Formula> {
        let mut items = Vec::new();
        flatten_and(e, &mut items);
        let mut acc: Option<Formula> = None;
        for item in items.into_iter().rev() {
            acc = Some(match &item.kind {
                ExprKind::Cmp(op, a, b) => {
                    let a = self.int(a)?;
                    let b = self.int(b)?;
                    guard_chain(compare(*op, a, b), acc)
                }
                _ => {
                    let (f, _) = self.formula(item)?;
                    match acc {
                        None => f,
                        Some(rest) => Formula::and(f, rest),
                    }
                }
            });
        }
        Ok(acc.expect("conjunction has at least two items"))
    }
}

fn flatten_and<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    match &e.kind {
        ExprKind::And(a, b) => {
            flatten_and(a, out);
            out.push(b);
        }
        _ => out.push(e),
    }
}

/// `a1 ≤ b1 ∧ (a2 ≤ b2 ∧ ... rest)`; without `rest` the last atom stands alone.
fn guard_chain(atoms: Vec<(IntExpr, IntExpr)>, rest: Option<Formula>) -> Formula {
    let mut acc = rest;
    for (a, b) in atoms.into_iter().rev() {
        let atom = Formula::le(a, b);
        acc = Some(match acc {
            None => atom,
            Some(r) => Formula::and(atom, r),
        });
    }
    acc.expect("at least one atom")
}

/// Removes comparison sugar from a closed surface formula.
pub fn desugar(e: &Expr) -> Result<Formula> {
    let env = SimpleTypeEnv::new();
    Ok(Elaborator::new(&env).formula(e)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_surface};

    fn d(s: &str) -> Formula {
        desugar(&parse_surface(s).unwrap()).unwrap()
    }

    #[test]
    fn greater_than_guard() {
        let f = d("\\k : prop. x > 0 /\\ k");
        let want = Formula::abs(
            "k",
            Sort::Prop,
            Formula::and(Formula::le(IntExpr::lit(1), IntExpr::var("x")), Formula::var("k")),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn equality_guard_nests_right() {
        let f = d("\\k : int -> prop. x = 0 /\\ k 0");
        let body = Formula::and(
            Formula::le(IntExpr::var("x"), IntExpr::lit(0)),
            Formula::and(
                Formula::le(IntExpr::lit(0), IntExpr::var("x")),
                Formula::app_int(Formula::var("k"), IntExpr::lit(0)),
            ),
        );
        assert_eq!(f, Formula::abs("k", Sort::int_pred(1), body));
    }

    #[test]
    fn strict_less_than() {
        let f = d("r < n");
        assert_eq!(
            f,
            Formula::le(IntExpr::add(IntExpr::var("r"), IntExpr::lit(1)), IntExpr::var("n"))
        );
    }

    #[test]
    fn guard_chains_stay_disjunctive() {
        let f = parse_formula("\\k : prop. 0 < 1 /\\ 2 >= 1 /\\ 3 = 3 /\\ k").unwrap();
        assert!(crate::formula::is_disjunctive(&f));
    }

    #[test]
    fn argument_kind_follows_sorts() {
        let f = parse_formula("\\f : int -> prop. \\g : prop -> prop. \\y : int. f y \\/ g (f y)")
            .unwrap();
        assert!(crate::typeck::typecheck(&SimpleTypeEnv::new(), &f).is_ok());
    }
}
