//! Call-by-name game terms and their translation to formulas.
//!
//! ```text
//! M ::= () | fail | x | fun x : s -> M | M M | M e | fix f : s . M
//!     | M <&> M        demonic choice (opponent)
//!     | M <+> M        angelic choice (player)
//!     | assume e1 <= e2; M
//!     | if e1 <= e2 then M else M
//! s ::= int | unit | s -> s
//! ```
//!
//! `fail` is the event the player wants to reach; `()` is a dead end.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::formula::{Formula, IntExpr};
use crate::ident::Ident;
use crate::parse::{Parser, Tok};
use crate::sort::Sort;
use crate::surface::Pos;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum TermSort {
    Int,
    Unit,
    Arrow(Box<TermSort>, Box<TermSort>),
}

impl TermSort {
    pub fn arrow(a: TermSort, r: TermSort) -> TermSort {
        TermSort::Arrow(Box::new(a), Box::new(r))
    }

    pub fn order(&self) -> i64 {
        match self {
            TermSort::Int => -1,
            TermSort::Unit => 0,
            TermSort::Arrow(a, r) => r.order().max(a.order() + 1),
        }
    }

    /// `int ↦ int`, `unit ↦ prop`.
    pub fn to_sort(&self) -> Sort {
        match self {
            TermSort::Int => Sort::Int,
            TermSort::Unit => Sort::Prop,
            TermSort::Arrow(a, r) => Sort::arrow(a.to_sort(), r.to_sort()),
        }
    }

    fn is_predicate(&self) -> bool {
        match self {
            TermSort::Int => false,
            TermSort::Unit => true,
            TermSort::Arrow(_, r) => r.is_predicate(),
        }
    }
}

impl fmt::Display for TermSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermSort::Int => f.write_str("int"),
            TermSort::Unit => f.write_str("unit"),
            TermSort::Arrow(a, r) => {
                if matches!(**a, TermSort::Arrow(..)) {
                    write!(f, "({a}) -> {r}")
                } else {
                    write!(f, "{a} -> {r}")
                }
            }
        }
    }
}

impl fmt::Debug for TermSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Unit,
    Err,
    Var(Ident),
    Abs(Ident, TermSort, Box<Term>),
    App(Box<Term>, Box<Term>),
    AppInt(Box<Term>, IntExpr),
    Fix(Ident, TermSort, Box<Term>),
    Demonic(Box<Term>, Box<Term>),
    Angelic(Box<Term>, Box<Term>),
    Assume((IntExpr, IntExpr), Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(Ident::new(x))
    }
    pub fn abs(x: &str, s: TermSort, b: Term) -> Term {
        Term::Abs(Ident::new(x), s, Box::new(b))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn app_int(f: Term, e: IntExpr) -> Term {
        Term::AppInt(Box::new(f), e)
    }
    pub fn fix(x: &str, s: TermSort, b: Term) -> Term {
        Term::Fix(Ident::new(x), s, Box::new(b))
    }
    pub fn demonic(a: Term, b: Term) -> Term {
        Term::Demonic(Box::new(a), Box::new(b))
    }
    pub fn angelic(a: Term, b: Term) -> Term {
        Term::Angelic(Box::new(a), Box::new(b))
    }
    pub fn assume(a: IntExpr, b: IntExpr, body: Term) -> Term {
        Term::Assume((a, b), Box::new(body))
    }

    /// `if a ≤ b then t else e` as `(assume a ≤ b; t) <+> (assume b+1 ≤ a; e)`.
    pub fn if_le(a: IntExpr, b: IntExpr, then: Term, els: Term) -> Term {
        let neg = Term::assume(IntExpr::add(b.clone(), IntExpr::lit(1)), a.clone(), els);
        Term::angelic(Term::assume(a, b, then), neg)
    }

    /// Largest order of a `fix` annotation.
    pub fn order(&self) -> i64 {
        match self {
            Term::Unit | Term::Err | Term::Var(_) => 0,
            Term::Abs(_, _, b) | Term::Assume(_, b) | Term::AppInt(b, _) => b.order(),
            Term::Fix(_, s, b) => s.order().max(b.order()),
            Term::App(a, b) | Term::Demonic(a, b) | Term::Angelic(a, b) => a.order().max(b.order()),
        }
    }

    pub fn uses_demonic(&self) -> bool {
        match self {
            Term::Unit | Term::Err | Term::Var(_) => false,
            Term::Demonic(..) => true,
            Term::Abs(_, _, b) | Term::Assume(_, b) | Term::AppInt(b, _) | Term::Fix(_, _, b) => {
                b.uses_demonic()
            }
            Term::App(a, b) | Term::Angelic(a, b) => a.uses_demonic() || b.uses_demonic(),
        }
    }

    fn free_into(&self, bound: &mut Vec<Ident>, out: &mut HashSet<Ident>) {
        let int = |e: &IntExpr, bound: &Vec<Ident>, out: &mut HashSet<Ident>| {
            for x in e.free_vars() {
                if !bound.contains(&x) {
                    out.insert(x);
                }
            }
        };
        match self {
            Term::Unit | Term::Err => {}
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, _, b) | Term::Fix(x, _, b) => {
                bound.push(x.clone());
                b.free_into(bound, out);
                bound.pop();
            }
            Term::App(a, b) | Term::Demonic(a, b) | Term::Angelic(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Term::AppInt(a, e) => {
                a.free_into(bound, out);
                int(e, bound, out);
            }
            Term::Assume((l, r), b) => {
                int(l, bound, out);
                int(r, bound, out);
                b.free_into(bound, out);
            }
        }
    }

    pub fn free_vars(&self) -> HashSet<Ident> {
        let mut out = HashSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }
}

pub type TermEnv = Vec<(Ident, TermSort)>;

fn lookup<'e>(env: &'e TermEnv, x: &Ident) -> Result<&'e TermSort> {
    env.iter()
        .rev()
        .find(|(y, _)| y == x)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::UnboundVariable(x.clone()))
}

fn check_int_expr(env: &TermEnv, e: &IntExpr) -> Result<()> {
    for x in e.free_vars() {
        let s = lookup(env, &x)?;
        if *s != TermSort::Int {
            return Err(Error::type_error(x.to_string(), "int", s));
        }
    }
    Ok(())
}

/// Simple type system of game terms.
pub fn typecheck_term(env: &TermEnv, t: &Term) -> Result<TermSort> {
    fn go(env: &mut TermEnv, t: &Term) -> Result<TermSort> {
        match t {
            Term::Unit | Term::Err => Ok(TermSort::Unit),
            Term::Var(x) => Ok(lookup(env, x)?.clone()),
            Term::Abs(x, s, b) => {
                env.push((x.clone(), s.clone()));
                let r = go(env, b);
                env.pop();
                let r = r?;
                if !r.is_predicate() {
                    return Err(Error::type_error(format!("body of fun {x}"), "a unit-valued type", &r));
                }
                Ok(TermSort::arrow(s.clone(), r))
            }
            Term::Fix(x, s, b) => {
                if !s.is_predicate() {
                    return Err(Error::type_error(format!("fix {x}"), "a unit-valued type", s));
                }
                env.push((x.clone(), s.clone()));
                let r = go(env, b);
                env.pop();
                let r = r?;
                if r != *s {
                    return Err(Error::type_error(format!("body of fix {x}"), s, &r));
                }
                Ok(r)
            }
            Term::App(h, a) => {
                let hs = go(env, h)?;
                let as_ = go(env, a)?;
                match hs {
                    TermSort::Arrow(p, r) if *p == as_ && as_ != TermSort::Int => Ok(*r),
                    other => Err(Error::type_error(
                        format!("application of {h:?}"),
                        format!("{as_} -> _"),
                        other,
                    )),
                }
            }
            Term::AppInt(h, e) => {
                check_int_expr(env, e)?;
                match go(env, h)? {
                    TermSort::Arrow(p, r) if *p == TermSort::Int => Ok(*r),
                    other => Err(Error::type_error(format!("application of {h:?}"), "int -> _", other)),
                }
            }
            Term::Demonic(a, b) | Term::Angelic(a, b) => {
                for x in [a, b] {
                    let s = go(env, x)?;
                    if s != TermSort::Unit {
                        return Err(Error::type_error("choice branch", "unit", s));
                    }
                }
                Ok(TermSort::Unit)
            }
            Term::Assume((l, r), b) => {
                check_int_expr(env, l)?;
                check_int_expr(env, r)?;
                let s = go(env, b)?;
                if s != TermSort::Unit {
                    return Err(Error::type_error("assume body", "unit", s));
                }
                Ok(TermSort::Unit)
            }
        }
    }
    go(&mut env.clone(), t)
}

fn translate(t: &Term) -> Formula {
    match t {
        Term::Unit => Formula::ff(),
        Term::Err => Formula::tt(),
        Term::Var(x) => Formula::Var(x.clone()),
        Term::Abs(x, s, b) => Formula::abs(x.clone(), s.to_sort(), translate(b)),
        Term::App(a, b) => Formula::app(translate(a), translate(b)),
        Term::AppInt(a, e) => Formula::app_int(translate(a), e.clone()),
        Term::Fix(x, s, b) => Formula::mu(x.clone(), s.to_sort(), translate(b)),
        Term::Demonic(a, b) => Formula::and(translate(a), translate(b)),
        Term::Angelic(a, b) => Formula::or(translate(a), translate(b)),
        Term::Assume((l, r), b) => Formula::and(Formula::le(l.clone(), r.clone()), translate(b)),
    }
}

/// The homomorphic translation; the player wins iff the formula is valid.
pub fn to_formula(t: &Term) -> Result<Formula> {
    let fv = t.free_vars();
    if let Some(x) = fv.iter().min() {
        return Err(Error::NotClosed(x.to_string()));
    }
    if typecheck_term(&Vec::new(), t)? != TermSort::Unit {
        return Err(Error::NotUnit);
    }
    Ok(translate(t))
}

// ---------------------------------------------------------------------------
// Parsing

const TERM_KEYWORDS: [&str; 9] = ["fun", "fix", "assume", "if", "then", "else", "fail", "int", "unit"];

enum Raw {
    Unit,
    Fail,
    Var(Ident, Pos),
    Num(BigInt),
    Add(Box<Raw>, Box<Raw>),
    Sub(Box<Raw>, Box<Raw>),
    Mul(Box<Raw>, Box<Raw>),
    Neg(Box<Raw>),
    App(Box<Raw>, Box<Raw>, Pos),
    Fun(Ident, TermSort, Box<Raw>),
    Fix(Ident, TermSort, Box<Raw>),
    Choice(bool, Box<Raw>, Box<Raw>),
    Assume(Box<Cmp>, Box<Raw>),
    If(Box<Cmp>, Box<Raw>, Box<Raw>),
}

struct Cmp {
    op: Tok,
    lhs: Raw,
    rhs: Raw,
    pos: Pos,
}

struct TermParser {
    p: Parser,
}

impl TermParser {
    fn at(&self, kw: &str) -> bool {
        self.p.at_keyword(kw)
    }

    fn name(&mut self) -> Result<Ident> {
        if let Tok::Ident(s) = self.p.peek() {
            if TERM_KEYWORDS.contains(&s.as_str()) {
                return self.p.error(format!("keyword `{s}` used as a name"));
            }
        }
        self.p.ident()
    }

    fn sort(&mut self) -> Result<TermSort> {
        let a = match self.p.peek().clone() {
            Tok::Ident(s) if s == "int" => {
                self.p.bump();
                TermSort::Int
            }
            Tok::Ident(s) if s == "unit" => {
                self.p.bump();
                TermSort::Unit
            }
            Tok::LParen => {
                self.p.bump();
                let s = self.sort()?;
                self.p.expect(Tok::RParen)?;
                s
            }
            t => return self.p.error(format!("expected a type, found {t:?}")),
        };
        if *self.p.peek() == Tok::Arrow {
            self.p.bump();
            Ok(TermSort::arrow(a, self.sort()?))
        } else {
            Ok(a)
        }
    }

    fn at_binder(&self) -> bool {
        ["fun", "fix", "assume", "if"].iter().any(|k| self.at(k))
    }

    fn term(&mut self) -> Result<Raw> {
        if self.at("fun") {
            self.p.bump();
            let x = self.name()?;
            self.p.expect(Tok::Colon)?;
            let s = self.sort_until_arrow_body()?;
            let b = self.term()?;
            return Ok(Raw::Fun(x, s, Box::new(b)));
        }
        if self.at("fix") {
            self.p.bump();
            let x = self.name()?;
            self.p.expect(Tok::Colon)?;
            let s = self.sort()?;
            self.p.expect(Tok::Dot)?;
            let b = self.term()?;
            return Ok(Raw::Fix(x, s, Box::new(b)));
        }
        if self.at("assume") {
            self.p.bump();
            let c = self.cmp()?;
            self.p.expect(Tok::Semi)?;
            let b = self.term()?;
            return Ok(Raw::Assume(Box::new(c), Box::new(b)));
        }
        if self.at("if") {
            self.p.bump();
            let c = self.cmp()?;
            self.p.expect_keyword("then")?;
            let a = self.term()?;
            self.p.expect_keyword("else")?;
            let b = self.term()?;
            return Ok(Raw::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        self.angelic()
    }

    /// `fun x : s -> body`: the sort is read up to the last `->` before the body.
    /// A parenthesized sort is needed for arrow-typed binders.
    fn sort_until_arrow_body(&mut self) -> Result<TermSort> {
        let s = match self.p.peek().clone() {
            Tok::Ident(s) if s == "int" => {
                self.p.bump();
                TermSort::Int
            }
            Tok::Ident(s) if s == "unit" => {
                self.p.bump();
                TermSort::Unit
            }
            Tok::LParen => {
                self.p.bump();
                let s = self.sort()?;
                self.p.expect(Tok::RParen)?;
                s
            }
            t => return self.p.error(format!("expected a type, found {t:?}")),
        };
        self.p.expect(Tok::Arrow)?;
        Ok(s)
    }

    fn at_op(&self, mid: Tok) -> bool {
        *self.p.peek() == Tok::Lt && *self.p.peek_at(1) == mid && *self.p.peek_at(2) == Tok::Gt
    }

    fn operand(&mut self, next: fn(&mut Self) -> Result<Raw>) -> Result<Raw> {
        if self.at_binder() {
            self.term()
        } else {
            next(self)
        }
    }

    fn angelic(&mut self) -> Result<Raw> {
        let mut lhs = self.demonic()?;
        while self.at_op(Tok::Plus) {
            for _ in 0..3 {
                self.p.bump();
            }
            let rhs = self.operand(Self::demonic)?;
            lhs = Raw::Choice(true, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn demonic(&mut self) -> Result<Raw> {
        let mut lhs = self.arith()?;
        while self.at_op(Tok::Amp) {
            for _ in 0..3 {
                self.p.bump();
            }
            let rhs = self.operand(Self::arith)?;
            lhs = Raw::Choice(false, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Cmp> {
        let lhs = self.arith()?;
        let pos = self.p.here();
        let op = self.p.bump();
        if !matches!(op, Tok::Le | Tok::Lt | Tok::Eq | Tok::Gt | Tok::Ge) {
            return Err(Error::Parse {
                line: pos.0,
                col: pos.1,
                msg: format!("expected a comparison, found {op:?}"),
            });
        }
        let rhs = self.arith()?;
        Ok(Cmp { op, lhs, rhs, pos })
    }

    fn arith(&mut self) -> Result<Raw> {
        let mut lhs = self.product()?;
        loop {
            match self.p.peek() {
                Tok::Plus => {
                    self.p.bump();
                    lhs = Raw::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.p.bump();
                    lhs = Raw::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Raw> {
        let mut lhs = self.unary()?;
        while *self.p.peek() == Tok::Star {
            self.p.bump();
            lhs = Raw::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw> {
        if *self.p.peek() == Tok::Minus {
            self.p.bump();
            return Ok(match self.unary()? {
                Raw::Num(n) => Raw::Num(-n),
                r => Raw::Neg(Box::new(r)),
            });
        }
        let mut head = self.atom()?;
        loop {
            let starts_atom = match self.p.peek() {
                Tok::Ident(s) => !TERM_KEYWORDS.contains(&s.as_str()) || s == "fail",
                Tok::Num(_) | Tok::LParen => true,
                _ => false,
            };
            if !starts_atom {
                return Ok(head);
            }
            let pos = self.p.here();
            let arg = self.atom()?;
            head = Raw::App(Box::new(head), Box::new(arg), pos);
        }
    }

    fn atom(&mut self) -> Result<Raw> {
        let pos = self.p.here();
        match self.p.peek().clone() {
            Tok::Ident(s) if s == "fail" => {
                self.p.bump();
                Ok(Raw::Fail)
            }
            Tok::Ident(_) => Ok(Raw::Var(self.name()?, pos)),
            Tok::Num(n) => {
                self.p.bump();
                Ok(Raw::Num(n))
            }
            Tok::LParen => {
                self.p.bump();
                if *self.p.peek() == Tok::RParen {
                    self.p.bump();
                    return Ok(Raw::Unit);
                }
                let t = self.term()?;
                self.p.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.p.error(format!("unexpected {t:?}")),
        }
    }
}

fn perr(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.0,
        col: pos.1,
        msg: msg.into(),
    }
}

struct Elab {
    scope: TermEnv,
}

impl Elab {
    fn int(&self, r: &Raw) -> Result<IntExpr> {
        Ok(match r {
            Raw::Num(n) => IntExpr::Lit(n.clone()),
            Raw::Var(x, pos) => match lookup(&self.scope, x) {
                Ok(TermSort::Int) | Err(_) => IntExpr::Var(x.clone()),
                Ok(s) => return Err(perr(*pos, format!("`{x}` has type {s}, expected int"))),
            },
            Raw::Add(a, b) => IntExpr::Add(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            Raw::Sub(a, b) => IntExpr::Add(Box::new(self.int(a)?), Box::new(IntExpr::neg(self.int(b)?))),
            Raw::Mul(a, b) => IntExpr::Mul(Box::new(self.int(a)?), Box::new(self.int(b)?)),
            Raw::Neg(a) => IntExpr::neg(self.int(a)?),
            _ => return Err(Error::Parse { line: 0, col: 0, msg: "expected an integer expression".into() }),
        })
    }

    fn is_int(&self, r: &Raw) -> bool {
        match r {
            Raw::Num(_) | Raw::Add(..) | Raw::Sub(..) | Raw::Mul(..) | Raw::Neg(_) => true,
            Raw::Var(x, _) => matches!(lookup(&self.scope, x), Ok(TermSort::Int)),
            _ => false,
        }
    }

    /// Atoms of a comparison as `a ≤ b` pairs, conjoined.
    fn atoms(&self, c: &Cmp) -> Result<Vec<(IntExpr, IntExpr)>> {
        let a = self.int(&c.lhs)?;
        let b = self.int(&c.rhs)?;
        let one = || IntExpr::lit(1);
        Ok(match c.op {
            Tok::Le => vec![(a, b)],
            Tok::Lt => vec![(IntExpr::add(a, one()), b)],
            Tok::Gt => vec![(IntExpr::add(b, one()), a)],
            Tok::Ge => vec![(b, a)],
            Tok::Eq => vec![(a.clone(), b.clone()), (b, a)],
            _ => return Err(perr(c.pos, "expected a comparison")),
        })
    }

    fn assume_all(atoms: Vec<(IntExpr, IntExpr)>, body: Term) -> Term {
        atoms
            .into_iter()
            .rev()
            .fold(body, |acc, (a, b)| Term::assume(a, b, acc))
    }

    fn term(&mut self, r: &Raw) -> Result<Term> {
        Ok(match r {
            Raw::Unit => Term::Unit,
            Raw::Fail => Term::Err,
            Raw::Var(x, pos) => match lookup(&self.scope, x) {
                Ok(TermSort::Int) => return Err(perr(*pos, format!("integer `{x}` used as a term"))),
                _ => Term::Var(x.clone()),
            },
            Raw::Num(_) | Raw::Add(..) | Raw::Sub(..) | Raw::Mul(..) | Raw::Neg(_) => {
                return Err(Error::Parse { line: 0, col: 0, msg: "integer expression used as a term".into() })
            }
            Raw::App(h, a, pos) => {
                let head = self.term(h)?;
                let hs = typecheck_term(&self.scope, &head).ok();
                let int_arg = match &hs {
                    Some(TermSort::Arrow(p, _)) => **p == TermSort::Int,
                    Some(s) => return Err(perr(*pos, format!("applying a term of type {s}"))),
                    None => self.is_int(a),
                };
                if int_arg {
                    Term::app_int(head, self.int(a)?)
                } else {
                    Term::app(head, self.term(a)?)
                }
            }
            Raw::Fun(x, s, b) => {
                self.scope.push((x.clone(), s.clone()));
                let b = self.term(b);
                self.scope.pop();
                Term::Abs(x.clone(), s.clone(), Box::new(b?))
            }
            Raw::Fix(x, s, b) => {
                self.scope.push((x.clone(), s.clone()));
                let b = self.term(b);
                self.scope.pop();
                Term::Fix(x.clone(), s.clone(), Box::new(b?))
            }
            Raw::Choice(angelic, a, b) => {
                let (a, b) = (self.term(a)?, self.term(b)?);
                if *angelic {
                    Term::angelic(a, b)
                } else {
                    Term::demonic(a, b)
                }
            }
            Raw::Assume(c, b) => {
                let atoms = self.atoms(c)?;
                Self::assume_all(atoms, self.term(b)?)
            }
            Raw::If(c, a, b) => {
                let atoms = self.atoms(c)?;
                let then = Self::assume_all(atoms.clone(), self.term(a)?);
                let els = self.term(b)?;
                let one = || IntExpr::lit(1);
                let mut negs = atoms
                    .into_iter()
                    .map(|(l, r)| Term::assume(IntExpr::add(r, one()), l, els.clone()));
                let first = negs.next().expect("at least one atom");
                let els = negs.fold(first, Term::angelic);
                Term::angelic(then, els)
            }
        })
    }
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut tp = TermParser { p: Parser::new(src)? };
    let raw = tp.term()?;
    if !tp.p.at_eof() {
        return tp.p.error(format!("unexpected {:?}", tp.p.peek()));
    }
    Elab { scope: Vec::new() }.term(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::alpha_eq;
    use crate::parse::parse_formula;
    use crate::semantics::{search_valid, SearchBudget};

    pub(crate) const M_SUM: &str = "(fix sum : int -> (int -> unit) -> unit. \
        fun x : int -> fun k : (int -> unit) -> \
        (assume x < 0; fail) <+> (assume x = 0; k 0) <+> (assume x > 0; sum (x - 1) (fun y : int -> k (x + y)))) \
        N (fun r : int -> assume r < N; fail)";

    fn sum_term(n: i64) -> Term {
        parse_term(&M_SUM.replace('N', &format!("({n})"))).unwrap()
    }

    #[test]
    fn leaves() {
        assert_eq!(to_formula(&Term::Err).unwrap(), Formula::tt());
        assert_eq!(to_formula(&Term::Unit).unwrap(), Formula::ff());
        assert_eq!(typecheck_term(&Vec::new(), &Term::Err).unwrap(), TermSort::Unit);
    }

    #[test]
    fn sum_term_translates_to_the_sum_formula() {
        let t = sum_term(2);
        let sort = typecheck_term(&Vec::new(), &match &t {
            Term::App(h, _) => match &**h {
                Term::AppInt(f, _) => (**f).clone(),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        })
        .unwrap();
        assert_eq!(sort.to_string(), "int -> (int -> unit) -> unit");
        let f = to_formula(&t).unwrap();
        let want = parse_formula(
            "(mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. \
             x < 0 /\\ true \\/ x = 0 /\\ k 0 \\/ x > 0 /\\ sum (x - 1) (\\y : int. k (x + y))) 2 \
             (\\r : int. r < 2 /\\ true)",
        )
        .unwrap();
        assert!(alpha_eq(&f, &want), "{f}");
        assert_eq!(t.order(), 1);
        assert!(!t.uses_demonic());
        assert!(crate::formula::is_disjunctive(&f));
    }

    #[test]
    fn sum_term_wins_iff_negative() {
        for n in [-1, 1] {
            let f = to_formula(&sum_term(n)).unwrap();
            let v = search_valid(&f, &SearchBudget::default()).unwrap();
            assert_eq!(v.is_valid(), n < 0, "n = {n}: {v}");
        }
    }

    #[test]
    fn angelic_choice_of_fail() {
        let t = parse_term("fail <+> ()").unwrap();
        let f = to_formula(&t).unwrap();
        assert!(search_valid(&f, &SearchBudget::default()).unwrap().is_valid());
        let t = parse_term("fail <&> ()").unwrap();
        let f = to_formula(&t).unwrap();
        assert!(!search_valid(&f, &SearchBudget::default()).unwrap().is_valid());
    }

    #[test]
    fn conditional_expands_to_guarded_choice() {
        let t = parse_term("(fun x : int -> if x <= 3 then fail else ()) 5").unwrap();
        let u = parse_term("(fun x : int -> (assume x <= 3; fail) <+> (assume 3 + 1 <= x; ())) 5").unwrap();
        assert!(alpha_eq(&to_formula(&t).unwrap().fold_ints(), &to_formula(&u).unwrap().fold_ints()));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            typecheck_term(&Vec::new(), &Term::demonic(Term::Unit, Term::var("x"))),
            Err(Error::UnboundVariable(_))
        ));
        assert!(matches!(to_formula(&Term::var("x")), Err(Error::NotClosed(_))));
        let t = Term::abs("x", TermSort::Int, Term::Unit);
        assert!(matches!(to_formula(&t), Err(Error::NotUnit)));
    }
}
