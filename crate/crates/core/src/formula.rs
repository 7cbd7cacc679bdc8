//! Integer expressions and μHFL(Z) formulas, with the structural utilities
//! shared by every pass: free variables, capture-avoiding substitution,
//! alpha-equivalence, order and disjunctivity.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ident::Ident;
use crate::sort::Sort;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(BigInt),
    Var(Ident),
    Add(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn lit(n: i64) -> Self {
        IntExpr::Lit(BigInt::from(n))
    }

    pub fn var(x: impl Into<Ident>) -> Self {
        IntExpr::Var(x.into())
    }

    /// Addition with literal folding.
    pub fn add(a: IntExpr, b: IntExpr) -> Self {
        match (&a, &b) {
            (IntExpr::Lit(x), IntExpr::Lit(y)) => IntExpr::Lit(x + y),
            (_, IntExpr::Lit(y)) if y.is_zero() => a,
            (IntExpr::Lit(x), _) if x.is_zero() => b,
            _ => IntExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    /// Multiplication with literal folding.
    pub fn mul(a: IntExpr, b: IntExpr) -> Self {
        match (&a, &b) {
            (IntExpr::Lit(x), IntExpr::Lit(y)) => IntExpr::Lit(x * y),
            (IntExpr::Lit(x), _) if x.is_one() => b,
            (_, IntExpr::Lit(y)) if y.is_one() => a,
            _ => IntExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: IntExpr) -> Self {
        match a {
            IntExpr::Lit(x) => IntExpr::Lit(-x),
            a => IntExpr::mul(IntExpr::lit(-1), a),
        }
    }

    pub fn sub(a: IntExpr, b: IntExpr) -> Self {
        IntExpr::add(a, IntExpr::neg(b))
    }

    pub fn as_lit(&self) -> Option<&BigInt> {
        match self {
            IntExpr::Lit(n) => Some(n),
            _ => None,
        }
    }

    /// Evaluates under `env`; `None` if some variable is unassigned.
    pub fn eval_with(&self, env: &dyn Fn(&Ident) -> Option<BigInt>) -> Option<BigInt> {
        match self {
            IntExpr::Lit(n) => Some(n.clone()),
            IntExpr::Var(x) => env(x),
            IntExpr::Add(a, b) => Some(a.eval_with(env)? + b.eval_with(env)?),
            IntExpr::Mul(a, b) => Some(a.eval_with(env)? * b.eval_with(env)?),
        }
    }

    pub fn eval_closed(&self) -> Option<BigInt> {
        self.eval_with(&|_| None)
    }

    /// Folds every closed subexpression to a literal.
    pub fn fold(&self) -> IntExpr {
        match self {
            IntExpr::Lit(_) | IntExpr::Var(_) => self.clone(),
            IntExpr::Add(a, b) => IntExpr::add(a.fold(), b.fold()),
            IntExpr::Mul(a, b) => IntExpr::mul(a.fold(), b.fold()),
        }
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Ident>) {
        match self {
            IntExpr::Lit(_) => {}
            IntExpr::Var(x) => {
                out.insert(x.clone());
            }
            IntExpr::Add(a, b) | IntExpr::Mul(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut s = BTreeSet::new();
        self.free_vars_into(&mut s);
        s
    }

    pub fn mentions(&self, x: &Ident) -> bool {
        match self {
            IntExpr::Lit(_) => false,
            IntExpr::Var(y) => x == y,
            IntExpr::Add(a, b) | IntExpr::Mul(a, b) => a.mentions(x) || b.mentions(x),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            IntExpr::Lit(_) | IntExpr::Var(_) => 1,
            IntExpr::Add(a, b) | IntExpr::Mul(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn subst_rec(&self, sc: &Scope) -> Option<IntExpr> {
        match self {
            IntExpr::Lit(_) => None,
            IntExpr::Var(x) => match sc.lookup(x) {
                Repl::Keep => None,
                Repl::Rename(y) => Some(IntExpr::Var(y.clone())),
                Repl::Arg(Arg::I(e)) => Some(e.clone()),
                Repl::Arg(Arg::F(Formula::Var(y))) => Some(IntExpr::Var(y.clone())),
                Repl::Arg(Arg::F(f)) => {
                    panic!("substitute: formula `{f}` bound to integer variable `{x}`")
                }
            },
            IntExpr::Add(a, b) | IntExpr::Mul(a, b) => {
                let na = a.subst_rec(sc);
                let nb = b.subst_rec(sc);
                if na.is_none() && nb.is_none() {
                    return None;
                }
                let na = na.unwrap_or_else(|| (**a).clone());
                let nb = nb.unwrap_or_else(|| (**b).clone());
                Some(match self {
                    IntExpr::Add(..) => IntExpr::Add(Box::new(na), Box::new(nb)),
                    _ => IntExpr::Mul(Box::new(na), Box::new(nb)),
                })
            }
        }
    }

    pub fn substitute(&self, bindings: &HashMap<Ident, Arg>) -> IntExpr {
        let sc = Scope::new(bindings);
        self.subst_rec(&sc).unwrap_or_else(|| self.clone())
    }
}

impl From<i64> for IntExpr {
    fn from(n: i64) -> Self {
        IntExpr::lit(n)
    }
}

/// An actual argument: a formula or an integer expression.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Arg {
    F(Formula),
    I(IntExpr),
}

impl Arg {
    pub fn free_vars_into(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Arg::F(f) => f.free_vars_into(out),
            Arg::I(e) => e.free_vars_into(out),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Ident),
    Or(Arc<Formula>, Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Mu(Ident, Sort, Arc<Formula>),
    Abs(Ident, Sort, Arc<Formula>),
    App(Arc<Formula>, Arc<Formula>),
    AppInt(Arc<Formula>, IntExpr),
    Le(IntExpr, IntExpr),
    Exists(Ident, Arc<Formula>),
    Tuple(Vec<Formula>),
}

impl Formula {
    pub fn var(x: impl Into<Ident>) -> Self {
        Formula::Var(x.into())
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }
    pub fn mu(x: impl Into<Ident>, s: Sort, body: Formula) -> Self {
        Formula::Mu(x.into(), s, Arc::new(body))
    }
    pub fn abs(x: impl Into<Ident>, s: Sort, body: Formula) -> Self {
        Formula::Abs(x.into(), s, Arc::new(body))
    }
    /// `λx1:s1. ... λxn:sn. body`
    pub fn abs_many(binders: impl IntoIterator<Item = (Ident, Sort)>, body: Formula) -> Self {
        let bs: Vec<_> = binders.into_iter().collect();
        bs.into_iter()
            .rev()
            .fold(body, |acc, (x, s)| Formula::abs(x, s, acc))
    }
    pub fn app(f: Formula, a: Formula) -> Self {
        Formula::App(Arc::new(f), Arc::new(a))
    }
    pub fn app_int(f: Formula, e: IntExpr) -> Self {
        Formula::AppInt(Arc::new(f), e)
    }
    pub fn apply(f: Formula, a: Arg) -> Self {
        match a {
            Arg::F(a) => Formula::app(f, a),
            Arg::I(e) => Formula::app_int(f, e),
        }
    }
    pub fn apply_all(f: Formula, args: impl IntoIterator<Item = Arg>) -> Self {
        args.into_iter().fold(f, Formula::apply)
    }
    pub fn le(a: IntExpr, b: IntExpr) -> Self {
        Formula::Le(a, b)
    }
    pub fn exists(z: impl Into<Ident>, body: Formula) -> Self {
        Formula::Exists(z.into(), Arc::new(body))
    }
    pub fn exists_many(zs: impl IntoIterator<Item = Ident>, body: Formula) -> Self {
        let zs: Vec<_> = zs.into_iter().collect();
        zs.into_iter().rev().fold(body, |acc, z| Formula::exists(z, acc))
    }
    /// A tuple, except that a single component stands for itself.
    pub fn tuple(mut comps: Vec<Formula>) -> Self {
        if comps.len() == 1 {
            comps.pop().unwrap()
        } else {
            Formula::Tuple(comps)
        }
    }
    pub fn tt() -> Self {
        Formula::Le(IntExpr::lit(0), IntExpr::lit(0))
    }
    pub fn ff() -> Self {
        Formula::Le(IntExpr::lit(1), IntExpr::lit(0))
    }
    /// `a = b ∧ body`, encoded as `a ≤ b ∧ (b ≤ a ∧ body)`.
    pub fn eq_guard(a: IntExpr, b: IntExpr, body: Formula) -> Self {
        Formula::and(
            Formula::le(a.clone(), b.clone()),
            Formula::and(Formula::le(b, a), body),
        )
    }
    /// `∧_p (a_p = b_p)`, `TRUE` for empty input.
    pub fn eq_all(pairs: Vec<(IntExpr, IntExpr)>) -> Self {
        let mut acc: Option<Formula> = None;
        for (a, b) in pairs.into_iter().rev() {
            acc = Some(match acc {
                None => Formula::and(Formula::le(a.clone(), b.clone()), Formula::le(b, a)),
                Some(rest) => Formula::eq_guard(a, b, rest),
            });
        }
        acc.unwrap_or_else(Formula::tt)
    }
    pub fn or_all(items: Vec<Formula>) -> Self {
        let mut it = items.into_iter();
        let first = it.next().unwrap_or_else(Formula::ff);
        it.fold(first, Formula::or)
    }

    /// `Some(b)` when the formula is a comparison between closed integer expressions.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Formula::Le(a, b) => Some(a.eval_closed()? <= b.eval_closed()?),
            _ => None,
        }
    }
    pub fn is_true(&self) -> bool {
        self.as_bool() == Some(true)
    }
    pub fn is_false(&self) -> bool {
        self.as_bool() == Some(false)
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Formula, Vec<Arg>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::App(f, a) => {
                    args.push(Arg::F((**a).clone()));
                    cur = f;
                }
                Formula::AppInt(f, e) => {
                    args.push(Arg::I(e.clone()));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<Ident>) {
        fn go(f: &Formula, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
            match f {
                Formula::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Mu(x, _, b) | Formula::Abs(x, _, b) | Formula::Exists(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Formula::AppInt(a, e) => {
                    go(a, bound, out);
                    int_fv(e, bound, out);
                }
                Formula::Le(a, b) => {
                    int_fv(a, bound, out);
                    int_fv(b, bound, out);
                }
                Formula::Tuple(cs) => cs.iter().for_each(|c| go(c, bound, out)),
            }
        }
        fn int_fv(e: &IntExpr, bound: &[Ident], out: &mut BTreeSet<Ident>) {
            let mut s = BTreeSet::new();
            e.free_vars_into(&mut s);
            out.extend(s.into_iter().filter(|x| !bound.contains(x)));
        }
        go(self, &mut Vec::new(), out)
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut s = BTreeSet::new();
        self.free_vars_into(&mut s);
        s
    }

    pub fn occurs_free(&self, x: &Ident) -> bool {
        match self {
            Formula::Var(y) => x == y,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                a.occurs_free(x) || b.occurs_free(x)
            }
            Formula::Mu(y, _, b) | Formula::Abs(y, _, b) | Formula::Exists(y, b) => {
                y != x && b.occurs_free(x)
            }
            Formula::AppInt(a, e) => a.occurs_free(x) || e.mentions(x),
            Formula::Le(a, b) => a.mentions(x) || b.mentions(x),
            Formula::Tuple(cs) => cs.iter().any(|c| c.occurs_free(x)),
        }
    }

    /// Number of free occurrences of `x`.
    pub fn count_free(&self, x: &Ident) -> usize {
        fn ie(e: &IntExpr, x: &Ident) -> usize {
            match e {
                IntExpr::Lit(_) => 0,
                IntExpr::Var(y) => usize::from(x == y),
                IntExpr::Add(a, b) | IntExpr::Mul(a, b) => ie(a, x) + ie(b, x),
            }
        }
        match self {
            Formula::Var(y) => usize::from(x == y),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                a.count_free(x) + b.count_free(x)
            }
            Formula::Mu(y, _, b) | Formula::Abs(y, _, b) | Formula::Exists(y, b) => {
                if y == x {
                    0
                } else {
                    b.count_free(x)
                }
            }
            Formula::AppInt(a, e) => a.count_free(x) + ie(e, x),
            Formula::Le(a, b) => ie(a, x) + ie(b, x),
            Formula::Tuple(cs) => cs.iter().map(|c| c.count_free(x)).sum(),
        }
    }

    /// Number of AST nodes, integer expressions included.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Mu(_, _, b) | Formula::Abs(_, _, b) | Formula::Exists(_, b) => 1 + b.size(),
            Formula::AppInt(a, e) => 1 + a.size() + e.size(),
            Formula::Le(a, b) => 1 + a.size() + b.size(),
            Formula::Tuple(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Simultaneous capture-avoiding substitution.
    ///
    /// Panics if a non-variable formula is bound to a name used as an integer;
    /// use [`substitute_checked`] for sort-checked substitution.
    pub fn substitute(&self, bindings: &HashMap<Ident, Arg>) -> Formula {
        if bindings.is_empty() {
            return self.clone();
        }
        let sc = Scope::new(bindings);
        let mut sc = sc;
        self.subst_rec(&mut sc).unwrap_or_else(|| self.clone())
    }

    pub fn subst1(&self, x: &Ident, a: Arg) -> Formula {
        let mut m = HashMap::new();
        m.insert(x.clone(), a);
        self.substitute(&m)
    }

    pub fn rename(&self, x: &Ident, y: &Ident) -> Formula {
        self.subst1(x, Arg::F(Formula::Var(y.clone())))
    }

    fn subst_rec(&self, sc: &mut Scope) -> Option<Formula> {
        match self {
            Formula::Var(x) => match sc.lookup(x) {
                Repl::Keep => None,
                Repl::Rename(y) => Some(Formula::Var(y.clone())),
                Repl::Arg(Arg::F(f)) => Some(f.clone()),
                Repl::Arg(Arg::I(IntExpr::Var(y))) => Some(Formula::Var(y.clone())),
                Repl::Arg(Arg::I(e)) => {
                    panic!("substitute: integer `{e}` bound to formula variable `{x}`")
                }
            },
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                let na = a.subst_rec(sc);
                let nb = b.subst_rec(sc);
                if na.is_none() && nb.is_none() {
                    return None;
                }
                let na = na.map(Arc::new).unwrap_or_else(|| a.clone());
                let nb = nb.map(Arc::new).unwrap_or_else(|| b.clone());
                Some(match self {
                    Formula::Or(..) => Formula::Or(na, nb),
                    Formula::And(..) => Formula::And(na, nb),
                    _ => Formula::App(na, nb),
                })
            }
            Formula::Mu(x, _, b) | Formula::Abs(x, _, b) | Formula::Exists(x, b) => {
                let s = match self {
                    Formula::Mu(_, s, _) | Formula::Abs(_, s, _) => s,
                    _ => &Sort::Int,
                };
                let newx = sc.enter(x);
                let nb = b.subst_rec(sc);
                sc.leave();
                if newx.is_none() && nb.is_none() {
                    return None;
                }
                let x2 = newx.unwrap_or_else(|| x.clone());
                let nb = nb.map(Arc::new).unwrap_or_else(|| b.clone());
                Some(match self {
                    Formula::Mu(..) => Formula::Mu(x2, s.clone(), nb),
                    Formula::Abs(..) => Formula::Abs(x2, s.clone(), nb),
                    _ => Formula::Exists(x2, nb),
                })
            }
            Formula::AppInt(a, e) => {
                let na = a.subst_rec(sc);
                let ne = e.subst_rec(sc);
                if na.is_none() && ne.is_none() {
                    return None;
                }
                Some(Formula::AppInt(
                    na.map(Arc::new).unwrap_or_else(|| a.clone()),
                    ne.unwrap_or_else(|| e.clone()),
                ))
            }
            Formula::Le(a, b) => {
                let na = a.subst_rec(sc);
                let nb = b.subst_rec(sc);
                if na.is_none() && nb.is_none() {
                    return None;
                }
                Some(Formula::Le(
                    na.unwrap_or_else(|| a.clone()),
                    nb.unwrap_or_else(|| b.clone()),
                ))
            }
            Formula::Tuple(cs) => {
                let ns: Vec<Option<Formula>> = cs.iter().map(|c| c.subst_rec(sc)).collect();
                if ns.iter().all(Option::is_none) {
                    return None;
                }
                Some(Formula::Tuple(
                    ns.into_iter()
                        .zip(cs)
                        .map(|(n, c)| n.unwrap_or_else(|| c.clone()))
                        .collect(),
                ))
            }
        }
    }

    /// Folds closed integer subexpressions everywhere.
    pub fn fold_ints(&self) -> Formula {
        self.map_ints(&|e| e.fold())
    }

    pub fn map_ints(&self, g: &dyn Fn(&IntExpr) -> IntExpr) -> Formula {
        match self {
            Formula::Var(_) => self.clone(),
            Formula::Or(a, b) => Formula::or(a.map_ints(g), b.map_ints(g)),
            Formula::And(a, b) => Formula::and(a.map_ints(g), b.map_ints(g)),
            Formula::App(a, b) => Formula::app(a.map_ints(g), b.map_ints(g)),
            Formula::Mu(x, s, b) => Formula::mu(x.clone(), s.clone(), b.map_ints(g)),
            Formula::Abs(x, s, b) => Formula::abs(x.clone(), s.clone(), b.map_ints(g)),
            Formula::Exists(x, b) => Formula::exists(x.clone(), b.map_ints(g)),
            Formula::AppInt(a, e) => Formula::app_int(a.map_ints(g), g(e)),
            Formula::Le(a, b) => Formula::le(g(a), g(b)),
            Formula::Tuple(cs) => Formula::Tuple(cs.iter().map(|c| c.map_ints(g)).collect()),
        }
    }

    pub fn contains_tuple(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Le(..) => false,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                a.contains_tuple() || b.contains_tuple()
            }
            Formula::Mu(_, s, b) | Formula::Abs(_, s, b) => {
                s.contains_product() || b.contains_tuple()
            }
            Formula::Exists(_, b) => b.contains_tuple(),
            Formula::AppInt(a, _) => a.contains_tuple(),
            Formula::Tuple(_) => true,
        }
    }

    /// PLAIN: no tuples and no product sorts.
    pub fn is_plain(&self) -> bool {
        !self.contains_tuple()
    }

    pub fn contains_exists(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Exists(..)))
    }

    pub fn contains_mu(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Mu(..)))
    }

    pub fn any_node(&self, p: &dyn Fn(&Formula) -> bool) -> bool {
        if p(self) {
            return true;
        }
        match self {
            Formula::Var(_) | Formula::Le(..) => false,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                a.any_node(p) || b.any_node(p)
            }
            Formula::Mu(_, _, b) | Formula::Abs(_, _, b) | Formula::Exists(_, b) => b.any_node(p),
            Formula::AppInt(a, _) => a.any_node(p),
            Formula::Tuple(cs) => cs.iter().any(|c| c.any_node(p)),
        }
    }

    /// All binder names in the formula, in pre-order.
    pub fn binders(&self) -> Vec<Ident> {
        fn go(f: &Formula, out: &mut Vec<Ident>) {
            match f {
                Formula::Var(_) | Formula::Le(..) => {}
                Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Mu(x, _, b) | Formula::Abs(x, _, b) | Formula::Exists(x, b) => {
                    out.push(x.clone());
                    go(b, out);
                }
                Formula::AppInt(a, _) => go(a, out),
                Formula::Tuple(cs) => cs.iter().for_each(|c| go(c, out)),
            }
        }
        let mut v = Vec::new();
        go(self, &mut v);
        v
    }
}

pub fn order_of_formula(f: &Formula) -> i64 {
    fn go(f: &Formula) -> i64 {
        match f {
            Formula::Var(_) | Formula::Le(..) => 0,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => go(a).max(go(b)),
            Formula::Mu(_, s, b) => s.order().max(go(b)),
            Formula::Abs(_, _, b) | Formula::Exists(_, b) => go(b),
            Formula::AppInt(a, _) => go(a),
            Formula::Tuple(cs) => cs.iter().map(go).max().unwrap_or(0),
        }
    }
    go(f).max(0)
}

/// Every conjunction has the shape `e1 ≤ e2 ∧ φ`.
pub fn is_disjunctive(f: &Formula) -> bool {
    !f.any_node(&|g| matches!(g, Formula::And(a, _) if !matches!(**a, Formula::Le(..))))
}

pub fn free_vars(f: &Formula) -> BTreeSet<Ident> {
    f.free_vars()
}

pub fn substitute(f: &Formula, bindings: &HashMap<Ident, Arg>) -> Formula {
    f.substitute(bindings)
}

/// Substitution that first checks every binding against the sort of the
/// variable it replaces, as recorded in `env` (innermost binding last).
pub fn substitute_checked(
    env: &crate::typeck::SimpleTypeEnv,
    f: &Formula,
    bindings: &HashMap<Ident, Arg>,
) -> Result<Formula> {
    for (x, a) in bindings {
        let want = env
            .get(x)
            .ok_or_else(|| Error::UnboundVariable(x.clone()))?
            .clone();
        let got = match a {
            Arg::I(e) => {
                crate::typeck::check_int(env, e)?;
                Sort::Int
            }
            Arg::F(g) => crate::typeck::typecheck(env, g)?,
        };
        if got != want {
            return Err(Error::SortMismatch(format!(
                "`{x}` has sort {want} but is bound to a term of sort {got}"
            )));
        }
    }
    Ok(f.substitute(bindings))
}

enum Repl<'a> {
    Keep,
    Rename(&'a Ident),
    Arg(&'a Arg),
}

struct Scope<'a> {
    base: &'a HashMap<Ident, Arg>,
    overlay: Vec<(Ident, Option<Ident>)>,
    range_fv: BTreeSet<Ident>,
}

impl<'a> Scope<'a> {
    fn new(base: &'a HashMap<Ident, Arg>) -> Self {
        let mut range_fv = BTreeSet::new();
        for a in base.values() {
            a.free_vars_into(&mut range_fv);
        }
        Scope {
            base,
            overlay: Vec::new(),
            range_fv,
        }
    }

    fn lookup(&self, x: &Ident) -> Repl<'_> {
        for (y, r) in self.overlay.iter().rev() {
            if y == x {
                return match r {
                    Some(z) => Repl::Rename(z),
                    None => Repl::Keep,
                };
            }
        }
        match self.base.get(x) {
            Some(a) => Repl::Arg(a),
            None => Repl::Keep,
        }
    }

    /// Enters a binder; returns the new name if it had to be renamed.
    fn enter(&mut self, x: &Ident) -> Option<Ident> {
        if self.range_fv.contains(x) {
            let y = Ident::fresh(x.as_str());
            self.overlay.push((x.clone(), Some(y.clone())));
            Some(y)
        } else {
            self.overlay.push((x.clone(), None));
            None
        }
    }

    fn leave(&mut self) {
        self.overlay.pop();
    }
}

/// Equality up to renaming of bound names (binder sorts must agree).
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    fn var_eq(x: &Ident, y: &Ident, env: &[(Ident, Ident)]) -> bool {
        let i = env.iter().rposition(|(a, _)| a == x);
        let j = env.iter().rposition(|(_, b)| b == y);
        match (i, j) {
            (None, None) => x == y,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }
    fn ie(a: &IntExpr, b: &IntExpr, env: &[(Ident, Ident)]) -> bool {
        match (a, b) {
            (IntExpr::Lit(m), IntExpr::Lit(n)) => m == n,
            (IntExpr::Var(x), IntExpr::Var(y)) => var_eq(x, y, env),
            (IntExpr::Add(a1, a2), IntExpr::Add(b1, b2))
            | (IntExpr::Mul(a1, a2), IntExpr::Mul(b1, b2)) => ie(a1, b1, env) && ie(a2, b2, env),
            _ => false,
        }
    }
    fn go(f: &Formula, g: &Formula, env: &mut Vec<(Ident, Ident)>) -> bool {
        match (f, g) {
            (Formula::Var(x), Formula::Var(y)) => var_eq(x, y, env),
            (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::App(a1, a2), Formula::App(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Formula::Mu(x, s, a), Formula::Mu(y, t, b))
            | (Formula::Abs(x, s, a), Formula::Abs(y, t, b)) => {
                if s != t {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(a, b, env);
                env.pop();
                r
            }
            (Formula::Exists(x, a), Formula::Exists(y, b)) => {
                env.push((x.clone(), y.clone()));
                let r = go(a, b, env);
                env.pop();
                r
            }
            (Formula::AppInt(a, e), Formula::AppInt(b, d)) => go(a, b, env) && ie(e, d, env),
            (Formula::Le(a1, a2), Formula::Le(b1, b2)) => ie(a1, b1, env) && ie(a2, b2, env),
            (Formula::Tuple(cs), Formula::Tuple(ds)) => {
                cs.len() == ds.len() && cs.iter().zip(ds).all(|(c, d)| go(c, d, env))
            }
            _ => false,
        }
    }
    go(f, g, &mut Vec::new())
}

/// A hash that is invariant under alpha-renaming (bound names are replaced
/// by de Bruijn indices); `alpha_eq(f, g)` implies equal hashes.
pub fn alpha_hash(f: &Formula) -> u64 {
    fn var(x: &Ident, env: &[&Ident], h: &mut DefaultHasher) {
        match env.iter().rposition(|b| *b == x) {
            Some(i) => {
                0u8.hash(h);
                (env.len() - i).hash(h);
            }
            None => {
                1u8.hash(h);
                x.hash(h);
            }
        }
    }
    fn ie(e: &IntExpr, env: &[&Ident], h: &mut DefaultHasher) {
        match e {
            IntExpr::Lit(n) => {
                2u8.hash(h);
                n.hash(h);
            }
            IntExpr::Var(x) => var(x, env, h),
            IntExpr::Add(a, b) => {
                3u8.hash(h);
                ie(a, env, h);
                ie(b, env, h);
            }
            IntExpr::Mul(a, b) => {
                4u8.hash(h);
                ie(a, env, h);
                ie(b, env, h);
            }
        }
    }
    fn go<'a>(f: &'a Formula, env: &mut Vec<&'a Ident>, h: &mut DefaultHasher) {
        match f {
            Formula::Var(x) => var(x, env, h),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::App(a, b) => {
                (match f {
                    Formula::Or(..) => 10u8,
                    Formula::And(..) => 11,
                    _ => 12,
                })
                .hash(h);
                go(a, env, h);
                go(b, env, h);
            }
            Formula::Mu(x, s, b) | Formula::Abs(x, s, b) => {
                (if matches!(f, Formula::Mu(..)) { 13u8 } else { 14 }).hash(h);
                s.hash(h);
                env.push(x);
                go(b, env, h);
                env.pop();
            }
            Formula::Exists(x, b) => {
                15u8.hash(h);
                env.push(x);
                go(b, env, h);
                env.pop();
            }
            Formula::AppInt(a, e) => {
                16u8.hash(h);
                go(a, env, h);
                ie(e, env, h);
            }
            Formula::Le(a, b) => {
                17u8.hash(h);
                ie(a, env, h);
                ie(b, env, h);
            }
            Formula::Tuple(cs) => {
                18u8.hash(h);
                cs.len().hash(h);
                for c in cs {
                    go(c, env, h);
                }
            }
        }
    }
    let mut h = DefaultHasher::new();
    go(f, &mut Vec::new(), &mut h);
    h.finish()
}

/// Renames binders so that no binder shadows a name in `taken` or repeats
/// another binder; names in `taken` are extended with every binder kept.
pub fn freshen_binders(f: &Formula, taken: &mut HashSet<Ident>) -> Formula {
    fn go(f: &Formula, taken: &mut HashSet<Ident>) -> Formula {
        match f {
            Formula::Var(_) | Formula::Le(..) => f.clone(),
            Formula::Or(a, b) => Formula::or(go(a, taken), go(b, taken)),
            Formula::And(a, b) => Formula::and(go(a, taken), go(b, taken)),
            Formula::App(a, b) => Formula::app(go(a, taken), go(b, taken)),
            Formula::AppInt(a, e) => Formula::app_int(go(a, taken), e.clone()),
            Formula::Tuple(cs) => Formula::Tuple(cs.iter().map(|c| go(c, taken)).collect()),
            Formula::Mu(x, _, b) | Formula::Abs(x, _, b) | Formula::Exists(x, b) => {
                let (x2, body) = if taken.contains(x) {
                    let y = Ident::fresh(x.as_str());
                    (y.clone(), b.rename(x, &y))
                } else {
                    (x.clone(), (**b).clone())
                };
                taken.insert(x2.clone());
                let body = go(&body, taken);
                match f {
                    Formula::Mu(_, s, _) => Formula::mu(x2, s.clone(), body),
                    Formula::Abs(_, s, _) => Formula::abs(x2, s.clone(), body),
                    _ => Formula::exists(x2, body),
                }
            }
        }
    }
    go(f, taken)
}

/// Evaluates a closed comparison, used by both oracles.
pub(crate) fn eval_le(a: &IntExpr, b: &IntExpr) -> Option<bool> {
    Some(a.eval_closed()? <= b.eval_closed()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn truth_literals() {
        assert!(Formula::tt().is_true());
        assert!(Formula::ff().is_false());
        assert_eq!(Formula::le(IntExpr::lit(3), IntExpr::lit(2)).as_bool(), Some(false));
    }

    #[test]
    fn substitution_of_integers() {
        let f = p("\\k : int -> prop. x <= 3 /\\ k x");
        let g = f.subst1(&Ident::new("x"), Arg::I(IntExpr::lit(5)));
        assert!(alpha_eq(&g, &p("\\k : int -> prop. 5 <= 3 /\\ k 5")));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::abs("y", Sort::Prop, Formula::var("x"));
        let g = f.subst1(&Ident::new("x"), Arg::F(Formula::var("y")));
        match &g {
            Formula::Abs(y2, _, b) => {
                assert_ne!(y2.as_str(), "y");
                assert_eq!(**b, Formula::var("y"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn substitution_is_simultaneous() {
        let f = Formula::or(Formula::var("a"), Formula::var("b"));
        let mut m = HashMap::new();
        m.insert(Ident::new("a"), Arg::F(Formula::var("b")));
        m.insert(Ident::new("b"), Arg::F(Formula::var("a")));
        assert_eq!(f.substitute(&m), Formula::or(Formula::var("b"), Formula::var("a")));
    }

    #[test]
    fn substitution_stops_at_shadowing_binder() {
        let f = Formula::abs("x", Sort::Prop, Formula::var("x"));
        let g = f.subst1(&Ident::new("x"), Arg::F(Formula::tt()));
        assert_eq!(f, g);
    }

    #[test]
    fn alpha_equivalence() {
        let id_x = Formula::abs("x", Sort::Prop, Formula::var("x"));
        let id_y = Formula::abs("y", Sort::Prop, Formula::var("y"));
        let k = Formula::abs("x", Sort::Prop, Formula::tt());
        assert!(alpha_eq(&id_x, &id_y));
        assert!(!alpha_eq(&id_x, &k));
        assert_eq!(alpha_hash(&id_x), alpha_hash(&id_y));
        let a = p("mu p : int -> prop. \\y : int. p y");
        let b = p("mu q : int -> prop. \\z : int. q z");
        assert!(alpha_eq(&a, &b));
        assert_eq!(alpha_hash(&a), alpha_hash(&b));
        assert!(!alpha_eq(&Formula::var("x"), &Formula::var("y")));
    }

    #[test]
    fn disjunctivity() {
        assert!(is_disjunctive(&p("\\k : int -> prop. \\x : int. x <= 0 /\\ k x")));
        assert!(!is_disjunctive(&p("\\p : prop. \\q : prop. p /\\ q")));
    }

    #[test]
    fn formula_order() {
        assert_eq!(order_of_formula(&Formula::ff()), 0);
        assert_eq!(order_of_formula(&p("mu x : prop. x")), 0);
        assert_eq!(
            order_of_formula(&p("mu f : (int -> prop) -> prop. \\k : int -> prop. k 0")),
            1
        );
    }

    #[test]
    fn freshening_renames_only_clashes() {
        let f = p("(\\x : prop. x) \\/ (\\x : prop. x) true");
        let mut taken = HashSet::new();
        let g = freshen_binders(&f, &mut taken);
        let bs = g.binders();
        assert_eq!(bs.len(), 2);
        assert_ne!(bs[0], bs[1]);
        assert_eq!(bs[0].as_str(), "x");
        assert!(alpha_eq(&f, &g));
    }

    #[test]
    fn int_folding() {
        let e = IntExpr::add(IntExpr::var("x"), IntExpr::add(IntExpr::lit(2), IntExpr::lit(-2)));
        assert_eq!(e, IntExpr::var("x"));
        assert_eq!(IntExpr::sub(IntExpr::lit(1), IntExpr::lit(4)), IntExpr::lit(-3));
    }
}
