//! Executable semantics used as oracles.
//!
//! * [`search_valid`]: breadth-first search over the one-step reduction
//!   relation; a formula is valid iff it reduces to TRUE.
//! * [`kleene_eval`]: least-fixpoint iteration of an order-0 equation system
//!   over integer tables restricted to a box `[-B, B]`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;

use crate::eqsys::{EquationSystem, Param};
use crate::error::{Error, Result};
use crate::formula::{alpha_eq, alpha_hash, Arg, Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;
use crate::typeck::check_closed_prop;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    FuelExhausted,
    BoundTruncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Sound: the formula is ⊤. `steps` is the trace length (search) or the
    /// iteration count (Kleene evaluation).
    Valid { steps: usize },
    /// Sound only when `exhaustive`.
    Invalid { exhaustive: bool },
    Unknown { reason: UnknownReason },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    /// Valid, or Invalid with an exhaustive search.
    pub fn is_decisive(&self) -> bool {
        matches!(
            self,
            Verdict::Valid { .. } | Verdict::Invalid { exhaustive: true }
        )
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Valid { .. } => 0,
            Verdict::Invalid { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid { steps } => write!(f, "VALID steps={steps}"),
            Verdict::Invalid { exhaustive } => write!(f, "INVALID exhaustive={exhaustive}"),
            Verdict::Unknown {
                reason: UnknownReason::FuelExhausted,
            } => write!(f, "UNKNOWN reason=fuel-exhausted"),
            Verdict::Unknown {
                reason: UnknownReason::BoundTruncated,
            } => write!(f, "UNKNOWN reason=bound-truncated"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_steps: usize,
    pub exists_box: u64,
    pub max_states: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_steps: 100_000,
            exists_box: 64,
            max_states: 200_000,
        }
    }
}

impl SearchBudget {
    pub fn with_box(exists_box: u64) -> Self {
        SearchBudget {
            exists_box,
            ..Self::default()
        }
    }
}

fn is_canonical_true(f: &Formula) -> bool {
    *f == Formula::tt()
}

fn is_canonical_false(f: &Formula) -> bool {
    *f == Formula::ff()
}

/// One-step successors. `truncated` is set when an `∃` whose body depends on
/// its binder is expanded over the finite box.
fn successors(f: &Formula, b: u64, truncated: &mut bool) -> Result<Vec<Formula>> {
    Ok(match f {
        Formula::Or(a, c) => vec![(**a).clone(), (**c).clone()],
        Formula::And(a, c) => {
            if is_canonical_true(a) {
                vec![(**c).clone()]
            } else if is_canonical_false(a) {
                vec![Formula::ff()]
            } else {
                successors(a, b, truncated)?
                    .into_iter()
                    .map(|a2| Formula::And(a2.into(), c.clone()))
                    .collect()
            }
        }
        Formula::Le(x, y) => {
            if is_canonical_true(f) || is_canonical_false(f) {
                vec![]
            } else {
                let v = crate::formula::eval_le(x, y)
                    .ok_or_else(|| Error::NotClosed(f.to_string()))?;
                vec![if v { Formula::tt() } else { Formula::ff() }]
            }
        }
        Formula::Mu(x, _, body) => vec![body.subst1(x, Arg::F(f.clone()))],
        Formula::App(h, a) => match &**h {
            Formula::Abs(x, _, body) => vec![body.subst1(x, Arg::F((**a).clone()))],
            _ => successors(h, b, truncated)?
                .into_iter()
                .map(|h2| Formula::App(h2.into(), a.clone()))
                .collect(),
        },
        Formula::AppInt(h, e) => match &**h {
            Formula::Abs(x, _, body) => {
                let v = e
                    .eval_closed()
                    .ok_or_else(|| Error::NotClosed(e.to_string()))?;
                vec![body.subst1(x, Arg::I(IntExpr::Lit(v)))]
            }
            _ => successors(h, b, truncated)?
                .into_iter()
                .map(|h2| Formula::AppInt(h2.into(), e.clone()))
                .collect(),
        },
        Formula::Exists(z, body) => {
            if !body.occurs_free(z) {
                vec![(**body).clone()]
            } else {
                *truncated = true;
                let b = b as i64;
                (-b..=b)
                    .map(|n| body.subst1(z, Arg::I(IntExpr::lit(n))))
                    .collect()
            }
        }
        Formula::Var(x) => return Err(Error::NotClosed(x.to_string())),
        Formula::Abs(..) => return Err(Error::NotProp),
        Formula::Tuple(_) => return Err(Error::Unsupported("tuple in reduction".into())),
    })
}

/// All one-step successors of a closed PLAIN prop formula.
pub fn step(f: &Formula, budget: &SearchBudget) -> Result<Vec<Formula>> {
    check_closed_prop(f)?;
    if !f.is_plain() {
        return Err(Error::Unsupported("tuple in reduction".into()));
    }
    successors(f, budget.exists_box, &mut false)
}

/// Breadth-first search for a reduction to TRUE, returning the verdict and,
/// when valid, the reduction trace from `f` to TRUE.
pub fn search_trace(f: &Formula, budget: &SearchBudget) -> Result<(Verdict, Option<Vec<Formula>>)> {
    check_closed_prop(f)?;
    if !f.is_plain() {
        return Err(Error::Unsupported("tuple in reduction".into()));
    }
    let start = f.fold_ints();
    let mut states: Vec<(Formula, usize)> = vec![(start.clone(), usize::MAX)];
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    seen.entry(alpha_hash(&start)).or_default().push(0);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    let mut expanded = 0usize;
    let trace = |states: &Vec<(Formula, usize)>, mut i: usize| {
        let mut t = Vec::new();
        while i != usize::MAX {
            t.push(states[i].0.clone());
            i = states[i].1;
        }
        t.reverse();
        t
    };
    if is_canonical_true(&start) {
        return Ok((Verdict::Valid { steps: 0 }, Some(vec![start])));
    }
    while let Some(i) = queue.pop_front() {
        if expanded >= budget.max_steps {
            return Ok((
                Verdict::Unknown {
                    reason: UnknownReason::FuelExhausted,
                },
                None,
            ));
        }
        expanded += 1;
        let cur = states[i].0.clone();
        for next in successors(&cur, budget.exists_box, &mut truncated)? {
            let h = alpha_hash(&next);
            let bucket = seen.entry(h).or_default();
            if bucket.iter().any(|&j| alpha_eq(&states[j].0, &next)) {
                continue;
            }
            let j = states.len();
            bucket.push(j);
            let done = is_canonical_true(&next);
            states.push((next, i));
            if done {
                let t = trace(&states, j);
                return Ok((Verdict::Valid { steps: t.len() - 1 }, Some(t)));
            }
            if states.len() >= budget.max_states {
                return Ok((
                    Verdict::Unknown {
                        reason: UnknownReason::FuelExhausted,
                    },
                    None,
                ));
            }
            queue.push_back(j);
        }
    }
    Ok((
        if truncated {
            Verdict::Unknown {
                reason: UnknownReason::BoundTruncated,
            }
        } else {
            Verdict::Invalid { exhaustive: true }
        },
        None,
    ))
}

pub fn search_valid(f: &Formula, budget: &SearchBudget) -> Result<Verdict> {
    Ok(search_trace(f, budget)?.0)
}

/// Checks that each trace element steps to the next and the last is TRUE.
pub fn replay_trace(trace: &[Formula], budget: &SearchBudget) -> bool {
    let Some(last) = trace.last() else {
        return false;
    };
    if !is_canonical_true(last) {
        return false;
    }
    trace.windows(2).all(|w| {
        successors(&w[0], budget.exists_box, &mut false)
            .map(|ss| ss.iter().any(|s| alpha_eq(s, &w[1])))
            .unwrap_or(false)
    })
}

/// Replaces every `∃z.ψ` by `(μx.λy. ψ[y/z] ∨ ψ[−y/z] ∨ x (y+1)) 0`.
pub fn encode_exists(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Le(..) => f.clone(),
        Formula::Or(a, b) => Formula::or(encode_exists(a), encode_exists(b)),
        Formula::And(a, b) => Formula::and(encode_exists(a), encode_exists(b)),
        Formula::App(a, b) => Formula::app(encode_exists(a), encode_exists(b)),
        Formula::AppInt(a, e) => Formula::app_int(encode_exists(a), e.clone()),
        Formula::Mu(x, s, b) => Formula::mu(x.clone(), s.clone(), encode_exists(b)),
        Formula::Abs(x, s, b) => Formula::abs(x.clone(), s.clone(), encode_exists(b)),
        Formula::Tuple(cs) => Formula::Tuple(cs.iter().map(encode_exists).collect()),
        Formula::Exists(z, b) => {
            let body = encode_exists(b);
            let x = Ident::fresh("ex");
            let y = Ident::fresh("y");
            let yv = IntExpr::Var(y.clone());
            let at = |e: IntExpr| body.subst1(z, Arg::I(e));
            let step = Formula::app_int(
                Formula::Var(x.clone()),
                IntExpr::add(yv.clone(), IntExpr::lit(1)),
            );
            let inner = Formula::or(Formula::or(at(yv.clone()), at(IntExpr::neg(yv))), step);
            Formula::app_int(
                Formula::mu(x, Sort::int_pred(1), Formula::abs(y, Sort::Int, inner)),
                IntExpr::lit(0),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Kleene iteration

type Key = (usize, Vec<i64>);

struct Kleene<'a> {
    index: HashMap<&'a Ident, usize>,
    arity: Vec<usize>,
    bound: i64,
    values: HashMap<Key, bool>,
    fresh_demands: Vec<Key>,
}

fn ival(e: &IntExpr, env: &[(&Ident, i128)]) -> Option<i128> {
    match e {
        IntExpr::Lit(n) => i128::try_from(n).ok(),
        IntExpr::Var(x) => env.iter().rev().find(|(y, _)| *y == x).map(|(_, v)| *v),
        IntExpr::Add(a, b) => ival(a, env)?.checked_add(ival(b, env)?),
        IntExpr::Mul(a, b) => ival(a, env)?.checked_mul(ival(b, env)?),
    }
}

fn bval(e: &IntExpr, env: &[(&Ident, i128)]) -> Result<BigInt> {
    e.eval_with(&|x| {
        env.iter()
            .rev()
            .find(|(y, _)| *y == x)
            .map(|(_, v)| BigInt::from(*v))
    })
    .ok_or_else(|| Error::NotClosed(e.to_string()))
}

impl<'a> Kleene<'a> {
    fn lookup(&mut self, f: usize, args: &[i128]) -> bool {
        if args.iter().any(|v| v.abs() > self.bound as i128) {
            return false;
        }
        let key = (f, args.iter().map(|v| *v as i64).collect());
        match self.values.get(&key) {
            Some(v) => *v,
            None => {
                self.values.insert(key.clone(), false);
                self.fresh_demands.push(key);
                false
            }
        }
    }

    fn eval(
        &mut self,
        f: &'a Formula,
        env: &mut Vec<(&'a Ident, i128)>,
        pending: &mut Vec<i128>,
    ) -> Result<bool> {
        match f {
            Formula::Le(a, b) => {
                if !pending.is_empty() {
                    return Err(Error::NotProp);
                }
                match (ival(a, env), ival(b, env)) {
                    (Some(x), Some(y)) => Ok(x <= y),
                    _ => Ok(bval(a, env)? <= bval(b, env)?),
                }
            }
            Formula::Or(a, b) => Ok(self.eval(a, env, pending)? || self.eval(b, env, pending)?),
            Formula::And(a, b) => Ok(self.eval(a, env, pending)? && self.eval(b, env, pending)?),
            Formula::Exists(z, b) => {
                for n in -self.bound..=self.bound {
                    env.push((z, n as i128));
                    let r = self.eval(b, env, pending);
                    env.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::AppInt(h, e) => {
                let v = ival(e, env)
                    .ok_or_else(|| Error::Unsupported("integer overflow in kleene_eval".into()))?;
                pending.push(v);
                let r = self.eval(h, env, pending);
                pending.pop();
                r
            }
            Formula::Abs(x, Sort::Int, b) => {
                let v = pending.pop().ok_or(Error::NotProp)?;
                env.push((x, v));
                let r = self.eval(b, env, pending);
                env.pop();
                pending.push(v);
                r
            }
            Formula::Var(x) => {
                let i = *self
                    .index
                    .get(x)
                    .ok_or_else(|| Error::UnboundVariable(x.clone()))?;
                let l = self.arity[i];
                if pending.len() < l {
                    return Err(Error::NotProp);
                }
                let args: Vec<i128> = pending[pending.len() - l..].iter().rev().copied().collect();
                Ok(self.lookup(i, &args))
            }
            Formula::App(..) | Formula::Mu(..) | Formula::Abs(..) => Err(Error::OrderTooHigh(
                format!("`{f}` is not an order-0 construct"),
            )),
            Formula::Tuple(_) => Err(Error::Unsupported("tuple in kleene_eval".into())),
        }
    }
}

/// Least-fixpoint evaluation of an order-0 system over `[-B, B]`.
///
/// Only table entries demanded by the main formula (transitively) are
/// computed; lookups outside the box are ⊥. Reports `Valid` at the first
/// iteration where the main formula holds, otherwise `Unknown`.
pub fn kleene_eval(es: &EquationSystem, bound: u64, max_iters: usize) -> Result<Verdict> {
    es.typecheck()?;
    let mut index = HashMap::new();
    let mut arity = Vec::new();
    let mut params: Vec<Vec<&Ident>> = Vec::new();
    for (i, d) in es.defs.iter().enumerate() {
        let s = &es.env[&d.name];
        let l = s.int_pred_arity().ok_or_else(|| {
            Error::OrderTooHigh(format!("`{}` has sort {s}, expected int^l -> prop", d.name))
        })?;
        let mut ps = Vec::new();
        for p in &d.params {
            match p {
                Param::Var(x, _) => ps.push(x),
                Param::Tuple(_) => {
                    return Err(Error::OrderTooHigh(format!("tuple parameter in `{}`", d.name)))
                }
            }
        }
        index.insert(&d.name, i);
        arity.push(l);
        params.push(ps);
    }
    let fv: Vec<_> = es
        .main
        .free_vars()
        .into_iter()
        .filter(|x| !index.contains_key(x))
        .collect();
    if !fv.is_empty() {
        return Err(Error::NotClosed(format!("{fv:?}")));
    }
    let bound = i64::try_from(bound).unwrap_or(i64::MAX / 4);
    let mut k = Kleene {
        index,
        arity,
        bound,
        values: HashMap::new(),
        fresh_demands: Vec::new(),
    };
    if k.eval(&es.main, &mut Vec::new(), &mut Vec::new())? {
        return Ok(Verdict::Valid { steps: 0 });
    }
    let mut demanded: Vec<Key> = std::mem::take(&mut k.fresh_demands);
    for iter in 1..=max_iters {
        let mut updates = Vec::new();
        for key in &demanded {
            if k.values[key] {
                continue;
            }
            let (fi, args) = key;
            let d = &es.defs[*fi];
            let mut env: Vec<(&Ident, i128)> = Vec::new();
            let np = params[*fi].len();
            for (x, v) in params[*fi].iter().zip(args) {
                env.push((x, *v as i128));
            }
            let mut pending: Vec<i128> = args[np..].iter().rev().map(|v| *v as i128).collect();
            if k.eval(&d.body, &mut env, &mut pending)? {
                updates.push(key.clone());
            }
        }
        let new_demands = std::mem::take(&mut k.fresh_demands);
        let changed = !updates.is_empty() || !new_demands.is_empty();
        for key in updates {
            k.values.insert(key, true);
        }
        demanded.extend(new_demands);
        if k.eval(&es.main, &mut Vec::new(), &mut Vec::new())? {
            return Ok(Verdict::Valid { steps: iter });
        }
        demanded.extend(std::mem::take(&mut k.fresh_demands));
        if !changed {
            return Ok(Verdict::Unknown {
                reason: UnknownReason::BoundTruncated,
            });
        }
    }
    Ok(Verdict::Unknown {
        reason: UnknownReason::FuelExhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_system};

    fn v(s: &str) -> Verdict {
        search_valid(&parse_formula(s).unwrap(), &SearchBudget::default()).unwrap()
    }

    const SUM: &str = "mu sum : int -> (int -> prop) -> prop. \\x : int. \\k : int -> prop. \
        x < 0 \\/ (x = 0 /\\ k 0) \\/ (x > 0 /\\ sum (x - 1) (\\y : int. k (x + y)))";

    fn sum_at(n: i64) -> Formula {
        parse_formula(&format!("({SUM}) ({n}) (\\r : int. r < {n})")).unwrap()
    }

    #[test]
    fn step_rules() {
        let b = SearchBudget::default();
        let f = parse_formula("true /\\ 0 <= 1").unwrap();
        assert_eq!(step(&f, &b).unwrap(), vec![parse_formula("0 <= 1").unwrap()]);
        let g = parse_formula("1 <= 2 \\/ 3 <= 4").unwrap();
        assert_eq!(step(&g, &b).unwrap().len(), 2);
        assert_eq!(step(&parse_formula("3 <= 2").unwrap(), &b).unwrap(), vec![Formula::ff()]);
    }

    #[test]
    fn sum_example_verdicts() {
        let b = SearchBudget::default();
        assert!(search_valid(&sum_at(-1), &b).unwrap().is_valid());
        assert_eq!(
            search_valid(&sum_at(2), &b).unwrap(),
            Verdict::Invalid { exhaustive: true }
        );
    }

    #[test]
    fn mu_identity_is_exhaustively_invalid() {
        assert_eq!(v("mu x : prop. x"), Verdict::Invalid { exhaustive: true });
    }

    #[test]
    fn traces_replay() {
        let b = SearchBudget::default();
        let (verdict, t) = search_trace(&sum_at(-2), &b).unwrap();
        let t = t.unwrap();
        assert_eq!(verdict, Verdict::Valid { steps: t.len() - 1 });
        assert!(replay_trace(&t, &b));
    }

    #[test]
    fn exists_is_bounded() {
        assert!(v("exists z. z = 3").is_valid());
        assert_eq!(
            v("exists z. z = 1000"),
            Verdict::Unknown {
                reason: UnknownReason::BoundTruncated
            }
        );
        assert_eq!(v("exists z. false"), Verdict::Invalid { exhaustive: true });
    }

    #[test]
    fn encoded_exists() {
        let b = SearchBudget::default();
        let f = encode_exists(&parse_formula("exists z. z = -2").unwrap());
        assert!(!f.contains_exists());
        assert!(search_valid(&f, &b).unwrap().is_valid());
        let g = encode_exists(&parse_formula("exists z. 1 <= 0").unwrap());
        assert_eq!(
            search_valid(&g, &SearchBudget { max_steps: 2000, ..b }).unwrap(),
            Verdict::Unknown {
                reason: UnknownReason::FuelExhausted
            }
        );
    }

    #[test]
    fn kleene_base_case() {
        let es = parse_system(
            "%ENV\nP : int -> prop;\n%DEFS\nP z =mu z = 0 \\/ P (z - 1);\n%MAIN exists z. P z;\n",
        )
        .unwrap();
        assert_eq!(kleene_eval(&es, 4, 100).unwrap(), Verdict::Valid { steps: 1 });
    }

    #[test]
    fn kleene_bottom_fixpoint_is_unknown() {
        let es = parse_system("%ENV\nP : int -> prop;\n%DEFS\nP z =mu P z;\n%MAIN P 0;\n").unwrap();
        assert_eq!(
            kleene_eval(&es, 4, 100).unwrap(),
            Verdict::Unknown {
                reason: UnknownReason::BoundTruncated
            }
        );
    }

    #[test]
    fn kleene_rejects_higher_order() {
        let es = parse_system(
            "%ENV\nP : (int -> prop) -> prop;\n%DEFS\nP k =mu k 0;\n%MAIN P (\\x : int. true);\n",
        )
        .unwrap();
        assert!(matches!(kleene_eval(&es, 4, 10), Err(Error::OrderTooHigh(_))));
    }

    #[test]
    fn kleene_recursion_descends() {
        let es = parse_system(
            "%ENV\nP : int -> prop;\n%DEFS\nP z =mu z <= 0 \\/ P (z - 2);\n%MAIN P 7;\n",
        )
        .unwrap();
        assert!(kleene_eval(&es, 8, 100).unwrap().is_valid());
        assert!(!kleene_eval(&es, 6, 100).unwrap().is_valid());
    }
}
