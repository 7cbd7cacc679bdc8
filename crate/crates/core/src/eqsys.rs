//! Equation systems `(Ξ, D, φ0)`: typing, dependency analysis, unfolding to a
//! single formula and the m-th finite approximation.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::formula::{order_of_formula, Arg, Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;
use crate::typeck::{typecheck_with, SimpleTypeEnv};

/// A formal parameter: a plain binder, or a tuple pattern over a product.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Param {
    Var(Ident, Sort),
    Tuple(Vec<(Ident, Sort)>),
}

impl Param {
    pub fn sort(&self) -> Sort {
        match self {
            Param::Var(_, s) => s.clone(),
            Param::Tuple(cs) => Sort::Product(cs.iter().map(|(_, s)| s.clone()).collect()),
        }
    }

    pub fn bindings(&self) -> Vec<(Ident, Sort)> {
        match self {
            Param::Var(x, s) => vec![(x.clone(), s.clone())],
            Param::Tuple(cs) => cs.clone(),
        }
    }

    /// A parameter list from `(name, sort)` pairs; a one-element tuple is a plain variable.
    pub fn tuple(mut cs: Vec<(Ident, Sort)>) -> Param {
        if cs.len() == 1 {
            let (x, s) = cs.pop().unwrap();
            Param::Var(x, s)
        } else {
            Param::Tuple(cs)
        }
    }
}

impl std::fmt::Debug for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Param::Var(x, s) => write!(f, "{x}:{s}"),
            Param::Tuple(cs) => {
                write!(f, "<")?;
                for (i, (x, s)) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}:{s}")?;
                }
                write!(f, ">")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Definition {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Formula,
}

impl Definition {
    pub fn bindings(&self) -> Vec<(Ident, Sort)> {
        self.params.iter().flat_map(Param::bindings).collect()
    }

    /// `λx̄.body`; fails on tuple parameters.
    pub fn as_lambda(&self) -> Result<Formula> {
        let mut binders = Vec::new();
        for p in &self.params {
            match p {
                Param::Var(x, s) => binders.push((x.clone(), s.clone())),
                Param::Tuple(_) => {
                    return Err(Error::Unsupported(format!(
                        "tuple parameter of `{}` (flatten the system first)",
                        self.name
                    )))
                }
            }
        }
        Ok(Formula::abs_many(binders, self.body.clone()))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquationSystem {
    pub env: SimpleTypeEnv,
    pub defs: Vec<Definition>,
    pub main: Formula,
    pub maxar: Option<usize>,
}

impl EquationSystem {
    pub fn from_formula(main: Formula) -> Self {
        EquationSystem {
            env: SimpleTypeEnv::new(),
            defs: Vec::new(),
            main,
            maxar: None,
        }
    }

    pub fn def(&self, name: &Ident) -> Option<&Definition> {
        self.defs.iter().find(|d| &d.name == name)
    }

    pub fn def_names(&self) -> BTreeSet<Ident> {
        self.defs.iter().map(|d| d.name.clone()).collect()
    }

    /// Max order over declared sorts and inner μ annotations, floor 0.
    pub fn order(&self) -> i64 {
        let decl = self.env.values().map(Sort::order).max().unwrap_or(0);
        let inner = self
            .defs
            .iter()
            .map(|d| order_of_formula(&d.body))
            .chain([order_of_formula(&self.main)])
            .max()
            .unwrap_or(0);
        decl.max(inner).max(0)
    }

    pub fn node_count(&self) -> usize {
        self.defs.iter().map(|d| d.body.size()).sum::<usize>() + self.main.size()
    }

    /// Residual sort of a definition body: the declared sort minus the parameters.
    pub fn residual_sort(&self, d: &Definition) -> Result<Sort> {
        let s = self
            .env
            .get(&d.name)
            .ok_or_else(|| Error::UnboundVariable(d.name.clone()))?;
        let (args, res) = s.uncurry();
        if d.params.len() > args.len() {
            return Err(Error::ArityMismatch(format!(
                "`{}` has {} parameters but sort {s}",
                d.name,
                d.params.len()
            )));
        }
        Ok(Sort::arrows(
            args[d.params.len()..].iter().map(|s| (*s).clone()),
            res.clone(),
        ))
    }

    /// Checks every definition against Ξ and the main formula at prop.
    pub fn typecheck(&self) -> Result<()> {
        for d in &self.defs {
            let s = self
                .env
                .get(&d.name)
                .ok_or_else(|| Error::UnboundVariable(d.name.clone()))?;
            let (args, _) = s.uncurry();
            for (p, want) in d.params.iter().zip(&args) {
                if &p.sort() != *want {
                    return Err(Error::type_error(
                        format!("parameter {p:?} of {}", d.name),
                        want,
                        p.sort(),
                    ));
                }
            }
            let want = self.residual_sort(d)?;
            let got = typecheck_with(&self.env, &d.bindings(), &d.body)?;
            if got != want {
                return Err(Error::type_error(format!("body of {}", d.name), want, got));
            }
        }
        let m = typecheck_with(&self.env, &[], &self.main)?;
        if m != Sort::Prop {
            return Err(Error::NotProp);
        }
        Ok(())
    }

    /// Eta-expands every definition so that its body has sort prop.
    pub fn eta_expand(&self) -> Result<EquationSystem> {
        let mut out = self.clone();
        for d in &mut out.defs {
            let res = self.residual_sort(d)?;
            let (extra, _) = res.uncurry();
            let mut body = d.body.clone();
            for s in extra {
                let x = Ident::fresh("a");
                d.params.push(Param::Var(x.clone(), s.clone()));
                body = if *s == Sort::Int {
                    Formula::app_int(body, IntExpr::Var(x))
                } else {
                    Formula::app(body, Formula::Var(x))
                };
            }
            d.body = crate::fromdisj::simplify::beta_admin(&body);
        }
        Ok(out)
    }
}

/// Names of defined predicates that occur in `f`, ignoring subformulas
/// guarded by a comparison that is literally false.
pub fn fvf(f: &Formula, defined: &BTreeSet<Ident>) -> BTreeSet<Ident> {
    fn go(f: &Formula, defined: &BTreeSet<Ident>, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match f {
            Formula::Var(x) => {
                if defined.contains(x) && !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Formula::And(a, b) => {
                if a.is_false() {
                    return;
                }
                go(a, defined, bound, out);
                go(b, defined, bound, out);
            }
            Formula::Or(a, b) | Formula::App(a, b) => {
                go(a, defined, bound, out);
                go(b, defined, bound, out);
            }
            Formula::Mu(x, _, b) | Formula::Abs(x, _, b) | Formula::Exists(x, b) => {
                bound.push(x.clone());
                go(b, defined, bound, out);
                bound.pop();
            }
            Formula::AppInt(a, _) => go(a, defined, bound, out),
            Formula::Le(..) => {}
            Formula::Tuple(cs) => cs.iter().for_each(|c| go(c, defined, bound, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(f, defined, &mut Vec::new(), &mut out);
    out
}

/// Dependency graph: `F → G` iff `G ∈ FVf(body of F)`.
#[derive(Clone, Debug)]
pub struct DepGraph {
    pub nodes: Vec<Ident>,
    pub edges: HashMap<Ident, BTreeSet<Ident>>,
}

impl DepGraph {
    pub fn of(es: &EquationSystem) -> DepGraph {
        let defined = es.def_names();
        let mut edges = HashMap::new();
        for d in &es.defs {
            let mut dd = defined.clone();
            for (x, _) in d.bindings() {
                dd.remove(&x);
            }
            edges.insert(d.name.clone(), fvf(&d.body, &dd));
        }
        DepGraph {
            nodes: es.defs.iter().map(|d| d.name.clone()).collect(),
            edges,
        }
    }

    /// Some node on a cycle, if any.
    pub fn find_cycle(&self) -> Option<Ident> {
        #[derive(Clone, Copy, PartialEq)]
        enum C {
            White,
            Grey,
            Black,
        }
        let mut color: HashMap<&Ident, C> = self.nodes.iter().map(|n| (n, C::White)).collect();
        for root in &self.nodes {
            if color[root] != C::White {
                continue;
            }
            let mut stack: Vec<(&Ident, Vec<&Ident>)> =
                vec![(root, self.edges[root].iter().collect())];
            color.insert(root, C::Grey);
            while let Some((n, succ)) = stack.last_mut() {
                match succ.pop() {
                    Some(m) => match color.get(m).copied() {
                        Some(C::Grey) => return Some(m.clone()),
                        Some(C::White) => {
                            color.insert(m, C::Grey);
                            stack.push((m, self.edges[m].iter().collect()));
                        }
                        _ => {}
                    },
                    None => {
                        let n = *n;
                        color.insert(n, C::Black);
                        stack.pop();
                    }
                }
            }
        }
        None
    }

    /// Definitions ordered so that every one comes after its dependencies.
    pub fn leaves_first(&self) -> Option<Vec<Ident>> {
        if self.find_cycle().is_some() {
            return None;
        }
        let mut done: BTreeSet<Ident> = BTreeSet::new();
        let mut order = Vec::new();
        while order.len() < self.nodes.len() {
            let next = self
                .nodes
                .iter()
                .find(|n| !done.contains(*n) && self.edges[*n].iter().all(|m| done.contains(m)))?
                .clone();
            done.insert(next.clone());
            order.push(next);
        }
        Some(order)
    }
}

pub fn recursion_free(es: &EquationSystem) -> bool {
    DepGraph::of(es).find_cycle().is_none()
}

/// Unfolds a recursion-free system into one closed formula.
pub fn toform(es: &EquationSystem) -> Result<Formula> {
    let g = DepGraph::of(es);
    if let Some(n) = g.find_cycle() {
        return Err(Error::NotRecursionFree(n));
    }
    let order = g.leaves_first().expect("acyclic");
    eliminate(es, &order)
}

/// Unfolds any system into one formula, binding each definition with μ.
pub fn to_mu_formula(es: &EquationSystem) -> Result<Formula> {
    let order = DepGraph::of(es)
        .leaves_first()
        .unwrap_or_else(|| es.defs.iter().map(|d| d.name.clone()).collect());
    eliminate(es, &order)
}

/// Eliminates definitions one at a time in `order`, substituting
/// `μF.λx̄.φ` (or just `λx̄.φ` when `F` is not self-referential) everywhere.
fn eliminate(es: &EquationSystem, order: &[Ident]) -> Result<Formula> {
    let mut bodies: Vec<(Ident, Sort, Formula)> = Vec::new();
    for d in &es.defs {
        let s = es
            .env
            .get(&d.name)
            .ok_or_else(|| Error::UnboundVariable(d.name.clone()))?
            .clone();
        bodies.push((d.name.clone(), s, d.as_lambda()?));
    }
    let mut main = es.main.clone();
    for name in order {
        let i = bodies
            .iter()
            .position(|(n, _, _)| n == name)
            .ok_or_else(|| Error::Invariant(format!("unknown definition `{name}`")))?;
        let (n, s, lam) = bodies.remove(i);
        let closed = if lam.occurs_free(&n) {
            Formula::mu(n.clone(), s, lam)
        } else {
            lam
        };
        let mut m = HashMap::new();
        m.insert(n, Arg::F(closed));
        for (_, _, b) in bodies.iter_mut() {
            *b = b.substitute(&m);
        }
        main = main.substitute(&m);
    }
    Ok(main)
}

/// Stage-indexed copies: `F@i` calls stage `i−1`, `F@0` is guarded by FALSE,
/// and the main formula calls stage `m`.
pub fn m_approximation(es: &EquationSystem, m: usize) -> Result<EquationSystem> {
    let es = es.eta_expand()?;
    let names = es.def_names();
    let at = |stage: usize| -> HashMap<Ident, Arg> {
        names
            .iter()
            .map(|n| (n.clone(), Arg::F(Formula::Var(n.stage(stage)))))
            .collect()
    };
    let mut env = SimpleTypeEnv::new();
    for (x, s) in &es.env {
        if !names.contains(x) {
            env.insert(x.clone(), s.clone());
        }
    }
    let mut defs = Vec::new();
    for i in 0..=m {
        let sub = at(i.saturating_sub(1));
        for d in &es.defs {
            env.insert(d.name.stage(i), es.env[&d.name].clone());
            let body = without_params(&d.body, &d.bindings(), &sub);
            let body = if i == 0 {
                Formula::and(Formula::ff(), body)
            } else {
                body
            };
            defs.push(Definition {
                name: d.name.stage(i),
                params: d.params.clone(),
                body,
            });
        }
    }
    let main = es.main.substitute(&at(m));
    Ok(EquationSystem {
        env,
        defs,
        main,
        maxar: es.maxar,
    })
}

/// Substitutes in a body whose parameters shadow some keys of `sub`.
fn without_params(body: &Formula, params: &[(Ident, Sort)], sub: &HashMap<Ident, Arg>) -> Formula {
    let mut sub = sub.clone();
    for (x, _) in params {
        sub.remove(x);
    }
    body.substitute(&sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;
    use crate::semantics::{search_valid, SearchBudget, Verdict};

    const SELF: &str = "%ENV\nF : int -> prop;\n%DEFS\nF x =mu F x;\n%MAIN F 0;\n";

    #[test]
    fn self_edge_is_not_recursion_free() {
        let es = parse_system(SELF).unwrap();
        assert!(!recursion_free(&es));
        assert!(matches!(toform(&es), Err(Error::NotRecursionFree(_))));
    }

    #[test]
    fn empty_system_unfolds_to_main() {
        let es = EquationSystem::from_formula(Formula::tt());
        assert!(recursion_free(&es));
        assert_eq!(toform(&es).unwrap(), Formula::tt());
    }

    #[test]
    fn false_guard_hides_dependencies() {
        let src = "%ENV\nF : int -> prop;\n%DEFS\nF x =mu false /\\ F x;\n%MAIN F 0;\n";
        assert!(recursion_free(&parse_system(src).unwrap()));
    }

    #[test]
    fn approximation_is_recursion_free() {
        let es = parse_system(SELF).unwrap();
        for m in 0..4 {
            let a = m_approximation(&es, m).unwrap();
            assert!(recursion_free(&a));
            assert_eq!(a.defs.len(), m + 1);
            a.typecheck().unwrap();
        }
    }

    #[test]
    fn unfolding_a_chain() {
        let src = "%ENV\nF : int -> prop;\nG : int -> prop;\n%DEFS\n\
                   F x =mu G (x + 1);\nG y =mu y = 3;\n%MAIN F 2;\n";
        let es = parse_system(src).unwrap();
        let f = toform(&es).unwrap();
        crate::typeck::check_closed_prop(&f).unwrap();
        assert!(matches!(
            search_valid(&f, &SearchBudget::default()).unwrap(),
            Verdict::Valid { .. }
        ));
    }
}
