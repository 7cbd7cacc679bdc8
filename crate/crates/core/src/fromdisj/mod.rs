//! Order-lowering translation: a normalized order-(n+1) disjunctive equation
//! system becomes an order-n system.
//!
//! Each subformula of sort τ is translated to a bundle
//! `(φ_s, φ_0, φ_1, …, φ_k, φ_{k+1}, …, φ_{k+gar(τ)})` where `k` is the number
//! of order-0 predicate parameters of the enclosing definition. Component `j`
//! of the bundle says "the formula reaches the `j`-th predicate parameter
//! with these integers"; the star component additionally allows the full
//! higher-order behaviour of the Γ parameters.

pub mod flatten;
pub mod simplify;

use std::collections::HashMap;
use std::fmt;

pub use flatten::flatten_tuples;
pub use simplify::simplify;

use crate::eqsys::{Definition, EquationSystem, Param};
use crate::error::{Error, Result};
use crate::formula::{order_of_formula, Formula, IntExpr};
use crate::ident::Ident;
use crate::sort::Sort;
use crate::typeck::{typecheck_with, SimpleTypeEnv};

/// `decomp(τ) = (σ̄, m, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecomp {
    pub higher_sorts: Vec<Sort>,
    pub pred_count: usize,
    pub int_count: usize,
}

/// `decomparg(w̄, τ) = (Γ, x̄, z̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSplit {
    pub higher: Vec<(Ident, Sort)>,
    pub predvars: Vec<Ident>,
    pub intvars: Vec<Ident>,
}

pub fn decomp_sort(s: &Sort) -> Result<SortDecomp> {
    match s {
        Sort::Prop => Ok(SortDecomp {
            higher_sorts: Vec::new(),
            pred_count: 0,
            int_count: 0,
        }),
        Sort::Arrow(a, r) => {
            let mut d = decomp_sort(r)?;
            if !d.higher_sorts.is_empty() || a.order() > 0 {
                d.higher_sorts.insert(0, (**a).clone());
            } else if **a == Sort::Int {
                d.int_count += 1;
            } else if a.int_pred_arity().is_some() {
                d.pred_count += 1;
            } else {
                return Err(Error::SortMismatch(format!(
                    "argument sort {a} is neither int, an integer predicate nor higher order"
                )));
            }
            Ok(d)
        }
        _ => Err(Error::SortMismatch(format!(
            "{s} is not a product-free predicate sort"
        ))),
    }
}

/// Number of order-0 predicate arguments after the last higher-order one.
pub fn gar(s: &Sort) -> usize {
    decomp_sort(s).map(|d| d.pred_count).unwrap_or(0)
}

pub fn decomp_params(params: &[(Ident, Sort)], fsort: &Sort) -> Result<ParamSplit> {
    let (args, res) = fsort.uncurry();
    if args.len() != params.len() || *res != Sort::Prop {
        return Err(Error::ArityMismatch(format!(
            "{} parameters for sort {fsort}",
            params.len()
        )));
    }
    for ((x, s), want) in params.iter().zip(&args) {
        if s != *want {
            return Err(Error::ArityMismatch(format!(
                "parameter {x} : {s} where {want} is expected"
            )));
        }
    }
    let cut = params
        .iter()
        .rposition(|(_, s)| s.order() > 0)
        .map_or(0, |i| i + 1);
    let mut split = ParamSplit {
        higher: params[..cut].to_vec(),
        predvars: Vec::new(),
        intvars: Vec::new(),
    };
    for (x, s) in &params[cut..] {
        if *s == Sort::Int {
            split.intvars.push(x.clone());
        } else if s.int_pred_arity().is_some() {
            split.predvars.push(x.clone());
        } else {
            return Err(Error::SortMismatch(format!("parameter {x} : {s}")));
        }
    }
    Ok(split)
}

/// `(τ)_k`: `k` copies of `(σ̄)_2 → INT^{n+M} → Prop` followed by `m` copies
/// of `(σ̄)_1 → INT^{n+M} → Prop`. `INT` is left alone.
pub fn lower_sort(s: &Sort, k: usize, maxar: usize) -> Result<Sort> {
    if *s == Sort::Int {
        return Ok(Sort::Int);
    }
    let d = decomp_sort(s)?;
    let tail = Sort::int_pred(d.int_count + maxar);
    let full = d
        .higher_sorts
        .iter()
        .map(|h| lower_sort(h, 2, maxar))
        .collect::<Result<Vec<_>>>()?;
    let reduced = d
        .higher_sorts
        .iter()
        .map(|h| lower_sort(h, 1, maxar))
        .collect::<Result<Vec<_>>>()?;
    let mut comps = Vec::with_capacity(k + d.pred_count);
    for _ in 0..k {
        comps.push(Sort::arrows(full.clone(), tail.clone()));
    }
    for _ in 0..d.pred_count {
        comps.push(Sort::arrows(reduced.clone(), tail.clone()));
    }
    Ok(Sort::product(comps))
}

fn components(s: Sort) -> Vec<Sort> {
    match s {
        Sort::Product(cs) => cs,
        s => vec![s],
    }
}

/// The translated bundle of one subformula.
#[derive(Clone, PartialEq, Eq)]
pub struct TranslationBundle {
    pub star: Formula,
    pub indexed: Vec<Formula>,
}

impl TranslationBundle {
    fn from_vec(mut v: Vec<Formula>) -> Self {
        let star = v.remove(0);
        TranslationBundle { star, indexed: v }
    }

    pub fn len(&self) -> usize {
        1 + self.indexed.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Star component first.
    pub fn components(&self) -> Vec<Formula> {
        let mut v = vec![self.star.clone()];
        v.extend(self.indexed.iter().cloned());
        v
    }
}

impl fmt::Debug for TranslationBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "*: {}", self.star)?;
        for (i, c) in self.indexed.iter().enumerate() {
            writeln!(f, "{i}: {c}")?;
        }
        Ok(())
    }
}

/// Translation context of one definition body.
pub struct LowerCtx<'a> {
    pub split: ParamSplit,
    pub xi: &'a SimpleTypeEnv,
    pub maxar: usize,
    /// Typecheck every bundle and the star non-occurrence property as it is built.
    pub check: bool,
    higher: HashMap<Ident, Sort>,
    lowered_xi: Option<SimpleTypeEnv>,
}

impl<'a> LowerCtx<'a> {
    pub fn new(split: ParamSplit, xi: &'a SimpleTypeEnv, maxar: usize) -> Self {
        let higher = split.higher.iter().cloned().collect();
        LowerCtx {
            split,
            xi,
            maxar,
            check: false,
            higher,
            lowered_xi: None,
        }
    }

    pub fn checked(mut self) -> Result<Self> {
        self.lowered_xi = Some(lower_env(self.xi, self.maxar)?);
        self.check = true;
        Ok(self)
    }

    fn k(&self) -> usize {
        self.split.predvars.len()
    }

    fn ints(&self, base: &str, n: usize) -> Vec<Ident> {
        (0..n).map(|_| Ident::fresh(base)).collect()
    }

    fn sort_of_var(&self, x: &Ident) -> Result<Sort> {
        if self.split.predvars.contains(x) {
            return Ok(Sort::int_pred(self.maxar));
        }
        if self.split.intvars.contains(x) {
            return Ok(Sort::Int);
        }
        if let Some(s) = self.higher.get(x) {
            return Ok(s.clone());
        }
        self.xi
            .get(x)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(x.clone()))
    }

    /// Translated local environment: Γ components and the integer parameters.
    pub fn lowered_locals(&self) -> Result<Vec<(Ident, Sort)>> {
        let mut out = Vec::new();
        for (y, s) in &self.split.higher {
            if *s == Sort::Int {
                out.push((y.clone(), Sort::Int));
            } else {
                out.extend(full_tuple(y, s, self.maxar)?);
            }
        }
        for z in &self.split.intvars {
            out.push((z.clone(), Sort::Int));
        }
        Ok(out)
    }

    fn tr(&self, f: &Formula) -> Result<(Vec<Formula>, Sort)> {
        let k = self.k();
        let m_ar = self.maxar;
        let (comps, sort) = match f {
            Formula::Var(x) => {
                let s = self.sort_of_var(x)?;
                if s == Sort::Int {
                    return Err(Error::SortMismatch(format!("integer `{x}` used as a formula")));
                }
                if let Some(i) = self.split.predvars.iter().position(|p| p == x) {
                    // Tr-VarG
                    let zs = self.ints("z", m_ar);
                    let ws = self.ints("w", m_ar);
                    let eq = Formula::eq_all(
                        zs.iter()
                            .zip(&ws)
                            .map(|(z, w)| (IntExpr::Var(z.clone()), IntExpr::Var(w.clone())))
                            .collect(),
                    );
                    let comps = (0..k + 2)
                        .map(|j| {
                            let body = if j == i + 2 { eq.clone() } else { Formula::ff() };
                            int_abs(&zs, int_abs(&ws, body))
                        })
                        .collect();
                    (comps, s)
                } else if self.higher.contains_key(x) {
                    // Tr-Var
                    let m = gar(&s);
                    let mut comps = vec![Formula::Var(x.component(None))];
                    for _ in 0..=k {
                        comps.push(Formula::Var(x.component(Some(0))));
                    }
                    for i in 1..=m {
                        comps.push(Formula::Var(x.component(Some(i))));
                    }
                    (comps, s)
                } else {
                    // Tr-VarF
                    let m = gar(&s);
                    let mut comps = Vec::new();
                    for _ in 0..k + 2 {
                        comps.push(Formula::Var(x.component(Some(0))));
                    }
                    for i in 1..=m {
                        comps.push(Formula::Var(x.component(Some(i))));
                    }
                    (comps, s)
                }
            }
            Formula::And(g, body) if matches!(**g, Formula::Le(..)) => {
                // Tr-Le
                let (bs, s) = self.tr(body)?;
                expect_prop(&s, f)?;
                let comps = bs
                    .into_iter()
                    .map(|c| {
                        let zs = self.ints("z", m_ar);
                        int_abs(&zs, Formula::and((**g).clone(), app_ints(c, &zs)))
                    })
                    .collect();
                (comps, Sort::Prop)
            }
            Formula::Or(a, b) => {
                // Tr-Disj
                let (xa, sa) = self.tr(a)?;
                let (xb, sb) = self.tr(b)?;
                expect_prop(&sa, a)?;
                expect_prop(&sb, b)?;
                let comps = xa
                    .into_iter()
                    .zip(xb)
                    .map(|(p, q)| {
                        let zs = self.ints("z", m_ar);
                        int_abs(&zs, Formula::or(app_ints(p, &zs), app_ints(q, &zs)))
                    })
                    .collect();
                (comps, Sort::Prop)
            }
            Formula::AppInt(h, e) => {
                // Tr-AppI
                let (hs, s) = self.tr(h)?;
                let res = match &s {
                    Sort::Arrow(a, r) if **a == Sort::Int => (**r).clone(),
                    _ => {
                        return Err(Error::SortMismatch(format!(
                            "`{h}` : {s} applied to an integer"
                        )))
                    }
                };
                let comps = hs.into_iter().map(|c| Formula::app_int(c, e.clone())).collect();
                (comps, res)
            }
            Formula::App(h, a) => {
                let (hs, s) = self.tr(h)?;
                let (arg, res) = match &s {
                    Sort::Arrow(a, r) if **a != Sort::Int => ((**a).clone(), (**r).clone()),
                    _ => {
                        return Err(Error::SortMismatch(format!(
                            "`{h}` : {s} applied to a formula"
                        )))
                    }
                };
                let (xs, sa) = self.tr(a)?;
                if sa != arg {
                    return Err(Error::SortMismatch(format!(
                        "argument `{a}` : {sa} where {arg} is expected"
                    )));
                }
                if s.order() > 1 {
                    // Tr-App
                    let tail = &xs[k + 2..];
                    let mut comps = Vec::with_capacity(hs.len());
                    for (j, phi) in hs.iter().enumerate() {
                        let mut tup = Vec::with_capacity(tail.len() + 2);
                        if j < k + 2 {
                            tup.push(xs[j].clone());
                        }
                        tup.push(xs[1].clone());
                        tup.extend(tail.iter().cloned());
                        comps.push(Formula::app(phi.clone(), Formula::tuple(tup)));
                    }
                    (comps, res)
                } else {
                    // Tr-AppG
                    if arg != Sort::int_pred(m_ar) {
                        return Err(Error::NotNormalized(format!(
                            "predicate argument of sort {arg}, expected arity {m_ar}"
                        )));
                    }
                    let p = decomp_sort(&res)?.int_count;
                    let call = &hs[k + 2];
                    let mut comps = Vec::with_capacity(hs.len() - 1);
                    for j in 0..k + 2 {
                        let zs = self.ints("z", p);
                        let ws = self.ints("w", m_ar);
                        let us = self.ints("u", m_ar);
                        let direct = app_ints(app_ints(hs[j].clone(), &zs), &ws);
                        let via = Formula::exists_many(
                            us.iter().cloned(),
                            Formula::and(
                                app_ints(app_ints(call.clone(), &zs), &us),
                                app_ints(app_ints(xs[j].clone(), &us), &ws),
                            ),
                        );
                        comps.push(int_abs(&zs, int_abs(&ws, Formula::or(direct, via))));
                    }
                    comps.extend(hs[k + 3..].iter().cloned());
                    (comps, res)
                }
            }
            _ => {
                let mut shown = f.to_string();
                shown.truncate(120);
                return Err(Error::GrammarViolation(shown));
            }
        };
        if self.check {
            self.check_bundle(&comps, &sort)?;
        }
        Ok((comps, sort))
    }

    fn check_bundle(&self, comps: &[Formula], sort: &Sort) -> Result<()> {
        let k = self.k();
        let want = components(lower_sort(sort, k + 2, self.maxar)?);
        let want_len = 2 + k + gar(sort);
        if comps.len() != want_len || want.len() != want_len {
            return Err(Error::Invariant(format!(
                "bundle of width {} for sort {sort}, expected {want_len}",
                comps.len()
            )));
        }
        let env = self.lowered_xi.as_ref().expect("checked context");
        let locals = self.lowered_locals()?;
        for (j, (c, w)) in comps.iter().zip(&want).enumerate() {
            let got = typecheck_with(env, &locals, c)?;
            if &got != w {
                return Err(Error::Invariant(format!(
                    "component {j} has sort {got}, expected {w}"
                )));
            }
            if j > 0 {
                for (y, _) in &self.split.higher {
                    if c.occurs_free(&y.component(None)) {
                        return Err(Error::Invariant(format!(
                            "{} occurs in component {}",
                            y.component(None),
                            j - 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn expect_prop(s: &Sort, f: &Formula) -> Result<()> {
    if *s != Sort::Prop {
        return Err(Error::type_error(f.to_string(), &Sort::Prop, s));
    }
    Ok(())
}

fn int_abs(xs: &[Ident], body: Formula) -> Formula {
    Formula::abs_many(xs.iter().map(|x| (x.clone(), Sort::Int)), body)
}

fn app_ints(f: Formula, xs: &[Ident]) -> Formula {
    xs.iter()
        .fold(f, |acc, x| Formula::app_int(acc, IntExpr::Var(x.clone())))
}

fn full_tuple(y: &Ident, s: &Sort, maxar: usize) -> Result<Vec<(Ident, Sort)>> {
    let cs = components(lower_sort(s, 2, maxar)?);
    let mut names = vec![y.component(None)];
    names.extend((0..cs.len() - 1).map(|j| y.component(Some(j))));
    Ok(names.into_iter().zip(cs).collect())
}

fn reduced_tuple(y: &Ident, s: &Sort, maxar: usize) -> Result<Vec<(Ident, Sort)>> {
    let cs = components(lower_sort(s, 1, maxar)?);
    Ok((0..cs.len())
        .map(|j| y.component(Some(j)))
        .zip(cs)
        .collect())
}

/// Translates a body of sort `expected` (normally `Prop`).
pub fn lower_formula(ctx: &LowerCtx<'_>, f: &Formula, expected: &Sort) -> Result<TranslationBundle> {
    let (comps, s) = ctx.tr(f)?;
    if &s != expected {
        return Err(Error::type_error(f.to_string(), expected, &s));
    }
    Ok(TranslationBundle::from_vec(comps))
}

/// `F : τ` becomes `F~0, …, F~m` with the components of `(τ)_1`.
pub fn lower_env(xi: &SimpleTypeEnv, maxar: usize) -> Result<SimpleTypeEnv> {
    let mut out = SimpleTypeEnv::new();
    for (f, s) in xi {
        for (j, c) in components(lower_sort(s, 1, maxar)?).into_iter().enumerate() {
            out.insert(f.component(Some(j)), c);
        }
    }
    Ok(out)
}

fn plain_bindings(d: &Definition) -> Result<Vec<(Ident, Sort)>> {
    d.params
        .iter()
        .map(|p| match p {
            Param::Var(x, s) => Ok((x.clone(), s.clone())),
            Param::Tuple(_) => Err(Error::NotNormalized(format!(
                "tuple parameter in `{}`",
                d.name
            ))),
        })
        .collect()
}

/// Tr-Def: `F~0` binds the full tuples, `F~i` the reduced ones.
pub fn lower_def(d: &Definition, xi: &SimpleTypeEnv, maxar: usize) -> Result<Vec<Definition>> {
    lower_def_with(d, xi, maxar, false)
}

/// [`lower_def`] with every intermediate bundle typechecked.
pub fn lower_def_checked(d: &Definition, xi: &SimpleTypeEnv, maxar: usize) -> Result<Vec<Definition>> {
    lower_def_with(d, xi, maxar, true)
}

fn lower_def_with(d: &Definition, xi: &SimpleTypeEnv, maxar: usize, check: bool) -> Result<Vec<Definition>> {
    let fsort = xi
        .get(&d.name)
        .ok_or_else(|| Error::UnboundVariable(d.name.clone()))?;
    let split = decomp_params(&plain_bindings(d)?, fsort)?;
    let mut ctx = LowerCtx::new(split, xi, maxar);
    if check {
        ctx = ctx.checked()?;
    }
    let bundle = lower_formula(&ctx, &d.body, &Sort::Prop)?;
    let mut full = Vec::new();
    let mut reduced = Vec::new();
    for (y, s) in &ctx.split.higher {
        if *s == Sort::Int {
            full.push(Param::Var(y.clone(), Sort::Int));
            reduced.push(Param::Var(y.clone(), Sort::Int));
        } else {
            full.push(Param::tuple(full_tuple(y, s, maxar)?));
            reduced.push(Param::tuple(reduced_tuple(y, s, maxar)?));
        }
    }
    for z in &ctx.split.intvars {
        full.push(Param::Var(z.clone(), Sort::Int));
        reduced.push(Param::Var(z.clone(), Sort::Int));
    }
    let k = ctx.split.predvars.len();
    let mut out = vec![Definition {
        name: d.name.component(Some(0)),
        params: full,
        body: bundle.star,
    }];
    for i in 1..=k {
        out.push(Definition {
            name: d.name.component(Some(i)),
            params: reduced.clone(),
            body: bundle.indexed[i].clone(),
        });
    }
    Ok(out)
}

/// Checks assumption II: every order-0 predicate in an argument position has arity `m`.
pub fn uniform_arity(s: &Sort, m: usize) -> bool {
    match s {
        Sort::Int | Sort::Prop => true,
        Sort::Arrow(a, r) => {
            let arg_ok = if a.order() == 0 {
                **a == Sort::int_pred(m)
            } else {
                uniform_arity(a, m)
            };
            arg_ok && uniform_arity(r, m)
        }
        Sort::Product(cs) => cs.iter().all(|c| uniform_arity(c, m)),
    }
}

/// Checks assumption III and returns the entry point `S` and `M`.
pub fn main_shape(main: &Formula) -> Option<(Ident, usize)> {
    let Formula::App(h, a) = main else {
        return None;
    };
    let Formula::Var(s) = &**h else {
        return None;
    };
    let mut m = 0;
    let mut cur = &**a;
    while let Formula::Abs(_, Sort::Int, b) = cur {
        m += 1;
        cur = b;
    }
    (m > 0 && cur.is_true()).then(|| (s.clone(), m))
}

/// Tr-Main: lowers every definition and replaces the main formula by `∃z̄. S~1 z̄`.
/// The result still uses tuples; see [`flatten_tuples`].
pub fn lower_main(es: &EquationSystem) -> Result<EquationSystem> {
    lower_main_with(es, false)
}

/// [`lower_main`] with every bundle typechecked as it is built.
pub fn lower_main_checked(es: &EquationSystem) -> Result<EquationSystem> {
    lower_main_with(es, true)
}

fn lower_main_with(es: &EquationSystem, check: bool) -> Result<EquationSystem> {
    let (s, m) = main_shape(&es.main)
        .ok_or_else(|| Error::NotNormalized(format!("main formula `{}`", es.main)))?;
    if let Some(decl) = es.maxar {
        if decl != m {
            return Err(Error::NotNormalized(format!(
                "%MAXAR {decl} but the main continuation has arity {m}"
            )));
        }
    }
    if es.env.get(&s) != Some(&Sort::arrow(Sort::int_pred(m), Sort::Prop)) {
        return Err(Error::NotNormalized(format!("entry `{s}` must have sort (int^{m} -> prop) -> prop")));
    }
    for (x, sort) in &es.env {
        if es.def(x).is_none() {
            return Err(Error::NotNormalized(format!("`{x}` is declared but not defined")));
        }
        if !uniform_arity(sort, m) {
            return Err(Error::NotNormalized(format!(
                "`{x} : {sort}` has a predicate argument whose arity is not {m}"
            )));
        }
    }
    let es = es.eta_expand()?;
    let mut defs = Vec::new();
    for d in &es.defs {
        defs.extend(lower_def_with(d, &es.env, m, check)?);
    }
    let zs: Vec<Ident> = (0..m).map(|_| Ident::fresh("z")).collect();
    let main = Formula::exists_many(zs.iter().cloned(), app_ints(Formula::Var(s.component(Some(1))), &zs));
    Ok(EquationSystem {
        env: lower_env(&es.env, m)?,
        defs,
        main,
        maxar: None,
    })
}

/// Largest number of order-0 predicate parameters of any definition.
pub fn max_predvars(es: &EquationSystem) -> usize {
    es.defs
        .iter()
        .filter_map(|d| {
            let b = plain_bindings(d).ok()?;
            let s = es.env.get(&d.name)?;
            Some(decomp_params(&b, s).ok()?.predvars.len())
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug)]
pub struct LowerOptions {
    pub simplify: bool,
    pub flatten: bool,
    pub check: bool,
}

impl Default for LowerOptions {
    fn default() -> Self {
        LowerOptions {
            simplify: true,
            flatten: true,
            check: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerStats {
    pub order_in: i64,
    pub order_out: i64,
    pub defs_in: usize,
    pub defs_out: usize,
    pub nodes_in: usize,
    pub nodes_out: usize,
}

impl fmt::Display for LowerStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order_in={}", self.order_in)?;
        writeln!(f, "order_out={}", self.order_out)?;
        writeln!(f, "defs_in={}", self.defs_in)?;
        writeln!(f, "defs_out={}", self.defs_out)?;
        writeln!(f, "nodes_in={}", self.nodes_in)?;
        writeln!(f, "nodes_out={}", self.nodes_out)
    }
}

/// Order of a lowered system: declared sorts and the main formula.
fn system_order(es: &EquationSystem) -> i64 {
    es.order().max(order_of_formula(&es.main))
}

/// `lower_main`, then optionally `simplify` and `flatten_tuples`.
pub fn lower(es: &EquationSystem, opts: LowerOptions) -> Result<(EquationSystem, LowerStats)> {
    let mut out = lower_main_with(es, opts.check)?;
    if opts.simplify {
        out = simplify(&out);
    }
    if opts.flatten {
        out = flatten_tuples(&out)?;
    }
    let stats = LowerStats {
        order_in: system_order(es),
        order_out: system_order(&out),
        defs_in: es.defs.len(),
        defs_out: out.defs.len(),
        nodes_in: es.node_count(),
        nodes_out: out.node_count(),
    };
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_sort, parse_system};

    fn s(src: &str) -> Sort {
        parse_sort(src).unwrap()
    }

    pub(crate) const D_SUM: &str = "\
%ENV
S : (int -> prop) -> prop;
C : (int -> prop) -> int -> prop;
Sum : (int -> prop) -> int -> (int -> prop) -> prop;
K : (int -> prop) -> int -> int -> prop;
%DEFS
S t =mu Sum t n (C t);
C t r =mu r + 1 <= n /\\ t 0;
Sum t x k =mu x + 1 <= 0 /\\ t 0 \\/ x <= 0 /\\ 0 <= x /\\ k 0 \\/ 1 <= x /\\ Sum t (x - 1) (K k x);
K k x y =mu k (x + y);
%MAIN S (\\z : int. true);
";

    #[test]
    fn decomp_examples() {
        let d = decomp_sort(&s(
            "(int -> prop) -> ((int -> prop) -> prop) -> (int -> prop) -> int -> (int -> prop) -> prop",
        ))
        .unwrap();
        assert_eq!(d.higher_sorts, vec![s("int -> prop"), s("(int -> prop) -> prop")]);
        assert_eq!((d.pred_count, d.int_count), (2, 1));
        assert_eq!(decomp_sort(&Sort::Prop).unwrap().pred_count, 0);
        let d = decomp_sort(&s("int -> (int -> prop) -> prop")).unwrap();
        assert!(d.higher_sorts.is_empty());
        assert_eq!((d.pred_count, d.int_count), (1, 1));
    }

    #[test]
    fn decomp_params_examples() {
        let names: Vec<Ident> = ["u1", "u2", "u3", "u4", "u5"].iter().map(|x| Ident::new(x)).collect();
        let fs = s("int -> ((int -> prop) -> prop) -> int -> (int -> prop) -> int -> prop");
        let (args, _) = fs.uncurry();
        let ps: Vec<_> = names.iter().cloned().zip(args.into_iter().cloned()).collect();
        let sp = decomp_params(&ps, &fs).unwrap();
        assert_eq!(sp.higher.len(), 2);
        assert_eq!(sp.predvars, vec![names[3].clone()]);
        assert_eq!(sp.intvars, vec![names[2].clone(), names[4].clone()]);
        assert!(matches!(
            decomp_params(&ps[..2], &fs),
            Err(Error::ArityMismatch(_))
        ));
    }

    #[test]
    fn lower_sort_examples() {
        let p2 = Sort::int_pred(2);
        assert_eq!(
            lower_sort(&s("int -> (int -> prop) -> prop"), 2, 1).unwrap(),
            Sort::Product(vec![p2.clone(), p2.clone(), p2])
        );
        assert_eq!(lower_sort(&Sort::Prop, 1, 1).unwrap(), Sort::int_pred(1));
        let hs = s("(int -> (int -> prop) -> prop) -> int -> (int -> prop) -> prop");
        assert_eq!(lower_sort(&hs, 1, 1).unwrap().order(), 1);
    }

    #[test]
    fn predvar_bundle() {
        let xi = SimpleTypeEnv::new();
        let split = ParamSplit {
            higher: vec![],
            predvars: vec![Ident::new("a"), Ident::new("b")],
            intvars: vec![],
        };
        let ctx = LowerCtx::new(split, &xi, 1);
        let b = lower_formula(&ctx, &Formula::var("b"), &Sort::int_pred(1)).unwrap();
        assert_eq!(b.len(), 4);
        assert!(crate::formula::alpha_eq(
            &b.indexed[2],
            &crate::parse::parse_formula("\\z : int. \\w : int. z <= w /\\ w <= z").unwrap()
        ));
        for c in [&b.star, &b.indexed[0], &b.indexed[1]] {
            assert!(crate::formula::alpha_eq(
                c,
                &crate::parse::parse_formula("\\z : int. \\w : int. false").unwrap()
            ));
        }
    }

    #[test]
    fn d_sum_definition_counts() {
        let es = parse_system(&D_SUM.replace(" n ", " 3 ").replace("<= n", "<= 3")).unwrap();
        let out = lower_main_checked(&es).unwrap();
        let names: Vec<String> = out.defs.iter().map(|d| d.name.to_string()).collect();
        assert_eq!(
            names,
            ["S~0", "S~1", "C~0", "C~1", "Sum~0", "Sum~1", "Sum~2", "K~0", "K~1"]
        );
        let (flat, stats) = lower(&es, LowerOptions::default()).unwrap();
        assert_eq!(stats.order_out, 0);
        flat.typecheck().unwrap();
    }

    #[test]
    fn grammar_violations_are_reported() {
        let es = parse_system(
            "%ENV\nS : (int -> prop) -> prop;\n%DEFS\nS t =mu 0 <= 1;\n%MAIN S (\\z : int. true);\n",
        )
        .unwrap();
        assert!(matches!(lower_main(&es), Err(Error::GrammarViolation(_))));
    }
}
