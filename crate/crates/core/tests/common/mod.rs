//! Seeded generators of well-typed closed formulas and normalized systems.
#![allow(dead_code)]

use hflz::{Formula, Ident, IntExpr, Sort};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Recursive binder in scope: its name, its counter and, for order-1
/// binders, the continuation parameter.
#[derive(Clone)]
struct Rec {
    name: Ident,
    counter: Ident,
    up: bool,
    bound: i64,
    cont: Option<Ident>,
}

#[derive(Clone, Default)]
struct Scope {
    ints: Vec<Ident>,
    preds: Vec<Ident>,
    rec: Option<Rec>,
}

pub struct FormulaGen<'r> {
    rng: &'r mut Rng8,
    next: usize,
    /// Allow `/\` between non-guards.
    pub conjunctions: bool,
    /// Allow `mu`.
    pub recursion: bool,
    /// Allow order-1 `mu` binders.
    pub higher: bool,
    /// Allow `exists`.
    pub exists: bool,
}

impl<'r> FormulaGen<'r> {
    pub fn new(rng: &'r mut Rng8) -> Self {
        FormulaGen {
            rng,
            next: 0,
            conjunctions: true,
            recursion: true,
            higher: true,
            exists: true,
        }
    }

    fn name(&mut self, base: &str) -> Ident {
        self.next += 1;
        Ident::new(&format!("{base}{}", self.next))
    }

    fn int(&mut self, sc: &Scope) -> IntExpr {
        let lit = IntExpr::lit(self.rng.gen_range(-3..=3));
        if sc.ints.is_empty() || self.rng.gen_bool(0.3) {
            return lit;
        }
        let v = IntExpr::Var(sc.ints.choose(self.rng).unwrap().clone());
        match self.rng.gen_range(0..4) {
            0 => IntExpr::add(v, lit),
            1 if sc.ints.len() > 1 => {
                let w = IntExpr::Var(sc.ints.choose(self.rng).unwrap().clone());
                IntExpr::add(v, w)
            }
            _ => v,
        }
    }

    fn le(&mut self, sc: &Scope) -> Formula {
        let a = self.int(sc);
        let b = self.int(sc);
        Formula::le(a, b)
    }

    /// Guarded recursive call of the innermost `mu`.
    fn rec_call(&mut self, sc: &Scope, fuel: usize) -> Option<Formula> {
        let r = sc.rec.clone()?;
        let x = IntExpr::Var(r.counter.clone());
        let (guard, next) = if r.up {
            (Formula::le(x.clone(), IntExpr::lit(r.bound)), IntExpr::add(x, IntExpr::lit(1)))
        } else {
            (Formula::le(IntExpr::lit(r.bound), x.clone()), IntExpr::add(x, IntExpr::lit(-1)))
        };
        let head = Formula::Var(r.name.clone());
        let call = match &r.cont {
            None => Formula::app_int(head, next),
            Some(k) => {
                let arg = if fuel > 2 && self.rng.gen_bool(0.5) {
                    let y = self.name("y");
                    let c = self.rng.gen_range(-1..=1);
                    let body = Formula::app_int(
                        Formula::Var(k.clone()),
                        IntExpr::add(IntExpr::Var(y.clone()), IntExpr::lit(c)),
                    );
                    Formula::abs(y, Sort::Int, body)
                } else {
                    Formula::Var(k.clone())
                };
                Formula::app_int(Formula::app(head, arg), next)
            }
        };
        Some(Formula::and(guard, call))
    }

    /// A formula of sort prop, roughly `fuel` nodes.
    fn prop(&mut self, sc: &Scope, fuel: usize) -> Formula {
        if fuel <= 1 {
            return if !sc.preds.is_empty() && self.rng.gen_bool(0.4) {
                let k = sc.preds.choose(self.rng).unwrap().clone();
                let e = self.int(sc);
                Formula::app_int(Formula::Var(k), e)
            } else {
                self.le(sc)
            };
        }
        let pick = self.rng.gen_range(0..100);
        match pick {
            0..=19 => {
                let l = fuel / 2;
                Formula::or(self.prop(sc, l), self.prop(sc, fuel - l))
            }
            20..=34 => {
                let g = self.le(sc);
                Formula::and(g, self.prop(sc, fuel - 1))
            }
            35..=46 if self.conjunctions => {
                let l = fuel / 2;
                Formula::and(self.prop(sc, l), self.prop(sc, fuel - l))
            }
            47..=58 if sc.rec.is_some() => self.rec_call(sc, fuel).unwrap(),
            59..=71 if self.recursion && fuel >= 6 => self.mu0(sc, fuel),
            72..=85 if self.recursion && self.higher && fuel >= 8 => self.mu1(sc, fuel),
            86..=88 if self.exists && fuel >= 4 => {
                let z = self.name("z");
                let mut inner = sc.clone();
                inner.ints.push(z.clone());
                let c = self.rng.gen_range(-2..=2);
                let zv = IntExpr::Var(z.clone());
                let eq = Formula::and(
                    Formula::le(zv.clone(), IntExpr::lit(c)),
                    Formula::le(IntExpr::lit(c), zv),
                );
                Formula::exists(z, Formula::and(eq, self.prop(&inner, fuel - 3)))
            }
            91..=99 if fuel >= 4 => {
                // (\x : int. body) e
                let x = self.name("x");
                let mut inner = sc.clone();
                inner.ints.push(x.clone());
                let body = self.prop(&inner, fuel - 2);
                let e = self.int(sc);
                Formula::app_int(Formula::abs(x, Sort::Int, body), e)
            }
            _ => self.le(sc),
        }
    }

    fn counter_spec(&mut self) -> (bool, i64, IntExpr) {
        let up = self.rng.gen_bool(0.5);
        let bound = self.rng.gen_range(-1..=3) * if up { 1 } else { -1 };
        (up, bound, IntExpr::lit(self.rng.gen_range(-3..=3)))
    }

    /// `(mu f : int -> prop. \x. body) e`
    fn mu0(&mut self, sc: &Scope, fuel: usize) -> Formula {
        let f = self.name("f");
        let x = self.name("x");
        let (up, bound, start) = self.counter_spec();
        let mut inner = sc.clone();
        inner.ints.push(x.clone());
        inner.rec = Some(Rec {
            name: f.clone(),
            counter: x.clone(),
            up,
            bound,
            cont: None,
        });
        let mut body = self.prop(&inner, fuel - 3);
        if !body.occurs_free(&f) {
            let call = self.rec_call(&inner, 0).unwrap();
            body = Formula::or(body, call);
        }
        Formula::app_int(
            Formula::mu(f, Sort::int_pred(1), Formula::abs(x, Sort::Int, body)),
            start,
        )
    }

    /// `(mu g : (int -> prop) -> int -> prop. \k. \x. body) (\y. phi) e`
    fn mu1(&mut self, sc: &Scope, fuel: usize) -> Formula {
        let g = self.name("g");
        let k = self.name("k");
        let x = self.name("x");
        let (up, bound, start) = self.counter_spec();
        let mut inner = Scope {
            ints: vec![x.clone()],
            preds: vec![k.clone()],
            rec: None,
        };
        inner.rec = Some(Rec {
            name: g.clone(),
            counter: x.clone(),
            up,
            bound,
            cont: Some(k.clone()),
        });
        let budget = (fuel - 5) * 2 / 3;
        let mut body = self.prop(&inner, budget.max(1));
        if !body.occurs_free(&g) {
            let call = self.rec_call(&inner, 0).unwrap();
            body = Formula::or(body, call);
        }
        let y = self.name("y");
        let mut arg_sc = sc.clone();
        arg_sc.ints.push(y.clone());
        arg_sc.rec = None;
        let arg_body = self.prop(&arg_sc, (fuel - 5 - budget).max(1));
        let gs = Sort::arrows([Sort::int_pred(1), Sort::Int], Sort::Prop);
        Formula::app_int(
            Formula::app(
                Formula::mu(
                    g,
                    gs,
                    Formula::abs(k, Sort::int_pred(1), Formula::abs(x, Sort::Int, body)),
                ),
                Formula::abs(y, Sort::Int, arg_body),
            ),
            start,
        )
    }

    /// A closed prop formula with at most `max_size` nodes.
    pub fn closed(&mut self, max_size: usize) -> Formula {
        loop {
            let fuel = self.rng.gen_range(3..=max_size / 2);
            let sc = Scope::default();
            // Half of the formulas start with a fixpoint.
            let f = match self.rng.gen_range(0..4) {
                0 if self.recursion && fuel >= 6 => self.mu0(&sc, fuel),
                1 if self.recursion && self.higher && fuel >= 8 => self.mu1(&sc, fuel),
                _ => self.prop(&sc, fuel),
            };
            if f.size() <= max_size {
                return f;
            }
        }
    }

    /// A closed formula where `n` occurs free as an integer.
    pub fn with_free_int(&mut self, n: &Ident, max_size: usize) -> Formula {
        loop {
            let fuel = self.rng.gen_range(3..=max_size / 2);
            let sc = Scope {
                ints: vec![n.clone()],
                ..Scope::default()
            };
            let f = self.prop(&sc, fuel);
            if f.size() <= max_size && f.occurs_free(n) {
                return f;
            }
        }
    }

    /// A closed disjunctive formula without `mu`: local λ-abstractions of
    /// order 0 and 1 that normalize to recursion-free systems.
    pub fn recursion_free(&mut self, max_size: usize) -> Formula {
        loop {
            let fuel = self.rng.gen_range(4..=max_size / 2);
            let f = self.nonrec(&Scope::default(), fuel);
            if f.size() <= max_size {
                return f;
            }
        }
    }

    fn nonrec(&mut self, sc: &Scope, fuel: usize) -> Formula {
        if fuel <= 2 {
            return self.prop(sc, 1);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => {
                let l = fuel / 2;
                Formula::or(self.nonrec(sc, l), self.nonrec(sc, fuel - l))
            }
            3..=4 => {
                let g = self.le(sc);
                Formula::and(g, self.nonrec(sc, fuel - 1))
            }
            5..=6 => {
                let x = self.name("x");
                let mut inner = sc.clone();
                inner.ints.push(x.clone());
                let body = self.nonrec(&inner, fuel - 2);
                let e = self.int(sc);
                Formula::app_int(Formula::abs(x, Sort::Int, body), e)
            }
            _ if fuel >= 6 => {
                // (\k : int -> prop. \x : int. body) (\y : int. phi) e
                let k = self.name("k");
                let x = self.name("x");
                let y = self.name("y");
                let inner = Scope {
                    ints: vec![x.clone()],
                    preds: vec![k.clone()],
                    rec: None,
                };
                let half = (fuel - 4) / 2;
                let mut body = self.nonrec(&inner, half.max(1));
                if !body.occurs_free(&k) {
                    body = Formula::or(
                        body,
                        Formula::app_int(Formula::Var(k.clone()), IntExpr::Var(x.clone())),
                    );
                }
                let mut arg_sc = sc.clone();
                arg_sc.ints.push(y.clone());
                let arg = self.nonrec(&arg_sc, (fuel - 4 - half).max(1));
                let e = self.int(sc);
                Formula::app_int(
                    Formula::app(
                        Formula::abs(k, Sort::int_pred(1), Formula::abs(x, Sort::Int, body)),
                        Formula::abs(y, Sort::Int, arg),
                    ),
                    e,
                )
            }
            _ => self.prop(sc, 1),
        }
    }
}

/// Signature of a generated definition: predicate parameters first, then
/// integer parameters.
#[derive(Clone)]
struct Sig {
    name: Ident,
    preds: usize,
    ints: usize,
}

/// Normalized, recursion-free, disjunctive order-1 systems. Definition `i`
/// only calls definitions `j > i`; bodies follow the normalized grammar.
pub struct SystemGen<'r> {
    rng: &'r mut Rng8,
    m: usize,
    sigs: Vec<Sig>,
}

impl<'r> SystemGen<'r> {
    pub fn new(rng: &'r mut Rng8) -> Self {
        SystemGen {
            rng,
            m: 1,
            sigs: Vec::new(),
        }
    }

    fn sort_of(&self, s: &Sig) -> Sort {
        let mut args = vec![Sort::int_pred(self.m); s.preds];
        args.extend(std::iter::repeat(Sort::Int).take(s.ints));
        Sort::arrows(args, Sort::Prop)
    }

    fn int(&mut self, ints: &[Ident]) -> IntExpr {
        let lit = IntExpr::lit(self.rng.gen_range(-3..=3));
        if ints.is_empty() || self.rng.gen_bool(0.35) {
            return lit;
        }
        let v = IntExpr::Var(ints.choose(self.rng).unwrap().clone());
        if self.rng.gen_bool(0.4) {
            IntExpr::add(v, lit)
        } else {
            v
        }
    }

    fn ints_for(&mut self, n: usize, ints: &[Ident]) -> Vec<IntExpr> {
        (0..n).map(|_| self.int(ints)).collect()
    }

    /// An argument of sort `int^m -> prop` inside definition `i`.
    fn pred_arg(&mut self, i: usize, preds: &[Ident], ints: &[Ident]) -> Formula {
        let partial: Vec<usize> = (i + 1..self.sigs.len())
            .filter(|&k| self.sigs[k].ints >= self.m)
            .collect();
        if !partial.is_empty() && self.rng.gen_bool(0.3) {
            let k = *partial.choose(self.rng).unwrap();
            let sig = self.sigs[k].clone();
            let mut f = Formula::Var(sig.name.clone());
            for _ in 0..sig.preds {
                f = Formula::app(f, Formula::Var(preds.choose(self.rng).unwrap().clone()));
            }
            for e in self.ints_for(sig.ints - self.m, ints) {
                f = Formula::app_int(f, e);
            }
            return f;
        }
        Formula::Var(preds.choose(self.rng).unwrap().clone())
    }

    fn leaf(&mut self, i: usize, preds: &[Ident], ints: &[Ident]) -> Formula {
        if i + 1 < self.sigs.len() && self.rng.gen_bool(0.55) {
            let j = self.rng.gen_range(i + 1..self.sigs.len());
            let sig = self.sigs[j].clone();
            let mut f = Formula::Var(sig.name.clone());
            for _ in 0..sig.preds {
                let a = self.pred_arg(i, preds, ints);
                f = Formula::app(f, a);
            }
            for e in self.ints_for(sig.ints, ints) {
                f = Formula::app_int(f, e);
            }
            return f;
        }
        let p = Formula::Var(preds.choose(self.rng).unwrap().clone());
        self.ints_for(self.m, ints).into_iter().fold(p, Formula::app_int)
    }

    fn body(&mut self, i: usize, preds: &[Ident], ints: &[Ident], fuel: usize) -> Formula {
        if fuel <= 1 {
            return self.leaf(i, preds, ints);
        }
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let l = fuel / 2;
                Formula::or(self.body(i, preds, ints, l), self.body(i, preds, ints, fuel - l))
            }
            4..=6 => {
                let g = Formula::le(self.int(ints), self.int(ints));
                Formula::and(g, self.body(i, preds, ints, fuel - 1))
            }
            _ => self.leaf(i, preds, ints),
        }
    }

    /// A system with `1..=max_defs` definitions besides the entry `S`.
    pub fn system(&mut self, max_defs: usize) -> hflz::EquationSystem {
        use hflz::{Definition, Param};
        self.m = if self.rng.gen_bool(0.75) { 1 } else { 2 };
        let n = self.rng.gen_range(1..=max_defs);
        self.sigs = vec![Sig {
            name: Ident::new("S"),
            preds: 1,
            ints: 0,
        }];
        for i in 1..=n {
            let preds = self.rng.gen_range(1..=2);
            let ints = self.rng.gen_range(0..=self.m + 1);
            self.sigs.push(Sig {
                name: Ident::new(&format!("F{i}")),
                preds,
                ints,
            });
        }
        let mut env = hflz::SimpleTypeEnv::new();
        let mut defs = Vec::new();
        for i in 0..self.sigs.len() {
            let sig = self.sigs[i].clone();
            env.insert(sig.name.clone(), self.sort_of(&sig));
            let preds: Vec<Ident> = (0..sig.preds).map(|j| Ident::new(&format!("p{j}"))).collect();
            let ints: Vec<Ident> = (0..sig.ints).map(|j| Ident::new(&format!("x{j}"))).collect();
            let fuel = self.rng.gen_range(1..=6);
            let body = self.body(i, &preds, &ints, fuel);
            let mut params: Vec<Param> = preds
                .iter()
                .map(|p| Param::Var(p.clone(), Sort::int_pred(self.m)))
                .collect();
            params.extend(ints.iter().map(|x| Param::Var(x.clone(), Sort::Int)));
            defs.push(Definition {
                name: sig.name.clone(),
                params,
                body,
            });
        }
        let zs: Vec<(Ident, Sort)> = (0..self.m)
            .map(|j| (Ident::new(&format!("z{j}")), Sort::Int))
            .collect();
        let main = Formula::app(Formula::var("S"), Formula::abs_many(zs, Formula::tt()));
        hflz::EquationSystem {
            env,
            defs,
            main,
            maxar: Some(self.m),
        }
    }
}
