//! Canonical printer. Output re-parses to the same formula: only `<=`,
//! `true`, `false`, `+`, `*` and literals are emitted.

use std::fmt::{self, Write};

use num_traits::Signed;

use crate::eqsys::{EquationSystem, Param};
use crate::formula::{Formula, IntExpr};

// Formula precedence: 0 binder, 1 or, 2 and, 3 comparison/application, 4 atom.
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_APP: u8 = 3;
const P_ATOM: u8 = 4;

// Integer precedence: 0 sum, 1 product, 2 atom.
fn int(e: &IntExpr, prec: u8, out: &mut String) {
    match e {
        IntExpr::Lit(n) => {
            if n.is_negative() && prec >= 2 {
                let _ = write!(out, "({n})");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        IntExpr::Var(x) => out.push_str(x.as_str()),
        IntExpr::Add(a, b) => {
            if prec > 0 {
                out.push('(');
            }
            int(a, 0, out);
            out.push_str(" + ");
            int(b, 1, out);
            if prec > 0 {
                out.push(')');
            }
        }
        IntExpr::Mul(a, b) => {
            if prec > 1 {
                out.push('(');
            }
            int(a, 1, out);
            out.push_str(" * ");
            int(b, 2, out);
            if prec > 1 {
                out.push(')');
            }
        }
    }
}

fn formula(f: &Formula, prec: u8, out: &mut String) {
    let open = |out: &mut String, need: bool| {
        if need {
            out.push('(');
        }
    };
    let close = |out: &mut String, need: bool| {
        if need {
            out.push(')');
        }
    };
    match f {
        Formula::Var(x) => out.push_str(x.as_str()),
        Formula::Le(..) if f.is_true() && is_lit_pair(f, 0, 0) => out.push_str("true"),
        Formula::Le(..) if is_lit_pair(f, 1, 0) => out.push_str("false"),
        Formula::Le(a, b) => {
            let need = prec > P_APP;
            open(out, need);
            int(a, 0, out);
            out.push_str(" <= ");
            int(b, 0, out);
            close(out, need);
        }
        Formula::Or(a, b) => {
            let need = prec > P_OR;
            open(out, need);
            formula(a, P_OR, out);
            out.push_str(" \\/ ");
            formula(b, P_AND, out);
            close(out, need);
        }
        Formula::And(a, b) => {
            let need = prec > P_AND;
            open(out, need);
            formula(a, P_APP, out);
            out.push_str(" /\\ ");
            formula(b, P_AND, out);
            close(out, need);
        }
        Formula::Mu(x, s, b) | Formula::Abs(x, s, b) => {
            let need = prec > 0;
            open(out, need);
            if matches!(f, Formula::Mu(..)) {
                let _ = write!(out, "mu {x} : {s}. ");
            } else {
                let _ = write!(out, "\\{x} : {s}. ");
            }
            formula(b, 0, out);
            close(out, need);
        }
        Formula::Exists(x, b) => {
            let need = prec > 0;
            open(out, need);
            let _ = write!(out, "exists {x}. ");
            formula(b, 0, out);
            close(out, need);
        }
        Formula::App(..) | Formula::AppInt(..) => {
            let need = prec > P_APP;
            open(out, need);
            let (head, args) = f.spine();
            formula(head, P_ATOM, out);
            for a in args {
                out.push(' ');
                match a {
                    crate::formula::Arg::F(g) => formula(&g, P_ATOM, out),
                    crate::formula::Arg::I(e) => int(&e, 2, out),
                }
            }
            close(out, need);
        }
        Formula::Tuple(cs) => {
            out.push('<');
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                formula(c, 0, out);
            }
            out.push('>');
        }
    }
}

fn is_lit_pair(f: &Formula, a: i64, b: i64) -> bool {
    matches!(f, Formula::Le(IntExpr::Lit(x), IntExpr::Lit(y)) if *x == a.into() && *y == b.into())
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula(f, 0, &mut s);
    s
}

pub fn print_int(e: &IntExpr) -> String {
    let mut s = String::new();
    int(e, 0, &mut s);
    s
}

pub fn print_system(es: &EquationSystem) -> String {
    let mut out = String::new();
    out.push_str("%ENV\n");
    for (x, s) in &es.env {
        let _ = writeln!(out, "{x} : {s};");
    }
    out.push_str("%DEFS\n");
    for d in &es.defs {
        out.push_str(d.name.as_str());
        for p in &d.params {
            out.push(' ');
            match p {
                Param::Var(x, _) => out.push_str(x.as_str()),
                Param::Tuple(xs) => {
                    out.push('<');
                    for (i, (x, _)) in xs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(x.as_str());
                    }
                    out.push('>');
                }
            }
        }
        out.push_str(" =mu ");
        formula(&d.body, 0, &mut out);
        out.push_str(";\n");
    }
    out.push_str("%MAIN ");
    formula(&es.main, 0, &mut out);
    out.push_str(";\n");
    if let Some(m) = es.maxar {
        let _ = writeln!(out, "%MAXAR {m};");
    }
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_int(self))
    }
}

impl fmt::Debug for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_int(self))
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_system(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;

    fn round(s: &str) {
        let f = parse_formula(s).unwrap();
        let printed = print_formula(&f);
        let g = parse_formula(&printed).unwrap();
        assert_eq!(f, g, "printed as {printed}");
    }

    #[test]
    fn round_trips() {
        round("true \\/ false");
        round("\\k : int -> prop. \\x : int. x < 0 /\\ k (-1) \\/ x = 0 /\\ k (x + -2 * x)");
        round("(1 <= 2 /\\ 3 <= 4) /\\ 5 <= 6");
        round("mu p : int -> prop. \\y : int. y = 0 \\/ p (y - 1) \\/ (exists z. z <= y /\\ p z)");
        round("(\\x : prop. x) ((\\y : prop. y) true)");
        round("(\\x : int -> prop. x 3) (\\y : int. y <= 3)");
        round("(\\f : int -> int -> prop. f 1 2) (\\a : int. \\b : int. a * (b + 1) <= 0)");
    }

    #[test]
    fn truth_literals_print_as_keywords() {
        assert_eq!(print_formula(&Formula::tt()), "true");
        assert_eq!(print_formula(&Formula::ff()), "false");
        assert_eq!(print_formula(&parse_formula("0 <= 1").unwrap()), "0 <= 1");
    }
}
