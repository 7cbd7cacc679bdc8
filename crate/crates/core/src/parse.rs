//! Lexer and recursive-descent parser for sorts, formulas and equation
//! systems. Formulas go through [`crate::surface`] for elaboration, then
//! binders are freshened so no binder repeats or shadows another name.

use std::collections::HashSet;

use num_bigint::BigInt;

use crate::eqsys::{Definition, EquationSystem, Param};
use crate::error::{Error, Result};
use crate::formula::{freshen_binders, Formula};
use crate::ident::{self, Ident};
use crate::sort::Sort;
use crate::surface::{CmpOp, Elaborator, Expr, ExprKind, Pos};
use crate::typeck::SimpleTypeEnv;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(BigInt),
    Directive(String),
    Backslash,
    Dot,
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Plus,
    Minus,
    Star,
    Arrow,
    Or,
    And,
    Amp,
    Eof,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '$' | '@' | '~')
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = (line, col);
        let next = chars.get(i + 1).copied();
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '\\' if next == Some('/') => {
                adv = 2;
                Some(Tok::Or)
            }
            '\\' | 'λ' => Some(Tok::Backslash),
            '/' if next == Some('\\') => {
                adv = 2;
                Some(Tok::And)
            }
            '-' if next == Some('>') => {
                adv = 2;
                Some(Tok::Arrow)
            }
            '<' if next == Some('=') => {
                adv = 2;
                Some(Tok::Le)
            }
            '>' if next == Some('=') => {
                adv = 2;
                Some(Tok::Ge)
            }
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '=' => Some(Tok::Eq),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '&' => Some(Tok::Amp),
            '%' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_alphabetic() {
                    j += 1;
                }
                adv = j - i;
                Some(Tok::Directive(chars[i + 1..j].iter().collect()))
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                adv = j - i;
                let s: String = chars[i..j].iter().collect();
                Some(Tok::Num(s.parse().expect("digits")))
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                adv = j - i;
                let s: String = chars[i..j].iter().collect();
                ident::reserve(&s);
                Some(Tok::Ident(s))
            }
            c => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        if let Some(t) = tok {
            out.push((t, pos));
        }
        i += adv;
        col += adv;
    }
    out.push((Tok::Eof, (line, col)));
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["mu", "exists", "true", "false", "int", "prop"];

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    pos: usize,
    /// Inside `< ... >` a bare `>` closes the tuple instead of comparing.
    in_tuple: bool,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            in_tuple: false,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn here(&self) -> Pos {
        self.toks[self.pos].1
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Parse {
            line,
            col,
            msg: msg.into(),
        })
    }

    pub fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {t:?}, found {:?}", self.peek()))
        }
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {:?}", self.peek()))
        }
    }

    pub fn ident(&mut self) -> Result<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Ident::new(&s))
            }
            t => self.error(format!("expected an identifier, found {t:?}")),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn sort(&mut self) -> Result<Sort> {
        let a = self.sort_atom()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let r = self.sort()?;
            Ok(Sort::arrow(a, r))
        } else {
            Ok(a)
        }
    }

    fn sort_atom(&mut self) -> Result<Sort> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "int" => {
                self.bump();
                Ok(Sort::Int)
            }
            Tok::Ident(s) if s == "prop" => {
                self.bump();
                Ok(Sort::Prop)
            }
            Tok::LParen => {
                self.bump();
                let mut comps = vec![self.sort()?];
                while *self.peek() == Tok::Star {
                    self.bump();
                    comps.push(self.sort()?);
                }
                self.expect(Tok::RParen)?;
                Ok(if comps.len() == 1 {
                    comps.pop().unwrap()
                } else {
                    Sort::Product(comps)
                })
            }
            t => self.error(format!("expected a sort, found {t:?}")),
        }
    }

    fn mk(&self, kind: ExprKind, pos: Pos) -> Expr {
        Expr { kind, pos }
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let pos = self.here();
        if *self.peek() == Tok::Backslash || self.at_keyword("mu") {
            let is_mu = self.at_keyword("mu");
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let s = self.sort()?;
            self.expect(Tok::Dot)?;
            let body = Box::new(self.expr()?);
            return Ok(self.mk(
                if is_mu {
                    ExprKind::Mu(x, s, body)
                } else {
                    ExprKind::Lam(x, s, body)
                },
                pos,
            ));
        }
        if self.at_keyword("exists") {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let body = Box::new(self.expr()?);
            return Ok(self.mk(ExprKind::Exists(x, body), pos));
        }
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::Or {
            let pos = self.here();
            self.bump();
            let rhs = self.and_operand()?;
            lhs = self.mk(ExprKind::Or(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    /// Right operands may be binders, which then extend to the right.
    fn and_operand(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Backslash || self.at_keyword("mu") || self.at_keyword("exists") {
            self.expr()
        } else {
            self.and_expr()
        }
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.cmp_expr()?;
        while *self.peek() == Tok::And {
            let pos = self.here();
            self.bump();
            let rhs = if *self.peek() == Tok::Backslash
                || self.at_keyword("mu")
                || self.at_keyword("exists")
            {
                self.expr()?
            } else {
                self.cmp_expr()?
            };
            lhs = self.mk(ExprKind::And(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> Result<Expr> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Tok::Le => CmpOp::Le,
            Tok::Lt => CmpOp::Lt,
            Tok::Eq => CmpOp::Eq,
            Tok::Gt if !self.in_tuple => CmpOp::Gt,
            Tok::Ge if !self.in_tuple => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.here();
        self.bump();
        let rhs = self.arith()?;
        Ok(self.mk(ExprKind::Cmp(op, Box::new(lhs), Box::new(rhs)), pos))
    }

    fn arith(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.here();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = self.mk(ExprKind::Add(Box::new(lhs), Box::new(rhs)), pos);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = self.mk(ExprKind::Sub(Box::new(lhs), Box::new(rhs)), pos);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            let pos = self.here();
            self.bump();
            let rhs = self.unary()?;
            lhs = self.mk(ExprKind::Mul(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            let pos = self.here();
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner.kind {
                ExprKind::Num(n) => self.mk(ExprKind::Num(-n), pos),
                _ => self.mk(ExprKind::Neg(Box::new(inner)), pos),
            });
        }
        self.app()
    }

    fn app(&mut self) -> Result<Expr> {
        let mut head = self.atom()?;
        loop {
            let pos = self.here();
            let arg = match self.peek() {
                Tok::Ident(s) if !["mu", "exists"].contains(&s.as_str()) => self.atom()?,
                Tok::Num(_) | Tok::LParen => self.atom()?,
                Tok::Lt => match self.try_tuple()? {
                    Some(t) => t,
                    None => break,
                },
                _ => break,
            };
            head = self.mk(ExprKind::App(Box::new(head), Box::new(arg)), pos);
        }
        Ok(head)
    }

    /// A tuple needs at least one comma; otherwise `<` is a comparison.
    fn try_tuple(&mut self) -> Result<Option<Expr>> {
        let save = self.pos;
        let pos = self.here();
        self.bump();
        let saved_flag = self.in_tuple;
        self.in_tuple = true;
        let mut comps = Vec::new();
        let ok = loop {
            match self.expr() {
                // Components are predicates; an arithmetic component means
                // the `<` was a comparison.
                Ok(e) if matches!(
                    e.kind,
                    ExprKind::Num(_)
                        | ExprKind::Neg(_)
                        | ExprKind::Add(..)
                        | ExprKind::Sub(..)
                        | ExprKind::Mul(..)
                ) => break false,
                Ok(e) => comps.push(e),
                Err(_) => break false,
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::Gt => {
                    self.bump();
                    break comps.len() >= 2;
                }
                _ => break false,
            }
        };
        self.in_tuple = saved_flag;
        if ok {
            Ok(Some(self.mk(ExprKind::Tuple(comps), pos)))
        } else {
            self.pos = save;
            Ok(None)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(self.mk(ExprKind::True, pos))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(self.mk(ExprKind::False, pos))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                Ok(self.mk(ExprKind::Ident(x), pos))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(self.mk(ExprKind::Num(n), pos))
            }
            Tok::LParen => {
                self.bump();
                let saved = self.in_tuple;
                self.in_tuple = false;
                let e = self.expr()?;
                self.in_tuple = saved;
                self.expect(Tok::RParen)?;
                Ok(self.mk(ExprKind::Paren(Box::new(e)), pos))
            }
            Tok::Lt => match self.try_tuple()? {
                Some(t) => Ok(t),
                None => self.error("malformed tuple"),
            },
            t => self.error(format!("unexpected {t:?}")),
        }
    }
}

pub fn parse_sort(src: &str) -> Result<Sort> {
    let mut p = Parser::new(src)?;
    let s = p.sort()?;
    if !p.at_eof() {
        return p.error("trailing input after sort");
    }
    Ok(s)
}

/// Parses a formula without elaborating it.
pub fn parse_surface(src: &str) -> Result<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if !p.at_eof() {
        return p.error(format!("unexpected {:?}", p.peek()));
    }
    Ok(e)
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    parse_formula_in(&SimpleTypeEnv::new(), src)
}

/// Parses and elaborates a formula whose free names may be typed by `env`.
pub fn parse_formula_in(env: &SimpleTypeEnv, src: &str) -> Result<Formula> {
    let e = parse_surface(src)?;
    let (f, _) = Elaborator::new(env).formula(&e)?;
    let mut taken: HashSet<Ident> = env.keys().cloned().collect();
    taken.extend(f.free_vars());
    Ok(freshen_binders(&f, &mut taken))
}

fn parse_param(p: &mut Parser) -> Result<(Vec<Ident>, bool)> {
    if *p.peek() == Tok::Lt {
        p.bump();
        let mut names = vec![p.ident()?];
        while *p.peek() == Tok::Comma {
            p.bump();
            names.push(p.ident()?);
        }
        p.expect(Tok::Gt)?;
        Ok((names, true))
    } else {
        Ok((vec![p.ident()?], false))
    }
}

/// Parses the `%ENV` / `%DEFS` / `%MAIN` / `%MAXAR` equation-system format.
pub fn parse_system(src: &str) -> Result<EquationSystem> {
    let mut p = Parser::new(src)?;
    let mut env = SimpleTypeEnv::new();
    let mut raw_defs: Vec<(Ident, Vec<(Vec<Ident>, bool)>, Expr, Pos)> = Vec::new();
    let mut main: Option<Expr> = None;
    let mut maxar = None;
    while !p.at_eof() {
        let section = match p.bump() {
            Tok::Directive(d) => d,
            t => return p.error(format!("expected a %SECTION, found {t:?}")),
        };
        match section.as_str() {
            "ENV" => {
                while matches!(p.peek(), Tok::Ident(_)) {
                    let pos = p.here();
                    let x = p.ident()?;
                    p.expect(Tok::Colon)?;
                    let s = p.sort()?;
                    p.expect(Tok::Semi)?;
                    if env.insert(x.clone(), s).is_some() {
                        return Err(Error::Parse {
                            line: pos.0,
                            col: pos.1,
                            msg: format!("`{x}` declared twice"),
                        });
                    }
                }
            }
            "DEFS" => {
                while matches!(p.peek(), Tok::Ident(_)) {
                    let pos = p.here();
                    let name = p.ident()?;
                    let mut params = Vec::new();
                    while *p.peek() != Tok::Eq {
                        params.push(parse_param(&mut p)?);
                    }
                    p.expect(Tok::Eq)?;
                    p.expect_keyword("mu")?;
                    let body = p.expr()?;
                    p.expect(Tok::Semi)?;
                    raw_defs.push((name, params, body, pos));
                }
            }
            "MAIN" => {
                main = Some(p.expr()?);
                p.expect(Tok::Semi)?;
            }
            "MAXAR" => {
                match p.bump() {
                    Tok::Num(n) => {
                        maxar = Some(
                            usize::try_from(n)
                                .ok()
                                .filter(|m| *m > 0)
                                .map_or_else(|| p.error("MAXAR must be positive"), Ok)?,
                        )
                    }
                    _ => return p.error("expected a number after %MAXAR"),
                }
                p.expect(Tok::Semi)?;
            }
            other => return p.error(format!("unknown section %{other}")),
        }
    }
    let main = match main {
        Some(m) => m,
        None => return p.error("missing %MAIN"),
    };
    let mut defs = Vec::new();
    for (name, raw_params, body, pos) in raw_defs {
        let perr = |msg: String| Error::Parse {
            line: pos.0,
            col: pos.1,
            msg,
        };
        let fsort = env
            .get(&name)
            .ok_or_else(|| perr(format!("definition `{name}` has no %ENV entry")))?
            .clone();
        let (arg_sorts, _) = fsort.uncurry();
        if raw_params.len() > arg_sorts.len() {
            return Err(perr(format!("`{name}` has more parameters than its sort allows")));
        }
        let mut params = Vec::new();
        let mut locals = Vec::new();
        for ((names, is_tuple), s) in raw_params.into_iter().zip(arg_sorts) {
            if is_tuple {
                match s {
                    Sort::Product(cs) if cs.len() == names.len() => {
                        let comps: Vec<(Ident, Sort)> =
                            names.into_iter().zip(cs.iter().cloned()).collect();
                        locals.extend(comps.iter().cloned());
                        params.push(Param::Tuple(comps));
                    }
                    _ => {
                        return Err(perr(format!(
                            "tuple parameter of `{name}` does not match sort {s}"
                        )))
                    }
                }
            } else {
                let x = names.into_iter().next().unwrap();
                locals.push((x.clone(), s.clone()));
                params.push(Param::Var(x, s.clone()));
            }
        }
        let (f, _) = Elaborator::with_locals(&env, locals.clone()).formula(&body)?;
        let mut taken: HashSet<Ident> = env.keys().cloned().collect();
        taken.extend(locals.iter().map(|(x, _)| x.clone()));
        taken.extend(f.free_vars());
        let body = freshen_binders(&f, &mut taken);
        defs.push(Definition { name, params, body });
    }
    let (m, _) = Elaborator::new(&env).formula(&main)?;
    let mut taken: HashSet<Ident> = env.keys().cloned().collect();
    taken.extend(m.free_vars());
    let main = freshen_binders(&m, &mut taken);
    Ok(EquationSystem {
        env,
        defs,
        main,
        maxar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alpha_eq, IntExpr};

    #[test]
    fn sorts_parse_right_assoc() {
        let s = parse_sort("(int -> prop) -> int -> prop").unwrap();
        assert_eq!(s, Sort::arrows([Sort::int_pred(1), Sort::Int], Sort::Prop));
        let p = parse_sort("((int -> prop) * prop) -> prop").unwrap();
        assert_eq!(p.arity(), 1);
    }

    #[test]
    fn precedence() {
        let f = parse_formula("1 <= 2 \\/ 3 <= 4 /\\ 5 <= 6").unwrap();
        match f {
            Formula::Or(_, b) => assert!(matches!(*b, Formula::And(..))),
            _ => panic!("{f:?}"),
        }
    }

    #[test]
    fn tuples_and_comparisons_coexist() {
        let mut env = SimpleTypeEnv::new();
        let p = Sort::Product(vec![Sort::int_pred(1), Sort::int_pred(1)]);
        env.insert(Ident::new("F"), Sort::arrows([p, Sort::Int], Sort::Prop));
        let f = parse_formula_in(&env, "F <\\a : int. a < 3, \\b : int. b <= 0> 2").unwrap();
        assert!(matches!(f, Formula::AppInt(..)));
        let g = parse_formula("\\k : int -> prop. \\r : int. r < 2 /\\ k r").unwrap();
        assert!(crate::formula::is_disjunctive(&g));
    }

    #[test]
    fn negative_literals() {
        let f = parse_formula("-1 <= 0 - 2 * x").unwrap();
        match f {
            Formula::Le(IntExpr::Lit(n), _) => assert_eq!(n, BigInt::from(-1)),
            _ => panic!(),
        }
    }

    #[test]
    fn reserved_names_are_accepted() {
        let f = parse_formula("\\$t : int -> prop. $t 0").unwrap();
        assert!(alpha_eq(&f, &parse_formula("\\t : int -> prop. t 0").unwrap()));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("(1 <= 2") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("1 <= 2 ?").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        assert!(parse_formula("# heading\ntrue # trailing").unwrap().is_true());
    }

    #[test]
    fn system_round_trip() {
        let src = "%ENV\nP : int -> prop;\n%DEFS\nP z =mu z = 0 \\/ P (z - 1);\n%MAIN exists z. P z;\n";
        let es = parse_system(src).unwrap();
        assert_eq!(es.defs.len(), 1);
        let again = parse_system(&crate::print::print_system(&es)).unwrap();
        assert_eq!(es, again);
    }
}
