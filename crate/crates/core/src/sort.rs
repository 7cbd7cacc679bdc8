use std::fmt;
use std::sync::Arc;

/// Simple types: `int`, `prop`, predicate arrows and (lowered IR only) products.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Prop,
    Arrow(Arc<Sort>, Arc<Sort>),
    Product(Vec<Sort>),
}

impl Sort {
    pub fn arrow(arg: Sort, res: Sort) -> Sort {
        Sort::Arrow(Arc::new(arg), Arc::new(res))
    }

    /// `args[0] -> args[1] -> ... -> res`
    pub fn arrows(args: impl IntoIterator<Item = Sort>, res: Sort) -> Sort {
        let args: Vec<Sort> = args.into_iter().collect();
        args.into_iter().rev().fold(res, |acc, a| Sort::arrow(a, acc))
    }

    /// `INT^l -> Prop`
    pub fn int_pred(l: usize) -> Sort {
        Sort::arrows(std::iter::repeat(Sort::Int).take(l), Sort::Prop)
    }

    /// A product, except that a single component stands for itself.
    pub fn product(mut comps: Vec<Sort>) -> Sort {
        if comps.len() == 1 {
            comps.pop().unwrap()
        } else {
            Sort::Product(comps)
        }
    }

    pub fn order(&self) -> i64 {
        match self {
            Sort::Int => -1,
            Sort::Prop => 0,
            Sort::Arrow(a, r) => r.order().max(a.order() + 1),
            Sort::Product(cs) => cs.iter().map(Sort::order).max().unwrap_or(0),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Sort::Arrow(_, r) => 1 + r.arity(),
            _ => 0,
        }
    }

    /// Argument sorts and the final result.
    pub fn uncurry(&self) -> (Vec<&Sort>, &Sort) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Sort::Arrow(a, r) = cur {
            args.push(&**a);
            cur = r;
        }
        (args, cur)
    }

    /// `Some(l)` iff the sort is `INT^l -> Prop` (including `Prop` itself, l = 0).
    pub fn int_pred_arity(&self) -> Option<usize> {
        match self {
            Sort::Prop => Some(0),
            Sort::Arrow(a, r) if **a == Sort::Int => r.int_pred_arity().map(|l| l + 1),
            _ => None,
        }
    }

    pub fn is_predicate(&self) -> bool {
        match self {
            Sort::Int => false,
            Sort::Prop => true,
            Sort::Arrow(_, r) => r.is_predicate(),
            Sort::Product(_) => false,
        }
    }

    pub fn contains_product(&self) -> bool {
        match self {
            Sort::Int | Sort::Prop => false,
            Sort::Arrow(a, r) => a.contains_product() || r.contains_product(),
            Sort::Product(_) => true,
        }
    }

    /// Checks the structural invariants: arrow results are predicate sorts and
    /// products are nonempty and made of predicate sorts.
    pub fn well_formed(&self) -> bool {
        match self {
            Sort::Int | Sort::Prop => true,
            Sort::Arrow(a, r) => {
                a.well_formed() && r.well_formed() && r.is_predicate()
            }
            Sort::Product(cs) => {
                !cs.is_empty()
                    && cs
                        .iter()
                        .all(|c| c.is_predicate() && c.well_formed())
            }
        }
    }
}

pub fn order_of_sort(s: &Sort) -> i64 {
    s.order()
}

pub fn arity_of_sort(s: &Sort) -> usize {
    s.arity()
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => f.write_str("int"),
            Sort::Prop => f.write_str("prop"),
            Sort::Arrow(a, r) => {
                if matches!(**a, Sort::Arrow(..)) {
                    write!(f, "({a}) -> {r}")
                } else {
                    write!(f, "{a} -> {r}")
                }
            }
            Sort::Product(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(c, Sort::Arrow(..)) {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip() -> Sort {
        Sort::int_pred(1)
    }

    #[test]
    fn orders() {
        assert_eq!(Sort::Int.order(), -1);
        assert_eq!(Sort::int_pred(2).order(), 0);
        assert_eq!(Sort::arrow(ip(), Sort::Prop).order(), 1);
        assert_eq!(
            Sort::Product(vec![Sort::int_pred(2), Sort::arrow(ip(), Sort::Prop)]).order(),
            1
        );
    }

    #[test]
    fn arities() {
        assert_eq!(Sort::Prop.arity(), 0);
        assert_eq!(Sort::int_pred(2).arity(), 2);
        assert_eq!(Sort::arrow(ip(), Sort::Prop).arity(), 1);
    }

    #[test]
    fn int_pred_recognition() {
        assert_eq!(Sort::int_pred(3).int_pred_arity(), Some(3));
        assert_eq!(Sort::Prop.int_pred_arity(), Some(0));
        assert_eq!(Sort::arrow(ip(), Sort::Prop).int_pred_arity(), None);
    }

    #[test]
    fn display_parenthesizes_left_arrows() {
        let s = Sort::arrows([ip(), Sort::Int], Sort::Prop);
        assert_eq!(s.to_string(), "(int -> prop) -> int -> prop");
        assert_eq!(
            Sort::Product(vec![ip(), Sort::Prop]).to_string(),
            "((int -> prop) * prop)"
        );
    }

    #[test]
    fn well_formedness() {
        assert!(!Sort::arrow(Sort::Prop, Sort::Int).well_formed());
        assert!(!Sort::Product(vec![Sort::Int]).well_formed());
        assert!(Sort::arrow(Sort::Product(vec![ip(), ip()]), Sort::Prop).well_formed());
    }
}
