//! Identifiers and the process-wide fresh-name supply.
//!
//! User identifiers are `[A-Za-z_][A-Za-z0-9_']*`. Every name produced by a
//! pass contains at least one reserved character (`$`, `@` or `~`):
//!
//! * `base$N`   fresh binder from the global counter
//! * `$liftN`   lambda-lifted definition
//! * `$t`, `$S` continuation parameter and top definition of `normalize`
//! * `F@i`      stage `i` copy of `F` in an m-th approximation
//! * `F~j`      component `j` of a lowered name (`~s` is the star component)

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

static COUNTER: AtomicU64 = AtomicU64::new(1);

pub const RESERVED: [char; 3] = ['$', '@', '~'];

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// A name that no parser-accepted user identifier and no earlier
    /// generated name can equal.
    pub fn fresh(base: &str) -> Self {
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        let stem = base.split('$').next().unwrap_or("");
        let stem = if stem.is_empty() { "v" } else { stem };
        Ident(Arc::from(format!("{stem}${n}")))
    }

    pub fn fresh_lift() -> Self {
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        Ident(Arc::from(format!("$lift{n}")))
    }

    /// Component `j` of a lowered name; `None` selects the star component.
    pub fn component(&self, j: Option<usize>) -> Self {
        match j {
            None => Ident(Arc::from(format!("{}~s", self.0))),
            Some(j) => Ident(Arc::from(format!("{}~{j}", self.0))),
        }
    }

    pub fn stage(&self, i: usize) -> Self {
        Ident(Arc::from(format!("{}@{i}", self.0)))
    }

    pub fn is_generated(&self) -> bool {
        self.0.contains(RESERVED)
    }

    /// The user-facing stem: everything before the first reserved character.
    pub fn stem(&self) -> &str {
        let end = self.0.find(RESERVED).unwrap_or(self.0.len());
        &self.0[..end]
    }
}

/// Advance the fresh counter past every `$N` suffix in `name`, so names read
/// back from emitted files never collide with names generated afterwards.
pub fn reserve(name: &str) {
    for part in name.split('$').skip(1) {
        let digits: String = part
            .trim_start_matches("lift")
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if let Ok(n) = digits.parse::<u64>() {
            COUNTER.fetch_max(n + 1, Ordering::Relaxed);
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_are_distinct_and_reserved() {
        let a = Ident::fresh("x");
        let b = Ident::fresh("x");
        assert_ne!(a, b);
        assert!(a.is_generated());
        assert_eq!(a.stem(), "x");
        assert_eq!(Ident::fresh(a.as_str()).stem(), "x");
    }

    #[test]
    fn reserve_skips_past_seen_suffixes() {
        reserve("y$900000");
        let n: u64 = Ident::fresh("y").as_str()[2..].parse().unwrap();
        assert!(n > 900000);
    }

    #[test]
    fn component_and_stage_names() {
        let f = Ident::new("Sum");
        assert_eq!(f.component(Some(2)).as_str(), "Sum~2");
        assert_eq!(f.component(None).as_str(), "Sum~s");
        assert_eq!(f.stage(3).as_str(), "Sum@3");
        assert_eq!(f.stage(3).stem(), "Sum");
    }
}
