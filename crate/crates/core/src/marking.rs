//! Markings attached to matches in marking-sensitive nets: natural numbers plus ∞.

use std::fmt;

/// A value in ℕ ∪ {∞}, encoded as `u64` with `u64::MAX` reserved for ∞.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(u64);

impl Marking {
    pub const INF: Marking = Marking(u64::MAX);
    pub const ZERO: Marking = Marking(0);

    /// A finite marking. Panics on the reserved value.
    pub fn finite(n: u64) -> Self {
        assert!(n != u64::MAX, "u64::MAX is reserved for ∞");
        Marking(n)
    }

    pub fn is_inf(self) -> bool {
        self == Marking::INF
    }

    pub fn value(self) -> Option<u64> {
        (!self.is_inf()).then_some(self.0)
    }
}

impl From<u32> for Marking {
    fn from(n: u32) -> Self {
        Marking(n as u64)
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("∞"),
        }
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_under_max() {
        assert_eq!(Marking::INF.max(Marking::finite(7)), Marking::INF);
        assert_eq!(
            Marking::finite(2).max(Marking::finite(5)),
            Marking::finite(5)
        );
        assert!(Marking::finite(u64::MAX - 1) < Marking::INF);
    }

    #[test]
    fn display() {
        assert_eq!(Marking::INF.to_string(), "∞");
        assert_eq!(Marking::from(3u32).to_string(), "3");
    }
}
