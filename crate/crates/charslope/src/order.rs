//! Exact rational orders, extended with +infinity for the zero polynomial.

use num_rational::Ratio;
use std::cmp::Ordering;
use std::fmt;

/// Exact rational number used for all invariant values.
pub type Rat = Ratio<i64>;

/// A nonnegative rational order, or +infinity (order of the zero polynomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtOrder {
    Finite(Rat),
    Infinite,
}

impl ExtOrder {
    pub fn rat(num: i64, den: i64) -> Self {
        ExtOrder::Finite(Rat::new(num, den))
    }

    pub fn int(n: i64) -> Self {
        ExtOrder::Finite(Rat::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtOrder::Finite(_))
    }

    pub fn finite(&self) -> Option<Rat> {
        match self {
            ExtOrder::Finite(r) => Some(*r),
            ExtOrder::Infinite => None,
        }
    }

    /// True iff the value is a strictly positive integer.
    pub fn is_positive_integer(&self) -> bool {
        match self {
            ExtOrder::Finite(r) => r.is_integer() && *r.numer() > 0,
            ExtOrder::Infinite => false,
        }
    }
}

impl PartialOrd for ExtOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtOrder::Infinite, ExtOrder::Infinite) => Ordering::Equal,
            (ExtOrder::Infinite, _) => Ordering::Greater,
            (_, ExtOrder::Infinite) => Ordering::Less,
            (ExtOrder::Finite(a), ExtOrder::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtOrder::Finite(r) => write!(f, "{}", rat_string(r)),
            ExtOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Renders a rational exactly: "num/den", or plain "num" for integers. The
/// only numeric formats reports use.
pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
