use std::fmt;
use std::ops::Add;

use num_rational::Rational64;
use serde::{Serialize, Serializer};

/// A valuation: a rational number or +∞ (the valuation of zero).
///
/// Variant order makes `Infinity` compare above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Finite(Rational64),
    Infinity,
}

impl Val {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Val::Infinity)
    }

    pub fn scale(self, k: Rational64) -> Val {
        match self {
            Val::Finite(v) => Val::Finite(v * k),
            Val::Infinity => Val::Infinity,
        }
    }
}

impl From<Rational64> for Val {
    fn from(v: Rational64) -> Self {
        Val::Finite(v)
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinity,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{}", render_q(*v)),
            Val::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `3`, `-1/2`; the curve-file rational syntax.
pub fn render_q(v: Rational64) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
