//! When does the line x ↦ (a·x + c)/b map a point of (1/r)ℤ in an interval
//! back into (1/r)ℤ?

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};

/// ρ(x) = (a·x + c)/b restricted to x ∈ I ∩ (1/r)ℤ, I open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineLatticeProblem {
    pub a: i64,
    pub b: i64,
    pub c: Rational64,
    pub r: u64,
    /// Lower end of I; None is −∞.
    pub lo: Option<Rational64>,
    /// Upper end of I; None is +∞.
    pub hi: Option<Rational64>,
}

impl AffineLatticeProblem {
    pub fn new(a: i64, b: i64, c: Rational64, r: u64, lo: Option<Rational64>, hi: Option<Rational64>) -> Result<Self> {
        let p = AffineLatticeProblem { a, b, c, r, lo, hi };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.b < 1 || self.r < 1 {
            return Err(Error::InvalidProblem("b and r must be positive".into()));
        }
        if !(self.c * Rational64::from_integer(self.r as i64)).is_integer() {
            return Err(Error::InvalidProblem(format!(
                "r·c = {}·{} is not an integer",
                self.r, self.c
            )));
        }
        if let (Some(lo), Some(hi)) = (self.lo, self.hi) {
            if lo >= hi {
                return Err(Error::InvalidProblem("empty interval".into()));
            }
        }
        Ok(())
    }

    fn rc(&self) -> i64 {
        (self.c * Rational64::from_integer(self.r as i64)).to_integer()
    }

    /// Whether x = num/r satisfies ρ(x) ∈ (1/r)ℤ, i.e. b | a·num + r·c.
    pub fn hits(&self, num: i64) -> bool {
        (self.a as i128 * num as i128 + self.rc() as i128).rem_euclid(self.b as i128) == 0
    }

    /// gcd(a, b) | r·c.
    pub fn gcd_criterion(&self) -> bool {
        self.rc() % self.a.gcd(&self.b) == 0
    }

    /// Smallest and largest numerators with num/r inside I.
    fn numerator_range(&self) -> (Option<i64>, Option<i64>) {
        let r = Rational64::from_integer(self.r as i64);
        let first = self.lo.map(|lo| (lo * r).floor().to_integer() + 1);
        let last = self.hi.map(|hi| (hi * r).ceil().to_integer() - 1);
        (first, last)
    }

    /// |I| > (b + 1)/r, counting unbounded intervals as long.
    pub fn pigeonhole_applies(&self) -> bool {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => {
                (hi - lo) * Rational64::from_integer(self.r as i64) > Rational64::from_integer(self.b + 1)
            }
            _ => true,
        }
    }
}

pub fn lattice_solvable(p: &AffineLatticeProblem, ignore_interval: bool) -> Result<bool> {
    p.check()?;
    if ignore_interval {
        return Ok(p.gcd_criterion());
    }
    if !p.gcd_criterion() {
        return Ok(false);
    }
    if p.pigeonhole_applies() {
        return Ok(true);
    }
    Ok(!solutions_in_interval(p, None)?.is_empty())
}

/// All numerators `num` with num/r ∈ I and ρ(num/r) ∈ (1/r)ℤ, ascending.
///
/// An unbounded side needs `cap`: that many consecutive candidates are
/// scanned from the finite end (or symmetrically around 0).
pub fn solutions_in_interval(p: &AffineLatticeProblem, cap: Option<u64>) -> Result<Vec<i64>> {
    p.check()?;
    let (first, last) = p.numerator_range();
    let (first, last) = match (first, last, cap) {
        (Some(f), Some(l), _) => (f, l),
        (_, _, None) => return Err(Error::Unbounded),
        (Some(f), None, Some(k)) => (f, f + k as i64 - 1),
        (None, Some(l), Some(k)) => (l - k as i64 + 1, l),
        (None, None, Some(k)) => (-(k as i64), k as i64),
    };
    Ok((first..=last).filter(|&n| p.hits(n)).collect())
}

/// Smallest integer greater than (q + 1)/(n − m) + 1.
pub fn stability_threshold(q: u64, m: Rational64, n: Rational64) -> Result<u64> {
    if m >= n {
        return Err(Error::InvalidProblem(format!("need M < N, got ({m}, {n})")));
    }
    let bound = Rational64::from_integer(q as i64 + 1) / (n - m) + Rational64::from_integer(1);
    Ok((bound.floor().to_integer() + 1) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn top_cluster_has_no_solutions() {
        let p = AffineLatticeProblem::new(30, 3, q(1, 1), 1, None, None).unwrap();
        assert!(!lattice_solvable(&p, true).unwrap());
        assert!(!lattice_solvable(&p, false).unwrap());
    }

    #[test]
    fn five_cluster_at_eight_and_nine() {
        let p = AffineLatticeProblem::new(5, 3, q(27, 1), 8, Some(q(1, 1)), Some(q(6, 5))).unwrap();
        assert!(lattice_solvable(&p, false).unwrap());
        assert_eq!(solutions_in_interval(&p, None).unwrap(), vec![9]);
        let p9 = AffineLatticeProblem { r: 9, ..p };
        assert!(!lattice_solvable(&p9, false).unwrap());
        assert!(lattice_solvable(&p9, true).unwrap());
    }

    #[test]
    fn thresholds() {
        assert_eq!(stability_threshold(3, q(1, 1), q(6, 5)).unwrap(), 22);
        assert_eq!(stability_threshold(3, q(0, 1), q(4, 1)).unwrap(), 3);
        assert!(stability_threshold(3, q(2, 1), q(1, 1)).is_err());
    }

    #[test]
    fn unbounded_needs_cap() {
        let p = AffineLatticeProblem::new(1, 3, q(0, 1), 2, Some(q(1, 1)), None).unwrap();
        assert_eq!(solutions_in_interval(&p, None), Err(Error::Unbounded));
        assert_eq!(solutions_in_interval(&p, Some(6)).unwrap(), vec![3, 6]);
        assert!(AffineLatticeProblem::new(1, 3, q(1, 2), 3, None, None).is_err());
    }
}
