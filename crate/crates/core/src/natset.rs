//! Eventually periodic subsets of ℕ = {1, 2, 3, ...}.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set E ∪ {n ≥ T : n mod P ∈ R} with E ⊂ [1, T).
///
/// Values are always canonical: P is the least period of the tail, T is the
/// least threshold for that period, so equality of values is equality of sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NaturalSet {
    exceptional: Vec<u64>,
    threshold: u64,
    period: u64,
    residues: Vec<u64>,
}

impl NaturalSet {
    pub fn empty() -> Self {
        NaturalSet {
            exceptional: Vec::new(),
            threshold: 1,
            period: 1,
            residues: Vec::new(),
        }
    }

    /// ℕ itself.
    pub fn all() -> Self {
        Self::progression(1)
    }

    /// m·ℕ.
    pub fn progression(m: u64) -> Self {
        assert!(m > 0, "progression modulus must be positive");
        Self::from_parts(Vec::new(), 1, m, vec![0])
    }

    /// ℕ_{>r}.
    pub fn tail_above(r: u64) -> Self {
        Self::from_parts(Vec::new(), r + 1, 1, vec![0])
    }

    pub fn finite(items: impl IntoIterator<Item = u64>) -> Self {
        let mut e: Vec<u64> = items.into_iter().filter(|&n| n > 0).collect();
        e.sort_unstable();
        e.dedup();
        let t = e.last().map_or(1, |&m| m + 1);
        Self::from_parts(e, t, 1, Vec::new())
    }

    /// Builds and canonicalizes an arbitrary description. Exceptional
    /// elements at or above the threshold are ignored.
    pub fn from_parts(exceptional: Vec<u64>, threshold: u64, period: u64, residues: Vec<u64>) -> Self {
        assert!(period > 0, "period must be positive");
        let threshold = threshold.max(1);
        let mut e: Vec<u64> = exceptional
            .into_iter()
            .filter(|&n| n > 0 && n < threshold)
            .collect();
        e.sort_unstable();
        e.dedup();
        let mut mask = vec![false; period as usize];
        for r in residues {
            mask[(r % period) as usize] = true;
        }
        Self::canonical(e, threshold, mask)
    }

    /// Set whose membership agrees with `f` on [1, T) and is P-periodic from T on.
    pub fn from_fn(threshold: u64, period: u64, f: impl Fn(u64) -> bool) -> Self {
        let threshold = threshold.max(1);
        let e = (1..threshold).filter(|&n| f(n)).collect();
        let mut mask = vec![false; period as usize];
        for n in threshold..threshold + period {
            mask[(n % period) as usize] = f(n);
        }
        Self::canonical(e, threshold, mask)
    }

    fn canonical(mut e: Vec<u64>, mut t: u64, mask: Vec<bool>) -> Self {
        let p = mask.len() as u64;
        let mut best = p;
        for d in 1..p {
            if p.is_multiple_of(d) && (0..p).all(|i| mask[i as usize] == mask[(i % d) as usize]) {
                best = d;
                break;
            }
        }
        let mask: Vec<bool> = mask[..best as usize].to_vec();
        let p = best;
        while t > 1 {
            let n = t - 1;
            let in_e = e.last() == Some(&n);
            if in_e != mask[(n % p) as usize] {
                break;
            }
            if in_e {
                e.pop();
            }
            t = n;
        }
        let residues = (0..p).filter(|&r| mask[r as usize]).collect();
        NaturalSet {
            exceptional: e,
            threshold: t,
            period: p,
            residues,
        }
    }

    pub fn exceptional(&self) -> &[u64] {
        &self.exceptional
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn member(&self, n: u64) -> bool {
        if n == 0 {
            false
        } else if n < self.threshold {
            self.exceptional.binary_search(&n).is_ok()
        } else {
            self.residues.binary_search(&(n % self.period)).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.exceptional.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let t = self.threshold.max(other.threshold);
        let p = self.period.lcm(&other.period);
        Self::from_fn(t, p, |n| self.member(n) || other.member(n))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let t = self.threshold.max(other.threshold);
        let p = self.period.lcm(&other.period);
        Self::from_fn(t, p, |n| self.member(n) && other.member(n))
    }

    /// k·S = {k·n : n ∈ S}.
    pub fn scale(&self, k: u64) -> Self {
        assert!(k > 0, "scale factor must be positive");
        Self::from_parts(
            self.exceptional.iter().map(|&n| n * k).collect(),
            self.threshold * k,
            self.period * k,
            self.residues.iter().map(|&r| r * k).collect(),
        )
    }

    /// {n : k·n ∈ S}.
    pub fn divide(&self, k: u64) -> Self {
        assert!(k > 0, "divisor must be positive");
        let t = self.threshold.div_ceil(k);
        Self::from_fn(t, self.period, |n| self.member(n * k))
    }

    /// All multiples of every member: ⋃_{m ∈ S} mℕ.
    /// ⋃_{n ∈ S} nℕ. Exact for finite sets and for sets whose periodic tail
    /// is already closed under multiples; otherwise a subset of the closure
    /// that still contains `self`.
    pub fn multiple_closure(&self) -> Self {
        let mut acc = self.clone();
        let mut bases: Vec<u64> = Vec::new();
        for n in self.members_below(self.threshold + self.period) {
            if bases.iter().all(|b| n % b != 0) {
                bases.push(n);
                acc = acc.union(&Self::progression(n));
            }
        }
        acc
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.union(other) == *other
    }

    /// mℕ ⊆ S.
    pub fn contains_multiples_of(&self, m: u64) -> bool {
        Self::progression(m).is_subset(self)
    }

    /// Members in [1, bound).
    pub fn members_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (1..bound).filter(move |&n| self.member(n))
    }

    /// gcd of all members.
    pub fn index(&self) -> Result<u64> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut g = 0u64;
        for &e in &self.exceptional {
            g = g.gcd(&e);
        }
        if !self.residues.is_empty() {
            g = g.gcd(&self.period);
            for n in self.threshold..self.threshold + self.period {
                if self.member(n) {
                    g = g.gcd(&n);
                }
            }
        }
        Ok(g)
    }

    /// Whether dℕ \ S is finite.
    pub fn cofinite_in(&self, d: u64) -> bool {
        let p = self.period.lcm(&d);
        Self::from_fn(self.threshold, p, |n| n % d == 0 && !self.member(n)).is_finite()
    }

    /// (index, cofinite in index·ℕ).
    pub fn index_and_cofinite(&self) -> Result<(u64, bool)> {
        let ind = self.index()?;
        Ok((ind, self.cofinite_in(ind)))
    }

    /// Canonical rendering: `{e1, e2} ∪ all n >= T with n mod P in {…}`.
    pub fn render_canonical(&self) -> String {
        let mut parts = Vec::new();
        if !self.exceptional.is_empty() {
            parts.push(format!("{{{}}}", join(&self.exceptional)));
        }
        if !self.residues.is_empty() {
            parts.push(format!(
                "all n >= {} with n mod {} in {{{}}}",
                self.threshold,
                self.period,
                join(&self.residues)
            ));
        }
        if parts.is_empty() {
            "{}".to_string()
        } else {
            parts.join(" ∪ ")
        }
    }

    /// Short form for recognized shapes (`3N`, `N`, `2*({8,11} ∪ N>15)`),
    /// otherwise the canonical rendering.
    pub fn render_compact(&self) -> String {
        if self.is_empty() {
            return "{}".to_string();
        }
        let k = self.index().expect("nonempty");
        let reduced = self.divide(k);
        let inner = if reduced.is_finite() {
            format!("{{{}}}", join_compact(&reduced.exceptional))
        } else if reduced.period == 1 {
            let tail = if reduced.threshold == 1 {
                "N".to_string()
            } else {
                format!("N>{}", reduced.threshold - 1)
            };
            if reduced.exceptional.is_empty() {
                tail
            } else {
                format!("{{{}}} ∪ {tail}", join_compact(&reduced.exceptional))
            }
        } else {
            return self.render_canonical();
        };
        match (k, inner.as_str()) {
            (1, _) => inner,
            (_, "N") => format!("{k}N"),
            _ if inner.contains(' ') => format!("{k}*({inner})"),
            _ => format!("{k}*{inner}"),
        }
    }

    /// Union of `parts`, rendered as ` ∪ `-joined compact forms after
    /// dropping parts contained in the union of the remaining ones.
    pub fn render_union(parts: &[NaturalSet]) -> String {
        let mut kept: Vec<NaturalSet> = Vec::new();
        for p in parts {
            if !p.is_empty() && !kept.contains(p) {
                kept.push(p.clone());
            }
        }
        let mut i = 0;
        while i < kept.len() {
            let rest = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(NaturalSet::empty(), |acc, (_, s)| acc.union(s));
            if kept[i].is_subset(&rest) {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        if kept.is_empty() {
            return "{}".to_string();
        }
        kept.iter()
            .map(NaturalSet::render_compact)
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

fn join_compact(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for NaturalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_compact())
    }
}
