//! Finite Puiseux sums Σ c_i π^{e_i} over a cyclotomic coefficient field.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::context::{BaseFieldContext, Ctx};
use super::cyclotomic::{mul_acc, CyclotomicNumber};
use super::valuation::{render_q, Val};
use crate::error::{Error, Result};

/// An exact element of K(π^{1/N}).
///
/// Stored coefficients are nonzero and keyed by distinct exponents, so the
/// valuation is the smallest key.
#[derive(Clone)]
pub struct PuiseuxElement {
    ctx: Ctx,
    terms: BTreeMap<Rational64, CyclotomicNumber>,
}

impl PuiseuxElement {
    pub fn zero(ctx: &Ctx) -> Self {
        PuiseuxElement {
            ctx: Arc::clone(ctx),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, BigRational::one())
    }

    pub fn constant(ctx: &Ctx, c: BigRational) -> Self {
        let coeff = ctx.field().from_rational(c);
        Self::monomial(ctx, coeff, Rational64::zero()).expect("integral exponent")
    }

    pub fn integer(ctx: &Ctx, n: i64) -> Self {
        Self::constant(ctx, BigRational::from_integer(BigInt::from(n)))
    }

    /// π^{exponent}.
    pub fn pi_power(ctx: &Ctx, exponent: Rational64) -> Result<Self> {
        Self::monomial(ctx, ctx.field().one(), exponent)
    }

    pub fn monomial(ctx: &Ctx, coeff: CyclotomicNumber, exponent: Rational64) -> Result<Self> {
        Self::from_terms(ctx, [(exponent, coeff)])
    }

    /// Builds an element from (exponent, coefficient) pairs, merging repeated
    /// exponents and dropping zero coefficients.
    pub fn from_terms(
        ctx: &Ctx,
        terms: impl IntoIterator<Item = (Rational64, CyclotomicNumber)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Rational64, CyclotomicNumber> = BTreeMap::new();
        for (e, c) in terms {
            check_exponent(ctx, e)?;
            if c.order() != ctx.cyclotomic_order() {
                return Err(Error::ContextMismatch);
            }
            match map.get_mut(&e) {
                Some(acc) => *acc = acc.add(&c),
                None => {
                    map.insert(e, c);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Ok(PuiseuxElement {
            ctx: Arc::clone(ctx),
            terms: map,
        })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Rational64, &CyclotomicNumber)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Val {
        match self.terms.keys().next() {
            Some(&e) => Val::Finite(e),
            None => Val::Infinity,
        }
    }

    pub fn leading_coefficient(&self) -> Option<&CyclotomicNumber> {
        self.terms.values().next()
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.get_mut(e) {
                Some(acc) => {
                    let s = acc.add(c);
                    if s.is_zero() {
                        terms.remove(e);
                    } else {
                        *acc = s;
                    }
                }
                None => {
                    terms.insert(*e, c.clone());
                }
            }
        }
        Ok(PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Products accumulated unreduced over a common denominator; None when
    /// an intermediate leaves i128.
    fn mul_small(&self, other: &Self) -> Option<BTreeMap<Rational64, CyclotomicNumber>> {
        let field = self.ctx.field();
        let scaled = |x: &Self| {
            let den = x.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator()));
            let ints = x
                .terms
                .iter()
                .map(|(e, c)| Some((*e, c.scaled_ints(&den)?)))
                .collect::<Option<Vec<_>>>()?;
            Some((den, ints))
        };
        let (d1, xs) = scaled(self)?;
        let (d2, ys) = scaled(other)?;
        let width = 2 * field.degree() - 1;
        let mut raw: BTreeMap<Rational64, Vec<i128>> = BTreeMap::new();
        for (e1, x) in &xs {
            for (e2, y) in &ys {
                let acc = raw.entry(*e1 + *e2).or_insert_with(|| vec![0; width]);
                mul_acc(acc, x, y)?;
            }
        }
        let den = d1 * d2;
        let mut terms = BTreeMap::new();
        for (e, r) in raw {
            let reduced = field.reduce_ints(&r)?;
            if reduced.iter().any(|&c| c != 0) {
                terms.insert(e, field.from_scaled_ints(&reduced, &den));
            }
        }
        Some(terms)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        if let Some(terms) = self.mul_small(other) {
            return Ok(PuiseuxElement {
                ctx: Arc::clone(&self.ctx),
                terms,
            });
        }
        let field = self.ctx.field();
        let mut terms: BTreeMap<Rational64, CyclotomicNumber> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let prod = field.mul(c1, c2);
                let e = *e1 + *e2;
                match terms.get_mut(&e) {
                    Some(acc) => *acc = acc.add(&prod),
                    None => {
                        terms.insert(e, prod);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms,
        })
    }

    pub fn scalar_mul(&self, c: &CyclotomicNumber) -> Result<Self> {
        if c.order() != self.ctx.cyclotomic_order() {
            return Err(Error::ContextMismatch);
        }
        if c.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        let field = self.ctx.field();
        Ok(PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (*e, field.mul(x, c)))
                .collect(),
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exponent of a term as an integer multiple of 1/N.
    fn step_index(&self, e: Rational64) -> i64 {
        let n = self.ctx.ram_index() as i64;
        (e * Rational64::from_integer(n)).to_integer()
    }

    /// Applies σ^k where σ(π^{1/N}) = ζ_N π^{1/N}.
    pub fn galois_apply(&self, k: i64) -> Self {
        let field = self.ctx.field();
        let stride = (self.ctx.cyclotomic_order() / self.ctx.ram_index()) as i64;
        let m = self.ctx.cyclotomic_order() as i64;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let t = (stride * self.step_index(*e)).rem_euclid(m) * k.rem_euclid(m) % m;
                let c = if t == 0 {
                    c.clone()
                } else {
                    field.mul(c, &field.zeta_power(t))
                };
                (*e, c)
            })
            .collect();
        PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms,
        }
    }

    /// Whether σ^k fixes `self`. A term c·π^{j/N} is sent to c·ζ_N^{jk}·π^{j/N};
    /// with c ≠ 0 it is fixed exactly when N divides jk.
    pub fn is_fixed_by(&self, k: i64) -> bool {
        let n = self.ctx.ram_index() as i64;
        self.terms
            .keys()
            .all(|e| (self.step_index(*e) * k).rem_euclid(n) == 0)
    }

    /// Degree over the base field: the size of the Galois orbit, i.e. the
    /// smallest k ≥ 1 with σ^k(x) = x.
    pub fn degree_over_base(&self) -> u64 {
        let n = self.ctx.ram_index();
        (1..=n)
            .find(|&k| self.is_fixed_by(k as i64))
            .expect("σ^N is the identity")
    }

    /// lcm of the reduced exponent denominators.
    pub fn denominator_lcm(&self) -> u64 {
        self.terms
            .keys()
            .fold(1u64, |acc, e| acc.lcm(&(*e.denom() as u64)))
    }

    /// All terms with exponent strictly below `bound`.
    pub fn truncate_below(&self, bound: Rational64) -> Self {
        PuiseuxElement {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .range(..bound)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Reads `self` over `ctx.rebase(e)`: exponents are measured in units of
    /// π^{1/e} and so scale by `e`.
    pub fn rebase(&self, rebased: &Ctx, e: u64) -> Result<Self> {
        let expected = self.ctx.rebase(e)?;
        if *expected != **rebased {
            return Err(Error::ContextMismatch);
        }
        let k = Rational64::from_integer(e as i64);
        Ok(PuiseuxElement {
            ctx: Arc::clone(rebased),
            terms: self.terms.iter().map(|(x, c)| (*x * k, c.clone())).collect(),
        })
    }

    /// Inverse of [`rebase`](Self::rebase): reads a rebased element back over `base`.
    pub fn unrebase(&self, base: &Ctx, e: u64) -> Result<Self> {
        let expected = base.rebase(e)?;
        if *expected != *self.ctx {
            return Err(Error::ContextMismatch);
        }
        let k = Rational64::new(1, e as i64);
        Ok(PuiseuxElement {
            ctx: Arc::clone(base),
            terms: self.terms.iter().map(|(x, c)| (*x * k, c.clone())).collect(),
        })
    }

    /// Embeds into a larger context (N | N', M | M', same normalization).
    pub fn lift(&self, target: &Ctx) -> Result<Self> {
        if Arc::ptr_eq(&self.ctx, target) || *self.ctx == **target {
            return Ok(PuiseuxElement {
                ctx: Arc::clone(target),
                terms: self.terms.clone(),
            });
        }
        if !self.ctx.embeds_into(target) {
            return Err(Error::ContextMismatch);
        }
        let field = target.field();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((*e, field.embed(c)?)))
            .collect::<Result<_>>()?;
        Ok(PuiseuxElement {
            ctx: Arc::clone(target),
            terms,
        })
    }

    /// True when some coefficient would be read differently in mixed
    /// characteristic: a rational coefficient with p in numerator or denominator.
    pub fn touches_residue_char(&self) -> bool {
        let p = self.ctx.residue_char();
        p > 0
            && self
                .terms
                .values()
                .any(|c| c.is_rational() && c.touches_prime(p))
    }

    /// Valuation first, then the term sequence. Used to order roots in files.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.valuation().cmp(&other.valuation()).then_with(|| {
            let mut a = self.terms.iter();
            let mut b = other.terms.iter();
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(_), None) => return Ordering::Greater,
                    (Some((e1, c1)), Some((e2, c2))) => {
                        let ord = e1.cmp(e2).then_with(|| c1.canonical_cmp(c2));
                        if ord != Ordering::Equal {
                            return ord;
                        }
                    }
                }
            }
        })
    }

    /// Renders in the expression grammar accepted by [`super::parse_puiseux`].
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let (negative, body) = render_term(*e, c);
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn render_term(e: Rational64, c: &CyclotomicNumber) -> (bool, String) {
    let mono = format!("pi^({})", render_q(e));
    if let Some(q) = c.as_rational() {
        let negative = q < &BigRational::zero();
        let mag = if negative { -q } else { q.clone() };
        let body = if e.is_zero() {
            super::cyclotomic::render_rational(&mag)
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{}", super::cyclotomic::render_rational(&mag), mono)
        };
        (negative, body)
    } else {
        let coeff = format!("({})", c.render_zpoly());
        if e.is_zero() {
            (false, coeff)
        } else {
            (false, format!("{coeff}*{mono}"))
        }
    }
}

fn check_exponent(ctx: &BaseFieldContext, e: Rational64) -> Result<()> {
    let n = ctx.ram_index() as i64;
    if n % e.denom() != 0 {
        return Err(Error::DenominatorTooLarge {
            exponent: render_q(e),
            ram_index: ctx.ram_index(),
        });
    }
    Ok(())
}

impl PartialEq for PuiseuxElement {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.terms == other.terms
    }
}

impl Eq for PuiseuxElement {}

impl fmt::Debug for PuiseuxElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for PuiseuxElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::BaseFieldContext;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn ctx10() -> Ctx {
        BaseFieldContext::new(7, 10, 10).unwrap()
    }

    fn pi(ctx: &Ctx, n: i64, d: i64) -> PuiseuxElement {
        PuiseuxElement::pi_power(ctx, r(n, d)).unwrap()
    }

    #[test]
    fn exact_cancellation() {
        let ctx = ctx10();
        let x = pi(&ctx, 1, 2);
        let s = x.add(&x.neg()).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.valuation(), Val::Infinity);
    }

    #[test]
    fn monomial_distribution() {
        let ctx = ctx10();
        let f = pi(&ctx, 1, 2).add(&pi(&ctx, 3, 5)).unwrap();
        let prod = f.mul(&pi(&ctx, 1, 2)).unwrap();
        let expected = pi(&ctx, 1, 1).add(&pi(&ctx, 11, 10)).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn valuation_is_minimum_exponent() {
        let ctx = ctx10();
        let f = pi(&ctx, 1, 2).add(&pi(&ctx, 3, 5)).unwrap();
        assert_eq!(f.valuation(), Val::Finite(r(1, 2)));
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let a = pi(&ctx10(), 1, 2);
        let other = BaseFieldContext::new(7, 6, 6).unwrap();
        let b = pi(&other, 1, 2);
        assert_eq!(a.add(&b), Err(Error::ContextMismatch));
        assert_eq!(a.mul(&b), Err(Error::ContextMismatch));
    }

    #[test]
    fn denominators_must_divide_ram_index() {
        let ctx = ctx10();
        assert!(matches!(
            PuiseuxElement::pi_power(&ctx, r(1, 3)),
            Err(Error::DenominatorTooLarge { .. })
        ));
    }

    #[test]
    fn galois_generator_on_square_root() {
        let ctx = ctx10();
        let x = pi(&ctx, 1, 2);
        assert_eq!(x.galois_apply(0), x);
        assert_eq!(x.galois_apply(1), x.neg());
        assert_eq!(x.galois_apply(10), x);
    }

    #[test]
    fn orbit_of_tenth_root_has_ten_elements() {
        let ctx = ctx10();
        let x = pi(&ctx, 1, 10);
        let orbit: Vec<_> = (0..10).map(|k| x.galois_apply(k)).collect();
        for i in 0..10 {
            for j in 0..i {
                assert_ne!(orbit[i], orbit[j]);
            }
        }
    }

    #[test]
    fn degrees_over_base() {
        let ctx = ctx10();
        let alpha = pi(&ctx, 1, 2).add(&pi(&ctx, 3, 5)).unwrap();
        assert_eq!(alpha.degree_over_base(), 10);
        assert_eq!(PuiseuxElement::integer(&ctx, 5).degree_over_base(), 1);
        assert_eq!(pi(&ctx, 7, 1).degree_over_base(), 1);
        let ctx6 = BaseFieldContext::new(7, 6, 6).unwrap();
        let y = pi(&ctx6, 1, 2).add(&pi(&ctx6, 1, 3)).unwrap();
        assert_eq!(y.degree_over_base(), 6);
        // orbit enumeration with the actual action
        let orbit_size = (1..=6).find(|&k| y.galois_apply(k) == y).unwrap();
        assert_eq!(orbit_size, 6);
    }

    #[test]
    fn truncation_keeps_strictly_smaller_exponents() {
        let ctx = ctx10();
        let alpha = pi(&ctx, 1, 2).add(&pi(&ctx, 3, 5)).unwrap();
        assert_eq!(alpha.truncate_below(r(3, 5)), pi(&ctx, 1, 2));
        assert!(alpha.truncate_below(r(-100, 1)).is_zero());
    }

    #[test]
    fn rebase_scales_exponents() {
        let ctx = ctx10();
        let k2 = ctx.rebase(2).unwrap();
        let alpha = pi(&ctx, 1, 2).add(&pi(&ctx, 3, 5)).unwrap();
        let rebased = alpha.rebase(&k2, 2).unwrap();
        let exps: Vec<_> = rebased.terms().map(|(e, _)| *e).collect();
        assert_eq!(exps, vec![r(1, 1), r(6, 5)]);
        assert_eq!(rebased.unrebase(&ctx, 2).unwrap(), alpha);
        // over K(π^{1/2}) the square root becomes rational
        assert_eq!(pi(&ctx, 1, 2).rebase(&k2, 2).unwrap().degree_over_base(), 1);
        assert_eq!(alpha.rebase(&k2, 2).unwrap().degree_over_base(), 5);
    }

    #[test]
    fn render_forms() {
        let ctx = ctx10();
        let f = ctx.field();
        let x = PuiseuxElement::from_terms(
            &ctx,
            [
                (r(0, 1), f.from_integer(-3)),
                (r(1, 2), f.one()),
                (r(3, 5), f.zeta_power(2)),
                (r(1, 1), f.from_integer(-2)),
            ],
        )
        .unwrap();
        assert_eq!(x.render(), "-3 + pi^(1/2) + (z^2)*pi^(3/5) - 2*pi^(1)");
    }
}
