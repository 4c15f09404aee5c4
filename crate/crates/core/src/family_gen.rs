//! Curves whose degree set is qℕ ∪ n₁ℕ ∪ … ∪ n_ℓℕ.
//!
//! F = π·(x^c − π^a)·∏_k ∏_{w} (x^{n_k} − w^{n_k}π) over the parts n_k > 1,
//! with q distinct unit twists w per part so that every root is simple.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};

use crate::curve_model::{is_prime, CurveSpec};
use crate::error::{Error, Result};
use crate::exact_arith::{BaseFieldContext, PuiseuxElement};
use crate::natset::NaturalSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRequest {
    pub q: u64,
    pub parts: Vec<u64>,
    /// Total degree; must equal q·Σ parts when given.
    pub total_degree: Option<u64>,
    /// Residue characteristic; defaults to the smallest prime larger than
    /// every parameter.
    pub p: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub curve: CurveSpec,
    pub expected: NaturalSet,
    pub c: u64,
    /// Exponent a of the (x^c − π^a) factor; None when c = 0.
    pub a: Option<i64>,
    pub p: u64,
}

/// Largest negative a meeting the congruence and size constraints.
fn choose_a(q: u64, c: u64, parts: &[u64]) -> i64 {
    let c = c as i64;
    if q == 2 {
        let n_max = parts.iter().copied().max().unwrap_or(1) as i64;
        let mut a = -c * n_max - 1;
        while a.rem_euclid(4) != 2 {
            a -= 1;
        }
        a
    } else {
        let mut a = -c - 1;
        while a.rem_euclid(q as i64) != 1 || a.gcd(&c) != 1 {
            a -= 1;
        }
        a
    }
}

pub fn generate_family(req: &FamilyRequest) -> Result<Family> {
    let q = req.q;
    if !is_prime(q) {
        return Err(Error::Rejected(format!("q = {q} is not prime")));
    }
    if req.parts.is_empty() || req.parts.contains(&0) {
        return Err(Error::Rejected("parts must be positive integers".into()));
    }
    let ones = req.parts.iter().filter(|&&n| n == 1).count();
    if q == 2 && ones % 2 == 1 {
        return Err(Error::Rejected(
            "for q = 2 the number of times 1 occurs in the sequence must be even".into(),
        ));
    }
    let m: Vec<u64> = req.parts.iter().copied().filter(|&n| n > 1).collect();
    if m.is_empty() {
        return Err(Error::Rejected("no part exceeds 1".into()));
    }
    let total = q * req.parts.iter().sum::<u64>();
    if let Some(d) = req.total_degree {
        if d != total {
            return Err(Error::Rejected(format!("total degree {d} differs from q·Σn = {total}")));
        }
    }
    let c = total - q * m.iter().sum::<u64>();
    let a = (c > 0).then(|| choose_a(q, c, &req.parts));

    let mut ram = m.iter().fold(1u64, |acc, n| acc.lcm(n));
    if let Some(a) = a {
        ram = ram.lcm(&(*Rational64::new(a, c as i64).denom() as u64));
    }
    let cyc = ram.lcm(&c.max(1));
    let twists = q * m.len() as u64;
    let p = match req.p {
        Some(p) => p,
        None => (ram.max(cyc).max(q).max(twists) + 1..)
            .find(|&n| is_prime(n))
            .expect("primes are unbounded"),
    };
    if p == q || (p != 0 && !is_prime(p)) {
        return Err(Error::Rejected(format!("p = {p} must be 0 or a prime different from q")));
    }
    if p != 0 && (ram % p == 0 || (c > 0 && c.is_multiple_of(p)) || m.iter().any(|n| n % p == 0)) {
        return Err(Error::Rejected(format!(
            "p = {p} divides a ramification parameter; the roots would be wild"
        )));
    }
    let ctx = BaseFieldContext::new(p, ram, cyc)?;
    let field = ctx.field();

    let mut roots = Vec::new();
    if let Some(a) = a {
        let exp = Rational64::new(a, c as i64);
        for j in 0..c {
            let coeff = field.zeta_power((j * (cyc / c)) as i64);
            roots.push((PuiseuxElement::monomial(&ctx, coeff, exp)?, 1));
        }
    }
    let mut w = 0u64;
    for &n in &m {
        let exp = Rational64::new(1, n as i64);
        for _ in 0..q {
            w += 1;
            while p != 0 && w.is_multiple_of(p) {
                w += 1;
            }
            let scale = BigRational::from_integer(BigInt::from(w));
            for j in 0..n {
                let coeff = field.zeta_power((j * (cyc / n)) as i64).scale(&scale);
                roots.push((PuiseuxElement::monomial(&ctx, coeff, exp)?, 1));
            }
        }
    }
    let parts: Vec<String> = req.parts.iter().map(u64::to_string).collect();
    let name = format!("family-q{q}-{}", parts.join("-"));
    let leading = PuiseuxElement::pi_power(&ctx, Rational64::from_integer(1))?;
    let curve = CurveSpec::new(name, q, leading, roots)?;
    let expected = m
        .iter()
        .fold(NaturalSet::progression(q), |acc, &n| acc.union(&NaturalSet::progression(n)));
    Ok(Family {
        curve,
        expected,
        c,
        a,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::validate_curve;

    fn req(q: u64, parts: &[u64]) -> FamilyRequest {
        FamilyRequest {
            q,
            parts: parts.to_vec(),
            total_degree: None,
            p: None,
        }
    }

    #[test]
    fn parameters() {
        let f = generate_family(&req(3, &[1, 2, 5])).unwrap();
        assert_eq!((f.c, f.a), (3, Some(-5)));
        assert_eq!(f.curve.degree(), 24);
        let f = generate_family(&req(2, &[1, 1, 3])).unwrap();
        assert_eq!((f.c, f.a), (4, Some(-14)));
        let f = generate_family(&req(3, &[2, 5])).unwrap();
        assert_eq!((f.c, f.a), (0, None));
        assert!(validate_curve(&f.curve).passed());
    }

    #[test]
    fn rejections() {
        assert!(generate_family(&req(2, &[1, 3])).is_err());
        assert!(generate_family(&req(3, &[1, 1])).is_err());
        assert!(generate_family(&req(4, &[2])).is_err());
        let mut r = req(3, &[2, 5]);
        r.p = Some(5);
        assert!(generate_family(&r).is_err());
        r.p = Some(7);
        r.total_degree = Some(20);
        assert!(generate_family(&r).is_err());
    }
}
