//! Exact arithmetic in the cyclotomic field ℚ(ζ_M).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(M)-1}`, reduced
//! modulo the M-th cyclotomic polynomial, so two elements are equal exactly
//! when their coefficient vectors are equal.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest cyclotomic order accepted. Keeps the ζ-power table bounded.
pub const MAX_CYCLOTOMIC_ORDER: u64 = 20_000;

/// Descriptor of ℚ(ζ_M): the modulus Φ_M and a lazily built table of the
/// reduced powers ζ^t for `0 <= t < M`.
#[derive(Debug)]
pub struct CyclotomicField {
    order: u64,
    modulus: Vec<i128>,
    powers: OnceLock<Vec<Vec<i64>>>,
}

impl CyclotomicField {
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 || order > MAX_CYCLOTOMIC_ORDER {
            return Err(Error::InvalidContext(format!(
                "cyclotomic order {order} outside 1..={MAX_CYCLOTOMIC_ORDER}"
            )));
        }
        Ok(CyclotomicField {
            order,
            modulus: cyclotomic_polynomial(order)?,
            powers: OnceLock::new(),
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// φ(M), the dimension of the field over ℚ.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Integer coefficients of Φ_M, lowest degree first.
    pub fn modulus(&self) -> &[i128] {
        &self.modulus
    }

    fn powers(&self) -> &[Vec<i64>] {
        self.powers.get_or_init(|| {
            let phi = self.degree();
            let m = self.order as usize;
            let mut table = Vec::with_capacity(m);
            let mut cur = vec![0i128; phi];
            cur[0] = 1;
            for _ in 0..m {
                table.push(
                    cur.iter()
                        .map(|&c| i64::try_from(c).expect("cyclotomic power table overflow"))
                        .collect(),
                );
                // multiply by ζ and reduce the overflowing top coefficient
                let top = cur[phi - 1];
                for i in (1..phi).rev() {
                    cur[i] = cur[i - 1];
                }
                cur[0] = 0;
                if top != 0 {
                    for i in 0..phi {
                        cur[i] -= top * self.modulus[i];
                    }
                }
            }
            table
        })
    }

    pub fn zero(&self) -> CyclotomicNumber {
        CyclotomicNumber {
            order: self.order,
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> CyclotomicNumber {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> CyclotomicNumber {
        let mut z = self.zero();
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(&self, n: i64) -> CyclotomicNumber {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// ζ_M^t for any integer t.
    pub fn zeta_power(&self, t: i64) -> CyclotomicNumber {
        let idx = t.rem_euclid(self.order as i64) as usize;
        let row = &self.powers()[idx];
        CyclotomicNumber {
            order: self.order,
            coeffs: row
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    /// Builds an element from a (not necessarily reduced) polynomial in ζ.
    pub fn from_poly(&self, coeffs: &[BigRational]) -> CyclotomicNumber {
        let mut out = self.zero();
        let table = self.powers();
        let m = self.order as usize;
        for (t, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, &b) in out.coeffs.iter_mut().zip(&table[t % m]) {
                if b != 0 {
                    *acc += c * BigRational::from_integer(BigInt::from(b));
                }
            }
        }
        out
    }

    pub fn mul(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
        debug_assert_eq!(a.order, self.order);
        debug_assert_eq!(b.order, self.order);
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if let Some(c) = self.mul_small(a, b) {
            return c;
        }
        let phi = self.degree();
        let mut raw = vec![BigRational::zero(); 2 * phi - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        self.from_poly(&raw)
    }

    fn mul_small(&self, a: &CyclotomicNumber, b: &CyclotomicNumber) -> Option<CyclotomicNumber> {
        let (da, db) = (a.denominator(), b.denominator());
        let mut raw = vec![0i128; 2 * self.degree() - 1];
        mul_acc(&mut raw, &a.scaled_ints(&da)?, &b.scaled_ints(&db)?)?;
        Some(self.from_scaled_ints(&self.reduce_ints(&raw)?, &(da * db)))
    }

    /// Reduces an integer polynomial in ζ modulo Φ_M; None on i128 overflow.
    pub(crate) fn reduce_ints(&self, raw: &[i128]) -> Option<Vec<i128>> {
        let phi = self.degree();
        let mut r = raw.to_vec();
        for k in (phi..r.len()).rev() {
            let t = r[k];
            if t == 0 {
                continue;
            }
            for i in 0..phi {
                r[k - phi + i] = r[k - phi + i].checked_sub(t.checked_mul(self.modulus[i])?)?;
            }
        }
        r.resize(phi, 0);
        Some(r)
    }

    /// The element Σ ints[i]·ζ^i / den.
    pub(crate) fn from_scaled_ints(&self, ints: &[i128], den: &BigInt) -> CyclotomicNumber {
        CyclotomicNumber {
            order: self.order,
            coeffs: ints
                .iter()
                .map(|&c| BigRational::new(BigInt::from(c), den.clone()))
                .collect(),
        }
    }

    /// Re-expresses `x`, an element of ℚ(ζ_m) with `m | M`, inside this field.
    pub fn embed(&self, x: &CyclotomicNumber) -> Result<CyclotomicNumber> {
        if x.order == self.order {
            return Ok(x.clone());
        }
        if !self.order.is_multiple_of(x.order) {
            return Err(Error::ContextMismatch);
        }
        let step = (self.order / x.order) as usize;
        let mut raw = vec![BigRational::zero(); x.coeffs.len() * step];
        for (i, c) in x.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Ok(self.from_poly(&raw))
    }
}

/// An element of ℚ(ζ_M) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    order: u64,
    coeffs: Vec<BigRational>,
}

/// acc += x·y as integer polynomials; None on overflow.
pub(crate) fn mul_acc(acc: &mut [i128], x: &[i128], y: &[i128]) -> Option<()> {
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            if b != 0 {
                acc[i + j] = acc[i + j].checked_add(a.checked_mul(b)?)?;
            }
        }
    }
    Some(())
}

impl CyclotomicNumber {
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Least common denominator of the coordinates.
    pub(crate) fn denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Coordinates of self·den as i128, when den clears every denominator
    /// and the results fit.
    pub(crate) fn scaled_ints(&self, den: &BigInt) -> Option<Vec<i128>> {
        self.coeffs
            .iter()
            .map(|c| {
                let (q, r) = (c.numer() * den).div_rem(c.denom());
                if r.is_zero() {
                    i128::try_from(q).ok()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        CyclotomicNumber {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    /// True when `p` divides the numerator or denominator of some nonzero
    /// coordinate. Used for the mixed-characteristic divergence warning.
    pub fn touches_prime(&self, p: u64) -> bool {
        if p == 0 {
            return false;
        }
        let p = BigInt::from(p);
        self.coeffs.iter().filter(|c| !c.is_zero()).any(|c| {
            c.numer().is_multiple_of(&p) || c.denom().is_multiple_of(&p)
        })
    }

    /// Renders as a polynomial in `z` using the curve-file coefficient syntax.
    pub fn render_zpoly(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&render_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", render_rational(&mag), mono));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Lexicographic comparison of coefficient vectors; used for canonical
    /// ordering of roots.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.render_zpoly())
    }
}

pub(crate) fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Φ_n via Φ_n = ∏_{d | n} (x^d − 1)^{μ(n/d)}.
fn cyclotomic_polynomial(n: u64) -> Result<Vec<i128>> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut numer = vec![1i128];
    let mut denoms = Vec::new();
    for &d in &divisors {
        match mobius(n / d) {
            1 => numer = poly_mul(&numer, &x_pow_minus_one(d)),
            -1 => denoms.push(d),
            _ => {}
        }
    }
    for d in denoms {
        numer = poly_div_exact(&numer, &x_pow_minus_one(d)).ok_or_else(|| {
            Error::InvalidContext(format!("failed to build cyclotomic polynomial {n}"))
        })?;
    }
    Ok(numer)
}

fn x_pow_minus_one(d: u64) -> Vec<i128> {
    let mut p = vec![0i128; d as usize + 1];
    p[0] = -1;
    p[d as usize] = 1;
    p
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic polynomial; `None` if a remainder is left.
fn poly_div_exact(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return None;
    }
    let mut quot = vec![0i128; rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db];
        quot[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    rem.iter().all(|&r| r == 0).then_some(quot)
}

fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Euler's totient.
pub fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
