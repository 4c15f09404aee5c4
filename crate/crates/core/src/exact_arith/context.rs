use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::One;

use super::cyclotomic::CyclotomicField;
use crate::error::{Error, Result};

/// The field K together with the tame extension K(π^{1/N}) the arithmetic can
/// represent.
///
/// Exponents of π carry denominators dividing `ram_index`; coefficients live in
/// ℚ(ζ_M) with `M = cyclotomic_order`. The Galois generator acts by
/// π^{1/N} ↦ ζ_N π^{1/N}, fixing coefficients.
pub struct BaseFieldContext {
    residue_char: u64,
    ram_index: u64,
    cyclotomic_order: u64,
    normalization: Rational64,
    field: CyclotomicField,
}

/// Contexts are shared between all elements built over them.
pub type Ctx = Arc<BaseFieldContext>;

impl BaseFieldContext {
    pub fn new(residue_char: u64, ram_index: u64, cyclotomic_order: u64) -> Result<Ctx> {
        Self::with_normalization(residue_char, ram_index, cyclotomic_order, Rational64::one())
    }

    pub fn with_normalization(
        residue_char: u64,
        ram_index: u64,
        cyclotomic_order: u64,
        normalization: Rational64,
    ) -> Result<Ctx> {
        if ram_index == 0 {
            return Err(Error::InvalidContext("ram_index must be positive".into()));
        }
        if cyclotomic_order == 0 || !cyclotomic_order.is_multiple_of(ram_index) {
            return Err(Error::InvalidContext(format!(
                "ram_index {ram_index} must divide cyclotomic_order {cyclotomic_order}"
            )));
        }
        if normalization <= Rational64::from_integer(0) {
            return Err(Error::InvalidContext("normalization must be positive".into()));
        }
        Ok(Arc::new(BaseFieldContext {
            residue_char,
            ram_index,
            cyclotomic_order,
            normalization,
            field: CyclotomicField::new(cyclotomic_order)?,
        }))
    }

    pub fn residue_char(&self) -> u64 {
        self.residue_char
    }

    pub fn ram_index(&self) -> u64 {
        self.ram_index
    }

    pub fn cyclotomic_order(&self) -> u64 {
        self.cyclotomic_order
    }

    pub fn normalization(&self) -> Rational64 {
        self.normalization
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    /// gcd(N, p) = 1, i.e. every representable extension is tame.
    pub fn is_tame(&self) -> bool {
        self.residue_char == 0 || self.ram_index.gcd(&self.residue_char) == 1
    }

    /// Context over K(π^{1/e}) with π^{1/e} as the new uniformizer.
    ///
    /// Valuations scale by `e`, the ramification index drops to `N / e` and the
    /// Galois generator becomes the e-th power of the old one.
    pub fn rebase(&self, e: u64) -> Result<Ctx> {
        if e == 0 || !self.ram_index.is_multiple_of(e) {
            return Err(Error::RebaseDivisor {
                e,
                n: self.ram_index,
            });
        }
        Self::with_normalization(
            self.residue_char,
            self.ram_index / e,
            self.cyclotomic_order,
            self.normalization * Rational64::from_integer(e as i64),
        )
    }

    /// Smallest enlargement whose ramification index is a multiple of `k`.
    pub fn extend_to(&self, k: u64) -> Result<Ctx> {
        let n = self.ram_index.lcm(&k);
        let m = self.cyclotomic_order.lcm(&n);
        Self::with_normalization(self.residue_char, n, m, self.normalization)
    }

    /// True when elements of `self` can be read in `other` unchanged.
    pub fn embeds_into(&self, other: &BaseFieldContext) -> bool {
        self.residue_char == other.residue_char
            && self.normalization == other.normalization
            && other.ram_index.is_multiple_of(self.ram_index)
            && other.cyclotomic_order.is_multiple_of(self.cyclotomic_order)
    }
}

impl PartialEq for BaseFieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.residue_char == other.residue_char
            && self.ram_index == other.ram_index
            && self.cyclotomic_order == other.cyclotomic_order
            && self.normalization == other.normalization
    }
}

impl Eq for BaseFieldContext {}

impl fmt::Debug for BaseFieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ctx(p={}, N={}, M={}, norm={})",
            self.residue_char, self.ram_index, self.cyclotomic_order, self.normalization
        )
    }
}
