//! Parser for the Puiseux expression grammar.
//!
//! ```text
//! puiseux := term (("+" | "-") term)*
//! term    := coeff | coeff "*" mono | mono | "-" term
//! mono    := "pi^(" rational ")"
//! coeff   := rational | "(" zpoly ")"
//! zpoly   := polynomial in z with rational coefficients, z = ζ_M
//! ```
//!
//! Whitespace is ignored everywhere.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::context::Ctx;
use super::cyclotomic::CyclotomicNumber;
use super::puiseux::PuiseuxElement;
use crate::error::{Error, Result};

/// Parses a single expression; reported columns are 1-based within `text`.
pub fn parse_puiseux(ctx: &Ctx, text: &str) -> Result<PuiseuxElement> {
    parse_puiseux_at(ctx, text, 1, 1)
}

/// Like [`parse_puiseux`] but reports positions relative to `line` and
/// `column`, the location of `text` inside a larger document.
pub fn parse_puiseux_at(ctx: &Ctx, text: &str, line: usize, column: usize) -> Result<PuiseuxElement> {
    let chars: Vec<(char, usize)> = text
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .map(|(i, c)| (c, column + i))
        .collect();
    let end_col = column + text.chars().count();
    let mut p = Parser {
        ctx,
        chars,
        pos: 0,
        line,
        end_col,
    };
    let value = p.puiseux()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    ctx: &'a Ctx,
    chars: Vec<(char, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(c, _)| *c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end_col, |(_, col)| *col)
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column(),
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        for c in s.chars() {
            if !self.eat(c) {
                return Err(self.error(&format!("expected `{s}`")));
            }
        }
        Ok(())
    }

    fn puiseux(&mut self) -> Result<PuiseuxElement> {
        if self.peek().is_none() {
            return Err(self.error("empty expression"));
        }
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = acc.add(&t)?;
            } else if self.peek() == Some('-') {
                let t = self.term()?;
                acc = acc.add(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PuiseuxElement> {
        if self.eat('-') {
            return Ok(self.term()?.neg());
        }
        let field = self.ctx.field();
        match self.peek() {
            Some('p') => {
                let e = self.mono()?;
                PuiseuxElement::monomial(self.ctx, field.one(), e)
            }
            Some('(') => {
                self.pos += 1;
                let c = self.zpoly()?;
                self.expect(")")?;
                self.coeff_tail(c)
            }
            Some(c) if c.is_ascii_digit() => {
                let q = self.big_rational()?;
                let c = field.from_rational(q);
                self.coeff_tail(c)
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn coeff_tail(&mut self, c: CyclotomicNumber) -> Result<PuiseuxElement> {
        let e = if self.eat('*') {
            self.mono()?
        } else {
            Rational64::zero()
        };
        PuiseuxElement::monomial(self.ctx, c, e)
    }

    fn mono(&mut self) -> Result<Rational64> {
        self.expect("pi^(")?;
        let negative = self.eat('-');
        let num = self.digits_i64()?;
        let den = if self.eat('/') { self.digits_i64()? } else { 1 };
        if den == 0 {
            return Err(self.error("zero denominator"));
        }
        self.expect(")")?;
        Ok(Rational64::new(if negative { -num } else { num }, den))
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(self.chars[start..self.pos].iter().map(|(c, _)| *c).collect())
    }

    fn digits_i64(&mut self) -> Result<i64> {
        let s = self.digits()?;
        s.parse().map_err(|_| self.error("integer out of range"))
    }

    fn big_rational(&mut self) -> Result<BigRational> {
        let num: BigInt = self.digits()?.parse().expect("digits");
        let den: BigInt = if self.eat('/') {
            self.digits()?.parse().expect("digits")
        } else {
            BigInt::one()
        };
        if den.is_zero() {
            return Err(self.error("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }

    fn zpoly(&mut self) -> Result<CyclotomicNumber> {
        let mut coeffs: Vec<BigRational> = Vec::new();
        let mut first = true;
        loop {
            let negative = if self.eat('-') {
                true
            } else if !first && self.eat('+') {
                false
            } else if first {
                false
            } else {
                break;
            };
            first = false;
            let (q, deg) = self.zterm()?;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigRational::zero());
            }
            if negative {
                coeffs[deg] -= q;
            } else {
                coeffs[deg] += q;
            }
        }
        Ok(self.ctx.field().from_poly(&coeffs))
    }

    fn zterm(&mut self) -> Result<(BigRational, usize)> {
        match self.peek() {
            Some('z') => Ok((BigRational::one(), self.zmono()?)),
            Some(c) if c.is_ascii_digit() => {
                let q = self.big_rational()?;
                if self.eat('*') {
                    Ok((q, self.zmono()?))
                } else {
                    Ok((q, 0))
                }
            }
            _ => Err(self.error("expected a polynomial term in z")),
        }
    }

    fn zmono(&mut self) -> Result<usize> {
        self.expect("z")?;
        if self.eat('^') {
            let k = self.digits_i64()?;
            usize::try_from(k).map_err(|_| self.error("exponent out of range"))
        } else {
            Ok(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::BaseFieldContext;

    fn ctx() -> Ctx {
        BaseFieldContext::new(7, 10, 10).unwrap()
    }

    #[test]
    fn parses_and_renders() {
        let c = ctx();
        for s in [
            "pi^(1/2) + pi^(3/5)",
            "-pi^(1/2) + (z^2)*pi^(3/5)",
            "-3 + 2*pi^(1)",
            "(1/2*z - z^3)*pi^(-5)",
            "0",
        ] {
            let x = parse_puiseux(&c, s).unwrap();
            let again = parse_puiseux(&c, &x.render()).unwrap();
            assert_eq!(x, again, "{s}");
        }
        assert_eq!(
            parse_puiseux(&c, " pi^( 1/2 )-pi^(1/2) ").unwrap(),
            PuiseuxElement::zero(&c)
        );
    }

    #[test]
    fn zeta_reduction() {
        let c = ctx();
        // 1 - z + z^2 - z^3 + z^4 = Φ_10(z) = 0
        let x = parse_puiseux(&c, "(1 - z + z^2 - z^3 + z^4)*pi^(1/2)").unwrap();
        assert!(x.is_zero());
        let y = parse_puiseux(&c, "(z^5)").unwrap();
        assert_eq!(y, PuiseuxElement::integer(&c, -1));
    }

    #[test]
    fn reports_positions() {
        let c = ctx();
        match parse_puiseux(&c, "pi^(1/2) + ?") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 12)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_puiseux(&c, "pi^(1/3)"),
            Err(Error::DenominatorTooLarge { .. })
        ));
        assert!(parse_puiseux(&c, "").is_err());
        assert!(parse_puiseux(&c, "pi^(1/0)").is_err());
    }
}
