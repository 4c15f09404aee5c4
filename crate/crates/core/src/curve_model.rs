//! Superelliptic curves y^q = F(x) given by the roots of F.
//!
//! File format:
//!
//! ```text
//! curve "name"
//! q = 3
//! residue_char = 7
//! ram_index = 10
//! cyclotomic_order = 10
//! leading = pi^(1)
//! root pi^(1/2) + pi^(3/5) mult 1
//! ```
//!
//! `#` starts a comment. Keys and roots may appear in any order.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{parse_puiseux_at, BaseFieldContext, Ctx, PuiseuxElement, Val};

/// The curve y^q = a_d ∏ (x − α_i)^{m_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    name: String,
    q: u64,
    ctx: Ctx,
    leading: PuiseuxElement,
    roots: Vec<(PuiseuxElement, u32)>,
}

impl CurveSpec {
    /// Assembles a curve. Equal roots are merged by adding multiplicities and
    /// the list is put in canonical order. Semantic conditions (primality,
    /// Galois closure, tameness, ...) are left to [`validate_curve`].
    pub fn new(
        name: impl Into<String>,
        q: u64,
        leading: PuiseuxElement,
        roots: impl IntoIterator<Item = (PuiseuxElement, u32)>,
    ) -> Result<Self> {
        let ctx = leading.ctx().clone();
        let mut merged: Vec<(PuiseuxElement, u32)> = Vec::new();
        for (r, m) in roots {
            if **r.ctx() != *ctx {
                return Err(Error::ContextMismatch);
            }
            if m == 0 {
                return Err(Error::InvalidCurve("multiplicity must be positive".into()));
            }
            match merged.iter_mut().find(|(x, _)| *x == r) {
                Some((_, k)) => *k += m,
                None => merged.push((r, m)),
            }
        }
        merged.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        Ok(CurveSpec {
            name: name.into(),
            q,
            ctx,
            leading,
            roots: merged,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn leading(&self) -> &PuiseuxElement {
        &self.leading
    }

    /// Distinct roots with multiplicities, in canonical order.
    pub fn roots(&self) -> &[(PuiseuxElement, u32)] {
        &self.roots
    }

    /// d = total multiplicity.
    pub fn degree(&self) -> u64 {
        self.roots.iter().map(|(_, m)| u64::from(*m)).sum()
    }

    pub fn leading_valuation(&self) -> Rational64 {
        self.leading.valuation().finite().expect("leading coefficient is nonzero")
    }

    pub fn is_root(&self, x: &PuiseuxElement) -> bool {
        self.roots.iter().any(|(r, _)| r == x)
    }

    /// a_d · ∏ (x0 − α)^m by direct multiplication.
    pub fn evaluate_f(&self, x0: &PuiseuxElement) -> Result<PuiseuxElement> {
        let mut acc = self.leading.clone();
        for (r, m) in &self.roots {
            let diff = x0.sub(r)?;
            if diff.is_zero() {
                return Ok(PuiseuxElement::zero(&self.ctx));
            }
            for _ in 0..*m {
                acc = acc.mul(&diff)?;
            }
        }
        Ok(acc)
    }

    /// v(F(x0)) as v(a_d) + Σ m·v(x0 − α); equal to the valuation of
    /// [`evaluate_f`](Self::evaluate_f) by multiplicativity but much cheaper.
    pub fn valuation_of_f(&self, x0: &PuiseuxElement) -> Result<Val> {
        let mut total = self.leading.valuation();
        for (r, m) in &self.roots {
            let v = x0.sub(r)?.valuation();
            total = total + v.scale(Rational64::from_integer(i64::from(*m)));
        }
        Ok(total)
    }

    /// Same curve with every element read over `target` (see
    /// [`PuiseuxElement::lift`]).
    pub fn lift(&self, target: &Ctx) -> Result<Self> {
        Ok(CurveSpec {
            name: self.name.clone(),
            q: self.q,
            ctx: target.clone(),
            leading: self.leading.lift(target)?,
            roots: self
                .roots
                .iter()
                .map(|(r, m)| Ok((r.lift(target)?, *m)))
                .collect::<Result<_>>()?,
        })
    }

    /// Curve-file text; parses back to an equal curve.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "curve \"{}\"", self.name);
        let _ = writeln!(out, "q = {}", self.q);
        let _ = writeln!(out, "residue_char = {}", self.ctx.residue_char());
        let _ = writeln!(out, "ram_index = {}", self.ctx.ram_index());
        let _ = writeln!(out, "cyclotomic_order = {}", self.ctx.cyclotomic_order());
        let _ = writeln!(out, "leading = {}", self.leading.render());
        for (r, m) in &self.roots {
            let _ = writeln!(out, "root {} mult {}", r.render(), m);
        }
        out
    }
}

const KEYS: [&str; 5] = ["q", "residue_char", "ram_index", "cyclotomic_order", "leading"];

struct Located {
    text: String,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn column_of(line: &str, sub: &str) -> usize {
    let offset = sub.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

/// Parses a curve file.
pub fn parse_curve(document: &str) -> Result<CurveSpec> {
    let mut name: Option<String> = None;
    let mut values: [Option<Located>; 5] = Default::default();
    let mut roots: Vec<(Located, u32)> = Vec::new();

    for (idx, raw) in document.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = column_of(raw, trimmed);
        if let Some(rest) = trimmed.strip_prefix("curve") {
            if name.is_some() {
                return Err(syntax(line_no, col, "duplicate curve header"));
            }
            let rest = rest.trim();
            let inner = rest
                .strip_prefix('"')
                .and_then(|r| r.strip_suffix('"'))
                .filter(|r| !r.contains('"'))
                .ok_or_else(|| syntax(line_no, column_of(raw, rest), "expected a quoted curve name"))?;
            name = Some(inner.to_string());
        } else if let Some(rest) = trimmed.strip_prefix("root").filter(|r| r.starts_with(char::is_whitespace)) {
            let pos = rest
                .rfind("mult")
                .filter(|&p| p > 0 && rest[..p].ends_with(char::is_whitespace))
                .ok_or_else(|| syntax(line_no, col, "expected `root <expr> mult <k>`"))?;
            let expr = rest[..pos].trim();
            let mult_text = rest[pos + 4..].trim();
            let mult: u32 = mult_text.parse().map_err(|_| {
                syntax(line_no, column_of(raw, mult_text), "multiplicity must be a positive integer")
            })?;
            if mult == 0 {
                return Err(syntax(line_no, column_of(raw, mult_text), "multiplicity must be positive"));
            }
            roots.push((
                Located {
                    text: expr.to_string(),
                    line: line_no,
                    column: column_of(raw, expr),
                },
                mult,
            ));
        } else if let Some(eq) = trimmed.find('=') {
            let key = trimmed[..eq].trim();
            let value = trimmed[eq + 1..].trim();
            let slot = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::UnknownField(key.to_string()))?;
            if values[slot].is_some() {
                return Err(syntax(line_no, col, format!("duplicate key `{key}`")));
            }
            values[slot] = Some(Located {
                text: value.to_string(),
                line: line_no,
                column: if value.is_empty() { raw.len() + 1 } else { column_of(raw, value) },
            });
        } else {
            return Err(syntax(line_no, col, "expected `curve`, `root` or `key = value`"));
        }
    }

    let name = name.ok_or_else(|| Error::MissingField("curve".into()))?;
    let int = |slot: usize| -> Result<u64> {
        let loc = values[slot]
            .as_ref()
            .ok_or_else(|| Error::MissingField(KEYS[slot].into()))?;
        loc.text
            .parse()
            .map_err(|_| syntax(loc.line, loc.column, format!("`{}` must be a nonnegative integer", KEYS[slot])))
    };
    let q = int(0)?;
    let p = int(1)?;
    let n = int(2)?;
    let m = int(3)?;
    let ctx = BaseFieldContext::new(p, n, m)?;
    let lead = values[4]
        .as_ref()
        .ok_or_else(|| Error::MissingField("leading".into()))?;
    let leading = parse_puiseux_at(&ctx, &lead.text, lead.line, lead.column)?;
    if leading.is_zero() {
        return Err(syntax(lead.line, lead.column, "leading coefficient must be nonzero"));
    }
    let parsed = roots
        .into_iter()
        .map(|(loc, mult)| Ok((parse_puiseux_at(&ctx, &loc.text, loc.line, loc.column)?, mult)))
        .collect::<Result<Vec<_>>>()?;
    CurveSpec::new(name, q, leading, parsed)
}

/// One named pass/fail check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Some exponent denominator shares a factor with the residue characteristic.
    pub wild: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn validate_curve(c: &CurveSpec) -> ValidationReport {
    let p = c.ctx.residue_char();
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(Check { name, passed, detail });

    push("q prime", is_prime(c.q), format!("q = {}", c.q));
    push("q != p", c.q != p, format!("q = {}, p = {}", c.q, p));
    push(
        "has roots",
        !c.roots.is_empty(),
        format!("{} distinct roots", c.roots.len()),
    );
    let leading_in_k = c.leading.terms().all(|(e, _)| e.is_integer());
    push("leading in K", leading_in_k, c.leading.render());

    let bad_mult: Vec<String> = c
        .roots
        .iter()
        .filter(|(_, m)| u64::from(*m) >= c.q)
        .map(|(r, m)| format!("{} (mult {m})", r.render()))
        .collect();
    push(
        "multiplicities < q",
        bad_mult.is_empty(),
        if bad_mult.is_empty() { "ok".into() } else { bad_mult.join(", ") },
    );

    let mut unclosed = Vec::new();
    for (r, m) in &c.roots {
        let image = r.galois_apply(1);
        if !c.roots.iter().any(|(x, k)| *x == image && k == m) {
            unclosed.push(r.render());
        }
    }
    push(
        "Galois closure",
        unclosed.is_empty(),
        if unclosed.is_empty() {
            "ok".into()
        } else {
            format!("conjugate missing for {}", unclosed.join(", "))
        },
    );

    let tame = c.ctx.is_tame();
    push(
        "tameness",
        tame,
        format!("gcd(N = {}, p = {}) = {}", c.ctx.ram_index(), p, c.ctx.ram_index().gcd(&p)),
    );
    let wild = p > 0
        && c
            .roots
            .iter()
            .any(|(r, _)| r.terms().any(|(e, _)| (*e.denom() as u64).is_multiple_of(p)));

    let mut warnings = Vec::new();
    if c.roots.iter().any(|(r, _)| r.is_zero()) {
        warnings.push("0 is a root".to_string());
    }
    if p > 0 {
        let mut divergent = c.leading.touches_residue_char()
            || c.roots.iter().any(|(r, _)| r.touches_residue_char());
        if !divergent {
            'outer: for (i, (a, _)) in c.roots.iter().enumerate() {
                for (b, _) in &c.roots[..i] {
                    if a.sub(b).map(|d| d.touches_residue_char()).unwrap_or(false) {
                        divergent = true;
                        break 'outer;
                    }
                }
            }
        }
        if divergent {
            warnings.push(format!(
                "a rational coefficient is divisible by p = {p} in numerator or denominator; \
                 mixed-characteristic valuations may differ"
            ));
        }
    }
    ValidationReport {
        checks,
        warnings,
        wild,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = "curve \"single\"\nq = 2\nresidue_char = 3\nram_index = 1\ncyclotomic_order = 1\nleading = 1\nroot 0 mult 1\n";

    #[test]
    fn single_root_curve() {
        let c = parse_curve(SINGLE).unwrap();
        assert_eq!(c.degree(), 1);
        assert_eq!(c.render(), SINGLE);
        let rep = validate_curve(&c);
        assert!(rep.passed());
        assert_eq!(rep.warnings, vec!["0 is a root".to_string()]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let doc = "curve \"x\"\nq = 2\nresidue_char = 3\nram_index = 2\ncyclotomic_order = 2\nleading = 1\nroot pi^(1/2) + * mult 1\n";
        match parse_curve(doc) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (7, 17)),
            other => panic!("{other:?}"),
        }
        let doc = "curve \"x\"\ncolour = red\n";
        assert_eq!(parse_curve(doc), Err(Error::UnknownField("colour".into())));
        let doc = "curve \"x\"\nq = 2\nresidue_char = 3\nram_index = 2\ncyclotomic_order = 2\nleading = 1\nroot pi^(1/4) mult 1\n";
        assert!(matches!(parse_curve(doc), Err(Error::DenominatorTooLarge { .. })));
    }

    #[test]
    fn comments_and_whitespace() {
        let doc = "# header\ncurve \"a#b\"  # trailing\n  q=3\nresidue_char = 7\nram_index = 2\ncyclotomic_order = 2\nleading = 1\nroot pi^(1/2) mult 1 # one\nroot -pi^(1/2) mult 1\n";
        let c = parse_curve(doc).unwrap();
        assert_eq!(c.name(), "a#b");
        assert_eq!(c.degree(), 2);
        assert!(validate_curve(&c).passed());
    }

    #[test]
    fn missing_conjugate_fails_closure() {
        let doc = "curve \"x\"\nq = 3\nresidue_char = 7\nram_index = 2\ncyclotomic_order = 2\nleading = 1\nroot pi^(1/2) mult 1\n";
        let rep = validate_curve(&parse_curve(doc).unwrap());
        assert!(!rep.check("Galois closure").unwrap().passed);
    }

    #[test]
    fn wild_root_fails_tameness() {
        let doc = "curve \"x\"\nq = 2\nresidue_char = 3\nram_index = 3\ncyclotomic_order = 3\nleading = 1\nroot pi^(1/3) mult 1\n";
        let rep = validate_curve(&parse_curve(doc).unwrap());
        assert!(!rep.check("tameness").unwrap().passed);
        assert!(rep.wild);
    }

    #[test]
    fn evaluation_vanishes_at_roots() {
        let doc = "curve \"x\"\nq = 3\nresidue_char = 7\nram_index = 2\ncyclotomic_order = 2\nleading = 2\nroot pi^(1/2) mult 2\nroot -pi^(1/2) mult 2\n";
        let c = parse_curve(doc).unwrap();
        let r = c.roots()[0].0.clone();
        assert!(c.evaluate_f(&r).unwrap().is_zero());
        assert_eq!(c.valuation_of_f(&r).unwrap(), Val::Infinity);
        let x0 = PuiseuxElement::pi_power(c.ctx(), Rational64::from_integer(2)).unwrap();
        assert_eq!(
            c.evaluate_f(&x0).unwrap().valuation(),
            Val::Finite(Rational64::from_integer(2))
        );
    }
}
