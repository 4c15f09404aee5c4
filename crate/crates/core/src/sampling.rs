//! Seeded random tame curves and points for property checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cluster_tree::ClusterTree;
use crate::curve_model::CurveSpec;
use crate::degree_engine::RegionAnalysis;
use crate::error::Result;
use crate::exact_arith::{BaseFieldContext, Ctx, CyclotomicNumber, PuiseuxElement};

#[derive(Clone, Debug)]
pub struct CurveShape {
    pub max_roots: usize,
    pub max_ram: u64,
}

impl Default for CurveShape {
    fn default() -> Self {
        CurveShape {
            max_roots: 12,
            max_ram: 30,
        }
    }
}

fn coefficient(rng: &mut impl Rng, ctx: &Ctx) -> CyclotomicNumber {
    let field = ctx.field();
    let k = rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let base = field.from_integer(k);
    if rng.gen_bool(0.25) {
        let t = rng.gen_range(0..ctx.cyclotomic_order() as i64);
        field.mul(&base, &field.zeta_power(t))
    } else {
        base
    }
}

fn random_element(rng: &mut impl Rng, ctx: &Ctx, den: u64, terms: usize, lo: i64, hi: i64) -> Result<PuiseuxElement> {
    let mut x = PuiseuxElement::zero(ctx);
    let d = den as i64;
    for _ in 0..terms {
        let e = Rational64::new(rng.gen_range(lo * d..=hi * d), d);
        x = x.add(&PuiseuxElement::monomial(ctx, coefficient(rng, ctx), e)?)?;
    }
    Ok(x)
}

/// A Galois-closed curve with at most `shape.max_roots` distinct roots,
/// multiplicities below q and ramification index coprime to p.
pub fn random_curve(rng: &mut impl Rng, shape: &CurveShape) -> Result<CurveSpec> {
    let q = *[2u64, 3, 5].choose(rng).expect("nonempty");
    let primes: Vec<u64> = [0u64, 2, 3, 5, 7, 11, 13].into_iter().filter(|&p| p != q).collect();
    let p = *primes.choose(rng).expect("nonempty");
    let rams: Vec<u64> = (1..=shape.max_ram).filter(|n| p == 0 || n % p != 0).collect();
    let n = *rams.choose(rng).expect("1 is always allowed");
    let ctx = BaseFieldContext::new(p, n, n.lcm(&2))?;
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();

    let mut roots: Vec<(PuiseuxElement, u32)> = Vec::new();
    let target = rng.gen_range(1..=shape.max_roots);
    for _ in 0..4 * shape.max_roots {
        if roots.len() >= target {
            break;
        }
        let den = if divisors.len() > 1 && rng.gen_bool(0.8) {
            *divisors[1..].choose(rng).expect("nonempty")
        } else {
            *divisors.choose(rng).expect("nonempty")
        };
        let terms = rng.gen_range(1..=3);
        let seed = random_element(rng, &ctx, den, terms, -1, 2)?;
        let mut orbit = vec![seed.clone()];
        let mut cur = seed.galois_apply(1);
        while cur != seed {
            orbit.push(cur.clone());
            cur = cur.galois_apply(1);
        }
        if roots.len() + orbit.len() > shape.max_roots
            || orbit.iter().any(|x| roots.iter().any(|(r, _)| r == x))
        {
            continue;
        }
        let m = rng.gen_range(1..q as u32);
        roots.extend(orbit.into_iter().map(|x| (x, m)));
    }
    if roots.is_empty() {
        roots.push((PuiseuxElement::pi_power(&ctx, Rational64::from_integer(1))?, 1));
    }
    let lead = BigRational::from_integer(BigInt::from(rng.gen_range(1..=3i64)));
    let leading = PuiseuxElement::monomial(
        &ctx,
        ctx.field().from_rational(lead),
        Rational64::from_integer(rng.gen_range(-1..=2)),
    )?;
    CurveSpec::new("random", q, leading, roots)
}

/// A random non-root over a context of ramification index N·k ≤ max(N, max_ram)
/// with k ≤ 3, so possibly of degree larger than N.
pub fn random_point(rng: &mut impl Rng, curve: &CurveSpec, max_ram: u64) -> Result<PuiseuxElement> {
    let n = curve.ctx().ram_index();
    let k = rng.gen_range(1..=(max_ram / n).clamp(1, 3));
    let ctx = curve.ctx().extend_to(n * k)?;
    loop {
        let (r, _) = curve.roots().choose(rng).expect("curve has roots");
        let r = r.lift(&ctx)?;
        let base = match rng.gen_range(0..3) {
            0 => PuiseuxElement::zero(&ctx),
            1 => r.truncate_below(Rational64::new(rng.gen_range(-2..=6), 2)),
            _ => r,
        };
        let terms = rng.gen_range(1..=2);
        let extra = random_element(rng, &ctx, ctx.ram_index(), terms, -1, 3)?;
        let x0 = base.add(&extra)?;
        if !curve.lift(&ctx)?.is_root(&x0) {
            return Ok(x0);
        }
    }
}

/// A point x0 = γ + u·π_e^w with w drawn strictly inside the region's
/// interval, together with the predicted v(F(x0)) over K.
pub fn random_annulus_point(
    rng: &mut impl Rng,
    tree: &ClusterTree,
    region: &RegionAnalysis,
) -> Result<(PuiseuxElement, Rational64)> {
    let e = region.base_degree as i64;
    let r = rng.gen_range(1..=4i64);
    let (lo, hi) = match (region.lower_end, region.upper_end) {
        (Some(m), Some(n)) => (m, n),
        (Some(m), None) => (m, m + Rational64::from_integer(5)),
        (None, Some(n)) => (n - Rational64::from_integer(5), n),
        (None, None) => (Rational64::from_integer(-5), Rational64::from_integer(5)),
    };
    let scale = Rational64::from_integer(r * 8);
    let first = (lo * scale).floor().to_integer() + 1;
    let last = (hi * scale).ceil().to_integer() - 1;
    let w = Rational64::new(rng.gen_range(first..=last), r * 8);
    let ctx = tree.curve().ctx().extend_to((e * *w.denom()) as u64)?;
    let gamma = region.gamma.lift(&ctx)?;
    let u = coefficient(rng, &ctx);
    let x0 = gamma.add(&PuiseuxElement::monomial(&ctx, u, w / Rational64::from_integer(e))?)?;
    let predicted = (Rational64::from_integer(region.slope as i64) * w + region.intercept) / Rational64::from_integer(e);
    Ok((x0, predicted))
}
