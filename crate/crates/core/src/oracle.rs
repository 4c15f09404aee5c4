//! Brute-force cross-checks, independent of the tree construction and of the
//! region analysis.

use std::collections::BTreeSet;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster_tree::ClusterTree;
use crate::curve_model::CurveSpec;
use crate::degree_engine::{point_degree, verify_point, WitnessPoint, WitnessSource};
use crate::error::{Error, Result};
use crate::exact_arith::{PuiseuxElement, Val};

pub const MAX_BRUTEFORCE_ROOTS: usize = 12;

/// Every subset cut out by a closed disk centred at a root with radius one
/// of the pairwise difference valuations (or infinite).
pub fn clusters_bruteforce(roots: &[PuiseuxElement]) -> Result<BTreeSet<Vec<usize>>> {
    if roots.len() > MAX_BRUTEFORCE_ROOTS {
        return Err(Error::TooLarge(format!(
            "{} roots, at most {MAX_BRUTEFORCE_ROOTS}",
            roots.len()
        )));
    }
    let n = roots.len();
    let mut v = vec![vec![Val::Infinity; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v[i][j] = roots[i].sub(&roots[j])?.valuation();
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for radius in v[i].iter().copied() {
            let s: Vec<usize> = (0..n).filter(|&j| v[i][j] >= radius).collect();
            out.insert(s);
        }
    }
    Ok(out)
}

/// Σ_{β ∉ s} m_β·v(γ − β), summed per Galois orbit of the complement as
/// m·|O|·v(γ − η) for a representative η. Requires s invariant.
pub fn c_via_min_poly_orbits(tree: &ClusterTree, id: usize) -> Result<Rational64> {
    let gamma = tree.shift_center(id)?;
    let curve = tree.curve();
    let members = &tree.cluster(id).members;
    let outside: Vec<usize> = (0..curve.roots().len())
        .filter(|i| !members.contains(i))
        .collect();
    let mut done = vec![false; curve.roots().len()];
    let mut total = Rational64::from_integer(0);
    for &i in &outside {
        if done[i] {
            continue;
        }
        let (eta, m) = &curve.roots()[i];
        let mut size = 0i64;
        let mut cur = eta.clone();
        loop {
            let j = curve
                .roots()
                .iter()
                .position(|(r, _)| *r == cur)
                .ok_or_else(|| Error::InvalidCurve("roots are not Galois-closed".into()))?;
            if members.contains(&j) {
                return Err(Error::NotInvariant);
            }
            done[j] = true;
            size += 1;
            cur = cur.galois_apply(1);
            if cur == *eta {
                break;
            }
        }
        let v = gamma.sub(eta)?.valuation().finite().ok_or_else(|| {
            Error::Soundness("center coincides with a root outside the cluster".into())
        })?;
        total += Rational64::from_integer(size * i64::from(*m)) * v;
    }
    Ok(total)
}

/// Search space for [`small_degree_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchGrid {
    /// Extra monomials added to a base point in the exhaustive phase (0 to 2).
    pub max_terms: usize,
    pub coeff_max: i64,
    /// Exponents range over [lowest root valuation − slack, deepest depth + slack].
    pub slack: i64,
    pub random_samples: usize,
    pub seed: u64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            max_terms: 1,
            coeff_max: 2,
            slack: 1,
            random_samples: 500,
            seed: 0x5eed,
        }
    }
}

/// Looks for a point of degree exactly m among short Puiseux sums with
/// exponent denominators dividing m, built on 0 and on truncations of the
/// roots. Finding nothing proves nothing.
pub fn small_degree_search(curve: &CurveSpec, m: u64, grid: &SearchGrid) -> Result<Option<WitnessPoint>> {
    let ctx = curve.ctx().extend_to(m)?;
    let lifted = curve.lift(&ctx)?;
    let field = ctx.field();
    let q = curve.q();

    let mut bases: Vec<PuiseuxElement> = vec![PuiseuxElement::zero(&ctx)];
    for (r, _) in lifted.roots() {
        for (e, _) in r.terms() {
            let t = r.truncate_below(*e);
            if !bases.contains(&t) {
                bases.push(t);
            }
        }
    }
    bases.retain(|b| m.is_multiple_of(b.degree_over_base()));

    let vals: Vec<Rational64> = lifted
        .roots()
        .iter()
        .flat_map(|(a, _)| lifted.roots().iter().map(move |(b, _)| (a, b)))
        .filter_map(|(a, b)| a.sub(b).ok()?.valuation().finite())
        .chain(lifted.roots().iter().filter_map(|(r, _)| r.valuation().finite()))
        .collect();
    let lo = vals.iter().min().copied().unwrap_or_default().floor().to_integer() - grid.slack;
    let hi = vals.iter().max().copied().unwrap_or_default().ceil().to_integer() + grid.slack;
    let m_i = m as i64;
    let exponents: Vec<Rational64> = (lo * m_i..=hi * m_i).map(|j| Rational64::new(j, m_i)).collect();
    let coeffs: Vec<i64> = (1..=grid.coeff_max).flat_map(|c| [c, -c]).collect();

    let hit = |x0: &PuiseuxElement| -> Result<bool> {
        if !m.is_multiple_of(x0.degree_over_base()) {
            return Ok(false);
        }
        let vf = lifted.valuation_of_f(x0)?;
        Ok(point_degree(q, x0.degree_over_base(), vf) == m)
    };
    let monomial = |c: i64, e: Rational64| PuiseuxElement::monomial(&ctx, field.from_integer(c), e);
    let finish = |x0: PuiseuxElement| verify_point(&lifted, x0, m, WitnessSource::Search).map(Some);

    for b in &bases {
        if hit(b)? {
            return finish(b.clone());
        }
    }
    if grid.max_terms >= 1 {
        for b in &bases {
            for &e in &exponents {
                for &c in &coeffs {
                    let x0 = b.add(&monomial(c, e)?)?;
                    if hit(&x0)? {
                        return finish(x0);
                    }
                    if grid.max_terms >= 2 {
                        for &e2 in exponents.iter().filter(|&&e2| e2 > e) {
                            let x1 = x0.add(&monomial(1, e2)?)?;
                            if hit(&x1)? {
                                return finish(x1);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed ^ m);
    for _ in 0..grid.random_samples {
        let mut x0 = bases.choose(&mut rng).expect("0 is a base").clone();
        for _ in 0..rng.gen_range(1..=3) {
            let e = *exponents.choose(&mut rng).expect("nonempty window");
            let c = *coeffs.choose(&mut rng).expect("coeff_max >= 1");
            x0 = x0.add(&monomial(c, e)?)?;
        }
        if hit(&x0)? {
            return finish(x0);
        }
    }
    Ok(None)
}
