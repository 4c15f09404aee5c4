//! Explicit points of prescribed degree, checked by evaluation.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use super::region::{RegionAnalysis, SubRegion};
use crate::cluster_tree::ClusterTree;
use crate::curve_model::CurveSpec;
use crate::error::{Error, Result};
use crate::exact_arith::{PuiseuxElement, Val};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    /// A K-rational non-root x0.
    Baseline,
    /// A root of F, y = 0.
    Root { index: usize },
    Region { cluster: usize, sub: SubRegion, relative: u64 },
    /// Found by a grid search.
    Search,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessPoint {
    #[serde(serialize_with = "ser_element")]
    pub x0: PuiseuxElement,
    pub claimed_degree: u64,
    /// [K(x0) : K].
    pub x_degree: u64,
    pub vf: Val,
    /// Degree of the point computed from x_degree and vf.
    pub point_degree: u64,
    pub verified: bool,
    pub source: WitnessSource,
}

fn ser_element<S: serde::Serializer>(v: &PuiseuxElement, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.render())
}

/// Degree of the closed point above x = x0: [K(x0):K], times q unless
/// F(x0) is a q-th power in K(x0), which over an algebraically closed residue
/// field happens exactly when its normalized valuation lies in qℤ.
pub fn point_degree(q: u64, x_degree: u64, vf: Val) -> u64 {
    match vf {
        Val::Infinity => x_degree,
        Val::Finite(v) => {
            let w = v * Rational64::from_integer(x_degree as i64);
            if w.is_integer() && w.to_integer().rem_euclid(q as i64) == 0 {
                x_degree
            } else {
                q * x_degree
            }
        }
    }
}

/// Evaluates the curve at x0 and compares the resulting point degree with
/// `claimed`. The curve is lifted to the context of x0 when needed.
pub fn verify_point(
    curve: &CurveSpec,
    x0: PuiseuxElement,
    claimed: u64,
    source: WitnessSource,
) -> Result<WitnessPoint> {
    let lifted;
    let c = if **curve.ctx() == **x0.ctx() {
        curve
    } else {
        lifted = curve.lift(x0.ctx())?;
        &lifted
    };
    let vf = c.valuation_of_f(&x0)?;
    let x_degree = x0.degree_over_base();
    let point_degree = point_degree(c.q(), x_degree, vf);
    Ok(WitnessPoint {
        x0,
        claimed_degree: claimed,
        x_degree,
        vf,
        point_degree,
        verified: point_degree == claimed,
        source,
    })
}

fn require(w: WitnessPoint) -> Result<WitnessPoint> {
    if w.verified {
        Ok(w)
    } else {
        Err(Error::Soundness(format!(
            "witness {} for degree {} has x-degree {}, v(F) = {}, point degree {}",
            w.x0.render(),
            w.claimed_degree,
            w.x_degree,
            w.vf,
            w.point_degree
        )))
    }
}

/// The first K-rational non-root among 0, 1, 2, ..., π, π², ...; its point
/// has degree 1 or q.
pub fn baseline_witness(curve: &CurveSpec) -> Result<WitnessPoint> {
    let ctx = curve.ctx();
    let candidates = (0..=curve.roots().len() as i64 + 1)
        .map(|n| PuiseuxElement::integer(ctx, n))
        .chain((1..=curve.roots().len() as i64 + 1).map(|k| {
            PuiseuxElement::pi_power(ctx, Rational64::from_integer(k)).expect("integral exponent")
        }));
    for x0 in candidates {
        if curve.is_root(&x0) {
            continue;
        }
        let vf = curve.valuation_of_f(&x0)?;
        let claimed = point_degree(curve.q(), 1, vf);
        return require(verify_point(curve, x0, claimed, WitnessSource::Baseline)?);
    }
    Err(Error::Soundness("every baseline candidate is a root".into()))
}

/// (α, 0) for the root with index `index`.
pub fn root_witness(curve: &CurveSpec, index: usize) -> Result<WitnessPoint> {
    let x0 = curve.roots()[index].0.clone();
    let claimed = x0.degree_over_base();
    require(verify_point(curve, x0, claimed, WitnessSource::Root { index })?)
}

/// Smallest R > floor with gcd(R, modulus) = 1.
fn coprime_above(floor: Rational64, modulus: u64) -> i64 {
    let mut r = floor.floor().to_integer() + 1;
    while (r.unsigned_abs()).gcd(&modulus) != 1 {
        r += 1;
    }
    r
}

/// A point of absolute degree e·r with x0 in X_s, built in the sub-region
/// `sub` of `region`, and checked by evaluation.
///
/// With w the target value of v(x0 − γ) over K_e, x0 is γ + u·π_e^w, plus
/// π_e^{R/r} with gcd(R, e·r) = 1 and R/r beyond w whenever r > 1, which
/// forces [K(x0):K] = e·r. In the sphere u avoids the leading coefficients
/// of the members at depth d_s, so x0 sits at distance exactly d_s from each.
pub fn construct_witness(
    tree: &ClusterTree,
    region: &RegionAnalysis,
    r: u64,
    sub: SubRegion,
) -> Result<WitnessPoint> {
    let curve = tree.curve();
    let e = region.base_degree;
    let d = e * r;
    let target = curve.ctx().extend_to(d)?;
    let lifted = curve.lift(&target)?;
    let field = target.field();
    let gamma = region.gamma.lift(&target)?;
    let to_base = |w: Rational64| w / Rational64::from_integer(e as i64);

    let (lead, floor) = match sub {
        SubRegion::Annulus => {
            let a = region.annulus_solution(r).ok_or_else(|| {
                Error::Soundness(format!("no annulus solution for r = {r} in cluster {}", region.cluster))
            })?;
            let w = Rational64::new(a, r as i64);
            (Some((field.one(), w)), w)
        }
        SubRegion::Sphere => {
            let n = region.upper_end.ok_or_else(|| Error::Soundness("sphere without depth".into()))?;
            let depth = to_base(n);
            let residues: Vec<_> = tree
                .cluster(region.cluster)
                .members
                .iter()
                .map(|&i| {
                    let diff = lifted.roots()[i].0.sub(&gamma)?;
                    let c = diff
                        .terms()
                        .find(|(x, _)| **x == depth)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(|| field.zero());
                    Ok(c)
                })
                .collect::<Result<_>>()?;
            let u = (1..)
                .map(|k| field.from_integer(k))
                .find(|u| residues.iter().all(|c| c != u))
                .expect("finitely many residues to avoid");
            (Some((u, n)), n)
        }
        SubRegion::Disk => {
            let n = region.upper_end.ok_or_else(|| Error::Soundness("disk without depth".into()))?;
            (None, n)
        }
    };

    let mut x0 = gamma;
    if let Some((u, w)) = lead {
        x0 = x0.add(&PuiseuxElement::monomial(&target, u, to_base(w))?)?;
    }
    if r > 1 {
        let big_r = coprime_above(floor * Rational64::from_integer(r as i64), d);
        let exponent = Rational64::new(big_r, d as i64);
        x0 = x0.add(&PuiseuxElement::pi_power(&target, exponent)?)?;
    }
    let source = WitnessSource::Region {
        cluster: region.cluster,
        sub,
        relative: r,
    };
    require(verify_point(&lifted, x0, d, source)?)
}
