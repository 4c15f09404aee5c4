//! Cofiniteness verdicts and certified degree sets.

mod region;
mod witness;

pub use region::{RegionAnalysis, SubObstruction, SubRegion};
pub use witness::{
    baseline_witness, construct_witness, point_degree, root_witness, verify_point, WitnessPoint,
    WitnessSource,
};

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::cluster_tree::ClusterTree;
use crate::curve_model::{validate_curve, CurveSpec};
use crate::error::{Error, Result};
use crate::exact_arith::{render_q, PuiseuxElement, Val};
use crate::natset::NaturalSet;

fn divisible(x: Rational64, q: u64) -> bool {
    x.is_integer() && x.to_integer().rem_euclid(q as i64) == 0
}

/// x mod q for integral x, otherwise x itself.
fn residue(x: Rational64, q: u64) -> String {
    if x.is_integer() {
        x.to_integer().rem_euclid(q as i64).to_string()
    } else {
        render_q(x)
    }
}

fn val_residue(v: Val, q: u64) -> String {
    match v {
        Val::Finite(x) => residue(x, q),
        Val::Infinity => "inf".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantClusterCheck {
    pub cluster: usize,
    pub size_mod_q: u64,
    pub c_mod_q: String,
    pub gamma_in_region: bool,
    /// v(F(γ)) mod q, when γ ∈ X_s.
    pub vf_gamma_mod_q: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictCertificate {
    /// A root of degree 1 gives a rational point, so every degree occurs.
    RationalRoot { root: String },
    /// The first condition that fails; `cluster` is None for the condition on v(F(0)).
    Fails {
        cluster: Option<usize>,
        condition: String,
        value: String,
    },
    /// Every condition holds.
    Holds {
        vf0_mod_q: String,
        clusters: Vec<InvariantClusterCheck>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub cofinite: bool,
    pub certificate: VerdictCertificate,
}

/// Decides whether the degree set is cofinite in ℕ.
pub fn decide_cofinite(curve: &CurveSpec) -> Result<Verdict> {
    reject_invalid(curve)?;
    verdict_from_tree(&ClusterTree::build(curve)?)
}

fn reject_invalid(curve: &CurveSpec) -> Result<()> {
    let report = validate_curve(curve);
    if report.wild {
        return Err(Error::Wild(format!(
            "a root exponent has denominator divisible by p = {}",
            curve.ctx().residue_char()
        )));
    }
    if !report.passed() {
        let failed: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        return Err(Error::Rejected(failed.join("; ")));
    }
    Ok(())
}

fn rational_root(curve: &CurveSpec) -> Option<usize> {
    curve
        .roots()
        .iter()
        .position(|(r, _)| r.degree_over_base() == 1)
}

pub fn verdict_from_tree(tree: &ClusterTree) -> Result<Verdict> {
    let curve = tree.curve();
    let q = curve.q();
    if let Some(i) = rational_root(curve) {
        return Ok(Verdict {
            cofinite: true,
            certificate: VerdictCertificate::RationalRoot {
                root: curve.roots()[i].0.render(),
            },
        });
    }
    let fails = |cluster, condition: &str, value: String| Verdict {
        cofinite: true,
        certificate: VerdictCertificate::Fails {
            cluster,
            condition: condition.to_string(),
            value,
        },
    };
    let vf0 = curve.valuation_of_f(&PuiseuxElement::zero(curve.ctx()))?;
    let vf0 = vf0.finite().expect("0 is not a root");
    if divisible(vf0, q) {
        return Ok(fails(None, "v(F(0)) = 0 mod q", render_q(vf0)));
    }
    let mut checks = Vec::new();
    for (id, cl) in tree.clusters().iter().enumerate() {
        if !cl.data.invariant {
            continue;
        }
        if cl.size % q != 0 {
            return Ok(fails(Some(id), "|s| != 0 mod q", cl.size.to_string()));
        }
        if divisible(cl.data.c, q) {
            return Ok(fails(Some(id), "c_s = 0 mod q", render_q(cl.data.c)));
        }
        let mut vf_gamma_mod_q = None;
        if cl.data.gamma_in_region {
            let gamma = tree.shift_center(id)?;
            let v = curve.valuation_of_f(&gamma)?;
            if let Val::Finite(x) = v {
                if divisible(x, q) {
                    return Ok(fails(Some(id), "gamma in X_s and v(F(gamma)) = 0 mod q", render_q(x)));
                }
            }
            vf_gamma_mod_q = Some(val_residue(v, q));
        }
        checks.push(InvariantClusterCheck {
            cluster: id,
            size_mod_q: cl.size % q,
            c_mod_q: residue(cl.data.c, q),
            gamma_in_region: cl.data.gamma_in_region,
            vf_gamma_mod_q,
        });
    }
    Ok(Verdict {
        cofinite: false,
        certificate: VerdictCertificate::Holds {
            vf0_mod_q: residue(vf0, q),
            clusters: checks,
        },
    })
}

/// Degrees of the root orbits, in cluster order.
fn root_orbit_degrees(tree: &ClusterTree) -> Vec<(usize, u64)> {
    let reps = tree.orbit_representatives().unwrap_or_default();
    reps.into_iter()
        .filter(|&id| tree.cluster(id).members.len() == 1)
        .map(|id| {
            let i = tree.cluster(id).members[0];
            (i, tree.curve().roots()[i].0.degree_over_base())
        })
        .collect()
}

/// qℕ together with dℕ for the degree d of every root orbit.
pub fn baseline_lower(curve: &CurveSpec) -> Result<NaturalSet> {
    let tree = ClusterTree::build(curve)?;
    Ok(root_orbit_degrees(&tree)
        .into_iter()
        .fold(NaturalSet::progression(curve.q()), |acc, (_, d)| {
            acc.union(&NaturalSet::progression(d))
        }))
}

/// Region analysis for the orbit of cluster `rep`.
pub fn region_degrees(curve: &CurveSpec, rep: usize) -> Result<RegionAnalysis> {
    reject_invalid(curve)?;
    RegionAnalysis::analyze(&ClusterTree::build(curve)?, rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Inexact,
    /// The bound does not reach every region threshold.
    Unknown,
}

impl Serialize for Exactness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exactness::Exact => s.serialize_bool(true),
            Exactness::Inexact => s.serialize_bool(false),
            Exactness::Unknown => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MemberCertificate {
    Witness { witness: usize },
    /// A multiple of a smaller witnessed degree.
    MultipleOf { divisor: u64, witness: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Member {
    pub degree: u64,
    pub certificate: MemberCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionObstruction {
    pub cluster: usize,
    pub base_degree: u64,
    /// None when the base degree does not divide the degree.
    pub relative: Option<u64>,
    pub reasons: Vec<SubObstruction>,
    pub rechecked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub degree: u64,
    pub regions: Vec<RegionObstruction>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSetResult {
    pub lower: NaturalSet,
    pub upper: NaturalSet,
    pub exact: Exactness,
    pub bound: u64,
    /// Parts whose union is `upper`: baseline, regions, roots.
    #[serde(skip)]
    pub components: Vec<NaturalSet>,
    pub regions: Vec<RegionAnalysis>,
    pub witnesses: Vec<WitnessPoint>,
    pub members: Vec<Member>,
    pub obstructions: Vec<Obstruction>,
    pub verdict: Verdict,
}

impl DegreeSetResult {
    /// Union form of the degree set, e.g. `3N ∪ 10N`.
    pub fn render(&self) -> String {
        NaturalSet::render_union(&self.components)
    }
}

/// Default enumeration bound: max(200, 2·max e·r_0).
pub fn default_bound(regions: &[RegionAnalysis]) -> u64 {
    let t = regions
        .iter()
        .map(RegionAnalysis::largest_absolute_threshold)
        .max()
        .unwrap_or(1);
    200.max(2 * t)
}

pub fn compute_degree_set(curve: &CurveSpec, bound: Option<u64>) -> Result<DegreeSetResult> {
    reject_invalid(curve)?;
    let tree = ClusterTree::build(curve)?;
    compute_from_tree(&tree, bound)
}

pub fn compute_from_tree(tree: &ClusterTree, bound: Option<u64>) -> Result<DegreeSetResult> {
    let curve = tree.curve();
    let q = curve.q();
    let verdict = verdict_from_tree(tree)?;

    if let Some(i) = rational_root(curve) {
        let w = root_witness(curve, i)?;
        let bound = bound.unwrap_or_else(|| default_bound(&[]));
        let members = (1..=bound)
            .map(|n| Member {
                degree: n,
                certificate: if n == 1 {
                    MemberCertificate::Witness { witness: 0 }
                } else {
                    MemberCertificate::MultipleOf { divisor: 1, witness: 0 }
                },
            })
            .collect();
        return Ok(DegreeSetResult {
            lower: NaturalSet::all(),
            upper: NaturalSet::all(),
            exact: Exactness::Exact,
            bound,
            components: vec![NaturalSet::all()],
            regions: Vec::new(),
            witnesses: vec![w],
            members,
            obstructions: Vec::new(),
            verdict,
        });
    }

    let reps = tree
        .orbit_representatives()
        .ok_or_else(|| Error::InvalidCurve("roots are not Galois-closed".into()))?;
    let regions = reps
        .iter()
        .map(|&id| RegionAnalysis::analyze(tree, id))
        .collect::<Result<Vec<_>>>()?;
    let max_threshold = regions
        .iter()
        .map(RegionAnalysis::largest_absolute_threshold)
        .max()
        .unwrap_or(1);
    let bound = bound.unwrap_or_else(|| default_bound(&regions));

    let baseline = baseline_witness(curve)?;
    let baseline_degree = baseline.point_degree;
    let roots = root_orbit_degrees(tree);
    let mut components = vec![NaturalSet::progression(baseline_degree).union(&NaturalSet::progression(q))];
    let mut by_degree: Vec<&RegionAnalysis> = regions.iter().collect();
    by_degree.sort_by_key(|r| (r.base_degree, r.cluster));
    components.extend(by_degree.iter().map(|r| r.degrees.clone()));
    components.extend(roots.iter().map(|&(_, d)| NaturalSet::progression(d)));
    let upper = components
        .iter()
        .fold(NaturalSet::empty(), |acc, s| acc.union(s));

    let mut witnesses: Vec<WitnessPoint> = Vec::new();
    let mut members = Vec::new();
    let mut seeds: Vec<(u64, usize)> = Vec::new();
    let mut baseline = Some(baseline);
    for n in 1..=bound {
        if !upper.member(n) {
            continue;
        }
        if let Some(&(d, w)) = seeds.iter().find(|(d, _)| n % d == 0) {
            members.push(Member {
                degree: n,
                certificate: MemberCertificate::MultipleOf { divisor: d, witness: w },
            });
            continue;
        }
        let w = if baseline.as_ref().is_some_and(|b| b.point_degree == n) {
            baseline.take()
        } else if let Some(&(i, _)) = roots.iter().find(|&&(_, d)| d == n) {
            Some(root_witness(curve, i)?)
        } else {
            None
        };
        let w = match w {
            Some(w) => Some(w),
            None => regions
                .iter()
                .filter(|r| n % r.base_degree == 0)
                .find_map(|r| {
                    let rel = n / r.base_degree;
                    r.realizing(rel).map(|sub| construct_witness(tree, r, rel, sub))
                })
                .transpose()?,
        };
        let Some(w) = w else {
            continue;
        };
        let idx = witnesses.len();
        witnesses.push(w);
        seeds.push((n, idx));
        members.push(Member {
            degree: n,
            certificate: MemberCertificate::Witness { witness: idx },
        });
    }

    // Members below the bound, plus whole progressions dℕ whose generator d
    // is certified, plus the pigeonhole tails.
    let certified: Vec<u64> = members.iter().map(|m| m.degree).collect();
    let mut generators: Vec<u64> = vec![q, baseline_degree];
    generators.extend(roots.iter().map(|&(_, d)| d));
    for r in &regions {
        for s in [&r.sphere, &r.disk] {
            if let Some(g) = s.members_below(s.threshold() + s.period()).next() {
                generators.push(r.base_degree * g);
            }
        }
    }
    let lower = generators
        .into_iter()
        .filter(|g| certified.contains(g))
        .fold(NaturalSet::finite(certified.iter().copied()), |acc, g| {
            acc.union(&NaturalSet::progression(g))
        });
    let lower = regions
        .iter()
        .fold(lower, |acc, r| acc.union(&r.certified_tail));
    if !lower.is_subset(&upper) {
        return Err(Error::Soundness(format!(
            "witnessed degrees {} escape the region bound {}",
            lower.render_compact(),
            upper.render_compact()
        )));
    }

    let mut obstructions = Vec::new();
    for n in 1..=bound {
        if upper.member(n) {
            continue;
        }
        let mut per_region = Vec::new();
        for r in &regions {
            let e = r.base_degree;
            if n % e != 0 {
                per_region.push(RegionObstruction {
                    cluster: r.cluster,
                    base_degree: e,
                    relative: None,
                    reasons: Vec::new(),
                    rechecked: true,
                });
                continue;
            }
            let rel = n / e;
            let reasons = r.obstruction(rel).ok_or_else(|| {
                Error::Soundness(format!("degree {n} is realized by cluster {} but not in the upper set", r.cluster))
            })?;
            let rechecked = r.recheck_obstruction(rel);
            if !rechecked {
                return Err(Error::Soundness(format!(
                    "obstruction for degree {n} in cluster {} fails the brute-force recheck",
                    r.cluster
                )));
            }
            per_region.push(RegionObstruction {
                cluster: r.cluster,
                base_degree: e,
                relative: Some(rel),
                reasons,
                rechecked,
            });
        }
        obstructions.push(Obstruction {
            degree: n,
            regions: per_region,
        });
    }

    let exact = if bound < max_threshold {
        Exactness::Unknown
    } else if lower == upper {
        Exactness::Exact
    } else {
        Exactness::Inexact
    };
    Ok(DegreeSetResult {
        lower,
        upper,
        exact,
        bound,
        components,
        regions,
        witnesses,
        members,
        obstructions,
        verdict,
    })
}
