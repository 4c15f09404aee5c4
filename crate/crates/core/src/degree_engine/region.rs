//! Degrees of points whose x-coordinate lies in the region X_s of one cluster.
//!
//! All quantities are measured over K_e, the field of degree e = |O(s)|
//! contained in K(x0) for every x0 ∈ X_s, in its own normalization
//! (valuations of K scaled by e). Writing w = v(x0 − γ):
//!
//! * annulus `M < w < N`: v(F(x0)) = |s|·w + c;
//! * sphere `w = N`: v(F(x0)) = V = |s|·N + c, x0 avoiding the children;
//! * disk `w > N`: also V, present only when γ ∈ X_s.
//!
//! A relative degree r' is realized when some x0 of degree r' over K_e has
//! r'·v(F(x0)) ∈ qℤ; the point then has degree e·r' over K.

use num_rational::Rational64;
use serde::Serialize;

use crate::cluster_tree::ClusterTree;
use crate::congruence::{stability_threshold, AffineLatticeProblem};
use crate::error::{Error, Result};
use crate::exact_arith::{render_q, Ctx, PuiseuxElement, Val};
use crate::natset::NaturalSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubRegion {
    Annulus,
    Sphere,
    Disk,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionAnalysis {
    pub cluster: usize,
    pub orbit: Vec<usize>,
    /// e: degree of K_e over K.
    pub base_degree: u64,
    #[serde(skip)]
    pub rebased: Ctx,
    /// γ read over K (exponents in (1/e)ℤ).
    #[serde(serialize_with = "ser_element")]
    pub gamma: PuiseuxElement,
    /// M; None for the top cluster.
    #[serde(serialize_with = "ser_opt_q")]
    pub lower_end: Option<Rational64>,
    /// N; None for singletons.
    #[serde(serialize_with = "ser_opt_q")]
    pub upper_end: Option<Rational64>,
    pub slope: u64,
    #[serde(serialize_with = "ser_q")]
    pub intercept: Rational64,
    pub gamma_in_region: bool,
    /// V = |s|·N + c when N is finite.
    #[serde(serialize_with = "ser_opt_q")]
    pub vertex_value: Option<Rational64>,
    /// r_0: beyond it the annulus is decided by the gcd criterion alone.
    pub threshold: u64,
    pub q: u64,
    pub annulus: NaturalSet,
    pub sphere: NaturalSet,
    pub disk: NaturalSet,
    /// Relative degrees over K_e.
    pub relative: NaturalSet,
    /// e · relative.
    pub degrees: NaturalSet,
    /// Tail of the annulus certified by the pigeonhole bound, as absolute degrees.
    pub certified_tail: NaturalSet,
}

fn ser_q<S: serde::Serializer>(v: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render_q(*v))
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&render_q(*v)),
        None => s.serialize_none(),
    }
}

fn ser_element<S: serde::Serializer>(v: &PuiseuxElement, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.render())
}

/// Why a relative degree is not realized in one sub-region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubObstruction {
    /// No numerator a with a/r' ∈ (M, N) satisfies q | |s|·a + r'·c.
    Annulus { candidates_scanned: u64 },
    /// N ∉ (1/r')ℤ, or r'·V ∉ qℤ.
    Sphere { reason: String },
    /// γ ∉ X_s, or r'·V ∉ qℤ.
    Disk { reason: String },
}

fn is_multiple(x: Rational64, q: u64) -> bool {
    x.is_integer() && x.to_integer().rem_euclid(q as i64) == 0
}

impl RegionAnalysis {
    /// Region data for cluster `id`, with K_e determined by its orbit.
    pub fn analyze(tree: &ClusterTree, id: usize) -> Result<Self> {
        let curve = tree.curve();
        let ctx = curve.ctx();
        if !ctx.is_tame() {
            return Err(Error::Wild(format!(
                "ram_index {} shares a factor with p = {}",
                ctx.ram_index(),
                ctx.residue_char()
            )));
        }
        let q = curve.q();
        let orbit = tree
            .orbit(id)
            .ok_or_else(|| Error::InvalidCurve("roots are not Galois-closed".into()))?;
        let e = orbit.len() as u64;
        let rebased = ctx.rebase(e)?;
        let cl = tree.cluster(id);
        let gamma = cl.data.center.clone();
        if !gamma.is_fixed_by(e as i64) || gamma.rebase(&rebased, e)?.degree_over_base() != 1 {
            return Err(Error::Soundness(format!(
                "center of cluster {id} is not defined over the degree-{e} subfield"
            )));
        }
        let scale = Rational64::from_integer(e as i64);
        let lower_end = cl.data.delta.map(|d| d * scale);
        let upper_end = cl.data.depth.finite().map(|d| d * scale);
        let intercept = cl.data.c * scale;
        if !intercept.is_integer() {
            return Err(Error::Soundness(format!(
                "c_s = {} of cluster {id} is not integral over the degree-{e} subfield",
                render_q(cl.data.c)
            )));
        }
        let slope = cl.size;
        let vertex_value = upper_end.map(|n| Rational64::from_integer(slope as i64) * n + intercept);
        let gamma_in_region = upper_end.is_some()
            && matches!(
                tree.region_membership(&gamma)?,
                crate::cluster_tree::Membership::Region { cluster, .. } if cluster == id
            );
        let threshold = match (lower_end, upper_end) {
            (Some(m), Some(n)) => stability_threshold(q, m, n)?,
            _ => 1,
        };

        let mut region = RegionAnalysis {
            cluster: id,
            orbit,
            base_degree: e,
            rebased,
            gamma,
            lower_end,
            upper_end,
            slope,
            intercept,
            gamma_in_region,
            vertex_value,
            threshold,
            q,
            annulus: NaturalSet::empty(),
            sphere: NaturalSet::empty(),
            disk: NaturalSet::empty(),
            relative: NaturalSet::empty(),
            degrees: NaturalSet::empty(),
            certified_tail: NaturalSet::empty(),
        };
        region.annulus = NaturalSet::from_fn(threshold, q, |r| region.annulus_solution(r).is_some());
        let tail_ok = |r: u64| region.problem(r).gcd_criterion();
        let tail = NaturalSet::from_fn(threshold, q, |r| r >= threshold && tail_ok(r));
        region.certified_tail = tail.scale(e);
        region.sphere = match (upper_end, vertex_value) {
            (Some(n), Some(v)) => {
                let d = *n.denom() as u64;
                let dv = v * Rational64::from_integer(d as i64);
                if is_multiple(dv, q) {
                    NaturalSet::progression(d)
                } else {
                    NaturalSet::progression(d * q)
                }
            }
            _ => NaturalSet::empty(),
        };
        region.disk = match vertex_value {
            Some(v) if gamma_in_region => {
                if is_multiple(v, q) {
                    NaturalSet::all()
                } else {
                    NaturalSet::progression(q)
                }
            }
            _ => NaturalSet::empty(),
        };
        region.relative = region.annulus.union(&region.sphere).union(&region.disk);
        region.degrees = region.relative.scale(e);
        Ok(region)
    }

    /// The lattice problem for relative degree r.
    pub fn problem(&self, r: u64) -> AffineLatticeProblem {
        AffineLatticeProblem {
            a: self.slope as i64,
            b: self.q as i64,
            c: self.intercept,
            r,
            lo: self.lower_end,
            hi: self.upper_end,
        }
    }

    /// Numerators a ∈ (r·M, r·N) to scan: all of them for a bounded
    /// interval, otherwise q consecutive ones next to the finite end.
    pub fn candidate_numerators(&self, r: u64) -> std::ops::RangeInclusive<i64> {
        let rr = Rational64::from_integer(r as i64);
        let q = self.q as i64;
        let first = self.lower_end.map(|m| (m * rr).floor().to_integer() + 1);
        let last = self.upper_end.map(|n| (n * rr).ceil().to_integer() - 1);
        match (first, last) {
            (Some(f), Some(l)) => f..=l,
            (Some(f), None) => f..=f + q - 1,
            (None, Some(l)) => l - q + 1..=l,
            (None, None) => 0..=q - 1,
        }
    }

    /// Smallest numerator a with a/r in the annulus and q | |s|·a + r·c.
    pub fn annulus_solution(&self, r: u64) -> Option<i64> {
        let p = self.problem(r);
        if !p.gcd_criterion() {
            return None;
        }
        self.candidate_numerators(r).find(|&a| p.hits(a))
    }

    /// Sub-region used to realize relative degree r, preferring the simplest
    /// witness.
    pub fn realizing(&self, r: u64) -> Option<SubRegion> {
        if self.disk.member(r) {
            Some(SubRegion::Disk)
        } else if self.sphere.member(r) {
            Some(SubRegion::Sphere)
        } else if self.annulus.member(r) {
            Some(SubRegion::Annulus)
        } else {
            None
        }
    }

    /// Per sub-region reasons why relative degree r is not realized.
    pub fn obstruction(&self, r: u64) -> Option<Vec<SubObstruction>> {
        if self.relative.member(r) {
            return None;
        }
        let mut out = vec![SubObstruction::Annulus {
            candidates_scanned: self.candidate_numerators(r).count() as u64,
        }];
        if let (Some(n), Some(v)) = (self.upper_end, self.vertex_value) {
            let d = *n.denom() as u64;
            let reason = if !r.is_multiple_of(d) {
                format!("N = {} is not in (1/{r})Z", render_q(n))
            } else {
                format!("{r}*V = {} is not divisible by {}", render_q(v * Rational64::from_integer(r as i64)), self.q)
            };
            out.push(SubObstruction::Sphere { reason });
            let reason = if !self.gamma_in_region {
                "gamma is not in X_s".to_string()
            } else {
                format!("{r}*V = {} is not divisible by {}", render_q(v * Rational64::from_integer(r as i64)), self.q)
            };
            out.push(SubObstruction::Disk { reason });
        }
        Some(out)
    }

    /// Independent re-check of an obstruction by scanning every candidate
    /// numerator and re-deriving the vertex conditions from scratch.
    pub fn recheck_obstruction(&self, r: u64) -> bool {
        let rc = self.intercept * Rational64::from_integer(r as i64);
        let q = self.q as i64;
        let s = self.slope as i64;
        let annulus_empty = self
            .candidate_numerators(r)
            .all(|a| (s * a + rc.to_integer()).rem_euclid(q) != 0);
        let vertex_blocked = match (self.upper_end, self.vertex_value) {
            (Some(n), Some(v)) => {
                let rv = v * Rational64::from_integer(r as i64);
                let in_lattice = (n * Rational64::from_integer(r as i64)).is_integer();
                let sphere_blocked = !in_lattice || !is_multiple(rv, self.q);
                let disk_blocked = !self.gamma_in_region || !is_multiple(rv, self.q);
                sphere_blocked && disk_blocked
            }
            _ => true,
        };
        annulus_empty && vertex_blocked
    }

    /// Valuation of x0 − γ in K_e-normalization for the sub-region witness.
    pub fn witness_distance(&self, r: u64, sub: SubRegion) -> Option<Val> {
        match sub {
            SubRegion::Annulus => self
                .annulus_solution(r)
                .map(|a| Val::Finite(Rational64::new(a, r as i64))),
            SubRegion::Sphere => self.upper_end.map(Val::Finite),
            SubRegion::Disk => Some(Val::Infinity),
        }
    }

    pub fn largest_absolute_threshold(&self) -> u64 {
        self.base_degree * self.threshold
    }
}
