//! Text and JSON reports.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::curve_model::{CurveSpec, ValidationReport};
use crate::degree_engine::{
    DegreeSetResult, Exactness, MemberCertificate, RegionAnalysis, SubRegion, VerdictCertificate, WitnessPoint,
    WitnessSource,
};
use crate::exact_arith::render_q;
use crate::natset::NaturalSet;

pub const SCHEMA: &str = "degset-report/1";

fn opt_q(v: Option<num_rational::Rational64>, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), render_q)
}

pub fn render_header(curve: &CurveSpec) -> String {
    let ctx = curve.ctx();
    format!(
        "curve: {}\nq = {}, p = {}, ram_index = {}, cyclotomic_order = {}, roots = {}, degree = {}\n",
        curve.name(),
        curve.q(),
        ctx.residue_char(),
        ctx.ram_index(),
        ctx.cyclotomic_order(),
        curve.roots().len(),
        curve.degree()
    )
}

pub fn render_validation(report: &ValidationReport) -> String {
    let mut out = String::new();
    if report.passed() {
        out.push_str("validation: passed\n");
    } else {
        out.push_str("validation: FAILED\n");
        for c in report.failures() {
            let _ = writeln!(out, "  {}: {}", c.name, c.detail);
        }
    }
    if report.wild {
        out.push_str("  wild: true\n");
    }
    for w in &report.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    out
}

fn render_verdict(result: &DegreeSetResult) -> String {
    let v = &result.verdict;
    let mut out = format!("verdict: {}\n", if v.cofinite { "cofinite" } else { "not cofinite" });
    match &v.certificate {
        VerdictCertificate::RationalRoot { root } => {
            let _ = writeln!(out, "  rational root {root}");
        }
        VerdictCertificate::Fails { cluster, condition, value } => {
            let at = cluster.map_or_else(String::new, |c| format!("cluster {c}: "));
            let _ = writeln!(out, "  {at}{condition} (value {value})");
        }
        VerdictCertificate::Holds { vf0_mod_q, clusters } => {
            let _ = writeln!(out, "  v(F(0)) mod q = {vf0_mod_q}");
            for c in clusters {
                let _ = write!(
                    out,
                    "  cluster {}: |s| mod q = {}, c_s mod q = {}",
                    c.cluster, c.size_mod_q, c.c_mod_q
                );
                match &c.vf_gamma_mod_q {
                    Some(v) => {
                        let _ = writeln!(out, ", gamma in X_s, v(F(gamma)) mod q = {v}");
                    }
                    None => out.push_str(", gamma not in X_s\n"),
                }
            }
        }
    }
    out
}

fn render_region(r: &RegionAnalysis) -> String {
    let orbit: Vec<String> = r.orbit.iter().map(usize::to_string).collect();
    let mut out = format!(
        "  cluster {} orbit [{}] e {} interval ({}, {}) slope {} intercept {}",
        r.cluster,
        orbit.join(", "),
        r.base_degree,
        opt_q(r.lower_end, "-inf"),
        opt_q(r.upper_end, "inf"),
        r.slope,
        render_q(r.intercept)
    );
    if let Some(v) = r.vertex_value {
        let _ = write!(out, " vertex {}", render_q(v));
    }
    if r.gamma_in_region {
        out.push_str(" gamma in X_s");
    }
    let _ = writeln!(
        out,
        "\n    annulus {}  sphere {}  disk {}  threshold {}  degrees {}",
        r.annulus.render_compact(),
        r.sphere.render_compact(),
        r.disk.render_compact(),
        r.threshold,
        r.degrees.render_compact()
    );
    out
}

fn render_source(s: &WitnessSource) -> String {
    match s {
        WitnessSource::Baseline => "rational x".into(),
        WitnessSource::Root { index } => format!("root {index}"),
        WitnessSource::Region { cluster, sub, relative } => {
            let sub = match sub {
                SubRegion::Annulus => "annulus",
                SubRegion::Sphere => "sphere",
                SubRegion::Disk => "disk",
            };
            format!("cluster {cluster} {sub}, r' = {relative}")
        }
        WitnessSource::Search => "grid search".into(),
    }
}

pub fn render_witness(w: &WitnessPoint) -> String {
    format!(
        "  degree {}: x0 = {}, [K(x0):K] = {}, v(F(x0)) = {}, {} ({})\n",
        w.claimed_degree,
        w.x0.render(),
        w.x_degree,
        w.vf,
        if w.verified { "verified" } else { "NOT verified" },
        render_source(&w.source)
    )
}

/// Verdict, degree set, regions and certificate summary; witnesses on request.
pub fn render_analysis(result: &DegreeSetResult, witnesses: bool) -> String {
    let mut out = render_verdict(result);
    let exact = match result.exact {
        Exactness::Exact => "true",
        Exactness::Inexact => "false",
        Exactness::Unknown => "unknown",
    };
    if result.exact == Exactness::Exact {
        let _ = writeln!(out, "degree set: {}", result.render());
        let _ = writeln!(out, "canonical: {}", result.lower.render_canonical());
    } else {
        let _ = writeln!(out, "lower: {}", result.lower.render_canonical());
        let _ = writeln!(out, "upper: {}", result.upper.render_canonical());
    }
    let _ = writeln!(out, "exact: {exact} (bound {})", result.bound);
    if let Ok((index, cofinite)) = result.lower.index_and_cofinite() {
        let _ = writeln!(out, "index: {index}, cofinite in index: {cofinite}");
    }
    if !result.regions.is_empty() {
        out.push_str("regions:\n");
        for r in &result.regions {
            out.push_str(&render_region(r));
        }
    }
    let direct = result
        .members
        .iter()
        .filter(|m| matches!(m.certificate, MemberCertificate::Witness { .. }))
        .count();
    let rechecked = result
        .obstructions
        .iter()
        .filter(|o| o.regions.iter().all(|r| r.rechecked))
        .count();
    let _ = writeln!(
        out,
        "certificates: {} members up to {} ({} by witness, {} as multiples), {} exclusions ({} rechecked)",
        result.members.len(),
        result.bound,
        direct,
        result.members.len() - direct,
        result.obstructions.len(),
        rechecked
    );
    if witnesses {
        out.push_str("witnesses:\n");
        for w in &result.witnesses {
            out.push_str(&render_witness(w));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonSet {
    pub exceptional: Vec<u64>,
    pub threshold: u64,
    pub period: u64,
    pub residues: Vec<u64>,
}

impl From<&NaturalSet> for JsonSet {
    fn from(s: &NaturalSet) -> Self {
        JsonSet {
            exceptional: s.exceptional().to_vec(),
            threshold: s.threshold(),
            period: s.period(),
            residues: s.residues().to_vec(),
        }
    }
}

impl JsonSet {
    pub fn to_set(&self) -> NaturalSet {
        NaturalSet::from_parts(
            self.exceptional.clone(),
            self.threshold,
            self.period,
            self.residues.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonWitness {
    pub degree: u64,
    pub x0: String,
    pub x_degree: u64,
    pub vf: String,
    pub verified: bool,
    pub source: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: String,
    pub curve: String,
    pub q: u64,
    pub p: u64,
    pub validation: serde_json::Value,
    pub verdict: Option<serde_json::Value>,
    pub regions: Vec<serde_json::Value>,
    /// Certified lower set; equal to the degree set when `exact` is true.
    pub degree_set: Option<JsonSet>,
    pub upper: Option<JsonSet>,
    pub union: Option<String>,
    /// true, false, or null when the bound is too small to decide.
    pub exact: Option<bool>,
    pub bound: Option<u64>,
    pub witnesses: Vec<JsonWitness>,
    pub obstructions: Vec<serde_json::Value>,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn json_report(curve: &CurveSpec, validation: &ValidationReport, result: Option<&DegreeSetResult>) -> JsonReport {
    JsonReport {
        schema: SCHEMA.into(),
        curve: curve.name().into(),
        q: curve.q(),
        p: curve.ctx().residue_char(),
        validation: to_value(validation),
        verdict: result.map(|r| to_value(&r.verdict)),
        regions: result.map_or_else(Vec::new, |r| r.regions.iter().map(to_value).collect()),
        degree_set: result.map(|r| JsonSet::from(&r.lower)),
        upper: result.map(|r| JsonSet::from(&r.upper)),
        union: result.filter(|r| r.exact == Exactness::Exact).map(DegreeSetResult::render),
        exact: result.and_then(|r| match r.exact {
            Exactness::Exact => Some(true),
            Exactness::Inexact => Some(false),
            Exactness::Unknown => None,
        }),
        bound: result.map(|r| r.bound),
        witnesses: result.map_or_else(Vec::new, |r| {
            r.witnesses
                .iter()
                .map(|w| JsonWitness {
                    degree: w.claimed_degree,
                    x0: w.x0.render(),
                    x_degree: w.x_degree,
                    vf: w.vf.to_string(),
                    verified: w.verified,
                    source: to_value(&w.source),
                })
                .collect()
        }),
        obstructions: result.map_or_else(Vec::new, |r| r.obstructions.iter().map(to_value).collect()),
    }
}
