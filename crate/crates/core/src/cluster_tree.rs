//! Clusters of the roots of F and their invariants.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::curve_model::CurveSpec;
use crate::error::{Error, Result};
use crate::exact_arith::{render_q, PuiseuxElement, Val};

/// How a cluster sits relative to the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// s = {α : v(α) ≥ v(α_min)}.
    Annulus { alpha_min: usize },
    /// All members lie in the open ball {x : v(x − α) > v(α)}.
    Ball { radius: Val },
    Both { alpha_min: usize, radius: Val },
    /// Not produced for valid input; kept so the check is total.
    Neither,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::Annulus { .. } => "annulus".into(),
            Classification::Ball { radius } => format!("ball({radius})"),
            Classification::Both { radius, .. } => format!("annulus+ball({radius})"),
            Classification::Neither => "neither".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cluster {
    /// Indices into [`CurveSpec::roots`], sorted.
    pub members: Vec<usize>,
    /// |s|, counted with multiplicity.
    pub size: u64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub data: ClusterData,
}

#[derive(Clone, Debug)]
pub struct ClusterData {
    /// d_s; infinite for singletons.
    pub depth: Val,
    /// c_s = v(a_d) + Σ_{β ∉ s} m_β v(α − β).
    pub c: Rational64,
    pub classification: Classification,
    /// None when the roots are not closed under the Galois action.
    pub orbit_size: Option<u64>,
    pub invariant: bool,
    /// Truncation of any member below d_s; a center for the cluster defined
    /// over the field of degree `orbit_size`.
    pub center: PuiseuxElement,
    /// γ_s, present when the cluster is invariant and the context tame.
    pub gamma: Option<PuiseuxElement>,
    /// γ_s ∈ X_s, decided by [`ClusterTree::region_membership`].
    pub gamma_in_region: bool,
    /// Minimal internal difference valuation (equal to the depth).
    pub eps: Val,
    /// Maximal valuation of α − β over β outside s; None for the top cluster.
    pub delta: Option<Rational64>,
}

/// Where a point lies relative to the roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    AtRoot(usize),
    /// x0 ∈ X_s for `cluster`, at distance valuation `valuation` from every member.
    Region { cluster: usize, valuation: Rational64 },
}

#[derive(Clone, Debug)]
pub struct ClusterTree {
    curve: CurveSpec,
    clusters: Vec<Cluster>,
    diffs: Vec<Vec<Rational64>>,
    /// Image of each root index under the Galois generator.
    perm: Option<Vec<usize>>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
}

struct Raw {
    members: Vec<usize>,
    depth: Val,
    children: Vec<usize>,
}

impl ClusterTree {
    /// Builds the tree by merging roots at decreasing difference valuation.
    pub fn build(curve: &CurveSpec) -> Result<Self> {
        let roots = curve.roots();
        let n = roots.len();
        if n == 0 {
            return Err(Error::InvalidCurve("no roots".into()));
        }
        let mut diffs = vec![vec![Rational64::zero(); n]; n];
        let mut levels: BTreeMap<Rational64, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..i {
                let v = roots[i].0.sub(&roots[j].0)?.valuation().finite().ok_or_else(|| {
                    Error::InvalidCurve("repeated root".into())
                })?;
                diffs[i][j] = v;
                diffs[j][i] = v;
                levels.entry(v).or_default().push((j, i));
            }
        }

        let mut raw: Vec<Raw> = (0..n)
            .map(|i| Raw {
                members: vec![i],
                depth: Val::Infinity,
                children: Vec::new(),
            })
            .collect();
        let mut dsu = Dsu((0..n).collect());
        // representative root -> current cluster
        let mut current: Vec<usize> = (0..n).collect();
        for (v, pairs) in levels.iter().rev() {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &(a, b) in pairs {
                let (ra, rb) = (dsu.find(a), dsu.find(b));
                if ra != rb {
                    let ca = current[ra];
                    let cb = current[rb];
                    let keep = ra.min(rb);
                    dsu.0[ra.max(rb)] = keep;
                    let mut kids = groups.remove(&ra).unwrap_or_else(|| vec![ca]);
                    kids.extend(groups.remove(&rb).unwrap_or_else(|| vec![cb]));
                    groups.insert(keep, kids);
                }
            }
            for (rep, kids) in groups {
                let mut members: Vec<usize> =
                    kids.iter().flat_map(|&k| raw[k].members.clone()).collect();
                members.sort_unstable();
                raw.push(Raw {
                    members,
                    depth: Val::Finite(*v),
                    children: kids,
                });
                current[rep] = raw.len() - 1;
            }
        }
        let top = raw.len() - 1;
        debug_assert_eq!(raw[top].members.len(), n);

        // renumber in preorder, children ordered by smallest member
        let mut order = Vec::with_capacity(raw.len());
        let mut stack = vec![top];
        while let Some(k) = stack.pop() {
            order.push(k);
            let mut kids = raw[k].children.clone();
            kids.sort_by_key(|&c| raw[c].members[0]);
            stack.extend(kids.into_iter().rev());
        }
        let mut new_id = vec![0; raw.len()];
        for (i, &k) in order.iter().enumerate() {
            new_id[k] = i;
        }

        let perm = galois_permutation(curve)?;
        let placeholder = PuiseuxElement::zero(curve.ctx());
        let mut clusters: Vec<Cluster> = order
            .iter()
            .map(|&k| {
                let r = &raw[k];
                let mut children: Vec<usize> = r.children.iter().map(|&c| new_id[c]).collect();
                children.sort_unstable();
                Cluster {
                    members: r.members.clone(),
                    size: r.members.iter().map(|&i| u64::from(roots[i].1)).sum(),
                    parent: None,
                    children,
                    data: ClusterData {
                        depth: r.depth,
                        c: Rational64::zero(),
                        classification: Classification::Neither,
                        orbit_size: None,
                        invariant: false,
                        center: placeholder.clone(),
                        gamma: None,
                        gamma_in_region: false,
                        eps: r.depth,
                        delta: None,
                    },
                }
            })
            .collect();
        for id in 0..clusters.len() {
            for c in clusters[id].children.clone() {
                clusters[c].parent = Some(id);
            }
        }

        let mut tree = ClusterTree {
            curve: curve.clone(),
            clusters,
            diffs,
            perm,
        };
        for id in 0..tree.clusters.len() {
            tree.fill_data(id)?;
        }
        Ok(tree)
    }

    fn fill_data(&mut self, id: usize) -> Result<()> {
        let c = self.cluster_constant(id, 0)?;
        if self.clusters[id].members.len() > 1 {
            let again = self.cluster_constant(id, self.clusters[id].members.len() - 1)?;
            if again != c {
                return Err(Error::Soundness(format!(
                    "c_s depends on the representative for cluster {id}"
                )));
            }
        }
        let classification = self.classify(id);
        let orbit_size = self.orbit(id).map(|o| o.len() as u64);
        let invariant = orbit_size == Some(1);
        let cl = &self.clusters[id];
        let first = &self.curve.roots()[cl.members[0]].0;
        let center = match cl.data.depth {
            Val::Finite(d) => first.truncate_below(d),
            Val::Infinity => first.clone(),
        };
        let delta = self.outside_max(id, cl.members[0]);
        let tame = self.curve.ctx().is_tame();
        let gamma = (invariant && tame).then(|| center.clone());
        if let Some(g) = &gamma {
            if g.degree_over_base() != 1 {
                return Err(Error::Soundness(format!(
                    "center {} of invariant cluster {id} is not defined over K",
                    g.render()
                )));
            }
        }
        let gamma_in_region = match &gamma {
            Some(g) => matches!(self.region_membership(g)?, Membership::Region { cluster, .. } if cluster == id),
            None => false,
        };
        let data = &mut self.clusters[id].data;
        data.c = c;
        data.classification = classification;
        data.orbit_size = orbit_size;
        data.invariant = invariant;
        data.center = center;
        data.gamma = gamma;
        data.gamma_in_region = gamma_in_region;
        data.delta = delta;
        Ok(())
    }

    /// c_s computed from the member at position `which` in the member list.
    pub fn cluster_constant(&self, id: usize, which: usize) -> Result<Rational64> {
        let cl = &self.clusters[id];
        let a = *cl
            .members
            .get(which)
            .ok_or_else(|| Error::Rejected("member index out of range".into()))?;
        let mut c = self.curve.leading_valuation();
        for (b, (_, m)) in self.curve.roots().iter().enumerate() {
            if cl.members.binary_search(&b).is_err() {
                c += self.diffs[a][b] * Rational64::from_integer(i64::from(*m));
            }
        }
        Ok(c)
    }

    fn outside_max(&self, id: usize, a: usize) -> Option<Rational64> {
        let cl = &self.clusters[id];
        (0..self.diffs.len())
            .filter(|b| cl.members.binary_search(b).is_err())
            .map(|b| self.diffs[a][b])
            .max()
    }

    fn classify(&self, id: usize) -> Classification {
        let cl = &self.clusters[id];
        let roots = self.curve.roots();
        let vals: Vec<Val> = roots.iter().map(|(r, _)| r.valuation()).collect();
        let (alpha_min, vmin) = cl
            .members
            .iter()
            .map(|&i| (i, vals[i]))
            .min_by_key(|&(i, v)| (v, i))
            .expect("clusters are nonempty");
        let annulus = (0..roots.len())
            .all(|i| (vals[i] >= vmin) == cl.members.binary_search(&i).is_ok());
        let ball = cl.data.depth > vmin;
        match (annulus, ball) {
            (true, true) => Classification::Both {
                alpha_min,
                radius: vmin,
            },
            (true, false) => Classification::Annulus { alpha_min },
            (false, true) => Classification::Ball { radius: vmin },
            (false, false) => Classification::Neither,
        }
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, id: usize) -> &Cluster {
        &self.clusters[id]
    }

    pub fn top(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// v(α_i − α_j) for distinct root indices.
    pub fn diff_valuation(&self, i: usize, j: usize) -> Val {
        if i == j {
            Val::Infinity
        } else {
            Val::Finite(self.diffs[i][j])
        }
    }

    /// Permutation of root indices induced by the Galois generator.
    pub fn galois_permutation(&self) -> Option<&[usize]> {
        self.perm.as_deref()
    }

    /// Cluster whose member set is exactly `members` (sorted).
    pub fn find(&self, members: &[usize]) -> Option<usize> {
        self.clusters.iter().position(|c| c.members == members)
    }

    /// Smallest cluster containing root `i`.
    pub fn leaf_of(&self, i: usize) -> usize {
        self.clusters
            .iter()
            .position(|c| c.members == [i])
            .expect("every root is a leaf")
    }

    /// Orbit of the cluster under the Galois generator, starting with `id`.
    pub fn orbit(&self, id: usize) -> Option<Vec<usize>> {
        let perm = self.perm.as_ref()?;
        let mut orbit = vec![id];
        let mut cur = self.clusters[id].members.clone();
        loop {
            let mut image: Vec<usize> = cur.iter().map(|&i| perm[i]).collect();
            image.sort_unstable();
            let next = self.find(&image).expect("the Galois action permutes clusters");
            if next == id {
                return Some(orbit);
            }
            orbit.push(next);
            cur = image;
        }
    }

    /// One representative (smallest id) per Galois orbit of clusters.
    pub fn orbit_representatives(&self) -> Option<Vec<usize>> {
        let mut reps = Vec::new();
        let mut seen = vec![false; self.clusters.len()];
        for id in 0..self.clusters.len() {
            if seen[id] {
                continue;
            }
            for k in self.orbit(id)? {
                seen[k] = true;
            }
            reps.push(id);
        }
        Some(reps)
    }

    /// The cluster s with x0 ∈ X_s and the common valuation v(x0 − α), α ∈ s.
    pub fn region_membership(&self, x0: &PuiseuxElement) -> Result<Membership> {
        let mut best: Option<Rational64> = None;
        let mut nearest = Vec::new();
        for (i, (r, _)) in self.curve.roots().iter().enumerate() {
            match x0.sub(r)?.valuation() {
                Val::Infinity => return Ok(Membership::AtRoot(i)),
                Val::Finite(v) => match best {
                    Some(b) if v < b => {}
                    Some(b) if v == b => nearest.push(i),
                    _ => {
                        best = Some(v);
                        nearest = vec![i];
                    }
                },
            }
        }
        let valuation = best.expect("at least one root");
        let cluster = self.find(&nearest).ok_or_else(|| {
            Error::Soundness("nearest roots do not form a cluster".into())
        })?;
        Ok(Membership::Region { cluster, valuation })
    }

    /// |s|·v(x0 − α) + c_s for the cluster s with x0 ∈ X_s.
    pub fn vf_by_formula(&self, x0: &PuiseuxElement) -> Result<Val> {
        match self.region_membership(x0)? {
            Membership::AtRoot(_) => Ok(Val::Infinity),
            Membership::Region { cluster, valuation } => {
                let cl = &self.clusters[cluster];
                Ok(Val::Finite(
                    Rational64::from_integer(cl.size as i64) * valuation + cl.data.c,
                ))
            }
        }
    }

    /// γ_s for an invariant cluster in a tame context.
    pub fn shift_center(&self, id: usize) -> Result<PuiseuxElement> {
        let data = &self.clusters[id].data;
        if !data.invariant {
            return Err(Error::NotInvariant);
        }
        data.gamma
            .clone()
            .ok_or_else(|| Error::Wild("no K-rational center in a wild context".into()))
    }

    fn node_line(&self, id: usize) -> String {
        let cl = &self.clusters[id];
        let d = &cl.data;
        let orbit = d
            .orbit_size
            .map_or_else(|| "?".to_string(), |o| o.to_string());
        let mut line = format!(
            "[{id}] size {} depth {} c {} orbit {} {}",
            cl.size,
            d.depth,
            render_q(d.c),
            orbit,
            d.classification.label()
        );
        if cl.members.len() == 1 {
            let _ = write!(line, " root {}", self.curve.roots()[cl.members[0]].0.render());
        } else if d.gamma_in_region {
            line.push_str(" gamma-in-region");
        }
        line
    }

    /// Deterministic ASCII rendering, one node per line, indented by depth.
    pub fn render_ascii(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, level)) = stack.pop() {
            let _ = writeln!(out, "{}{}", "  ".repeat(level), self.node_line(id));
            for &c in self.clusters[id].children.iter().rev() {
                stack.push((c, level + 1));
            }
        }
        out
    }

    pub fn render_dot(&self) -> String {
        let mut out = String::from("digraph clusters {\n");
        for id in 0..self.clusters.len() {
            let _ = writeln!(out, "  n{id} [label=\"{}\"];", self.node_line(id));
        }
        for (id, cl) in self.clusters.iter().enumerate() {
            for c in &cl.children {
                let _ = writeln!(out, "  n{id} -> n{c};");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn galois_permutation(curve: &CurveSpec) -> Result<Option<Vec<usize>>> {
    let roots = curve.roots();
    let index: HashMap<String, usize> = roots
        .iter()
        .enumerate()
        .map(|(i, (r, _))| (r.render(), i))
        .collect();
    let mut perm = Vec::with_capacity(roots.len());
    for (r, m) in roots {
        match index.get(&r.galois_apply(1).render()) {
            Some(&j) if roots[j].1 == *m => perm.push(j),
            _ => return Ok(None),
        }
    }
    Ok(Some(perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::parse_curve;

    fn tree(doc: &str) -> ClusterTree {
        ClusterTree::build(&parse_curve(doc).unwrap()).unwrap()
    }

    #[test]
    fn two_roots_form_a_chain() {
        let t = tree("curve \"t\"\nq = 3\nresidue_char = 7\nram_index = 1\ncyclotomic_order = 1\nleading = 1\nroot 1 mult 1\nroot pi^(1) mult 1\n");
        assert_eq!(t.len(), 3);
        assert_eq!(t.cluster(0).children, vec![1, 2]);
        assert_eq!(t.cluster(0).data.depth, Val::Finite(Rational64::zero()));
    }

    #[test]
    fn cube_roots_of_pi() {
        // y^3 = x^3 − π
        let t = tree("curve \"t\"\nq = 3\nresidue_char = 7\nram_index = 3\ncyclotomic_order = 3\nleading = 1\nroot pi^(1/3) mult 1\nroot (z)*pi^(1/3) mult 1\nroot (-1 - z)*pi^(1/3) mult 1\n");
        let top = t.cluster(0);
        assert_eq!(top.size, 3);
        assert!(top.data.invariant);
        assert_eq!(top.data.c, Rational64::zero());
        assert_eq!(top.data.gamma.as_ref().unwrap(), &PuiseuxElement::zero(t.curve().ctx()));
        assert!(top.data.gamma_in_region);
        assert_eq!(t.cluster(1).data.orbit_size, Some(3));
    }

    #[test]
    fn membership_far_below() {
        let t = tree("curve \"t\"\nq = 3\nresidue_char = 7\nram_index = 2\ncyclotomic_order = 2\nleading = 1\nroot pi^(1/2) mult 1\nroot -pi^(1/2) mult 1\n");
        let x0 = PuiseuxElement::pi_power(t.curve().ctx(), Rational64::from_integer(-5)).unwrap();
        assert_eq!(
            t.region_membership(&x0).unwrap(),
            Membership::Region {
                cluster: 0,
                valuation: Rational64::from_integer(-5)
            }
        );
        let r = t.curve().roots()[1].0.clone();
        assert_eq!(t.region_membership(&r).unwrap(), Membership::AtRoot(1));
    }
}
