use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use degset::cluster_tree::ClusterTree;
use degset::curve_model::{parse_curve, validate_curve, CurveSpec};
use degset::degree_engine::{
    baseline_lower, compute_degree_set, construct_witness, decide_cofinite, region_degrees, Exactness, SubRegion,
    VerdictCertificate,
};
use degset::exact_arith::{parse_puiseux, BaseFieldContext, PuiseuxElement, Val};
use degset::family_gen::{generate_family, FamilyRequest};
use degset::natset::NaturalSet;
use degset::oracle::{c_via_min_poly_orbits, clusters_bruteforce, small_degree_search, SearchGrid};
use degset::report::{json_report, render_analysis, JsonReport};
use degset::sampling::{random_annulus_point, random_curve, CurveShape};
use degset::Error;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn example61() -> CurveSpec {
    parse_curve(include_str!("../../../data/example61.curve")).unwrap()
}

fn family(qq: u64, parts: &[u64]) -> CurveSpec {
    generate_family(&FamilyRequest {
        q: qq,
        parts: parts.to_vec(),
        total_degree: None,
        p: None,
    })
    .unwrap()
    .curve
}

fn curve(text: &str) -> CurveSpec {
    parse_curve(text).unwrap()
}

fn five_cluster(t: &ClusterTree) -> usize {
    let reps = t.orbit_representatives().unwrap();
    reps.into_iter().find(|&id| t.cluster(id).size == 5).unwrap()
}

#[test]
fn example_verdict() {
    let v = decide_cofinite(&example61()).unwrap();
    assert!(!v.cofinite);
    match v.certificate {
        VerdictCertificate::Holds { vf0_mod_q, clusters } => {
            assert_eq!(vf0_mod_q, "1");
            assert_eq!(clusters.len(), 1);
            assert_eq!(clusters[0].size_mod_q, 0);
            assert_eq!(clusters[0].c_mod_q, "1");
        }
        other => panic!("unexpected certificate {other:?}"),
    }
}

#[test]
fn cube_roots_of_pi_are_cofinite() {
    let c = curve(
        "curve \"cube\"\nq = 3\nresidue_char = 0\nram_index = 3\ncyclotomic_order = 3\nleading = 1\n\
         root pi^(1/3) mult 1\nroot (z)*pi^(1/3) mult 1\nroot (-1 - z)*pi^(1/3) mult 1\n",
    );
    let t = ClusterTree::build(&c).unwrap();
    assert_eq!(t.cluster(t.top()).data.c, q(0, 1));
    let v = decide_cofinite(&c).unwrap();
    assert!(v.cofinite);
    assert!(matches!(v.certificate, VerdictCertificate::Fails { cluster: Some(_), .. }));
    let r = compute_degree_set(&c, None).unwrap();
    assert_eq!(r.exact, Exactness::Exact);
    assert!(r.lower.cofinite_in(1));
}

#[test]
fn rational_root_gives_everything() {
    let c = curve("curve \"lin\"\nq = 3\nresidue_char = 5\nram_index = 1\ncyclotomic_order = 1\nleading = pi^(1)\nroot 2 mult 1\n");
    assert!(matches!(
        decide_cofinite(&c).unwrap().certificate,
        VerdictCertificate::RationalRoot { .. }
    ));
    let r = compute_degree_set(&c, None).unwrap();
    assert_eq!(r.lower, NaturalSet::all());
    assert_eq!(r.exact, Exactness::Exact);
    assert_eq!(baseline_lower(&c).unwrap(), NaturalSet::all());
}

#[test]
fn example_baseline() {
    let expected = NaturalSet::progression(3).union(&NaturalSet::progression(10));
    assert_eq!(baseline_lower(&example61()).unwrap(), expected);
}

#[test]
fn example_regions() {
    let c = example61();
    let t = ClusterTree::build(&c).unwrap();
    let top = region_degrees(&c, t.top()).unwrap();
    assert_eq!((top.base_degree, top.slope, top.intercept), (1, 30, q(1, 1)));
    assert!(top.annulus.is_subset(&NaturalSet::progression(3)));
    assert_eq!(top.degrees, NaturalSet::progression(3));

    let five = region_degrees(&c, five_cluster(&t)).unwrap();
    assert_eq!(five.base_degree, 2);
    assert_eq!((five.lower_end, five.upper_end), (Some(q(1, 1)), Some(q(6, 5))));
    assert_eq!((five.slope, five.intercept), (5, q(27, 1)));
    assert_eq!(five.threshold, 22);
    assert_eq!(
        five.annulus,
        NaturalSet::finite([8, 11, 13, 14]).union(&NaturalSet::tail_above(15))
    );
    assert_eq!(five.vertex_value, Some(q(33, 1)));
    assert_eq!(five.sphere, NaturalSet::progression(5));

    let leaf = t.leaf_of(0);
    let single = region_degrees(&c, leaf).unwrap();
    assert_eq!((single.base_degree, single.slope), (10, 1));
    assert_eq!(single.degrees, NaturalSet::progression(10));
}

#[test]
fn annulus_witness_of_degree_sixteen() {
    let c = example61();
    let t = ClusterTree::build(&c).unwrap();
    let five = region_degrees(&c, five_cluster(&t)).unwrap();
    let w = construct_witness(&t, &five, 8, SubRegion::Annulus).unwrap();
    assert!(w.verified);
    assert_eq!(w.point_degree, 16);
    let dist = w.x0.sub(&five.gamma.lift(w.x0.ctx()).unwrap()).unwrap().valuation();
    assert_eq!(dist, Val::Finite(q(9, 16)));
    let lifted = c.lift(w.x0.ctx()).unwrap();
    let vf = lifted.evaluate_f(&w.x0).unwrap().valuation();
    assert_eq!(vf, w.vf);
    let scaled = vf.finite().unwrap() * q(16, 1);
    assert!(scaled.is_integer() && scaled.to_integer() % 3 == 0);
}

#[test]
fn vertex_witness() {
    let c = example61();
    let t = ClusterTree::build(&c).unwrap();
    let five = region_degrees(&c, five_cluster(&t)).unwrap();
    let w = construct_witness(&t, &five, 1, SubRegion::Disk).unwrap();
    assert_eq!((w.point_degree, w.vf), (2, Val::Finite(q(33, 2))));
    let s = construct_witness(&t, &five, 5, SubRegion::Sphere).unwrap();
    assert_eq!(s.point_degree, 10);
    assert_eq!(s.vf, Val::Finite(q(33, 2)));
}

#[test]
fn family_two_five() {
    let c = family(3, &[2, 5]);
    assert!(!decide_cofinite(&c).unwrap().cofinite);
    let expected = [2, 5]
        .iter()
        .fold(NaturalSet::progression(3), |acc, &n| acc.union(&NaturalSet::progression(n)));
    assert_eq!(baseline_lower(&c).unwrap(), expected);
    let r = compute_degree_set(&c, None).unwrap();
    assert_eq!((r.exact, &r.lower), (Exactness::Exact, &expected));
    assert_eq!(r.render(), "3N ∪ 2N ∪ 5N");
}

#[test]
fn family_constants_match_orbit_sums() {
    for (qq, parts) in [(3u64, vec![1u64, 2, 5]), (2, vec![1, 1, 3]), (5, vec![2, 3, 7])] {
        let c = family(qq, &parts);
        let t = ClusterTree::build(&c).unwrap();
        let lead = c.leading_valuation();
        for (id, cl) in t.clusters().iter().enumerate() {
            if cl.data.invariant {
                assert_eq!(c_via_min_poly_orbits(&t, id).unwrap(), cl.data.c - lead);
            }
        }
        let vf0 = c.valuation_of_f(&PuiseuxElement::zero(c.ctx())).unwrap().finite().unwrap();
        assert!(vf0.is_integer() && vf0.to_integer().rem_euclid(qq as i64) != 0);
    }
}

#[test]
fn orbit_sum_oracle_on_example_top() {
    let t = ClusterTree::build(&example61()).unwrap();
    assert_eq!(c_via_min_poly_orbits(&t, t.top()).unwrap(), q(0, 1));
}

#[test]
fn bruteforce_two_roots() {
    let ctx = BaseFieldContext::new(0, 1, 1).unwrap();
    let roots = [PuiseuxElement::integer(&ctx, 1), PuiseuxElement::integer(&ctx, 2)];
    assert_eq!(clusters_bruteforce(&roots).unwrap().len(), 3);
    let many: Vec<_> = (0..13).map(|i| PuiseuxElement::integer(&ctx, i)).collect();
    assert!(matches!(clusters_bruteforce(&many), Err(Error::TooLarge(_))));
}

#[test]
fn grid_search_on_example() {
    let c = example61();
    let grid = SearchGrid::default();
    let w = small_degree_search(&c, 16, &grid).unwrap().expect("degree 16 is reachable");
    assert!(w.verified && w.point_degree == 16);
    assert!(small_degree_search(&c, 3, &grid).unwrap().is_some());
    assert!(small_degree_search(&c, 25, &grid).unwrap().is_none());
}

#[test]
fn wild_input_is_rejected() {
    let c = curve(include_str!("../../../data/wildremark.curve"));
    assert!(!validate_curve(&c).passed());
    assert!(compute_degree_set(&c, None).is_err());
}

#[test]
fn engine_invariants_on_random_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shape = CurveShape {
        max_roots: 10,
        max_ram: 12,
    };
    let grid = SearchGrid {
        random_samples: 40,
        ..SearchGrid::default()
    };
    let mut checked = 0;
    while checked < 120 {
        let c = random_curve(&mut rng, &shape).unwrap();
        if !validate_curve(&c).passed() {
            continue;
        }
        checked += 1;
        let r = compute_degree_set(&c, Some(80)).unwrap();
        assert!(r.lower.is_subset(&r.upper));
        assert!(NaturalSet::progression(c.q()).is_subset(&r.lower));
        for m in r.lower.members_below(30) {
            assert!(NaturalSet::progression(m).is_subset(&r.lower), "{m}N not in {}", r.lower.render_compact());
        }
        if r.exact == Exactness::Exact && r.lower.index().unwrap() == 1 {
            assert_eq!(r.verdict.cofinite, r.lower.cofinite_in(1), "{}", c.render());
        }
        if !r.verdict.cofinite {
            let t = ClusterTree::build(&c).unwrap();
            let cover = t
                .orbit_representatives()
                .unwrap()
                .into_iter()
                .filter(|&id| !t.cluster(id).data.invariant)
                .fold(NaturalSet::progression(c.q()), |acc, id| {
                    acc.union(&NaturalSet::progression(t.cluster(id).data.orbit_size.unwrap()))
                });
            assert!(r.upper.is_subset(&cover), "{}", c.render());
        }
        if checked % 10 == 0 {
            for m in 1..=8 {
                if let Some(w) = small_degree_search(&c, m, &grid).unwrap() {
                    assert!(r.upper.member(w.point_degree), "search found degree {m} outside upper");
                }
            }
        }
    }
}

#[test]
fn annulus_points_follow_the_linear_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let shape = CurveShape {
        max_roots: 10,
        max_ram: 12,
    };
    let mut points = 0;
    while points < 1000 {
        let c = random_curve(&mut rng, &shape).unwrap();
        if !validate_curve(&c).passed() {
            continue;
        }
        let t = ClusterTree::build(&c).unwrap();
        for id in t.orbit_representatives().unwrap() {
            let region = region_degrees(&c, id).unwrap();
            let (x0, predicted) = random_annulus_point(&mut rng, &t, &region).unwrap();
            let lifted = c.lift(x0.ctx()).unwrap();
            assert_eq!(lifted.valuation_of_f(&x0).unwrap(), Val::Finite(predicted), "{}", x0.render());
            points += 1;
        }
    }
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let c = example61();
    let r1 = compute_degree_set(&c, None).unwrap();
    let r2 = compute_degree_set(&c, None).unwrap();
    assert_eq!(render_analysis(&r1, true), render_analysis(&r2, true));
    let report = json_report(&c, &validate_curve(&c), Some(&r1));
    let text = serde_json::to_string(&report).unwrap();
    let back: JsonReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.degree_set.unwrap().to_set(), r1.lower);
    assert_eq!(back.exact, Some(true));
}

#[test]
fn gamma_of_the_five_cluster() {
    let c = example61();
    let t = ClusterTree::build(&c).unwrap();
    let five = region_degrees(&c, five_cluster(&t)).unwrap();
    let expected = parse_puiseux(c.ctx(), "-3*pi^(1/2)").unwrap();
    assert_eq!(five.gamma.valuation(), expected.valuation());
    assert_eq!(five.gamma.degree_over_base(), 2);
}
