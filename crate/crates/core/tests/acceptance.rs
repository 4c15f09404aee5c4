//! One test per acceptance criterion; each prints a PASS/FAIL line.
//! Run with `--nocapture` to see the lines of passing criteria too.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use degset::cluster_tree::ClusterTree;
use degset::congruence::{lattice_solvable, solutions_in_interval, AffineLatticeProblem};
use degset::curve_model::{parse_curve, validate_curve, CurveSpec};
use degset::degree_engine::{compute_degree_set, point_degree, DegreeSetResult, Exactness, MemberCertificate};
use degset::exact_arith::PuiseuxElement;
use degset::family_gen::{generate_family, FamilyRequest};
use degset::natset::NaturalSet;
use degset::oracle::clusters_bruteforce;
use degset::sampling::{random_curve, random_point, CurveShape};

fn report(n: u32, passed: bool, detail: &str) {
    println!("{} criterion {n}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {n}: {detail}");
}

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn example61() -> CurveSpec {
    parse_curve(include_str!("../../../data/example61.curve")).unwrap()
}

fn valid_random_curve(rng: &mut ChaCha8Rng, shape: &CurveShape) -> CurveSpec {
    loop {
        let c = random_curve(rng, shape).unwrap();
        if validate_curve(&c).passed() {
            return c;
        }
    }
}

#[test]
fn criterion_01_example_curve_end_to_end() {
    let expected = NaturalSet::progression(3)
        .union(&NaturalSet::finite([8, 11, 13, 14]).union(&NaturalSet::tail_above(15)).scale(2))
        .union(&NaturalSet::progression(10));
    let start = Instant::now();
    let result = compute_degree_set(&example61(), None).unwrap();
    let elapsed = start.elapsed();
    let passed = result.exact == Exactness::Exact
        && result.lower == expected
        && result.upper == expected
        && elapsed < Duration::from_secs(5);
    report(
        1,
        passed,
        &format!(
            "expected {}, computed {} (exact {:?}, {:.3}s)",
            expected.render_canonical(),
            result.render(),
            result.exact,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_cluster_constants() {
    let t = ClusterTree::build(&example61()).unwrap();
    let top = t.cluster(t.top());
    let fives: BTreeSet<Rational64> = t.clusters().iter().filter(|c| c.size == 5).map(|c| c.data.c).collect();
    let wild = parse_curve(include_str!("../../../data/wildremark.curve")).unwrap();
    let w = ClusterTree::build(&wild).unwrap();
    let triple = w.clusters().iter().find(|c| c.size == 3).map(|c| c.data.c);
    let passed = top.size == 30
        && top.data.c == q(1, 1)
        && fives == BTreeSet::from([q(27, 2)])
        && triple == Some(q(2, 3));
    report(
        2,
        passed,
        &format!("top {}, five-element {:?}, wild triple {:?}", top.data.c, fives, triple),
    );
}

#[test]
fn criterion_03_congruence_list() {
    let solvable: Vec<u64> = (1..=40)
        .filter(|&r| {
            let p = AffineLatticeProblem::new(5, 3, q(27, 1), r, Some(q(1, 1)), Some(q(6, 5))).unwrap();
            lattice_solvable(&p, false).unwrap()
        })
        .collect();
    let expected: Vec<u64> = [8, 11, 13, 14].into_iter().chain(16..=40).collect();
    report(3, solvable == expected, &format!("solvable r <= 40: {solvable:?}"));
}

#[test]
fn criterion_04_family_round_trips() {
    let cases: [(u64, &[u64]); 4] = [(3, &[2, 5]), (3, &[1, 2, 5]), (5, &[2, 3, 7]), (2, &[1, 1, 3])];
    let mut lines = Vec::new();
    let mut passed = true;
    for (qq, parts) in cases {
        let family = generate_family(&FamilyRequest {
            q: qq,
            parts: parts.to_vec(),
            total_degree: None,
            p: None,
        })
        .unwrap();
        let text = family.curve.render();
        let start = Instant::now();
        let curve = parse_curve(&text).unwrap();
        let result = compute_degree_set(&curve, None).unwrap();
        let elapsed = start.elapsed();
        let expected = parts
            .iter()
            .filter(|&&n| n > 1)
            .fold(NaturalSet::progression(qq), |acc, &n| acc.union(&NaturalSet::progression(n)));
        let ok = validate_curve(&curve).passed()
            && result.exact == Exactness::Exact
            && result.lower == expected
            && elapsed < Duration::from_secs(10);
        passed &= ok;
        lines.push(format!(
            "q={qq} n={parts:?} p={}: {} in {:.3}s",
            family.p,
            result.render(),
            elapsed.as_secs_f64()
        ));
    }
    report(4, passed, &lines.join("; "));
}

#[test]
fn criterion_05_formula_vs_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let shape = CurveShape {
        max_roots: 12,
        max_ram: 30,
    };
    let (mut total, mut agree) = (0, 0);
    let mut first_bad = None;
    while total < 1000 {
        let curve = valid_random_curve(&mut rng, &shape);
        let x0 = random_point(&mut rng, &curve, shape.max_ram).unwrap();
        let lifted = curve.lift(x0.ctx()).unwrap();
        let tree = ClusterTree::build(&lifted).unwrap();
        let formula = tree.vf_by_formula(&x0).unwrap();
        let direct = lifted.evaluate_f(&x0).unwrap().valuation();
        total += 1;
        if formula == direct {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("{} at {}", curve.render(), x0.render()));
        }
    }
    report(
        5,
        agree == total,
        &format!("{agree}/{total} instances agree{}", first_bad.map_or(String::new(), |b| format!("; first mismatch {b}"))),
    );
}

fn scan(p: &AffineLatticeProblem) -> Vec<i64> {
    let r = p.r as i64;
    (-4000..4000)
        .filter(|&n| {
            let x = q(n, r);
            p.lo.is_none_or(|lo| x > lo) && p.hi.is_none_or(|hi| x < hi) && (p.a * n + (p.c * q(r, 1)).to_integer()).rem_euclid(p.b) == 0
        })
        .collect()
}

#[test]
fn criterion_06_solver_vs_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut agree = 0;
    let total = 10_000;
    for _ in 0..total {
        let r = rng.gen_range(1..=16u64);
        let lo = q(rng.gen_range(-40..40), rng.gen_range(1..8));
        let hi = lo + q(rng.gen_range(1..30), rng.gen_range(1..8));
        let c = q(rng.gen_range(-60..60), r as i64);
        let p = AffineLatticeProblem::new(rng.gen_range(-12..13), rng.gen_range(1..12), c, r, Some(lo), Some(hi)).unwrap();
        let direct = scan(&p);
        let sols = solutions_in_interval(&p, None).unwrap();
        let solvable = lattice_solvable(&p, false).unwrap();
        if sols == direct && solvable == !direct.is_empty() {
            agree += 1;
        }
    }
    report(6, agree == total, &format!("{agree}/{total} bounded problems agree"));
}

#[test]
fn criterion_07_tree_vs_bruteforce() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = CurveShape { max_roots: 8, max_ram: 30 };
    let (mut total, mut agree) = (0, 0);
    while total < 500 {
        let curve = random_curve(&mut rng, &shape).unwrap();
        let tree = ClusterTree::build(&curve).unwrap();
        let roots: Vec<PuiseuxElement> = curve.roots().iter().map(|(r, _)| r.clone()).collect();
        let brute = clusters_bruteforce(&roots).unwrap();
        let built: BTreeSet<Vec<usize>> = tree.clusters().iter().map(|c| c.members.clone()).collect();
        total += 1;
        agree += usize::from(brute == built);
    }
    report(7, agree == total, &format!("{agree}/{total} trees equal the brute-force cluster family"));
}

#[test]
fn criterion_08_shifting() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let shape = CurveShape::default();
    let (mut checked, mut good) = (0, 0);
    let mut proper = 0;
    for _ in 0..300 {
        let curve = valid_random_curve(&mut rng, &shape);
        let tree = ClusterTree::build(&curve).unwrap();
        for cl in tree.clusters() {
            let Some(gamma) = cl.data.gamma.as_ref().filter(|_| cl.data.invariant) else {
                continue;
            };
            checked += 1;
            proper += usize::from(cl.members.len() < curve.roots().len());
            let integral = gamma.terms().all(|(e, _)| e.is_integer());
            let alpha = &curve.roots()[cl.members[0]].0;
            let inside = cl
                .members
                .iter()
                .all(|&i| gamma.sub(&curve.roots()[i].0).unwrap().valuation() >= cl.data.depth);
            let separated = (0..curve.roots().len()).filter(|i| !cl.members.contains(i)).all(|i| {
                let beta = &curve.roots()[i].0;
                let v = gamma.sub(beta).unwrap().valuation();
                v == alpha.sub(beta).unwrap().valuation() && v < cl.data.depth
            });
            good += usize::from(integral && inside && separated && cl.data.c.is_integer());
        }
    }
    report(
        8,
        checked == good && proper > 0,
        &format!("{good}/{checked} invariant clusters ({proper} proper) have gamma in K, separated, c_s integral"),
    );
}

fn audit(curve: &CurveSpec, result: &DegreeSetResult) -> Result<(), String> {
    for w in &result.witnesses {
        let lifted = curve.lift(w.x0.ctx()).map_err(|e| e.to_string())?;
        let vf = if curve.roots().len() <= 12 {
            lifted.evaluate_f(&w.x0).map_err(|e| e.to_string())?.valuation()
        } else {
            lifted.valuation_of_f(&w.x0).map_err(|e| e.to_string())?
        };
        let d = point_degree(curve.q(), w.x0.degree_over_base(), vf);
        if !w.verified || vf != w.vf || d != w.claimed_degree {
            return Err(format!("witness {} fails re-evaluation", w.x0.render()));
        }
    }
    for n in 1..=result.bound {
        if result.upper.member(n) {
            let m = result
                .members
                .iter()
                .find(|m| m.degree == n)
                .ok_or(format!("member {n} has no certificate"))?;
            let ok = match m.certificate {
                MemberCertificate::Witness { witness } => result.witnesses[witness].claimed_degree == n,
                MemberCertificate::MultipleOf { divisor, witness } => {
                    n % divisor == 0 && result.witnesses[witness].claimed_degree == divisor
                }
            };
            if !ok {
                return Err(format!("member {n} has a mismatched certificate"));
            }
        } else {
            let o = result
                .obstructions
                .iter()
                .find(|o| o.degree == n)
                .ok_or(format!("exclusion {n} has no obstruction"))?;
            for ro in &o.regions {
                let region = result.regions.iter().find(|r| r.cluster == ro.cluster).ok_or("unknown region")?;
                let fine = match ro.relative {
                    None => n % region.base_degree != 0,
                    Some(rel) => ro.rechecked && rel * region.base_degree == n && region.recheck_obstruction(rel),
                };
                if !fine {
                    return Err(format!("exclusion {n} in cluster {} not re-verified", ro.cluster));
                }
            }
            if o.regions.len() != result.regions.len() {
                return Err(format!("exclusion {n} misses a region"));
            }
        }
    }
    Ok(())
}

#[test]
fn criterion_09_certificate_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shape = CurveShape {
        max_roots: 10,
        max_ram: 12,
    };
    let mut curves = vec![example61()];
    for (qq, parts) in [(3u64, vec![2u64, 5]), (2, vec![1, 1, 3])] {
        curves.push(
            generate_family(&FamilyRequest {
                q: qq,
                parts,
                total_degree: None,
                p: None,
            })
            .unwrap()
            .curve,
        );
    }
    for _ in 0..150 {
        curves.push(valid_random_curve(&mut rng, &shape));
    }
    let (mut runs, mut sound, mut members, mut exclusions) = (0, 0, 0, 0);
    let mut first_bad = None;
    for curve in &curves {
        let result = compute_degree_set(curve, Some(60)).unwrap();
        runs += 1;
        members += result.members.len();
        exclusions += result.obstructions.len();
        match audit(curve, &result) {
            Ok(()) => sound += 1,
            Err(e) => {
                first_bad.get_or_insert(e);
            }
        }
    }
    report(
        9,
        sound == runs,
        &format!(
            "{sound}/{runs} runs fully certified ({members} members, {exclusions} exclusions){}",
            first_bad.map_or(String::new(), |b| format!("; {b}"))
        ),
    );
}

#[test]
fn criterion_10_baseline() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let shape = CurveShape {
        max_roots: 10,
        max_ram: 12,
    };
    let (mut runs, mut good) = (0, 0);
    for _ in 0..150 {
        let curve = valid_random_curve(&mut rng, &shape);
        let result = compute_degree_set(&curve, Some(60)).unwrap();
        runs += 1;
        good += usize::from(NaturalSet::progression(curve.q()).is_subset(&result.lower));

        let rational = PuiseuxElement::integer(curve.ctx(), 7 + rng.gen_range(0..5i64));
        let mut roots = curve.roots().to_vec();
        if !roots.iter().any(|(r, _)| *r == rational) {
            roots.push((rational, 1));
        }
        let with_root = CurveSpec::new("rooted", curve.q(), curve.leading().clone(), roots).unwrap();
        let result = compute_degree_set(&with_root, Some(60)).unwrap();
        runs += 1;
        good += usize::from(result.lower == NaturalSet::all() && result.upper == NaturalSet::all());
    }
    report(
        10,
        good == runs,
        &format!("{good}/{runs} runs: qN in lower, rational root gives N"),
    );
}
