use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use degset::cluster_tree::ClusterTree;
use degset::congruence::{lattice_solvable, solutions_in_interval, AffineLatticeProblem};
use degset::curve_model::{parse_curve, validate_curve, CurveSpec};
use degset::degree_engine::{
    baseline_witness, compute_degree_set, construct_witness, default_bound, root_witness,
    DegreeSetResult, MemberCertificate, WitnessPoint,
};
use degset::family_gen::{generate_family, FamilyRequest};
use degset::natset::NaturalSet;
use degset::oracle::{c_via_min_poly_orbits, clusters_bruteforce, small_degree_search, SearchGrid};
use degset::report::{json_report, render_analysis, render_header, render_validation, render_witness};
use degset::sampling::{random_curve, random_point, CurveShape};
use degset::Error;

const VALIDATION: u8 = 1;
const USAGE: u8 = 2;
const SOUNDNESS: u8 = 3;

#[derive(Parser)]
#[command(name = "degset", version, about = "Degree sets of superelliptic curves y^q = F(x)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict, degree set and certificates for a curve file.
    Analyze {
        file: PathBuf,
        /// Enumeration bound for certificates.
        #[arg(long)]
        bound: Option<u64>,
        /// List the witness points.
        #[arg(long)]
        witnesses: bool,
        /// Also write a JSON report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print the cluster tree.
        #[arg(long)]
        tree: bool,
        /// Print the cluster tree in DOT format.
        #[arg(long)]
        dot: bool,
    },
    /// An explicit point of the given degree, or the reason none exists.
    Witness {
        file: PathBuf,
        #[arg(long)]
        degree: u64,
    },
    /// A curve with degree set qN ∪ n_1N ∪ ... ∪ n_kN.
    Generate {
        #[arg(long)]
        q: u64,
        /// Comma-separated parts n_1,...,n_k.
        #[arg(long, value_delimiter = ',', required = true)]
        parts: Vec<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-checks the engine against the brute-force oracles.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Soundness(_)) { SOUNDNESS } else { VALIDATION };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<CurveSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: USAGE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_curve(&text).map_err(|e| Failure {
        code: VALIDATION,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn analyze(
    file: &Path,
    bound: Option<u64>,
    witnesses: bool,
    json: Option<&Path>,
    tree: bool,
    dot: bool,
) -> Result<(), Failure> {
    let curve = load(file)?;
    let validation = validate_curve(&curve);
    print!("{}{}", render_header(&curve), render_validation(&validation));
    if tree || dot {
        let t = ClusterTree::build(&curve)?;
        if tree {
            print!("cluster tree:\n{}", t.render_ascii());
        }
        if dot {
            print!("{}", t.render_dot());
        }
    }
    let write_json = |result: Option<&DegreeSetResult>| -> Result<(), Failure> {
        if let Some(path) = json {
            let report = json_report(&curve, &validation, result);
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            write_file(path, &(text + "\n"))?;
        }
        Ok(())
    };
    if !validation.passed() {
        write_json(None)?;
        return Err(Failure {
            code: VALIDATION,
            message: "validation failed".into(),
        });
    }
    let result = compute_degree_set(&curve, bound)?;
    print!("{}", render_analysis(&result, witnesses));
    write_json(Some(&result))
}

/// A point of exactly degree m, preferring a direct construction.
fn find_witness(curve: &CurveSpec, result: &DegreeSetResult, m: u64) -> Result<Option<WitnessPoint>, Failure> {
    let tree = ClusterTree::build(curve)?;
    for r in &result.regions {
        if m.is_multiple_of(r.base_degree) {
            let rel = m / r.base_degree;
            if let Some(sub) = r.realizing(rel) {
                return Ok(Some(construct_witness(&tree, r, rel, sub)?));
            }
        }
    }
    let base = baseline_witness(curve)?;
    if base.point_degree == m {
        return Ok(Some(base));
    }
    for (i, (root, _)) in curve.roots().iter().enumerate() {
        if root.degree_over_base() == m {
            return Ok(Some(root_witness(curve, i)?));
        }
    }
    Ok(small_degree_search(curve, m, &SearchGrid::default())?)
}

fn witness(file: &Path, m: u64) -> Result<(), Failure> {
    if m == 0 {
        return Err(Failure {
            code: USAGE,
            message: "degree must be positive".into(),
        });
    }
    let curve = load(file)?;
    let validation = validate_curve(&curve);
    if !validation.passed() {
        print!("{}", render_validation(&validation));
        return Err(Failure {
            code: VALIDATION,
            message: "validation failed".into(),
        });
    }
    let probe = compute_degree_set(&curve, None)?;
    let bound = default_bound(&probe.regions).max(m);
    let result = if bound > probe.bound {
        compute_degree_set(&curve, Some(bound))?
    } else {
        probe
    };
    if !result.upper.member(m) {
        println!("no point of degree {m}");
        if let Some(o) = result.obstructions.iter().find(|o| o.degree == m) {
            for r in &o.regions {
                match r.relative {
                    None => println!("  cluster {}: base degree {} does not divide {m}", r.cluster, r.base_degree),
                    Some(rel) => {
                        let reasons = serde_json::to_string(&r.reasons).expect("reasons serialize");
                        println!("  cluster {}: r' = {rel}: {reasons}", r.cluster);
                    }
                }
            }
        }
        return Ok(());
    }
    match find_witness(&curve, &result, m)? {
        Some(w) => print!("{}", render_witness(&w)),
        None => {
            let member = result.members.iter().find(|x| x.degree == m);
            match member.map(|x| &x.certificate) {
                Some(MemberCertificate::MultipleOf { divisor, witness }) => {
                    println!("degree {m} is a multiple of {divisor}, which has the point");
                    print!("{}", render_witness(&result.witnesses[*witness]));
                }
                _ => println!("degree {m} lies in the region bound but no point was constructed"),
            }
        }
    }
    Ok(())
}

fn generate(q: u64, parts: Vec<u64>, p: Option<u64>, out: Option<&Path>) -> Result<(), Failure> {
    let family = generate_family(&FamilyRequest {
        q,
        parts: parts.clone(),
        total_degree: None,
        p,
    })
    .map_err(|e| Failure {
        code: USAGE,
        message: e.to_string(),
    })?;
    let mut components = vec![NaturalSet::progression(q)];
    components.extend(parts.iter().filter(|&&n| n > 1).map(|&n| NaturalSet::progression(n)));
    let expected = NaturalSet::render_union(&components);
    let a = family.a.map_or_else(|| "none".to_string(), |a| a.to_string());
    let text = format!(
        "# expected degree set: {expected}\n# c = {}, a = {a}\n{}",
        family.c,
        family.curve.render()
    );
    match out {
        Some(path) => {
            write_file(path, &text)?;
            println!("wrote {}", path.display());
            println!("expected degree set: {expected}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn check(name: &str, passed: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

fn selftest(seed: u64) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = true;

    let shape = CurveShape { max_roots: 8, max_ram: 12 };
    let (mut trees, mut tree_ok, mut c_checks, mut c_ok) = (0, 0, 0, 0);
    for _ in 0..100 {
        let curve = random_curve(&mut rng, &shape)?;
        let tree = ClusterTree::build(&curve)?;
        let roots: Vec<_> = curve.roots().iter().map(|(r, _)| r.clone()).collect();
        let brute = clusters_bruteforce(&roots)?;
        let built: std::collections::BTreeSet<Vec<usize>> =
            tree.clusters().iter().map(|c| c.members.clone()).collect();
        trees += 1;
        tree_ok += usize::from(brute == built);
        for (id, cl) in tree.clusters().iter().enumerate() {
            if cl.data.invariant && cl.data.gamma.is_some() {
                c_checks += 1;
                let expect = cl.data.c - curve.leading_valuation();
                c_ok += usize::from(c_via_min_poly_orbits(&tree, id)? == expect);
            }
        }
    }
    all &= check("cluster tree vs brute force", tree_ok == trees, format!("{tree_ok}/{trees}"));
    all &= check("c_s via orbit sums", c_ok == c_checks, format!("{c_ok}/{c_checks}"));

    let (mut evals, mut eval_ok) = (0, 0);
    for _ in 0..100 {
        let curve = random_curve(&mut rng, &shape)?;
        let x0 = random_point(&mut rng, &curve, 24)?;
        let lifted = curve.lift(x0.ctx())?;
        let tree = ClusterTree::build(&lifted)?;
        evals += 1;
        eval_ok += usize::from(tree.vf_by_formula(&x0)? == lifted.evaluate_f(&x0)?.valuation());
    }
    all &= check("v(F) formula vs evaluation", eval_ok == evals, format!("{eval_ok}/{evals}"));

    let mut agree = 0;
    let problems = 2000;
    for _ in 0..problems {
        use rand::Rng;
        let r = rng.gen_range(1..=12u64);
        let lo = num_rational::Rational64::new(rng.gen_range(-20..20), rng.gen_range(1..6));
        let hi = lo + num_rational::Rational64::new(rng.gen_range(1..20), rng.gen_range(1..6));
        let c = num_rational::Rational64::new(rng.gen_range(-30..30), r as i64);
        let p = AffineLatticeProblem::new(rng.gen_range(-9..10), rng.gen_range(1..8), c, r, Some(lo), Some(hi))?;
        let scan: Vec<i64> = (-2000..2000)
            .filter(|&n| {
                let x = num_rational::Rational64::new(n, r as i64);
                x > lo && x < hi && p.hits(n)
            })
            .collect();
        agree += usize::from(solutions_in_interval(&p, None)? == scan && lattice_solvable(&p, false)? == !scan.is_empty());
    }
    all &= check("lattice solver vs scan", agree == problems, format!("{agree}/{problems}"));

    let (mut runs, mut sound) = (0, 0);
    for _ in 0..20 {
        let curve = random_curve(&mut rng, &shape)?;
        let r = compute_degree_set(&curve, None)?;
        runs += 1;
        let witnesses_ok = r.witnesses.iter().all(|w| w.verified);
        let obstructions_ok = r.obstructions.iter().all(|o| o.regions.iter().all(|x| x.rechecked));
        sound += usize::from(witnesses_ok && obstructions_ok && r.lower.is_subset(&r.upper));
    }
    all &= check("certificates", sound == runs, format!("{sound}/{runs} runs"));

    if all {
        Ok(())
    } else {
        Err(Failure {
            code: SOUNDNESS,
            message: "selftest failed".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze {
            file,
            bound,
            witnesses,
            json,
            tree,
            dot,
        } => analyze(&file, bound, witnesses, json.as_deref(), tree, dot),
        Command::Witness { file, degree } => witness(&file, degree),
        Command::Generate { q, parts, p, out } => generate(q, parts, p, out.as_deref()),
        Command::Selftest { seed } => selftest(seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
