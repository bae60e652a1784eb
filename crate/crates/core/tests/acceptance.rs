//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each;
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semproto::asd::{equivalent, merge, similarity, Asd};
use semproto::clevr::{class_rules, generate_clevr_hans3, GeneratorConfig};
use semproto::dataset::{content_hash, write_dataset, write_ground_truth};
use semproto::mining::{mine_ccds, MiningConfig};
use semproto::oracle::{
    oracle_check_ccd, oracle_coverage_opt, oracle_edit_distance, oracle_subsumes, AsdBounds,
    OracleBudget, RandomAsdGenerator,
};
use semproto::prototype::{edit_distance_with, UnmatchedCost};
use semproto::report::{run_pipeline, RunConfig, RunReport};
use semproto::selftest::{greedy_coverage, random_coverage_instance};
use semproto::Dataset;

const GENERATOR_SEED: u64 = 2024;
const SAMPLES_PER_CLASS: usize = 200;
const RUNTIME_LIMIT: Duration = Duration::from_secs(60);
const SIMILARITY_TOLERANCE: f64 = 1e-12;

struct Outcome {
    id: &'static str,
    title: &'static str,
    result: Result<String, String>,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct ClevrRun {
    dataset: Dataset,
    report: RunReport,
    report_bytes: Vec<u8>,
    elapsed: Duration,
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_semproto")
}

fn cli_run(dir: &Path, dataset: &Path, rules: &Path, parallelism: usize) -> Result<(Vec<u8>, Duration), String> {
    let out = dir.join(format!("report_p{parallelism}.json"));
    let started = Instant::now();
    let status = Command::new(bin())
        .args(["run", "--max-prototypes", "1", "--parallelism", &parallelism.to_string()])
        .arg("--dataset")
        .arg(dataset)
        .arg("--ground-truth")
        .arg(rules)
        .arg("--output")
        .arg(&out)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    let elapsed = started.elapsed();
    if !status.status.success() {
        return Err(format!(
            "run exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    Ok((std::fs::read(&out).map_err(|e| e.to_string())?, elapsed))
}

fn clevr_run(dir: &Path) -> Result<(ClevrRun, Vec<u8>), String> {
    let generated = generate_clevr_hans3(&GeneratorConfig {
        samples_per_class: SAMPLES_PER_CLASS,
        objects_per_scene: 3..=10,
        seed: GENERATOR_SEED,
        confounded: false,
    })
    .map_err(|e| e.to_string())?;
    let data_path = dir.join("clevr.jsonl");
    let rules_path = dir.join("clevr.rules.jsonl");
    write_dataset(&generated.dataset, &data_path).map_err(|e| e.to_string())?;
    write_ground_truth(&generated.ground_truth, &rules_path).map_err(|e| e.to_string())?;

    let (bytes_p1, elapsed) = cli_run(dir, &data_path, &rules_path, 1)?;
    let (bytes_p8, _) = cli_run(dir, &data_path, &rules_path, 8)?;
    let report = RunReport::from_json(std::str::from_utf8(&bytes_p1).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    // The library path must agree with the binary.
    let reloaded = semproto::load_dataset(&data_path).map_err(|e| e.to_string())?;
    let text = std::fs::read(&data_path).map_err(|e| e.to_string())?;
    let lib_report = run_pipeline(
        &reloaded,
        &content_hash(&text),
        &RunConfig {
            max_prototypes: Some(1),
            ..Default::default()
        },
        Some(&generated.ground_truth),
    )
    .map_err(|e| e.to_string())?;
    if lib_report.per_class != report.per_class {
        return Err("library and CLI reports differ".into());
    }

    Ok((
        ClevrRun {
            dataset: reloaded,
            report,
            report_bytes: bytes_p1,
            elapsed,
        },
        bytes_p8,
    ))
}

fn ac1_rule_recovery(run: &ClevrRun) -> Result<String, String> {
    let mut vocab = run.dataset.vocabulary.clone();
    for (label, rule) in class_rules() {
        let expected = vocab.asd(&rule).map_err(|e| e.to_string())?;
        let class = run
            .report
            .per_class
            .iter()
            .find(|c| c.class_label == label)
            .ok_or_else(|| format!("class {label} missing from report"))?;
        let top = class
            .selected
            .first()
            .ok_or_else(|| format!("class {label}: nothing selected"))?;
        let got = vocab.asd(&top.rule).map_err(|e| e.to_string())?;
        check(equivalent(&got, &expected), || {
            format!(
                "class {label}: top rule {} is not equivalent to {}",
                vocab.display_asd(&got),
                vocab.display_asd(&expected)
            )
        })?;
    }
    check(run.elapsed < RUNTIME_LIMIT, || {
        format!("run took {:?}, limit {:?}", run.elapsed, RUNTIME_LIMIT)
    })?;
    Ok(format!("3/3 classes recovered exactly; run took {:.2?}", run.elapsed))
}

fn ac2_prototype_minimality(run: &ClevrRun) -> Result<String, String> {
    let budget = OracleBudget {
        max_entities: 10,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED);
    let mut vocab = run.dataset.vocabulary.clone();
    let mut checked = 0;
    for class in &run.report.per_class {
        for proto in &class.prototypes {
            let rule_names = &class.selected[proto.rule_rank - 1].rule;
            let rule = vocab.asd(rule_names).map_err(|e| e.to_string())?;
            let winner = run.dataset.sample(&proto.sample_id).ok_or("prototype not in dataset")?;
            let winner_d = oracle_edit_distance(&rule, &winner.asd, UnmatchedCost::Attrs, &budget)
                .map_err(|e| e.to_string())?;
            check(winner_d == proto.distance.total, || {
                format!("{}: reported {} vs oracle {}", proto.sample_id, proto.distance.total, winner_d)
            })?;
            let mut covered: Vec<_> = run
                .dataset
                .samples()
                .iter()
                .filter(|s| s.label == class.class_label && oracle_subsumes(&rule, &s.asd))
                .collect();
            check(covered.len() == class.selected[proto.rule_rank - 1].coverage_count, || {
                "coverage count disagrees with a naive rescan".into()
            })?;
            covered.shuffle(&mut rng);
            for other in covered.iter().take(20) {
                let d = oracle_edit_distance(&rule, &other.asd, UnmatchedCost::Attrs, &budget)
                    .map_err(|e| e.to_string())?;
                check(winner_d <= d, || {
                    format!("{} (distance {d}) beats prototype {} ({winner_d})", other.id, proto.sample_id)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} covered samples checked against oracle distances"))
}

fn ac3_edit_distance_oracle() -> Result<String, String> {
    let budget = OracleBudget::default();
    let mut gen = RandomAsdGenerator::new(3, AsdBounds::default());
    let mut compared = 0;
    let mut infeasible = 0;
    for _ in 0..1000 {
        let (r, z) = gen.subsuming_pair(4, 6);
        check(r.len() <= 4 && z.len() <= 6, || "generator exceeded size bounds".into())?;
        for mode in [UnmatchedCost::Attrs, UnmatchedCost::Zero] {
            let solved = edit_distance_with(&r, &z, mode).map_err(|e| e.to_string())?;
            let oracle = oracle_edit_distance(&r, &z, mode, &budget).map_err(|e| e.to_string())?;
            check(solved.total == oracle, || {
                format!("{r:?} vs {z:?} ({mode}): solver {} oracle {oracle}", solved.total)
            })?;
            if !solved.feasible_injective {
                infeasible += 1;
            }
            compared += 1;
        }
    }
    Ok(format!("{compared}/{compared} equal ({infeasible} via the many-to-one fallback)"))
}

fn ac4_merge_msg() -> Result<String, String> {
    let mut gen = RandomAsdGenerator::new(4, AsdBounds::default());
    for _ in 0..10_000 {
        let (z1, z2) = (gen.asd(), gen.asd());
        let m = merge(&z1, &z2);
        check(oracle_subsumes(&m, &z1) && oracle_subsumes(&m, &z2), || {
            format!("merge({z1:?}, {z2:?}) does not subsume its inputs")
        })?;
        check(m.is_antichain(), || format!("merge({z1:?}, {z2:?}) is not an antichain"))?;
    }
    for _ in 0..10_000 {
        let (z1, z2) = (gen.asd(), gen.asd());
        let w = gen.common_generalization(&z1, &z2);
        check(oracle_subsumes(&w, &z1) && oracle_subsumes(&w, &z2), || {
            "common generalization construction is broken".into()
        })?;
        check(oracle_subsumes(&w, &merge(&z1, &z2)), || {
            format!("{w:?} subsumes {z1:?} and {z2:?} but not their merge")
        })?;
    }
    Ok("10000 pairs subsumed and antichain; 10000 triples below every common generalization".into())
}

fn ac5_soundness_completeness(run: &ClevrRun) -> Result<String, String> {
    let mut mined = 0;
    for label in run.dataset.labels() {
        let (pos, neg) = run.dataset.split_one_vs_rest(label);
        let ccds = mine_ccds(&pos, &neg, &MiningConfig::default()).map_err(|e| e.to_string())?;
        let negatives: Vec<Asd> = neg.iter().map(|s| s.asd.clone()).collect();
        let mut covered = BTreeSet::new();
        for ccd in &ccds {
            check(oracle_check_ccd(&ccd.asd, &negatives), || {
                format!("class {label}: mined rule describes a negative")
            })?;
            covered.extend(ccd.coverage.iter().cloned());
        }
        let all: BTreeSet<String> = pos.iter().map(|s| s.id.clone()).collect();
        check(covered == all, || {
            format!("class {label}: {} of {} positives covered", covered.len(), all.len())
        })?;
        mined += ccds.len();
    }
    Ok(format!("{mined} mined rules, 0 negatives described, 100% positives covered"))
}

fn ac6_greedy_bound() -> Result<String, String> {
    let budget = OracleBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let factor = 1.0 - (-1.0f64).exp();
    let mut optimal = 0;
    for _ in 0..200 {
        let (points, sets) = random_coverage_instance(&mut rng);
        for k in 1..=4 {
            let opt = oracle_coverage_opt(&sets, k, &budget).map_err(|e| e.to_string())?;
            let greedy = greedy_coverage(points, &sets, k);
            let bound = (factor * opt as f64).ceil() as usize;
            check(greedy >= bound, || format!("k={k}: greedy {greedy} < bound {bound} (OPT {opt})"))?;
            check(greedy <= opt, || "greedy beat the exhaustive optimum".into())?;
            if greedy == opt {
                optimal += 1;
            }
        }
    }
    Ok(format!("800 (instance, k) checks within bound; {optimal} reached OPT"))
}

fn ac7_similarity() -> Result<String, String> {
    let mut gen = RandomAsdGenerator::new(7, AsdBounds::default());
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (a, b) = (gen.asd(), gen.asd());
        let ab = similarity(&a, &b).map_err(|e| e.to_string())?;
        let ba = similarity(&b, &a).map_err(|e| e.to_string())?;
        let aa = similarity(&a, &a).map_err(|e| e.to_string())?;
        worst = worst.max((ab - ba).abs()).max((aa - 1.0).abs());
        check((ab - ba).abs() <= SIMILARITY_TOLERANCE, || format!("asymmetric: {ab} vs {ba}"))?;
        check((0.0..=1.0).contains(&ab), || format!("out of range: {ab}"))?;
        check((aa - 1.0).abs() <= SIMILARITY_TOLERANCE, || format!("self-similarity {aa}"))?;
    }
    Ok(format!("10000 pairs; worst deviation {worst:e}"))
}

fn ac8_determinism(run: &ClevrRun, parallel_bytes: &[u8]) -> Result<String, String> {
    check(run.report_bytes == parallel_bytes, || {
        "reports at parallelism 1 and 8 differ".into()
    })?;
    Ok(format!("{} bytes identical", run.report_bytes.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut outcomes = Vec::new();
    let clevr = clevr_run(dir.path());

    let mut with_run = |id, title, f: &dyn Fn(&ClevrRun, &[u8]) -> Result<String, String>| {
        let result = match &clevr {
            Ok((run, p8)) => f(run, p8),
            Err(e) => Err(format!("synthetic run failed: {e}")),
        };
        outcomes.push(Outcome { id, title, result });
    };
    with_run("AC1", "rule recovery on synthetic scenes", &|r, _| ac1_rule_recovery(r));
    with_run("AC2", "prototype minimality", &|r, _| ac2_prototype_minimality(r));
    with_run("AC5", "CCD soundness and completeness", &|r, _| ac5_soundness_completeness(r));
    with_run("AC8", "determinism across parallelism", &|r, p8| ac8_determinism(r, p8));
    outcomes.push(Outcome {
        id: "AC3",
        title: "edit distance equals exhaustive oracle",
        result: ac3_edit_distance_oracle(),
    });
    outcomes.push(Outcome {
        id: "AC4",
        title: "merge is the most specific generalization",
        result: ac4_merge_msg(),
    });
    outcomes.push(Outcome {
        id: "AC6",
        title: "greedy coverage bound",
        result: ac6_greedy_bound(),
    });
    outcomes.push(Outcome {
        id: "AC7",
        title: "similarity properties",
        result: ac7_similarity(),
    });
    outcomes.sort_by_key(|o| o.id);

    let mut failed = 0;
    for o in &outcomes {
        match &o.result {
            Ok(detail) => println!("PASS {} {}: {}", o.id, o.title, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {}", o.id, o.title, why);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
