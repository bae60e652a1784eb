use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use semproto::clevr::{generate_clevr_hans3, GeneratorConfig};
use semproto::convert::{convert_attribute_matrix, Grouping, DEFAULT_THRESHOLD};
use semproto::dataset::{
    content_hash, load_ground_truth, parse_dataset, read_text, write_dataset, write_ground_truth,
};
use semproto::oracle::OracleBudget;
use semproto::prototype::{DistanceMetric, UnmatchedCost};
use semproto::report::{explain, run_pipeline, RunConfig, RunReport};
use semproto::selftest::run_selftest;
use semproto::{Error, MiningConfig, Result};

#[derive(Parser)]
#[command(name = "semproto", version, about = "Semantic prototypes from attribute set descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine rules, select them and find one prototype per rule, for every class.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long = "class")]
        class: Option<String>,
        /// Pick at most this many rules (and prototypes) per class. Default: cover every sample.
        #[arg(long)]
        max_prototypes: Option<usize>,
        #[arg(long, default_value = "edit")]
        distance: DistanceMetric,
        #[arg(long, default_value = "attrs")]
        unmatched_cost: UnmatchedCost,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Report path; a rendered `.md` is written next to it.
        #[arg(long)]
        output: PathBuf,
        /// Ground-truth sidecar to compare the top rule of each class against.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        runners_up: usize,
    },
    /// Explain why a sample is a prototype in a report.
    Explain {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        sample: String,
    },
    /// Check a dataset file and list every problem.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Generate a synthetic three-class scene dataset.
    Generate {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples_per_class: usize,
        #[arg(long, default_value_t = 3)]
        min_objects: usize,
        #[arg(long, default_value_t = 10)]
        max_objects: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        confounded: bool,
        /// Sidecar path for the class rules (default: `<output>.rules.jsonl`).
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
    /// Convert `sample, attribute, value[, label]` rows into a dataset.
    Convert {
        #[arg(long)]
        matrix: PathBuf,
        /// `sample_id, label` file, when the matrix has no label column.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value = "whole")]
        grouping: Grouping,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        output: PathBuf,
    },
    #[command(hide = true)]
    Selftest {
        /// Random cases per property.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn sidecar_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    output.with_file_name(format!("{stem}.rules.jsonl"))
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            dataset,
            class,
            max_prototypes,
            distance,
            unmatched_cost,
            seed,
            parallelism,
            output,
            ground_truth,
            runners_up,
        } => {
            let started = Instant::now();
            let text = read_text(&dataset)?;
            let (parsed, diagnostics) = parse_dataset(&text);
            let Some(parsed) = parsed else {
                for d in &diagnostics {
                    eprintln!("{}: {d}", dataset.display());
                }
                return Err(Error::Validation(format!("{} error(s) in dataset", diagnostics.len())));
            };
            let rules = ground_truth.map(load_ground_truth).transpose()?;
            let config = RunConfig {
                class_filter: class,
                max_prototypes,
                metric: distance.with_unmatched_cost(unmatched_cost),
                seed,
                runners_up,
                mining: MiningConfig {
                    parallelism,
                    ..Default::default()
                },
            };
            let report = run_pipeline(&parsed, &content_hash(text.as_bytes()), &config, rules.as_deref())?;
            let text_path = report.write(&output)?;
            for class in &report.per_class {
                let top = class.selected.first().map(|r| r.coverage_count).unwrap_or(0);
                println!(
                    "class {}: {} rule(s) selected from {} candidates, top rule covers {}/{}",
                    class.class_label,
                    class.selected.len(),
                    class.candidates_mined,
                    top,
                    class.num_positives
                );
                if let Some(gt) = &class.ground_truth {
                    println!(
                        "  expected rule {}",
                        if gt.top_rule_equivalent { "recovered" } else { "NOT recovered" }
                    );
                }
                for w in &class.warnings {
                    eprintln!("warning: class {}: {w}", class.class_label);
                }
            }
            println!("wrote {} and {}", output.display(), text_path.display());
            eprintln!("finished in {:.2}s", started.elapsed().as_secs_f64());
            Ok(ExitCode::SUCCESS)
        }
        Command::Explain { report, sample } => {
            let report = RunReport::load(report)?;
            print!("{}", explain(&report, &sample)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { dataset } => {
            let (_, diagnostics) = parse_dataset(&read_text(&dataset)?);
            for d in &diagnostics {
                println!("{}: {d}", dataset.display());
            }
            println!("{} errors", diagnostics.len());
            Ok(if diagnostics.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Generate {
            output,
            samples_per_class,
            min_objects,
            max_objects,
            seed,
            confounded,
            ground_truth,
        } => {
            let generated = generate_clevr_hans3(&GeneratorConfig {
                samples_per_class,
                objects_per_scene: min_objects..=max_objects,
                seed,
                confounded,
            })?;
            write_dataset(&generated.dataset, &output)?;
            let sidecar = ground_truth.unwrap_or_else(|| sidecar_path(&output));
            write_ground_truth(&generated.ground_truth, &sidecar)?;
            println!(
                "wrote {} samples to {} and rules to {}",
                generated.dataset.len(),
                output.display(),
                sidecar.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Convert {
            matrix,
            labels,
            grouping,
            threshold,
            output,
        } => {
            let dataset = convert_attribute_matrix(&matrix, labels.as_deref(), grouping, threshold)?;
            write_dataset(&dataset, &output)?;
            println!("wrote {} samples to {}", dataset.len(), output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { budget, seed } => {
            let outcomes = run_selftest(
                budget,
                &OracleBudget {
                    rng_seed: seed,
                    ..Default::default()
                },
            )?;
            for o in &outcomes {
                println!(
                    "{} {} ({} cases, {} failures)",
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.name,
                    o.cases,
                    o.failures
                );
            }
            Ok(if outcomes.iter().all(|o| o.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
