//! End-to-end pipeline (mine → select → prototype per class) and the run
//! report it produces, in JSON and rendered text.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asd::{equivalent, Asd};
use crate::dataset::{Dataset, GroundTruthRule};
use crate::error::{Error, Result};
use crate::mining::{mine_ccds, select_ccds, MiningConfig};
use crate::oracle::oracle_check_ccd;
use crate::prototype::{find_prototype, DistanceMetric, EditDistanceBreakdown, RunnerUp};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub class_filter: Option<String>,
    /// `None` covers every positive (set cover); `Some(k)` picks at most `k`
    /// CCDs per class (maximum coverage).
    pub max_prototypes: Option<usize>,
    pub metric: DistanceMetric,
    pub seed: u64,
    pub runners_up: usize,
    pub mining: MiningConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub run_metadata: RunMetadata,
    pub per_class: Vec<ClassReport>,
}

/// Run settings that can change the report. Parallelism and timing are left
/// out so that reports are byte-identical across machines and worker counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub dataset_hash: String,
    pub num_samples: usize,
    pub class_filter: Option<String>,
    pub max_prototypes: Option<usize>,
    pub distance: DistanceMetric,
    pub seed: u64,
    pub resort_on_accept_only: bool,
    pub dedupe_seeds: bool,
    pub max_seeds: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class_label: String,
    pub num_positives: usize,
    pub num_negatives: usize,
    pub candidates_mined: usize,
    pub selected: Vec<SelectedRule>,
    pub prototypes: Vec<PrototypeEntry>,
    pub uncovered: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectedRule {
    /// 1-based pick order.
    pub rank: usize,
    pub rule: Vec<Vec<String>>,
    pub attributes: usize,
    pub coverage_count: usize,
    pub coverage_fraction: f64,
    pub marginal_gain: usize,
    pub cumulative_coverage: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrototypeEntry {
    /// Rank of the selected rule this prototype belongs to.
    pub rule_rank: usize,
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_ref: Option<String>,
    pub sample_asd: Vec<Vec<String>>,
    pub metric_value: f64,
    pub distance: EditDistanceBreakdown,
    pub runners_up: Vec<RunnerUp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthCheck {
    pub expected_rule: Vec<Vec<String>>,
    /// Whether the first selected rule and the expected rule subsume each other.
    pub top_rule_equivalent: bool,
}

/// Runs the pipeline one-vs-rest over every class (or just `class_filter`).
pub fn run_pipeline(
    dataset: &Dataset,
    dataset_hash: &str,
    config: &RunConfig,
    ground_truth: Option<&[GroundTruthRule]>,
) -> Result<RunReport> {
    config.mining.validate()?;
    let labels: Vec<String> = match &config.class_filter {
        Some(label) => {
            if !dataset.label_index().contains_key(label) {
                return Err(Error::Validation(format!(
                    "class {label:?} does not occur in the dataset"
                )));
            }
            vec![label.clone()]
        }
        None => dataset.labels().map(str::to_owned).collect(),
    };

    let mut vocab = dataset.vocabulary.clone();
    let mut per_class = Vec::with_capacity(labels.len());
    for label in labels {
        let (positives, negatives) = dataset.split_one_vs_rest(&label);
        let candidates = mine_ccds(&positives, &negatives, &config.mining)?;
        let selection = select_ccds(&candidates, &positives, config.max_prototypes);

        let negative_asds: Vec<Asd> = negatives.iter().map(|s| s.asd.clone()).collect();
        let mut selected = Vec::with_capacity(selection.picks.len());
        let mut prototypes = Vec::with_capacity(selection.picks.len());
        for (i, pick) in selection.picks.iter().enumerate() {
            if !oracle_check_ccd(&pick.ccd.asd, &negative_asds) {
                return Err(Error::Internal(format!(
                    "selected rule for class {label:?} describes a negative sample"
                )));
            }
            let rank = i + 1;
            selected.push(SelectedRule {
                rank,
                rule: vocab.asd_names(&pick.ccd.asd),
                attributes: pick.ccd.asd.total_attributes(),
                coverage_count: pick.ccd.coverage.len(),
                coverage_fraction: pick.ccd.coverage.len() as f64 / positives.len() as f64,
                marginal_gain: pick.marginal_gain,
                cumulative_coverage: pick.cumulative_coverage,
            });
            let record = find_prototype(&pick.ccd, &positives, config.metric, config.runners_up)?;
            let sample = positives
                .iter()
                .find(|s| s.id == record.sample_id)
                .expect("prototype comes from the positives");
            prototypes.push(PrototypeEntry {
                rule_rank: rank,
                sample_id: record.sample_id,
                sample_ref: sample.raw_ref.clone(),
                sample_asd: vocab.asd_names(&sample.asd),
                metric_value: record.metric_value,
                distance: record.distance,
                runners_up: record.runners_up,
            });
        }

        let warnings = if selection.uncovered.is_empty() {
            Vec::new()
        } else {
            vec![format!(
                "{} positive sample(s) are not covered by any sound rule",
                selection.uncovered.len()
            )]
        };
        let ground_truth = match ground_truth.and_then(|rules| rules.iter().find(|r| r.label == label)) {
            Some(expected) => {
                let expected_asd = vocab.asd(&expected.rule)?;
                Some(GroundTruthCheck {
                    expected_rule: vocab.asd_names(&expected_asd),
                    top_rule_equivalent: selection
                        .picks
                        .first()
                        .is_some_and(|p| equivalent(&p.ccd.asd, &expected_asd)),
                })
            }
            None => None,
        };

        per_class.push(ClassReport {
            class_label: label,
            num_positives: positives.len(),
            num_negatives: negatives.len(),
            candidates_mined: candidates.len(),
            selected,
            prototypes,
            uncovered: selection.uncovered,
            warnings,
            ground_truth,
        });
    }

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        run_metadata: RunMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            dataset_hash: dataset_hash.to_owned(),
            num_samples: dataset.len(),
            class_filter: config.class_filter.clone(),
            max_prototypes: config.max_prototypes,
            distance: config.metric,
            seed: config.seed,
            resort_on_accept_only: config.mining.resort_on_accept_only,
            dedupe_seeds: config.mining.dedupe_seeds,
            max_seeds: config.mining.max_seeds,
        },
        per_class,
    })
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "report schema version {} is not supported (expected {SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    /// Writes the JSON report to `path` and the rendered text next to it
    /// (same name, `.md` extension). Returns the text path.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))?;
        let text_path = path.with_extension("md");
        fs::write(&text_path, render_markdown(self)).map_err(|e| Error::io(&text_path, e))?;
        Ok(text_path)
    }

    fn find(&self, sample_id: &str) -> Vec<(&ClassReport, &SelectedRule, &PrototypeEntry)> {
        let mut hits = Vec::new();
        for class in &self.per_class {
            for proto in class.prototypes.iter().filter(|p| p.sample_id == sample_id) {
                if let Some(rule) = class.selected.iter().find(|r| r.rank == proto.rule_rank) {
                    hits.push((class, rule, proto));
                }
            }
        }
        hits
    }
}

fn entity_text(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

fn asd_text(asd: &[Vec<String>]) -> String {
    let parts: Vec<String> = asd.iter().map(|e| entity_text(e)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn extra_attributes(rule_entity: &[String], sample_entity: &[String]) -> Vec<String> {
    sample_entity
        .iter()
        .filter(|a| !rule_entity.contains(a))
        .cloned()
        .collect()
}

fn render_explanation(
    out: &mut String,
    class: &ClassReport,
    rule: &SelectedRule,
    proto: &PrototypeEntry,
) {
    let d = &proto.distance;
    let _ = writeln!(
        out,
        "Sample {} is a prototype of class {}.",
        proto.sample_id, class.class_label
    );
    if let Some(r) = &proto.sample_ref {
        let _ = writeln!(out, "Raw data: {r}");
    }
    let _ = writeln!(
        out,
        "Rule #{}: IF a data point is described by {} THEN it belongs to class {}.",
        rule.rank,
        asd_text(&rule.rule),
        class.class_label
    );
    let _ = writeln!(
        out,
        "Coverage: {} of {} class samples ({:.1}%), {} newly covered at this rank.",
        rule.coverage_count,
        class.num_positives,
        100.0 * rule.coverage_fraction,
        rule.marginal_gain
    );
    let _ = writeln!(out, "Sample description: {}", asd_text(&proto.sample_asd));
    let _ = writeln!(out, "Matching:");
    for pair in &d.matched_pairs {
        let r = &rule.rule[pair.rule_entity];
        let z = &proto.sample_asd[pair.sample_entity];
        let extra = extra_attributes(r, z);
        let tail = if extra.is_empty() {
            "exact match".to_owned()
        } else {
            format!("extra attributes: {}", extra.join(", "))
        };
        let _ = writeln!(
            out,
            "  rule entity {} is witnessed by {} ({tail})",
            entity_text(r),
            entity_text(z)
        );
    }
    for u in &d.unmatched_sample_entities {
        let _ = writeln!(
            out,
            "  unrelated entity {} (cost {})",
            entity_text(&proto.sample_asd[u.sample_entity]),
            u.cost
        );
    }
    if !d.feasible_injective {
        let _ = writeln!(
            out,
            "  note: no one-to-one matching exists; some rule entities share a witness."
        );
    }
    if d.total == 0 {
        let _ = writeln!(out, "Edit distance: 0 (no redundant attributes).");
    } else {
        let _ = writeln!(out, "Edit distance: {}.", d.total);
    }
}

/// "Why is this sample a prototype?" for every rule it is a prototype of.
pub fn explain(report: &RunReport, sample_id: &str) -> Result<String> {
    let hits = report.find(sample_id);
    if hits.is_empty() {
        return Err(Error::Validation(format!(
            "sample {sample_id:?} is not a prototype in this report"
        )));
    }
    let mut out = String::new();
    for (i, (class, rule, proto)) in hits.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        render_explanation(&mut out, class, rule, proto);
    }
    Ok(out)
}

pub fn render_markdown(report: &RunReport) -> String {
    let mut out = String::new();
    let meta = &report.run_metadata;
    let _ = writeln!(out, "# Semantic prototype report\n");
    let _ = writeln!(
        out,
        "- samples: {}\n- dataset sha256: `{}`\n- distance: {}\n- max prototypes per class: {}\n",
        meta.num_samples,
        meta.dataset_hash,
        meta.distance.name(),
        meta.max_prototypes
            .map_or_else(|| "cover all".to_owned(), |k| k.to_string())
    );
    for class in &report.per_class {
        let _ = writeln!(out, "## Class {}\n", class.class_label);
        let _ = writeln!(
            out,
            "{} positives, {} negatives, {} candidate rules mined.\n",
            class.num_positives, class.num_negatives, class.candidates_mined
        );
        if class.selected.is_empty() {
            let _ = writeln!(out, "No rules selected.\n");
        }
        for rule in &class.selected {
            let _ = writeln!(
                out,
                "{}. `{}` covers {}/{} ({:.1}%)",
                rule.rank,
                asd_text(&rule.rule),
                rule.coverage_count,
                class.num_positives,
                100.0 * rule.coverage_fraction
            );
        }
        if !class.selected.is_empty() {
            out.push('\n');
        }
        if let Some(gt) = &class.ground_truth {
            let _ = writeln!(
                out,
                "Expected rule `{}`: {}\n",
                asd_text(&gt.expected_rule),
                if gt.top_rule_equivalent { "recovered" } else { "NOT recovered" }
            );
        }
        for proto in &class.prototypes {
            let rule = class
                .selected
                .iter()
                .find(|r| r.rank == proto.rule_rank)
                .expect("prototype rules are selected");
            let _ = writeln!(out, "```text");
            render_explanation(&mut out, class, rule, proto);
            let _ = writeln!(out, "```\n");
        }
        for w in &class.warnings {
            let _ = writeln!(out, "> warning: {w}\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_dataset;

    const DATA: &str = r#"{"id":"d1","label":"pos","asd":[["Large","Cube"],["Small","Sphere"]]}
{"id":"d2","label":"pos","asd":[["Large","Cube"],["Large","Cylinder"]]}
{"id":"n1","label":"neg","asd":[["Small","Cube"],["Small","Sphere"]]}
{"id":"n2","label":"neg","asd":[["Large","Cylinder"]]}
"#;

    fn report(config: &RunConfig) -> RunReport {
        let ds = parse_dataset(DATA).0.unwrap();
        run_pipeline(&ds, "hash", config, None).unwrap()
    }

    #[test]
    fn toy_report_and_explanation() {
        let r = report(&RunConfig::default());
        assert_eq!(r.per_class.len(), 2);
        let pos = r.per_class.iter().find(|c| c.class_label == "pos").unwrap();
        assert_eq!(pos.selected[0].rule, vec![vec!["Large".to_string(), "Cube".to_string()]]);
        // d1 and d2 both sit at distance 2; the smaller id wins
        assert_eq!(pos.prototypes[0].sample_id, "d1");
        assert_eq!(pos.prototypes[0].distance.total, 2);
        assert_eq!(pos.selected[0].coverage_fraction, 1.0);

        let text = explain(&r, "d1").unwrap();
        assert!(text.contains("IF a data point is described by {{Large, Cube}} THEN it belongs to class pos"));
        assert!(text.contains("unrelated entity {Small, Sphere} (cost 2)"));
        assert!(explain(&r, "nope").is_err());
        assert!(explain(&r, "d2").is_err());
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn zero_k_and_missing_class() {
        let r = report(&RunConfig {
            max_prototypes: Some(0),
            ..Default::default()
        });
        assert!(r.per_class.iter().all(|c| c.selected.is_empty() && c.prototypes.is_empty()));
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);

        let ds = parse_dataset(DATA).0.unwrap();
        let cfg = RunConfig {
            class_filter: Some("absent".into()),
            ..Default::default()
        };
        let err = run_pipeline(&ds, "h", &cfg, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn zero_distance_says_no_redundancy() {
        let data = r#"{"id":"a","label":"x","asd":[["P","Q"]]}
{"id":"b","label":"y","asd":[["R"]]}
"#;
        let ds = parse_dataset(data).0.unwrap();
        let r = run_pipeline(&ds, "h", &RunConfig::default(), None).unwrap();
        assert!(explain(&r, "a").unwrap().contains("no redundant attributes"));
    }
}
