//! Set edit distance between a CCD and a sample, and prototype search.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asd::{similarity, subsumes, Asd};
use crate::error::{Error, Result};
use crate::matching::min_cost_assignment;
use crate::mining::{ClassClusterDescription, Sample};

/// What a sample entity that no rule entity maps onto costs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnmatchedCost {
    /// Its attribute count.
    #[default]
    Attrs,
    Zero,
}

impl UnmatchedCost {
    fn of(self, attributes: usize) -> usize {
        match self {
            UnmatchedCost::Attrs => attributes,
            UnmatchedCost::Zero => 0,
        }
    }
}

impl FromStr for UnmatchedCost {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "attrs" => Ok(UnmatchedCost::Attrs),
            "zero" => Ok(UnmatchedCost::Zero),
            other => Err(Error::Config(format!(
                "unknown unmatched-cost mode {other:?} (expected attrs or zero)"
            ))),
        }
    }
}

impl fmt::Display for UnmatchedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnmatchedCost::Attrs => "attrs",
            UnmatchedCost::Zero => "zero",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub rule_entity: usize,
    pub sample_entity: usize,
    pub insertions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmatchedEntity {
    pub sample_entity: usize,
    pub cost: usize,
}

/// How a rule was turned into a sample: which sample entity witnesses each
/// rule entity, how many attributes were inserted, and what was left over.
/// Indices refer to canonical entity order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditDistanceBreakdown {
    pub matched_pairs: Vec<MatchedPair>,
    pub unmatched_sample_entities: Vec<UnmatchedEntity>,
    pub total: usize,
    /// False when no one-to-one matching exists and rule entities had to
    /// share witnesses.
    pub feasible_injective: bool,
}

/// Edit distance with unmatched sample entities costing their attribute count.
pub fn edit_distance(rule: &Asd, sample: &Asd) -> Result<EditDistanceBreakdown> {
    edit_distance_with(rule, sample, UnmatchedCost::Attrs)
}

pub fn edit_distance_with(
    rule: &Asd,
    sample: &Asd,
    unmatched: UnmatchedCost,
) -> Result<EditDistanceBreakdown> {
    if !subsumes(rule, sample) {
        return Err(Error::Precondition(
            "edit distance requires the rule to describe the sample".into(),
        ));
    }
    let rs = rule.entities();
    let zs = sample.entities();
    let weights: Vec<Vec<Option<i64>>> = rs
        .iter()
        .map(|r| {
            zs.iter()
                .map(|z| r.is_subset(z).then(|| z.difference_len(r) as i64))
                .collect()
        })
        .collect();
    let bonus: Vec<i64> = zs.iter().map(|z| unmatched.of(z.len()) as i64).collect();

    let (assignment, feasible_injective) = match min_cost_assignment(&weights, &bonus, false) {
        Some(a) => (a, true),
        None => (
            min_cost_assignment(&weights, &bonus, true)
                .ok_or_else(|| Error::Internal("subsumption without witnesses".into()))?,
            false,
        ),
    };

    let matched_pairs: Vec<MatchedPair> = assignment
        .columns
        .iter()
        .enumerate()
        .map(|(r, &z)| MatchedPair {
            rule_entity: r,
            sample_entity: z,
            insertions: zs[z].difference_len(&rs[r]),
        })
        .collect();
    let mut used = vec![false; zs.len()];
    for p in &matched_pairs {
        used[p.sample_entity] = true;
    }
    let unmatched_sample_entities: Vec<UnmatchedEntity> = zs
        .iter()
        .enumerate()
        .filter(|(j, _)| !used[*j])
        .map(|(j, z)| UnmatchedEntity {
            sample_entity: j,
            cost: unmatched.of(z.len()),
        })
        .collect();
    let total = matched_pairs.iter().map(|p| p.insertions).sum::<usize>()
        + unmatched_sample_entities.iter().map(|u| u.cost).sum::<usize>();

    Ok(EditDistanceBreakdown {
        matched_pairs,
        unmatched_sample_entities,
        total,
        feasible_injective,
    })
}

/// Distance used to rank the samples a CCD describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "lowercase")]
pub enum DistanceMetric {
    Edit { unmatched_cost: UnmatchedCost },
    /// `1 - similarity(rule, sample)`.
    Jaccard,
}

impl Default for DistanceMetric {
    fn default() -> Self {
        DistanceMetric::Edit {
            unmatched_cost: UnmatchedCost::Attrs,
        }
    }
}

impl DistanceMetric {
    pub fn name(&self) -> &'static str {
        match self {
            DistanceMetric::Edit { .. } => "edit",
            DistanceMetric::Jaccard => "jaccard",
        }
    }

    pub fn with_unmatched_cost(self, unmatched_cost: UnmatchedCost) -> Self {
        match self {
            DistanceMetric::Edit { .. } => DistanceMetric::Edit { unmatched_cost },
            DistanceMetric::Jaccard => DistanceMetric::Jaccard,
        }
    }

    fn unmatched_cost(&self) -> UnmatchedCost {
        match self {
            DistanceMetric::Edit { unmatched_cost } => *unmatched_cost,
            DistanceMetric::Jaccard => UnmatchedCost::Attrs,
        }
    }

    pub fn distance(&self, rule: &Asd, sample: &Asd) -> Result<f64> {
        match self {
            DistanceMetric::Edit { unmatched_cost } => {
                Ok(edit_distance_with(rule, sample, *unmatched_cost)?.total as f64)
            }
            DistanceMetric::Jaccard => Ok(1.0 - similarity(rule, sample)?),
        }
    }
}

/// Resolves a metric name (`edit` or `jaccard`).
pub fn distance_metric_select(name: &str) -> Result<DistanceMetric> {
    match name {
        "edit" => Ok(DistanceMetric::default()),
        "jaccard" => Ok(DistanceMetric::Jaccard),
        other => Err(Error::Config(format!(
            "unknown distance metric {other:?} (expected edit or jaccard)"
        ))),
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        distance_metric_select(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunnerUp {
    pub sample_id: String,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeRecord {
    pub ccd: ClassClusterDescription,
    pub sample_id: String,
    /// Edit-distance breakdown of the chosen sample, whatever the ranking metric.
    pub distance: EditDistanceBreakdown,
    /// Value of the ranking metric for the chosen sample.
    pub metric_value: f64,
    pub runners_up: Vec<RunnerUp>,
}

/// Picks the covered sample closest to the CCD; ties go to the smaller id.
pub fn find_prototype(
    ccd: &ClassClusterDescription,
    samples: &[Sample],
    metric: DistanceMetric,
    runners_up: usize,
) -> Result<PrototypeRecord> {
    if ccd.coverage.is_empty() {
        return Err(Error::Precondition("CCD covers no samples".into()));
    }
    let covered: Vec<&Sample> = samples
        .iter()
        .filter(|s| ccd.coverage.contains(&s.id))
        .collect();
    if covered.len() != ccd.coverage.len() {
        return Err(Error::Precondition(
            "sample list is missing samples covered by the CCD".into(),
        ));
    }

    let mut ranked = covered
        .iter()
        .map(|s| Ok((metric.distance(&ccd.asd, &s.asd)?, *s)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.1.id.cmp(&b.1.id))
    });

    let (metric_value, winner) = ranked[0];
    let distance = edit_distance_with(&ccd.asd, &winner.asd, metric.unmatched_cost())?;
    Ok(PrototypeRecord {
        ccd: ccd.clone(),
        sample_id: winner.id.clone(),
        distance,
        metric_value,
        runners_up: ranked[1..]
            .iter()
            .take(runners_up)
            .map(|(d, s)| RunnerUp {
                sample_id: s.id.clone(),
                distance: *d,
            })
            .collect(),
    })
}
