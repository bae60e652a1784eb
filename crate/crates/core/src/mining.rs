//! Class cluster description (CCD) mining and greedy selection.
//!
//! Candidate CCDs are grown from every positive sample by repeatedly merging
//! in the most similar remaining positive and keeping the merge only when it
//! still describes no negative. A small covering subset is then picked
//! greedily by marginal coverage.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asd::{merge, similarity_nonempty, subsumes, Asd};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub id: String,
    pub label: String,
    pub asd: Asd,
    /// Opaque pointer to the raw data (file path, URI).
    pub raw_ref: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassClusterDescription {
    pub asd: Asd,
    pub class_label: String,
    /// Ids of the positives described by `asd`.
    pub coverage: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Re-sort the remaining positives only after the description changes.
    /// `false` re-sorts after every merge attempt, as written in the
    /// original procedure; both give the same result.
    pub resort_on_accept_only: bool,
    /// Run one seed per distinct canonical ASD.
    pub dedupe_seeds: bool,
    pub max_seeds: Option<usize>,
    pub parallelism: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            resort_on_accept_only: true,
            dedupe_seeds: true,
            max_seeds: None,
            parallelism: 1,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

/// Inverted index from attribute to the negatives mentioning it, used to
/// skip negatives that cannot possibly be described by a candidate.
pub struct NegativeIndex<'a> {
    negatives: &'a [Sample],
    words: usize,
    by_attribute: Vec<Vec<u64>>,
}

impl<'a> NegativeIndex<'a> {
    pub fn new(negatives: &'a [Sample]) -> Self {
        let words = negatives.len().div_ceil(64);
        let mut by_attribute: Vec<Vec<u64>> = Vec::new();
        for (n, sample) in negatives.iter().enumerate() {
            for entity in sample.asd.entities() {
                for id in entity.ids() {
                    if by_attribute.len() <= id.index() {
                        by_attribute.resize_with(id.index() + 1, || vec![0; words]);
                    }
                    by_attribute[id.index()][n / 64] |= 1 << (n % 64);
                }
            }
        }
        NegativeIndex {
            negatives,
            words,
            by_attribute,
        }
    }

    /// True iff `candidate` describes none of the indexed negatives.
    pub fn describes_none(&self, candidate: &Asd) -> bool {
        let mut alive = vec![u64::MAX; self.words];
        if let Some(last) = alive.last_mut() {
            let tail = self.negatives.len() % 64;
            if tail != 0 {
                *last = (1 << tail) - 1;
            }
        }
        for entity in candidate.entities() {
            for id in entity.ids() {
                match self.by_attribute.get(id.index()) {
                    Some(bits) => {
                        for (a, b) in alive.iter_mut().zip(bits) {
                            *a &= b;
                        }
                    }
                    // no negative mentions this attribute at all
                    None => return true,
                }
            }
        }
        for (w, &bits) in alive.iter().enumerate() {
            let mut rest = bits;
            while rest != 0 {
                let n = w * 64 + rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if subsumes(candidate, &self.negatives[n].asd) {
                    return false;
                }
            }
        }
        true
    }
}

/// True iff `candidate` describes no sample in `negatives`.
pub fn check_ccd(candidate: &Asd, negatives: &[Sample]) -> bool {
    NegativeIndex::new(negatives).describes_none(candidate)
}

/// Descriptions a single seed run passes through: the seed's own (trimmed)
/// ASD followed by each accepted, description-changing merge.
#[derive(Clone, Debug)]
pub struct SeedTrace {
    pub seed_id: String,
    pub steps: Vec<Asd>,
}

impl SeedTrace {
    pub fn final_description(&self) -> &Asd {
        self.steps.last().expect("trace always holds the seed")
    }
}

fn sort_by_similarity(order: &mut [usize], description: &Asd, positives: &[Sample]) {
    let mut keyed: Vec<(f64, usize)> = order
        .iter()
        .map(|&i| (similarity_nonempty(description, &positives[i].asd), i))
        .collect();
    keyed.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| positives[a.1].id.cmp(&positives[b.1].id))
    });
    for (slot, (_, i)) in order.iter_mut().zip(keyed) {
        *slot = i;
    }
}

/// Runs the greedy merge loop from one seed. Returns `None` when the seed's
/// own description already covers a negative.
pub fn trace_seed(
    seed: usize,
    positives: &[Sample],
    index: &NegativeIndex<'_>,
    config: &MiningConfig,
) -> Option<SeedTrace> {
    let mut description = positives[seed].asd.trim();
    if description.is_empty() || !index.describes_none(&description) {
        return None;
    }
    let mut steps = vec![description.clone()];

    let mut queue: Vec<usize> = (0..positives.len()).filter(|&i| i != seed).collect();
    sort_by_similarity(&mut queue, &description, positives);

    let mut next = 0;
    while next < queue.len() {
        let candidate = &positives[queue[next]];
        next += 1;
        let ncd = merge(&description, &candidate.asd);
        let changed = ncd != description;
        if changed && index.describes_none(&ncd) {
            description = ncd;
            steps.push(description.clone());
            sort_by_similarity(&mut queue[next..], &description, positives);
        } else if !config.resort_on_accept_only {
            sort_by_similarity(&mut queue[next..], &description, positives);
        }
    }

    Some(SeedTrace {
        seed_id: positives[seed].id.clone(),
        steps,
    })
}

fn check_inputs(positives: &[Sample], negatives: &[Sample]) -> Result<String> {
    let first = positives
        .first()
        .ok_or_else(|| Error::Validation("no positive samples".into()))?;
    if let Some(other) = positives.iter().find(|s| s.label != first.label) {
        return Err(Error::Validation(format!(
            "positives mix labels {:?} ({}) and {:?} ({})",
            first.label, first.id, other.label, other.id
        )));
    }
    let ids: BTreeSet<&str> = positives.iter().map(|s| s.id.as_str()).collect();
    if let Some(clash) = negatives.iter().find(|s| ids.contains(s.id.as_str())) {
        return Err(Error::Validation(format!(
            "sample {} is both positive and negative",
            clash.id
        )));
    }
    Ok(first.label.clone())
}

fn seed_indices(positives: &[Sample], config: &MiningConfig) -> Vec<usize> {
    let mut seeds: Vec<usize> = if config.dedupe_seeds {
        let mut first_by_asd: BTreeMap<&Asd, usize> = BTreeMap::new();
        for (i, s) in positives.iter().enumerate() {
            first_by_asd.entry(&s.asd).or_insert(i);
        }
        let mut v: Vec<usize> = first_by_asd.into_values().collect();
        v.sort_unstable();
        v
    } else {
        (0..positives.len()).collect()
    };
    if let Some(cap) = config.max_seeds {
        seeds.truncate(cap);
    }
    seeds
}

/// Positives (by id) that `asd` describes.
pub fn coverage_of(asd: &Asd, positives: &[Sample]) -> BTreeSet<String> {
    positives
        .iter()
        .filter(|p| subsumes(asd, &p.asd))
        .map(|p| p.id.clone())
        .collect()
}

/// Mines candidate CCDs for the class shared by `positives`.
///
/// Output is deduplicated and sorted in canonical ASD order, and does not
/// depend on `config.parallelism`.
pub fn mine_ccds(
    positives: &[Sample],
    negatives: &[Sample],
    config: &MiningConfig,
) -> Result<Vec<ClassClusterDescription>> {
    config.validate()?;
    let label = check_inputs(positives, negatives)?;
    let index = NegativeIndex::new(negatives);
    let seeds = seed_indices(positives, config);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    let finals: Vec<Option<Asd>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                trace_seed(seed, positives, &index, config)
                    .map(|t| t.final_description().clone())
            })
            .collect()
    });

    let distinct: BTreeSet<Asd> = finals.into_iter().flatten().collect();
    Ok(distinct
        .into_iter()
        .filter(|asd| !(asd.is_top() && !negatives.is_empty()))
        .map(|asd| {
            let coverage = coverage_of(&asd, positives);
            ClassClusterDescription {
                asd,
                class_label: label.clone(),
                coverage,
            }
        })
        .filter(|ccd| !ccd.coverage.is_empty())
        .collect())
}

#[derive(Clone, Debug)]
pub struct SelectedCcd {
    pub ccd: ClassClusterDescription,
    /// Positives newly covered by this pick.
    pub marginal_gain: usize,
    /// Positives covered by this and all earlier picks.
    pub cumulative_coverage: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Selection {
    pub picks: Vec<SelectedCcd>,
    /// Positives no pick covers; non-empty when coverage stopped short.
    pub uncovered: Vec<String>,
}

/// Greedy set cover (`k = None`) or maximum coverage (`k = Some(_)`).
///
/// Ties on marginal gain go to the CCD with fewer attributes, then to the
/// canonically smaller ASD. Picking stops early once no candidate adds
/// coverage.
pub fn select_ccds(
    candidates: &[ClassClusterDescription],
    positives: &[Sample],
    k: Option<usize>,
) -> Selection {
    let universe: BTreeSet<&str> = positives.iter().map(|p| p.id.as_str()).collect();
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut used = vec![false; candidates.len()];
    let mut picks = Vec::new();
    let limit = k.unwrap_or(usize::MAX);

    while picks.len() < limit && covered.len() < universe.len() {
        let mut best: Option<(usize, usize)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if used[i] {
                continue;
            }
            let gain = c
                .coverage
                .iter()
                .filter(|id| universe.contains(id.as_str()) && !covered.contains(id.as_str()))
                .count();
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bg)) => {
                    let b = &candidates[bi];
                    gain.cmp(&bg)
                        .then_with(|| b.asd.total_attributes().cmp(&c.asd.total_attributes()))
                        .then_with(|| b.asd.cmp(&c.asd))
                        == Ordering::Greater
                }
            };
            if better {
                best = Some((i, gain));
            }
        }
        let Some((i, gain)) = best else { break };
        used[i] = true;
        for id in &candidates[i].coverage {
            if let Some(&u) = universe.get(id.as_str()) {
                covered.insert(u);
            }
        }
        picks.push(SelectedCcd {
            ccd: candidates[i].clone(),
            marginal_gain: gain,
            cumulative_coverage: covered.len(),
        });
    }

    let uncovered = if k.is_none() {
        universe
            .iter()
            .filter(|id| !covered.contains(*id))
            .map(|id| id.to_string())
            .collect()
    } else {
        Vec::new()
    };
    Selection { picks, uncovered }
}
