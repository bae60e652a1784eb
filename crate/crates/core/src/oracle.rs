//! Brute-force reference implementations.
//!
//! Deliberately slow and simple. Entities are converted to `BTreeSet`s and
//! every search is exhaustive, so nothing here shares logic with the
//! bitset/flow code it is used to check.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asd::{Asd, AttributeId, Entity};
use crate::error::{Error, Result};
use crate::prototype::UnmatchedCost;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_entities: usize,
    pub max_candidates: usize,
    pub rng_seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_entities: 6,
            max_candidates: 12,
            rng_seed: 0,
        }
    }
}

type Set = BTreeSet<u32>;

fn plain(asd: &Asd) -> Vec<Set> {
    asd.entities()
        .iter()
        .map(|e| e.ids().map(|id| id.0).collect())
        .collect()
}

fn describes(general: &[Set], specific: &[Set]) -> bool {
    general
        .iter()
        .all(|g| specific.iter().any(|s| g.is_subset(s)))
}

/// Naive scan: true iff `candidate` describes none of `negatives`.
pub fn oracle_check_ccd(candidate: &Asd, negatives: &[Asd]) -> bool {
    let c = plain(candidate);
    negatives.iter().all(|n| !describes(&c, &plain(n)))
}

/// Naive subsumption on plain sets.
pub fn oracle_subsumes(general: &Asd, specific: &Asd) -> bool {
    describes(&plain(general), &plain(specific))
}

/// Exhaustive minimum edit distance: the cheapest injective superset
/// mapping of rule entities onto sample entities, or the cheapest
/// many-to-one mapping when no injective one exists.
pub fn oracle_edit_distance(
    rule: &Asd,
    sample: &Asd,
    unmatched: UnmatchedCost,
    budget: &OracleBudget,
) -> Result<usize> {
    if rule.len() > budget.max_entities || sample.len() > budget.max_entities {
        return Err(Error::Budget(format!(
            "{} rule / {} sample entities exceed the cap of {}",
            rule.len(),
            sample.len(),
            budget.max_entities
        )));
    }
    let r = plain(rule);
    let z = plain(sample);
    if !describes(&r, &z) {
        return Err(Error::Precondition("rule does not describe sample".into()));
    }

    let mut best_injective: Option<usize> = None;
    let mut best_any: Option<usize> = None;
    let mut mapping = vec![0usize; r.len()];
    loop {
        if mapping.iter().zip(&r).all(|(&j, ri)| ri.is_subset(&z[j])) {
            let injective = mapping.iter().collect::<BTreeSet<_>>().len() == mapping.len();
            let insertions: usize = mapping
                .iter()
                .zip(&r)
                .map(|(&j, ri)| z[j].difference(ri).count())
                .sum();
            let leftover: usize = (0..z.len())
                .filter(|j| !mapping.contains(j))
                .map(|j| match unmatched {
                    UnmatchedCost::Attrs => z[j].len(),
                    UnmatchedCost::Zero => 0,
                })
                .sum();
            let cost = insertions + leftover;
            if injective {
                best_injective = Some(best_injective.map_or(cost, |b| b.min(cost)));
            }
            best_any = Some(best_any.map_or(cost, |b| b.min(cost)));
        }
        // next mapping in mixed-radix order
        let mut pos = 0;
        loop {
            if pos == mapping.len() {
                return best_injective
                    .or(best_any)
                    .ok_or_else(|| Error::Internal("no superset mapping".into()));
            }
            mapping[pos] += 1;
            if mapping[pos] < z.len() {
                break;
            }
            mapping[pos] = 0;
            pos += 1;
        }
    }
}

/// Largest union size reachable with at most `k` of `candidates`.
pub fn oracle_coverage_opt(
    candidates: &[BTreeSet<usize>],
    k: usize,
    budget: &OracleBudget,
) -> Result<usize> {
    if candidates.len() > budget.max_candidates {
        return Err(Error::Budget(format!(
            "{} candidates exceed the cap of {}",
            candidates.len(),
            budget.max_candidates
        )));
    }
    let mut best = 0;
    for mask in 0u32..(1 << candidates.len()) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let union: BTreeSet<usize> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        best = best.max(union.len());
    }
    Ok(best)
}

/// Size limits for randomly generated ASDs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AsdBounds {
    pub vocabulary: u32,
    pub max_entities: usize,
    pub max_entity_len: usize,
}

impl Default for AsdBounds {
    fn default() -> Self {
        AsdBounds {
            vocabulary: 8,
            max_entities: 4,
            max_entity_len: 3,
        }
    }
}

/// Deterministic stream of random ASDs over attribute ids `0..vocabulary`.
pub struct RandomAsdGenerator {
    rng: ChaCha8Rng,
    bounds: AsdBounds,
}

impl RandomAsdGenerator {
    pub fn new(seed: u64, bounds: AsdBounds) -> Self {
        assert!(
            bounds.vocabulary >= 1 && bounds.max_entities >= 1 && bounds.max_entity_len >= 1,
            "bounds must be positive"
        );
        RandomAsdGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bounds,
        }
    }

    pub fn bounds(&self) -> AsdBounds {
        self.bounds
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Non-empty entity of at most `max_entity_len` attributes.
    pub fn entity(&mut self) -> Entity {
        let len = self.rng.gen_range(1..=self.bounds.max_entity_len);
        Entity::from_ids((0..len).map(|_| AttributeId(self.rng.gen_range(0..self.bounds.vocabulary))))
    }

    pub fn asd(&mut self) -> Asd {
        let n = self.rng.gen_range(1..=self.bounds.max_entities);
        Asd::new((0..n).map(|_| self.entity()))
    }

    /// A `(general, specific)` pair where `general` subsumes `specific`, with
    /// `general` of at most `max_general` entities and `specific` of at most
    /// `max_specific`.
    pub fn subsuming_pair(&mut self, max_general: usize, max_specific: usize) -> (Asd, Asd) {
        let max_general = max_general.min(max_specific).max(1);
        let n = self.rng.gen_range(1..=max_general);
        let general = Asd::new((0..n).map(|_| self.entity()));
        self.widen(&general, max_specific)
    }

    /// Grows `general` into an ASD it subsumes: entities are widened, some
    /// are folded into a shared witness, and unrelated entities are added,
    /// up to `max_specific` entities in total.
    pub fn widen(&mut self, general: &Asd, max_specific: usize) -> (Asd, Asd) {
        let mut witnesses: Vec<Entity> = Vec::new();
        for g in general.entities() {
            if !witnesses.is_empty() && (witnesses.len() >= max_specific || self.rng.gen_bool(0.25)) {
                let i = self.rng.gen_range(0..witnesses.len());
                for id in g.ids() {
                    witnesses[i].insert(id);
                }
            } else {
                let mut w = g.clone();
                for _ in 0..self.rng.gen_range(0..=2) {
                    w.insert(AttributeId(self.rng.gen_range(0..self.bounds.vocabulary)));
                }
                witnesses.push(w);
            }
        }
        let room = max_specific.saturating_sub(witnesses.len());
        let extra = self.rng.gen_range(0..=room);
        for _ in 0..extra {
            let e = self.entity();
            witnesses.push(e);
        }
        (general.clone(), Asd::new(witnesses))
    }

    /// A random ASD subsuming both inputs, built from random subsets of
    /// pairwise entity intersections (computed on plain sets).
    pub fn common_generalization(&mut self, z1: &Asd, z2: &Asd) -> Asd {
        let a = plain(z1);
        let b = plain(z2);
        let n = self.rng.gen_range(1..=self.bounds.max_entities);
        Asd::new((0..n).map(|_| {
            let i = self.rng.gen_range(0..a.len());
            let j = self.rng.gen_range(0..b.len());
            let keep = self.rng.gen_range(0.3..1.0);
            Entity::from_ids(
                a[i].intersection(&b[j])
                    .filter(|_| self.rng.gen_bool(keep))
                    .map(|&id| AttributeId(id))
                    .collect::<Vec<_>>(),
            )
        }))
    }
}
