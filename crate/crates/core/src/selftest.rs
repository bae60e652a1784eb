//! Oracle-backed property checks that can be run from the command line.

use std::collections::BTreeSet;

use rand::Rng;

use crate::asd::{merge, similarity, subsumes, Asd, AttributeId, Entity};
use crate::error::Result;
use crate::mining::{select_ccds, ClassClusterDescription, Sample};
use crate::oracle::{
    oracle_coverage_opt, oracle_edit_distance, oracle_subsumes, AsdBounds, OracleBudget,
    RandomAsdGenerator,
};
use crate::prototype::{edit_distance_with, UnmatchedCost};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfTestOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl SelfTestOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Solver vs exhaustive oracle on random subsuming pairs, both unmatched-cost modes.
pub fn check_edit_distance(cases: usize, budget: &OracleBudget) -> Result<SelfTestOutcome> {
    let mut gen = RandomAsdGenerator::new(budget.rng_seed, AsdBounds::default());
    let mut failures = 0;
    for _ in 0..cases {
        let (r, z) = gen.subsuming_pair(4, budget.max_entities);
        for mode in [UnmatchedCost::Attrs, UnmatchedCost::Zero] {
            let solver = edit_distance_with(&r, &z, mode)?.total;
            let oracle = oracle_edit_distance(&r, &z, mode, budget)?;
            if solver != oracle {
                failures += 1;
            }
        }
    }
    Ok(SelfTestOutcome {
        name: "edit distance matches exhaustive oracle",
        cases: cases * 2,
        failures,
    })
}

/// Merge subsumes both inputs, is below every common generalization, and is
/// an antichain.
pub fn check_merge(cases: usize, budget: &OracleBudget) -> SelfTestOutcome {
    let mut gen = RandomAsdGenerator::new(budget.rng_seed ^ 0x6d65_7267, AsdBounds::default());
    let mut failures = 0;
    for _ in 0..cases {
        let z1 = gen.asd();
        let z2 = gen.asd();
        let w = gen.common_generalization(&z1, &z2);
        let m = merge(&z1, &z2);
        let ok = oracle_subsumes(&m, &z1)
            && oracle_subsumes(&m, &z2)
            && m.is_antichain()
            && oracle_subsumes(&w, &m);
        if !ok {
            failures += 1;
        }
    }
    SelfTestOutcome {
        name: "merge is the most specific generalization",
        cases,
        failures,
    }
}

pub fn check_similarity(cases: usize, budget: &OracleBudget) -> Result<SelfTestOutcome> {
    let mut gen = RandomAsdGenerator::new(budget.rng_seed ^ 0x73_696d, AsdBounds::default());
    let mut failures = 0;
    for _ in 0..cases {
        let a = gen.asd();
        let b = gen.asd();
        let ab = similarity(&a, &b)?;
        let ba = similarity(&b, &a)?;
        let aa = similarity(&a, &a)?;
        if (ab - ba).abs() > 1e-12 || !(0.0..=1.0).contains(&ab) || (aa - 1.0).abs() > 1e-12 {
            failures += 1;
        }
    }
    Ok(SelfTestOutcome {
        name: "similarity is symmetric, bounded, reflexive",
        cases,
        failures,
    })
}

/// Random max-coverage instance: up to 12 candidate sets over up to 20 points.
pub fn random_coverage_instance(rng: &mut impl Rng) -> (usize, Vec<BTreeSet<usize>>) {
    let points = rng.gen_range(1..=20);
    let count = rng.gen_range(1..=12);
    let sets = (0..count)
        .map(|_| {
            let density = rng.gen_range(0.05..0.5);
            (0..points).filter(|_| rng.gen_bool(density)).collect()
        })
        .collect();
    (points, sets)
}

/// Runs greedy selection on bare coverage sets.
pub fn greedy_coverage(points: usize, sets: &[BTreeSet<usize>], k: usize) -> usize {
    let positives: Vec<Sample> = (0..points)
        .map(|p| Sample {
            id: format!("p{p:02}"),
            label: "c".into(),
            asd: Default::default(),
            raw_ref: None,
        })
        .collect();
    let candidates: Vec<ClassClusterDescription> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| ClassClusterDescription {
            asd: Asd::new([Entity::from_ids([AttributeId(i as u32)])]),
            class_label: "c".into(),
            coverage: s.iter().map(|p| format!("p{p:02}")).collect(),
        })
        .collect();
    select_ccds(&candidates, &positives, Some(k))
        .picks
        .last()
        .map_or(0, |p| p.cumulative_coverage)
}

/// Greedy max coverage reaches `⌈(1 - 1/e) · OPT⌉` on random instances.
pub fn check_greedy_bound(instances: usize, budget: &OracleBudget) -> Result<SelfTestOutcome> {
    let mut gen = RandomAsdGenerator::new(budget.rng_seed ^ 0x636f_76, AsdBounds::default());
    let factor = 1.0 - (-1.0f64).exp();
    let mut failures = 0;
    for _ in 0..instances {
        let (points, sets) = random_coverage_instance(gen.rng());
        let k = gen.rng().gen_range(1..=4);
        let opt = oracle_coverage_opt(&sets, k, budget)?;
        if greedy_coverage(points, &sets, k) < (factor * opt as f64).ceil() as usize {
            failures += 1;
        }
    }
    Ok(SelfTestOutcome {
        name: "greedy coverage within (1 - 1/e) of optimum",
        cases: instances,
        failures,
    })
}

/// Every property at `cases` random cases each.
pub fn run_selftest(cases: usize, budget: &OracleBudget) -> Result<Vec<SelfTestOutcome>> {
    Ok(vec![
        check_edit_distance(cases, budget)?,
        check_merge(cases, budget),
        check_similarity(cases, budget)?,
        check_greedy_bound(cases, budget)?,
        check_subsumption_laws(cases, budget),
    ])
}

pub fn check_subsumption_laws(cases: usize, budget: &OracleBudget) -> SelfTestOutcome {
    let mut gen = RandomAsdGenerator::new(budget.rng_seed ^ 0x7375_62, AsdBounds::default());
    let mut failures = 0;
    for _ in 0..cases {
        let (a, b) = gen.subsuming_pair(3, 4);
        let (_, c) = gen.widen(&b, 6);
        let d = gen.asd();
        let reflexive = subsumes(&a, &a) && subsumes(&d, &d);
        let transitive = subsumes(&a, &b) && subsumes(&b, &c) && subsumes(&a, &c);
        let agrees = subsumes(&d, &c) == oracle_subsumes(&d, &c);
        if !(reflexive && transitive && agrees) {
            failures += 1;
        }
    }
    SelfTestOutcome {
        name: "subsumption is reflexive and transitive",
        cases,
        failures,
    }
}
