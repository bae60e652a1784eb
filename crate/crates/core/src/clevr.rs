//! Synthetic CLEVR-Hans3-style scenes with known class rules.
//!
//! Every scene is a set of objects, each described by size, material, shape
//! and color. A class-`c` scene contains the objects its rule requires, padded
//! with uniformly drawn objects, and is redrawn until it satisfies neither of
//! the other two rules.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asd::{subsumes, Asd, Entity, Vocabulary};
use crate::dataset::{Dataset, GroundTruthRule};
use crate::error::{Error, Result};
use crate::mining::Sample;

pub const SIZES: [&str; 2] = ["Small", "Large"];
pub const MATERIALS: [&str; 2] = ["Metal", "Rubber"];
pub const SHAPES: [&str; 3] = ["Cube", "Sphere", "Cylinder"];
pub const COLORS: [&str; 8] = [
    "Gray", "Red", "Blue", "Green", "Brown", "Purple", "Cyan", "Yellow",
];

pub const CLASS_LABELS: [&str; 3] = ["1", "2", "3"];

/// Attempts per scene before giving up.
const REJECTION_BUDGET: usize = 10_000;

/// The three class rules as attribute-name lists.
pub fn class_rules() -> [(&'static str, Vec<Vec<&'static str>>); 3] {
    [
        ("1", vec![vec!["Large", "Cube"], vec!["Large", "Cylinder"]]),
        (
            "2",
            vec![vec!["Small", "Metal", "Cube"], vec!["Small", "Sphere"]],
        ),
        (
            "3",
            vec![vec!["Large", "Blue", "Sphere"], vec!["Small", "Yellow", "Sphere"]],
        ),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub samples_per_class: usize,
    pub objects_per_scene: RangeInclusive<usize>,
    pub seed: u64,
    /// Pin an extra attribute on the required objects of classes 1 and 2
    /// (gray large cube, metal small sphere), mimicking the confounded
    /// training split.
    pub confounded: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            samples_per_class: 200,
            objects_per_scene: 3..=10,
            seed: 0,
            confounded: false,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_class == 0 {
            return Err(Error::Config("samples per class must be at least 1".into()));
        }
        if self.objects_per_scene.is_empty() {
            return Err(Error::Config("object count range is empty".into()));
        }
        if *self.objects_per_scene.end() < 2 {
            return Err(Error::Config(
                "scenes need room for the two objects every class rule requires".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedDataset {
    pub dataset: Dataset,
    pub ground_truth: Vec<GroundTruthRule>,
}

#[derive(Clone, Copy)]
struct Object {
    size: &'static str,
    material: &'static str,
    shape: &'static str,
    color: &'static str,
}

impl Object {
    fn random(rng: &mut impl Rng) -> Self {
        Object {
            size: SIZES[rng.gen_range(0..SIZES.len())],
            material: MATERIALS[rng.gen_range(0..MATERIALS.len())],
            shape: SHAPES[rng.gen_range(0..SHAPES.len())],
            color: COLORS[rng.gen_range(0..COLORS.len())],
        }
    }

    fn entity(&self, vocab: &Vocabulary) -> Entity {
        Entity::from_ids(
            [self.size, self.material, self.shape, self.color]
                .iter()
                .map(|n| vocab.get(n).expect("axis names are pre-interned")),
        )
    }
}

fn required_objects(label: &str, confounded: bool, rng: &mut impl Rng) -> [Object; 2] {
    let mut a = Object::random(rng);
    let mut b = Object::random(rng);
    match label {
        "1" => {
            (a.size, a.shape) = ("Large", "Cube");
            (b.size, b.shape) = ("Large", "Cylinder");
            if confounded {
                a.color = "Gray";
            }
        }
        "2" => {
            (a.size, a.material, a.shape) = ("Small", "Metal", "Cube");
            (b.size, b.shape) = ("Small", "Sphere");
            if confounded {
                b.material = "Metal";
            }
        }
        _ => {
            (a.size, a.color, a.shape) = ("Large", "Blue", "Sphere");
            (b.size, b.color, b.shape) = ("Small", "Yellow", "Sphere");
        }
    }
    [a, b]
}

/// Generates a labelled scene dataset plus its ground-truth rules.
/// Deterministic in `config.seed`.
pub fn generate_clevr_hans3(config: &GeneratorConfig) -> Result<GeneratedDataset> {
    config.validate()?;
    let mut vocab = Vocabulary::new();
    for name in SIZES.iter().chain(&MATERIALS).chain(&SHAPES).chain(&COLORS) {
        vocab.intern(name)?;
    }
    let rules: Vec<(&str, Asd)> = class_rules()
        .iter()
        .map(|(label, rule)| Ok((*label, vocab.asd(rule)?)))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let min_objects = (*config.objects_per_scene.start()).max(2);
    let max_objects = *config.objects_per_scene.end();
    let mut samples = Vec::with_capacity(config.samples_per_class * CLASS_LABELS.len());

    for label in CLASS_LABELS {
        for i in 0..config.samples_per_class {
            let asd = (0..REJECTION_BUDGET)
                .find_map(|_| {
                    let count = rng.gen_range(min_objects..=max_objects);
                    let mut objects: Vec<Object> =
                        required_objects(label, config.confounded, &mut rng).to_vec();
                    objects.extend((2..count).map(|_| Object::random(&mut rng)));
                    objects.shuffle(&mut rng);
                    let scene = Asd::new(objects.iter().map(|o| o.entity(&vocab)));
                    let clashes = rules
                        .iter()
                        .any(|(other, rule)| *other != label && subsumes(rule, &scene));
                    (!clashes).then_some(scene)
                })
                .ok_or_else(|| {
                    Error::Generation(format!(
                        "class {label}: no valid scene after {REJECTION_BUDGET} attempts"
                    ))
                })?;
            samples.push(Sample {
                id: format!("c{label}_{i:04}"),
                label: label.to_owned(),
                asd,
                raw_ref: None,
            });
        }
    }

    let ground_truth = class_rules()
        .iter()
        .map(|(label, rule)| GroundTruthRule {
            label: (*label).to_owned(),
            rule: rule
                .iter()
                .map(|e| e.iter().map(|s| (*s).to_owned()).collect())
                .collect(),
        })
        .collect();
    Ok(GeneratedDataset {
        dataset: Dataset::from_samples(vocab, samples)?,
        ground_truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneratorConfig {
        GeneratorConfig {
            samples_per_class: 30,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn rules_hold_and_separate() {
        let generated = generate_clevr_hans3(&small()).unwrap();
        let mut vocab = generated.dataset.vocabulary.clone();
        let rules: Vec<(String, Asd)> = generated
            .ground_truth
            .iter()
            .map(|r| (r.label.clone(), vocab.asd(&r.rule).unwrap()))
            .collect();
        for s in generated.dataset.samples() {
            for (label, rule) in &rules {
                assert_eq!(subsumes(rule, &s.asd), *label == s.label, "{}", s.id);
            }
            assert!((1..=10).contains(&s.asd.len()));
            assert!(s.asd.entities().iter().all(|e| e.len() == 4));
        }
        assert_eq!(generated.dataset.len(), 90);
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_clevr_hans3(&small()).unwrap().dataset.to_jsonl();
        let b = generate_clevr_hans3(&small()).unwrap().dataset.to_jsonl();
        assert_eq!(a, b);
        let c = generate_clevr_hans3(&GeneratorConfig { seed: 8, ..small() })
            .unwrap()
            .dataset
            .to_jsonl();
        assert_ne!(a, c);
    }

    #[test]
    fn confounded_pins_extra_attributes() {
        let cfg = GeneratorConfig {
            confounded: true,
            ..small()
        };
        let generated = generate_clevr_hans3(&cfg).unwrap();
        let mut vocab = generated.dataset.vocabulary.clone();
        let gray_cube = vocab.asd(&[&["Large", "Gray", "Cube"][..]]).unwrap();
        for s in generated.dataset.samples().iter().filter(|s| s.label == "1") {
            assert!(subsumes(&gray_cube, &s.asd));
        }
    }

    #[test]
    fn bad_configs() {
        let zero = GeneratorConfig {
            samples_per_class: 0,
            ..small()
        };
        assert!(generate_clevr_hans3(&zero).is_err());
        let tiny = GeneratorConfig {
            objects_per_scene: 1..=1,
            ..small()
        };
        assert!(generate_clevr_hans3(&tiny).is_err());
    }
}
