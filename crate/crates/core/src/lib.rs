//! Semantic prototypes over attribute set descriptions (ASDs).
//!
//! A sample is described by a set of entities, each a set of attributes. The
//! library mines class cluster descriptions (ASDs that describe samples of
//! one class only), picks a small covering subset of them, and for each one
//! returns the covered sample with the least redundant information as its
//! prototype.
//!
//! ```
//! use semproto::asd::{merge, subsumes, Vocabulary};
//!
//! let mut vocab = Vocabulary::new();
//! let a = vocab.asd(&[&["Small", "Metal", "Cube"][..], &["Small", "Red", "Sphere"]]).unwrap();
//! let b = vocab.asd(&[&["Small", "Metal", "Cube"][..], &["Small", "Blue", "Sphere"]]).unwrap();
//! let rule = merge(&a, &b);
//! assert_eq!(vocab.display_asd(&rule), "{{Small, Sphere}, {Small, Metal, Cube}}");
//! assert!(subsumes(&rule, &a) && subsumes(&rule, &b));
//! ```

pub mod asd;
pub mod clevr;
pub mod convert;
pub mod dataset;
mod error;
mod matching;
pub mod mining;
pub mod oracle;
pub mod prototype;
pub mod report;
pub mod selftest;

pub use asd::{canonicalize, merge, similarity, subsumes, Asd, AttributeId, Entity, Vocabulary};
pub use clevr::{generate_clevr_hans3, GeneratorConfig};
pub use convert::{convert_attribute_matrix, Grouping};
pub use dataset::{load_dataset, Dataset, Diagnostic, GroundTruthRule};
pub use error::{Error, Result};
pub use mining::{check_ccd, mine_ccds, select_ccds, ClassClusterDescription, MiningConfig, Sample};
pub use prototype::{
    distance_metric_select, edit_distance, find_prototype, DistanceMetric, EditDistanceBreakdown,
    PrototypeRecord, UnmatchedCost,
};
pub use report::{explain, run_pipeline, RunConfig, RunReport};
