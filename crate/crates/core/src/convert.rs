//! Converts per-sample attribute annotations (CUB-style `sample, attribute,
//! certainty` triples) into a dataset of ASDs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::asd::{Asd, Entity, Vocabulary};
use crate::dataset::{read_text, Dataset};
use crate::error::{Error, Result};
use crate::mining::Sample;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Grouping {
    /// One entity per sample holding every retained attribute.
    #[default]
    Whole,
    /// One entity per body part, keyed by the attribute name's prefix.
    PartPrefix,
}

impl FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(Grouping::Whole),
            "part-prefix" => Ok(Grouping::PartPrefix),
            other => Err(Error::Config(format!(
                "unknown grouping {other:?} (expected whole or part-prefix)"
            ))),
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grouping::Whole => "whole",
            Grouping::PartPrefix => "part-prefix",
        })
    }
}

pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// Part an attribute belongs to. `has_bill_shape::dagger` and
/// `has_bill_color::black` are both `bill`; `has_upper_tail_color::x` is
/// `upper_tail`. Names without `::` share the unnamed part.
pub fn part_of(attribute: &str) -> &str {
    let Some((head, _)) = attribute.split_once("::") else {
        return "";
    };
    let head = head.strip_prefix("has_").unwrap_or(head);
    match head.rsplit_once('_') {
        Some((part, _)) => part,
        None => head,
    }
}

fn split_row(line: &str) -> Vec<&str> {
    let delimiter = if line.contains('\t') { '\t' } else { ',' };
    line.split(delimiter).map(str::trim).collect()
}

fn parse_value(field: &str) -> Option<f64> {
    match field {
        "true" | "TRUE" | "True" => Some(1.0),
        "false" | "FALSE" | "False" => Some(0.0),
        _ => field.parse().ok(),
    }
}

/// `sample_id, label` pairs, header optional.
fn parse_labels(text: &str) -> Result<HashMap<String, String>> {
    let mut labels = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(line);
        if fields.len() != 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Validation(format!(
                "labels line {}: expected `sample_id, label`",
                n + 1
            )));
        }
        if n == 0 && fields[0] == "sample_id" {
            continue;
        }
        labels.insert(fields[0].to_owned(), fields[1].to_owned());
    }
    Ok(labels)
}

/// Builds a dataset from matrix rows `(sample_id, attribute, value[, label])`.
///
/// Labels come from a fourth column or from `labels` (`sample_id, label`
/// lines); one of the two must name every sample. Attributes with value
/// below `threshold` are dropped.
pub fn convert_attribute_matrix_str(
    matrix: &str,
    labels: Option<&str>,
    grouping: Grouping,
    threshold: f64,
) -> Result<Dataset> {
    if !threshold.is_finite() {
        return Err(Error::Config("threshold must be a finite number".into()));
    }
    let external = labels.map(parse_labels).transpose()?;

    struct Pending {
        label: Option<String>,
        parts: BTreeMap<String, Vec<String>>,
    }
    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, Pending> = HashMap::new();

    let mut first = true;
    for (n, line) in matrix.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(line);
        let header = std::mem::take(&mut first) && fields.get(2).and_then(|f| parse_value(f)).is_none();
        if header {
            continue;
        }
        if !(3..=4).contains(&fields.len()) || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Validation(format!(
                "matrix line {}: expected `sample_id, attribute, value[, label]`",
                n + 1
            )));
        }
        let value = parse_value(fields[2]).ok_or_else(|| {
            Error::Validation(format!("matrix line {}: bad value {:?}", n + 1, fields[2]))
        })?;
        let entry = pending.entry(fields[0].to_owned()).or_insert_with(|| {
            order.push(fields[0].to_owned());
            Pending {
                label: None,
                parts: BTreeMap::new(),
            }
        });
        if let Some(label) = fields.get(3).filter(|l| !l.is_empty()) {
            match &entry.label {
                Some(existing) if existing != label => {
                    return Err(Error::Validation(format!(
                        "matrix line {}: sample {} has two labels ({existing:?}, {label:?})",
                        n + 1,
                        fields[0]
                    )))
                }
                _ => entry.label = Some((*label).to_owned()),
            }
        }
        if value >= threshold {
            let part = match grouping {
                Grouping::Whole => "",
                Grouping::PartPrefix => part_of(fields[1]),
            };
            entry
                .parts
                .entry(part.to_owned())
                .or_default()
                .push(fields[1].to_owned());
        }
    }

    let mut vocabulary = Vocabulary::new();
    let mut samples = Vec::with_capacity(order.len());
    let mut empty = Vec::new();
    for id in order {
        let p = pending.remove(&id).expect("every ordered id is pending");
        let label = p
            .label
            .or_else(|| external.as_ref().and_then(|l| l.get(&id).cloned()))
            .ok_or_else(|| Error::Validation(format!("no label for sample {id}")))?;
        let entities = p
            .parts
            .values()
            .map(|names| vocabulary.entity(names))
            .collect::<Result<Vec<Entity>>>()?;
        let asd = Asd::new(entities.into_iter().filter(|e| !e.is_empty()));
        if asd.is_empty() {
            empty.push(id);
            continue;
        }
        samples.push(Sample {
            id,
            label,
            asd,
            raw_ref: None,
        });
    }
    if !empty.is_empty() {
        return Err(Error::Validation(format!(
            "{} sample(s) have no attribute at or above threshold {threshold}: {}",
            empty.len(),
            empty.join(", ")
        )));
    }
    Dataset::from_samples(vocabulary, samples)
}

pub fn convert_attribute_matrix(
    matrix_path: impl AsRef<Path>,
    labels_path: Option<&Path>,
    grouping: Grouping,
    threshold: f64,
) -> Result<Dataset> {
    let matrix = read_text(matrix_path.as_ref())?;
    let labels = labels_path.map(read_text).transpose()?;
    convert_attribute_matrix_str(&matrix, labels.as_deref(), grouping, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROWS: &str = "s1,has_bill_shape::dagger,1.0,sparrow\ns1,has_wing_color::grey,1.0,sparrow\n";

    #[test]
    fn part_prefixes() {
        assert_eq!(part_of("has_bill_shape::dagger"), "bill");
        assert_eq!(part_of("has_bill_color::black"), "bill");
        assert_eq!(part_of("has_upper_tail_color::grey"), "upper_tail");
        assert_eq!(part_of("has_size::small"), "size");
        assert_eq!(part_of("plain"), "");
    }

    #[test]
    fn groupings() {
        let ds = convert_attribute_matrix_str(ROWS, None, Grouping::PartPrefix, 1.0).unwrap();
        assert_eq!(ds.samples()[0].asd.len(), 2);
        let ds = convert_attribute_matrix_str(ROWS, None, Grouping::Whole, 1.0).unwrap();
        assert_eq!(ds.samples()[0].asd.len(), 1);
        assert_eq!(ds.samples()[0].asd.total_attributes(), 2);
    }

    #[test]
    fn threshold_above_one_rejects_everything() {
        let err = convert_attribute_matrix_str(ROWS, None, Grouping::Whole, 1.1).unwrap_err();
        assert!(matches!(err, Error::Validation(m) if m.contains("s1")));
    }

    #[test]
    fn header_tabs_and_label_file() {
        let matrix = "sample_id\tattribute\tvalue\ns1\thas_size::small\t0.5\ns1\thas_shape::perching\t1\ns2\thas_size::large\t1\n";
        let labels = "sample_id,label\ns1,a\ns2,b\n";
        let ds = convert_attribute_matrix_str(matrix, Some(labels), Grouping::Whole, 1.0).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.samples()[0].asd.total_attributes(), 1);
        assert_eq!(ds.samples()[1].label, "b");

        let err = convert_attribute_matrix_str(matrix, None, Grouping::Whole, 1.0).unwrap_err();
        assert!(err.to_string().contains("no label"));
    }
}
