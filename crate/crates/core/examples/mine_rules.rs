//! Mines class cluster descriptions for one class against the rest, then
//! greedily picks a covering subset.
//!
//! cargo run --example mine_rules

use semproto::asd::Vocabulary;
use semproto::mining::{mine_ccds, select_ccds, MiningConfig, Sample};

fn sample(v: &mut Vocabulary, id: &str, label: &str, asd: &[&[&str]]) -> Sample {
    Sample {
        id: id.into(),
        label: label.into(),
        asd: v.asd(asd).expect("valid names"),
        raw_ref: None,
    }
}

fn main() -> semproto::Result<()> {
    let mut v = Vocabulary::new();
    let positives = vec![
        sample(&mut v, "d1", "pos", &[&["Large", "Cube", "Red"], &["Small", "Sphere"]]),
        sample(&mut v, "d2", "pos", &[&["Large", "Cube", "Blue"]]),
        sample(&mut v, "d3", "pos", &[&["Large", "Cube", "Metal"], &["Small", "Cylinder"]]),
        sample(&mut v, "d4", "pos", &[&["Small", "Metal", "Sphere"], &["Yellow", "Cylinder"]]),
    ];
    let negatives = vec![
        sample(&mut v, "n1", "neg", &[&["Small", "Cube", "Red"], &["Large", "Sphere"]]),
        sample(&mut v, "n2", "neg", &[&["Small", "Cylinder"]]),
    ];

    let ccds = mine_ccds(&positives, &negatives, &MiningConfig::default())?;
    println!("{} candidate rules:", ccds.len());
    for c in &ccds {
        println!("  {} covers {:?}", v.display_asd(&c.asd), c.coverage);
    }

    let selection = select_ccds(&ccds, &positives, None);
    println!("selected:");
    for p in &selection.picks {
        println!(
            "  {} (+{}, cumulative {})",
            v.display_asd(&p.ccd.asd),
            p.marginal_gain,
            p.cumulative_coverage
        );
    }
    println!("uncovered: {:?}", selection.uncovered);
    Ok(())
}
