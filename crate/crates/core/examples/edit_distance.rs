//! Edit distance between a rule and a scene it describes, with the full
//! matching breakdown in both unmatched-cost modes.
//!
//! cargo run --example edit_distance

use semproto::asd::Vocabulary;
use semproto::prototype::{edit_distance_with, UnmatchedCost};

fn main() -> semproto::Result<()> {
    let mut v = Vocabulary::new();
    let rule = v.asd(&[&["Small", "Metal", "Cube"][..], &["Small", "Sphere"]])?;
    let scene = v.asd(&[
        &["Large", "Blue", "Rubber", "Cylinder"][..],
        &["Small", "Purple", "Rubber", "Cylinder"],
        &["Small", "Cyan", "Metal", "Cylinder"],
        &["Small", "Red", "Rubber", "Sphere"],
        &["Small", "Purple", "Metal", "Cube"],
    ])?;

    for mode in [UnmatchedCost::Attrs, UnmatchedCost::Zero] {
        let d = edit_distance_with(&rule, &scene, mode)?;
        println!("unmatched cost = {mode}: total {}", d.total);
        for p in &d.matched_pairs {
            println!(
                "  {} -> {} (+{})",
                v.display_entity(&rule.entities()[p.rule_entity]),
                v.display_entity(&scene.entities()[p.sample_entity]),
                p.insertions
            );
        }
        for u in &d.unmatched_sample_entities {
            println!("  unmatched {} ({})", v.display_entity(&scene.entities()[u.sample_entity]), u.cost);
        }
    }

    // Two rule entities can share one witness; the distance is still defined.
    let r = v.asd(&[&["A"][..], &["B"]])?;
    let z = v.asd(&[&["A", "B"][..]])?;
    let d = edit_distance_with(&r, &z, UnmatchedCost::Attrs)?;
    println!("shared witness: total {}, injective {}", d.total, d.feasible_injective);
    Ok(())
}
