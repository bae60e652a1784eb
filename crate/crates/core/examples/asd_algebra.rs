//! Subsumption, similarity and merging of attribute set descriptions.
//!
//! cargo run --example asd_algebra

use semproto::asd::{merge, similarity, subsumes, Vocabulary};

fn main() -> semproto::Result<()> {
    let mut v = Vocabulary::new();

    let cat = v.asd(&[&["Cat"][..], &["Mouse"]])?;
    let scene = v.asd(&[&["Cat", "Gray"][..], &["Mouse", "Brown"], &["Table"]])?;
    println!("{} subsumes {}: {}", v.display_asd(&cat), v.display_asd(&scene), subsumes(&cat, &scene));
    println!("{} subsumes {}: {}", v.display_asd(&scene), v.display_asd(&cat), subsumes(&scene, &cat));

    let a = v.asd(&[&["Large", "Gray", "Cube"][..], &["Small", "Red", "Sphere"]])?;
    let b = v.asd(&[&["Large", "Blue", "Cube"][..], &["Small", "Yellow", "Sphere"], &["Small", "Gray", "Cube"]])?;
    println!("similarity = {:.4}", similarity(&a, &b)?);

    let m = merge(&a, &b);
    println!("merge     = {}", v.display_asd(&m));
    assert!(subsumes(&m, &a) && subsumes(&m, &b));
    Ok(())
}
