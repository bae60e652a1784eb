//! Cross-checks the fast algorithms against brute-force oracles on random
//! inputs, the same checks the hidden `selftest` subcommand runs.
//!
//! cargo run --release --example oracle_checks [cases]

use semproto::oracle::{oracle_edit_distance, AsdBounds, OracleBudget, RandomAsdGenerator};
use semproto::prototype::{edit_distance, UnmatchedCost};
use semproto::selftest::run_selftest;

fn main() -> semproto::Result<()> {
    let cases = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let budget = OracleBudget::default();

    let mut gen = RandomAsdGenerator::new(1, AsdBounds::default());
    let (r, z) = gen.subsuming_pair(3, 5);
    println!(
        "one random pair: solver {}, oracle {}",
        edit_distance(&r, &z)?.total,
        oracle_edit_distance(&r, &z, UnmatchedCost::Attrs, &budget)?
    );

    let mut ok = true;
    for o in run_selftest(cases, &budget)? {
        println!("{} {} ({} cases)", if o.passed() { "PASS" } else { "FAIL" }, o.name, o.cases);
        ok &= o.passed();
    }
    if !ok {
        std::process::exit(1);
    }
    Ok(())
}
