//! Reads a package file, checks its axioms, then breaks the comultiplication
//! of `H` and shows where coassociativity fails.

use std::error::Error;

use hopfdef::cli::{package_hash, parse_package};

fn main() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/packages/group-flip-Z2.pkg");
    let text = std::fs::read_to_string(path)?;
    let pkg = parse_package(&text, None)?;
    let report = pkg.validate()?;
    println!("{} ({}, {})  hash {}", pkg.name, pkg.kind, pkg.field(), &package_hash(&pkg)[..16]);
    println!("  {} axioms checked, all passed: {}", report.checks.len(), report.passed());

    // Delta(g0) = g0 (x) g0 + g0 (x) g1
    let broken = text.replacen("h.comul = [\n  [1, 0],\n  [0, 0],", "h.comul = [\n  [1, 0],\n  [1, 0],", 1);
    let bad = parse_package(&broken, None)?;
    for c in bad.validate()?.failures() {
        match &c.witness {
            Some(w) => println!("  fails {:<40} at {:?}: {:?} vs {:?}", c.axiom, w.input, w.lhs, w.rhs),
            None => println!("  fails {}", c.axiom),
        }
    }
    Ok(())
}
