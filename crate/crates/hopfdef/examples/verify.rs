//! Builds the tricomplex of the Sweedler algebra acting on the dual numbers
//! through its counit, checks every identity, and compares the boundary
//! planes with the bicomplexes built directly.

use std::error::Error;

use hopfdef::complexes::{build, build_view, compare_raw, plane, verify_simplicial_identities, verify_squares, Plane};
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::example_catalog;

fn main() -> Result<(), Box<dyn Error>> {
    let pkg = example_catalog("counit-action-sweedler", FieldSpec::rationals())?;
    let cutoff = 3;
    let asm = build(&pkg, cutoff)?;
    let mut report = verify_simplicial_identities(&asm);
    report.extend(verify_squares(&asm));
    println!("{} {} cutoff {cutoff}: {} grid spaces", pkg.name, pkg.kind, asm.spaces.len());
    println!("  {} identities checked, {} failed", report.checks.len(), report.failures().len());

    for which in [Plane::Q1, Plane::P1] {
        let kind = which.bicomplex_kind(pkg.kind).expect("tricomplex");
        let extracted = plane(&asm, which)?;
        let direct = build_view(&pkg, kind, cutoff)?;
        let diff = compare_raw(&extracted, &direct);
        println!("  plane {which:?} equals the {kind} bicomplex: {}", diff.is_empty());
    }
    Ok(())
}
