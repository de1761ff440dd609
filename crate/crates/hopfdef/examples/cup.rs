//! The cup product on the q = 0 row of the dual numbers (the Hochschild
//! complex with coefficients in the algebra itself): Leibniz checks and the
//! multiplication table of its cohomology.

use std::error::Error;

use hopfdef::cohomology_cup::{cohomology_algebra, verify_leibniz, CupStructure};
use hopfdef::complexes::{build, line, Direction};
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::example_catalog;

fn main() -> Result<(), Box<dyn Error>> {
    let pkg = example_catalog("dual-number-algebra", FieldSpec::rationals())?;
    let asm = build(&pkg, 4)?;
    let fixed = [0, 0, 0];
    let cup = CupStructure::new(&pkg, Direction::Horizontal, fixed)?;

    let laws = verify_leibniz(&cup, &asm, 3)?;
    println!("{} law checks on the row, all passed: {}", laws.checks.len(), laws.passed());

    let row = line(&asm, Direction::Horizontal, fixed);
    let alg = cohomology_algebra(&cup, &row, 4)?;
    println!("dim HH^0..4 = {:?}", alg.dims());
    println!("cocycles closed: {}, coboundaries absorbed: {}", alg.cocycle_closure, alg.coboundary_absorption);
    for e in alg.table.iter().filter(|e| e.class.iter().any(|x| x.to_string() != "0")) {
        let class: Vec<String> = e.class.iter().map(|x| x.to_string()).collect();
        println!("  [{}]_{} . [{}]_{} = ({})", e.i, e.r, e.j, e.s, class.join(", "));
    }
    Ok(())
}
