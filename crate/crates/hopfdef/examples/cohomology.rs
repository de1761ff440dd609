//! Total cohomology of the dual numbers as a module algebra over the ground
//! field, in characteristic 0 and 3, with and without the corner.

use std::error::Error;

use hopfdef::cohomology_cup::cohomology;
use hopfdef::complexes::{build, total_complex, CornerMode};
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::example_catalog;

fn main() -> Result<(), Box<dyn Error>> {
    let n_max = 3;
    for f in [FieldSpec::rationals(), FieldSpec::prime(3)?] {
        let pkg = example_catalog("dual-number-algebra", f)?;
        let asm = build(&pkg, n_max)?;
        for mode in [CornerMode::Corner, CornerMode::Full] {
            let cx = total_complex(&asm, mode).as_cochain_complex(f);
            let dims = (0..=n_max).map(|n| cohomology(&cx, n).map(|h| h.dim)).collect::<Result<Vec<_>, _>>()?;
            println!("{f} {mode:?}: dim H^0..{n_max} = {dims:?}");
        }
    }

    let pkg = example_catalog("dual-number-algebra", FieldSpec::rationals())?;
    let cx = total_complex(&build(&pkg, 2)?, CornerMode::Corner).as_cochain_complex(pkg.field());
    let h2 = cohomology(&cx, 2)?;
    println!("H^2 representatives (coordinate, value):");
    for r in &h2.representatives {
        let v: Vec<String> = r.iter().map(|(i, x)| format!("{i}:{x}")).collect();
        println!("  {}", v.join(" "));
    }
    Ok(())
}
