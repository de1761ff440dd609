//! Rigidity probes: the sign action on a one-dimensional algebra has
//! vanishing H^2, the dual numbers do not.

use std::error::Error;

use hopfdef::deformation::{rigidity_probe, DeformationContext};
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::example_catalog;

fn main() -> Result<(), Box<dyn Error>> {
    for name in ["sign-action-null-algebra", "dual-number-algebra"] {
        let pkg = example_catalog(name, FieldSpec::rationals())?;
        let ctx = DeformationContext::new(&pkg, pkg.kind)?;
        let report = rigidity_probe(&ctx, 4, 8, 7)?;
        let trivialized = report.samples.iter().filter(|s| s.trivialized == Some(true)).count();
        println!(
            "{name}: dim H^2 = {}, {} of {} samples trivialized, rigid: {}",
            report.h2_dim,
            trivialized,
            report.samples.len(),
            report.rigid
        );
        if let Some(v) = &report.exhibited {
            let nz: Vec<String> =
                v.iter().enumerate().filter(|(_, x)| x.to_string() != "0").map(|(i, x)| format!("{i}:{x}")).collect();
            println!("  non-trivial infinitesimal {}", nz.join(" "));
        }
    }
    Ok(())
}
