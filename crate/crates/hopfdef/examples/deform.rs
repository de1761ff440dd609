//! Deforms the multiplication of K[x]/(x^2) towards K[x]/(x^2 - t) and
//! extends order by order, printing each obstruction check.

use std::error::Error;

use hopfdef::cli::parse_infinitesimal;
use hopfdef::deformation::{check_infinitesimal, extend_to, DeformationContext};
use hopfdef::exact_linalg::FieldSpec;
use hopfdef::hopf_structures::{example_catalog, Kind};
use hopfdef::tensor_calculus::sp_to_coords;

fn main() -> Result<(), Box<dyn Error>> {
    let pkg = example_catalog("dual-number-algebra", FieldSpec::rationals())?;
    let ctx = DeformationContext::new(&pkg, Kind::MA)?;
    println!("dim H^2 = {}, dim H^3 = {}", ctx.h2()?.dim, ctx.h3()?.dim);

    let theta = parse_infinitesimal(&ctx, "pi = [[0, 0, 0, 1], [0, 0, 0, 0]]")?;
    let check = check_infinitesimal(&ctx, &theta)?;
    println!("infinitesimal is a cocycle: {}", check.is_cocycle);

    let (series, trace) = extend_to(&ctx, &theta, 4)?;
    for r in &trace {
        println!(
            "  order {}: residual cocycle {}, solvable {}",
            r.order, r.residual_is_cocycle, r.solvable
        );
    }
    println!("reached order {}", series.order());
    for (k, parts) in series.terms.iter().enumerate() {
        let pi: Vec<String> = sp_to_coords(&parts[1]).iter().map(|x| x.to_string()).collect();
        println!("  pi_{k} = [{}]", pi.join(" "));
    }
    Ok(())
}
