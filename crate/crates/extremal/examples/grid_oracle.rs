//! Decide extremality of grid-sampled mappings by exhaustion.  The
//! oracle computes, for every sample and coordinate, the largest
//! two-sided perturbation that keeps both shifted mappings inside the
//! nonexpansive ball, then calls the mapping extreme exactly when no
//! perturbation survives.

use extremal::extremality::grid_extreme_oracle;
use extremal::mapping::Mapping;
use extremal::sample::ProbeBudget;
use extremal::{Matrix, NormTag, SpaceContext, Vector};

fn chain(step: f64) -> Vec<Vector> {
    let mut t = -1.0;
    let mut out = Vec::new();
    while t <= 1.0 + 1e-12 {
        out.push(Vector::from(vec![t]));
        t += step;
    }
    out
}

fn main() -> Result<(), extremal::Error> {
    let space = SpaceContext::new(1, NormTag::Linf)?;
    let budget = ProbeBudget::default();
    let samples = chain(0.5);

    // the identity leaves no slack anywhere
    let id = Mapping::identity(space).sampled_on(&samples)?;
    let out = grid_extreme_oracle(&id, 1e-9, &budget)?;
    println!(
        "identity on the chain: extreme = {}, max admissible delta = {}",
        out.extreme, out.max_delta
    );

    // the zero map can be wiggled at every sample
    let zero = Mapping::constant(space, Vector::zero(1))?.sampled_on(&samples)?;
    let out = grid_extreme_oracle(&zero, 1e-9, &budget)?;
    println!(
        "zero map: extreme = {}, max admissible delta = {}",
        out.extreme, out.max_delta
    );
    if let Some((i, k)) = out.witness {
        println!(
            "  witness: sample {i}, coordinate {k}, slack {}",
            out.deltas[i][k]
        );
    }

    // scaling by lambda interpolates: slack dries up as |lambda| -> 1
    println!("\nscaling map t |-> lambda t, sampled on the same chain:");
    for lambda in [-1.0, -0.5, 0.0, 0.5, 0.9, 1.0] {
        let scaled = Mapping::linear(space, Matrix::from_rows(vec![vec![lambda]])?)?
            .sampled_on(&samples)?;
        let out = grid_extreme_oracle(&scaled, 1e-9, &budget)?;
        println!(
            "  lambda = {lambda:+.1}: extreme = {}, max delta = {:.3}",
            out.extreme, out.max_delta
        );
    }
    Ok(())
}
