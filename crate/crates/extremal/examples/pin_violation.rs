//! Turn a pinning defect into an expansion witness.  An operator that
//! fixes functions attaining +/-1 at an index, yet moves some interior
//! value at that index, stretches the gap between the two: applying it
//! to a one-sided boundary perturbation of the interior function pushes
//! the pair strictly farther apart.

use extremal::extremality::{pin_violation_witness, verify_pinning};
use extremal::mapping::Mapping;
use extremal::{NormTag, SpaceContext, Vector};

fn main() -> Result<(), extremal::Error> {
    let space = SpaceContext::new(3, NormTag::Linf)?;

    let f0 = Vector::from(vec![0.1, -0.4, 0.3]);
    let boundary = Vector::from(vec![-1.0, -0.4, 0.3]);
    let lifted = Vector::from(vec![0.5, -0.4, 0.3]);

    // a two-point operator: honors the boundary sample, lifts the
    // interior one at coordinate 0
    let op = Mapping::grid(
        space,
        vec![f0.clone(), boundary.clone()],
        vec![lifted, boundary.clone()],
    )?;

    let violations = verify_pinning(&op, &[(boundary, 0)], 1e-9)?;
    println!("pin violations on the boundary sample: {}", violations.len());

    let w = pin_violation_witness(&op, &f0, 0, 1e-9)?;
    println!("defect direction: {:?}", w.direction);
    println!("bump radius gamma = {}", w.gamma);
    println!("perturbed point:   {:?}", w.perturbed.coords);
    println!("input distance  |f0 - g|        = {}", w.rhs);
    println!("image distance  |G f0 - G g|    = {}", w.lhs);
    println!("expansion margin                = {}", w.margin);
    assert!(w.margin > 0.0);
    Ok(())
}
