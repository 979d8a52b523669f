//! Transport decompositions across isometries.  Any decomposition of a
//! surjective linear isometry pushes forward, through the inverse, to a
//! decomposition of the identity with the same weight.  Extremality of
//! the identity therefore extends to every signed permutation.

use extremal::decomp::DecompositionCertificate;
use extremal::extremality::{classify_linear_extremal, make_rotation, reduce_to_identity};
use extremal::mapping::Mapping;
use extremal::sample::ProbeBudget;
use extremal::{Matrix, NormTag, SpaceContext};

fn main() -> Result<(), extremal::Error> {
    let space = SpaceContext::new(3, NormTag::Linf)?;
    let budget = ProbeBudget::default();

    let iso = make_rotation(space, &[1, 2, 0], &[1.0, -1.0, 1.0])?;
    let (matrix, _) = iso.linearize().expect("rotations are linear");
    println!("isometry rows: {:?}", matrix.to_rows());

    let verdict = classify_linear_extremal(space, &matrix, 1e-12, &budget)?;
    println!("classifier verdict: extremal = {}", verdict.extremal);

    // the only decompositions an extremal mapping admits are the ones
    // with both parts equal to it; transport one anyway
    let cert =
        DecompositionCertificate::build(iso.clone(), 0.5, iso.clone(), iso.clone(), &budget)?;
    let reduced = reduce_to_identity(&iso, &cert, &budget)?;
    println!(
        "transported to the identity: lambda = {}, residual = {:.2e}",
        reduced.lambda, reduced.residual
    );
    let (g, _) = reduced.g.linearize().unwrap();
    println!("transported g rows: {:?}", g.to_rows());

    // contractions are rejected: there is no inverse isometry to ride
    let half = Mapping::linear(
        space,
        Matrix::from_rows(vec![
            vec![0.5, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])?,
    )?;
    let cert = DecompositionCertificate::trivial(&half, &budget)?;
    match reduce_to_identity(&half, &cert, &budget) {
        Err(e) => println!("contraction rejected: {e}"),
        Ok(_) => unreachable!("contractions must not reduce"),
    }
    Ok(())
}
