//! The algebra of membership certificates.  A certificate places g in
//! P_f by exhibiting f = (1-lambda) g + lambda h with h nonexpansive;
//! this example builds one by hand and then moves it around: along the
//! ray through g, by merging with a second certificate, by peeling one
//! factor out of a composite member, and finally by scanning the whole
//! feasible weight window.

use extremal::decomp::{
    affine_hull_probe, complement_witness, merge_certs, pfq_membership, ray_extend,
    CandidateOutcome, DecompositionCertificate, FeasibilityMethod,
};
use extremal::mapping::Mapping;
use extremal::sample::ProbeBudget;
use extremal::{Matrix, NormTag, SpaceContext};

fn diag(a: f64, b: f64) -> Mapping {
    let space = SpaceContext::new(2, NormTag::Linf).unwrap();
    Mapping::linear(space, Matrix::from_rows(vec![vec![a, 0.0], vec![0.0, b]]).unwrap()).unwrap()
}

fn main() -> Result<(), extremal::Error> {
    let budget = ProbeBudget::default();

    // f = (1 - 1/2) g + (1/2) h with g = diag(1, 1), h = diag(0, 1)
    let f = diag(0.5, 1.0);
    let cert = DecompositionCertificate::build(
        f.clone(),
        0.5,
        diag(1.0, 1.0),
        diag(0.0, 1.0),
        &budget,
    )?;
    println!(
        "base certificate: lambda = {}, residual = {:.2e}",
        cert.lambda, cert.residual
    );

    // slide g along its ray: t = 2/3 lands at f + (2/3)(g - f) with
    // weight mu = lambda t / (lambda t + 1 - lambda) = 0.4
    let ray = ray_extend(&cert, 2.0 / 3.0, &budget)?;
    println!("ray point t = 2/3: mu = {}", ray.lambda);

    // a second certificate for the same f, then the merged one
    let cert2 = DecompositionCertificate::build(
        f.clone(),
        0.5,
        diag(0.0, 1.0),
        diag(1.0, 1.0),
        &budget,
    )?;
    let merged = merge_certs(&cert, &cert2, 0.5, &budget)?;
    println!(
        "merged certificate: lambda = {}, residual = {:.2e}",
        merged.lambda, merged.residual
    );

    // peel a factor out of a composite member: the member is
    // 0.6 g1 + 0.4 g2, and the witness certifies g1 alone
    let member = Mapping::convex_combo(0.6, diag(0.6, 1.0), diag(0.3, 1.0))?;
    let composite = DecompositionCertificate::build(
        f.clone(),
        0.2,
        member,
        diag(0.82, 1.0),
        &budget,
    )?;
    let peeled = complement_witness(&f, &composite, 0.6, &budget)?;
    println!(
        "complement witness: mu = {} (residual {:.2e})",
        peeled.lambda, peeled.residual
    );

    // the full feasible window for g = identity within [q, 1-q]
    let set = pfq_membership(
        &f,
        &Mapping::identity(*f.space()),
        0.25,
        FeasibilityMethod::ExactLinear,
        &budget,
    )?;
    println!("feasible weights for the identity: {:?}", set.intervals);

    // and an empty one: nothing mixes the identity into its negation
    let id = Mapping::identity(*f.space());
    let set = pfq_membership(&id, &diag(-1.0, -1.0), 0.1, FeasibilityMethod::ExactLinear, &budget)?;
    println!("identity vs negation: empty = {}", set.is_empty());

    // span two certificate directions and test candidates against the
    // affine hull they generate
    let f2 = diag(0.5, 0.5);
    let c1 =
        DecompositionCertificate::build(f2.clone(), 0.5, diag(1.0, 0.5), diag(0.0, 0.5), &budget)?;
    let c2 =
        DecompositionCertificate::build(f2.clone(), 0.5, diag(0.5, 1.0), diag(0.5, 0.0), &budget)?;
    let inside = diag(0.65, 0.6);
    let outside = Mapping::linear(
        *f2.space(),
        Matrix::from_rows(vec![vec![0.5, 0.2], vec![0.0, 0.5]])?,
    )?;
    let report = affine_hull_probe(
        &f2,
        &[c1, c2],
        &[inside, outside],
        Some(&[2.0, 1.0]),
        &budget,
    )?;
    println!(
        "hull basis: directions {:?}, betas {:?}",
        report.basis.direction_indices, report.basis.betas
    );
    for (i, outcome) in report.candidates.iter().enumerate() {
        match outcome {
            CandidateOutcome::InHull { alphas, .. } => {
                println!("candidate {i}: in hull with coefficients {alphas:?}")
            }
            CandidateOutcome::NotInHull { residual } => {
                println!("candidate {i}: outside, residual {residual:.3e}")
            }
            CandidateOutcome::Failed { reason } => println!("candidate {i}: failed ({reason})"),
        }
    }
    Ok(())
}
