//! Classify linear mappings on the sup-norm ball as extremal or
//! properly decomposable, and inspect the certificates that back the
//! negative verdicts.

use extremal::decomp::DecompositionCertificate;
use extremal::extremality::classify_linear_extremal;
use extremal::mapping::Mapping;
use extremal::sample::ProbeBudget;
use extremal::{Matrix, NormTag, SpaceContext};

fn show(name: &str, space: SpaceContext, rows: Vec<Vec<f64>>, budget: &ProbeBudget) {
    let matrix = Matrix::from_rows(rows).unwrap();
    let verdict = classify_linear_extremal(space, &matrix, 1e-9, budget).unwrap();
    println!("{name}:");
    if verdict.extremal {
        let form = verdict.form.unwrap();
        println!("  extremal; row i reads coordinate pi[i] with sign epsilon[i]");
        println!("  pi      = {:?}", form.pi);
        println!("  epsilon = {:?}", form.epsilon);
    } else {
        let cert: DecompositionCertificate = verdict.certificate.unwrap();
        println!(
            "  decomposes with weights ({}, {}), residual {:.3e}",
            1.0 - cert.lambda,
            cert.lambda,
            cert.residual
        );
        if let Some((g, _)) = cert.g.linearize() {
            println!("  g rows: {:?}", g.to_rows());
        }
        if let Some((h, _)) = cert.h.linearize() {
            println!("  h rows: {:?}", h.to_rows());
        }
    }
    println!();
}

fn main() {
    let space = SpaceContext::new(2, NormTag::Linf).unwrap();
    let budget = ProbeBudget::default();

    // every row a signed coordinate: nothing to peel off
    show(
        "negated swap",
        space,
        vec![vec![0.0, -1.0], vec![-1.0, 0.0]],
        &budget,
    );

    // a contracting row splits into its zero and rescaled versions
    show(
        "diag(0.5, 1)",
        space,
        vec![vec![0.5, 0.0], vec![0.0, 1.0]],
        &budget,
    );

    // a full-norm row supported on two columns splits along the first
    show(
        "averaging row",
        space,
        vec![vec![0.5, 0.5], vec![0.0, 1.0]],
        &budget,
    );

    // verify a certificate by hand: rebuild it from its own parts
    let target = Mapping::linear(
        space,
        Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap(),
    )
    .unwrap();
    let verdict = classify_linear_extremal(
        space,
        &Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap(),
        1e-9,
        &budget,
    )
    .unwrap();
    let cert = verdict.certificate.unwrap();
    let rebuilt = DecompositionCertificate::build(
        target,
        cert.lambda,
        cert.g.clone(),
        cert.h.clone(),
        &budget,
    )
    .unwrap();
    println!(
        "rebuilt certificate residual: {:.3e} ({})",
        rebuilt.residual,
        rebuilt.residual_method.label()
    );
}
