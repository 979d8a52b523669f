//! Certify a pocket of non-membership around a near-isometric mapping.
//! Starting from g, find a pair of points it barely contracts, collapse
//! the pair to build a center, and then verify that a whole metric ball
//! around that center misses P_{g,q}: every probe mapping in the ball
//! leaves the forced second factor h(lambda) outside the nonexpansive
//! class for every admissible weight.

use extremal::mapping::Mapping;
use extremal::porosity::{
    build_porosity_witness, certify_ball_empty, find_near_isometric_pair, PorosityParams,
};
use extremal::sample::ProbeBudget;
use extremal::{NormTag, SpaceContext, Vector};

fn square_grid(side: usize) -> Vec<Vector> {
    let mut pts = Vec::new();
    for i in 0..side {
        for j in 0..side {
            let step = 2.0 / (side - 1) as f64;
            pts.push(Vector::from(vec![-1.0 + step * i as f64, -1.0 + step * j as f64]));
        }
    }
    pts
}

fn main() -> Result<(), extremal::Error> {
    let space = SpaceContext::new(2, NormTag::Linf)?;
    let samples = square_grid(5);
    let g = Mapping::identity(space).sampled_on(&samples)?;
    let budget = ProbeBudget { points: 64, pairs: 64, seed: 7 };

    let params = PorosityParams::from_q_epsilon(0.25, 0.6)?;
    println!(
        "q = {}, epsilon = {}: delta = {}, alpha = {}",
        params.q, params.epsilon, params.delta, params.alpha
    );

    // the identity preserves every distance, so any short pair works
    let pair = find_near_isometric_pair(&g, &params, &budget)?;
    println!(
        "pair at distance {} with contraction ratio {}",
        pair.eta, pair.ratio
    );

    let witness = build_porosity_witness(&g, &params, &budget)?;
    println!(
        "collapsed center sits {} away from g ({})",
        witness.center_distance,
        witness.distance_method.label()
    );
    println!("empty ball radius: {}", witness.radius);

    let cert = certify_ball_empty(&witness, &g, 24, 1e-3, 7, &budget)?;
    println!(
        "{} probes refuted across the weight grid; min margin {:.6}",
        cert.probe_count, cert.min_margin
    );
    for r in cert.refutations.iter().take(4) {
        println!(
            "  probe {} ({}) at distance {:.4}: worst lambda {:.3}, margin {:.6}",
            r.probe_index,
            r.kind.label(),
            r.dist_bound,
            r.worst_lambda,
            r.min_margin
        );
    }
    println!("  ...");
    Ok(())
}
