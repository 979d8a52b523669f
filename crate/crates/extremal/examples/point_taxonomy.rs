//! Walk a few points of the unit ball through the taxonomy: interior,
//! exposed, almost exposed, or boundary without either property.  The
//! interesting splits happen on the sup-norm ball, where faces have
//! interiors of their own.

use extremal::{classify_point, normal_cone, NormTag, SpaceContext, Vector};

fn report(space: SpaceContext, coords: Vec<f64>) {
    let x = Vector::new(coords.clone()).unwrap();
    let r = classify_point(&space, &x, 1e-9).unwrap();
    println!(
        "{:?} in {}^{}: {} (extreme {}, exposed {}, almost exposed {})",
        coords,
        space.norm.as_str(),
        space.dim,
        r.class.as_str(),
        r.extreme,
        r.exposed,
        r.almost_exposed
    );
}

fn main() {
    let l2 = SpaceContext::new(2, NormTag::L2).unwrap();
    let linf = SpaceContext::new(2, NormTag::Linf).unwrap();
    let l1 = SpaceContext::new(2, NormTag::L1).unwrap();

    // round ball: every boundary point is exposed
    report(l2, vec![0.6, 0.8]);
    report(l2, vec![0.3, 0.0]);

    // cube: vertices are exposed, facet interiors are not even almost exposed
    report(linf, vec![1.0, 1.0]);
    report(linf, vec![1.0, 0.25]);
    report(linf, vec![0.2, -0.2]);

    // cross-polytope: vertices again exposed, edges pick up supporting functionals
    report(l1, vec![0.0, -1.0]);
    report(l1, vec![0.5, 0.5]);

    // the supporting functionals behind a verdict
    let vertex = Vector::new(vec![1.0, 1.0]).unwrap();
    let cone = normal_cone(&linf, &vertex, 1e-9).unwrap();
    println!("\nnormal cone generators at the cube vertex:");
    for f in &cone.generators {
        println!("  {:?}", f.coords);
    }
}
