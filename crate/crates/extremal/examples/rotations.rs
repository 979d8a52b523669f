//! Enumerate all signed permutations of a small cube and confirm each
//! one is extremal.  These are exactly the surjective isometries of the
//! sup-norm ball, so every one of them should survive classification.

use extremal::extremality::{classify_linear_extremal, make_rotation};
use extremal::sample::ProbeBudget;
use extremal::{NormTag, SpaceContext, Vector};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for tail in permutations(n - 1) {
        for slot in 0..n {
            let mut perm = vec![n - 1];
            for &p in &tail {
                perm.push(p);
            }
            perm.swap(0, slot);
            out.push(perm);
        }
    }
    out
}

fn main() -> Result<(), extremal::Error> {
    let n = 3;
    let space = SpaceContext::new(n, NormTag::Linf)?;
    let budget = ProbeBudget::default();

    let mut total = 0usize;
    let mut extremal_count = 0usize;
    for perm in permutations(n) {
        for mask in 0..(1u32 << n) {
            let signs: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                .collect();
            let rotation = make_rotation(space, &perm, &signs)?;
            let (matrix, _) = rotation.linearize().expect("rotations are linear");
            let verdict = classify_linear_extremal(space, &matrix, 1e-12, &budget)?;
            total += 1;
            if verdict.extremal {
                extremal_count += 1;
            } else {
                println!("unexpected split: perm {perm:?} signs {signs:?}");
            }
        }
    }

    println!("checked {total} signed permutations of the {n}-cube");
    println!("extremal: {extremal_count} (expected {})", total);

    // isometries preserve distances exactly; spot-check one pair
    let r = make_rotation(space, &[2, 0, 1], &[1.0, -1.0, 1.0])?;
    let x = Vector::new(vec![0.3, -0.7, 0.2])?;
    let y = Vector::new(vec![-0.1, 0.4, 0.9])?;
    let before = space.distance(&x, &y)?;
    let after = space.distance(&r.evaluate(&x)?, &r.evaluate(&y)?)?;
    println!("sample pair distance before {before} after {after}");
    Ok(())
}
