//! Build a Urysohn-style pair around a function on a finite index set.
//! Given f, a point x0, and a radius gamma, the construction returns
//! g_plus and g_minus that straddle f, agree with it far from x0, and
//! deviate by a controlled amount near it.

use extremal::extremality::{urysohn_pair, UrysohnProfile};
use extremal::Vector;

fn print_profile(label: &str, v: &Vector) {
    let cells: Vec<String> = v.coords.iter().map(|c| format!("{c:+.3}")).collect();
    println!("{label:<8} {}", cells.join(" "));
}

fn main() -> Result<(), extremal::Error> {
    let f = Vector::new(vec![0.2, -0.4, 0.1, 0.6, -0.8, 0.0, 0.3])?;
    let x0 = 2;
    let gamma = 0.35;

    for profile in [UrysohnProfile::Tent, UrysohnProfile::Indicator] {
        let pair = urysohn_pair(&f, x0, gamma, profile)?;
        println!("profile {:?}, neighborhood {:?}", profile, pair.neighborhood);
        print_profile("f", &pair.base);
        print_profile("bump", &pair.bump);
        print_profile("g_plus", &pair.g_plus);
        print_profile("g_minus", &pair.g_minus);

        // the defining inequalities, checked at every index
        let n = f.len();
        for k in 0..n {
            let (lo, hi) = (pair.g_minus.coords[k], pair.g_plus.coords[k]);
            assert!(lo <= f.coords[k] + 1e-12 && f.coords[k] <= hi + 1e-12);
            assert!((-1.0..=1.0).contains(&lo) && (-1.0..=1.0).contains(&hi));
        }
        // at x0 the pair reaches the ball boundary
        assert!((pair.g_plus.coords[x0] - 1.0).abs() <= 1e-12);
        assert!((pair.g_minus.coords[x0] + 1.0).abs() <= 1e-12);
        println!("g_minus <= f <= g_plus everywhere; pinned to +/-1 at x0\n");
    }
    Ok(())
}
