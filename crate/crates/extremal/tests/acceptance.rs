//! End-to-end acceptance checks, one test per guaranteed behavior.
//! Each test prints a single summary line on success; tolerances and
//! time budgets are pinned here rather than shared with the library so
//! the two sides cannot drift together.

use std::time::{Duration, Instant};

use rand::Rng;

use extremal::decomp::{
    complement_witness, merge_certs, ray_extend, DecompositionCertificate,
};
use extremal::doc::{emit_mapping, parse_mapping};
use extremal::extremality::{
    classify_linear_extremal, grid_extreme_oracle, make_rotation, pin_violation_witness,
    urysohn_pair, verify_pinning, UrysohnProfile,
};
use extremal::mapping::{distance_infty, Mapping};
use extremal::porosity::{build_porosity_witness, certify_ball_empty, PorosityParams};
use extremal::sample::{grid_points, random_ball_point, random_boundary_point, rng, ProbeBudget};
use extremal::{Matrix, NormTag, PointClass, SpaceContext, Vector};

const CLASSIFY_TOL: f64 = 1e-9;
const CERT_RESIDUAL_TOL: f64 = 1e-12;
const PART_NORM_SLACK: f64 = 1e-12;
const ISOMETRY_TOL: f64 = 1e-12;
const URYSOHN_TOL: f64 = 1e-12;
const SUITE_RESIDUAL_TOL: f64 = 1e-10;
const MERGE_SYSTEM_TOL: f64 = 1e-12;
const CLASSIFY_TIME_BUDGET: Duration = Duration::from_secs(60);
const POROSITY_TIME_BUDGET: Duration = Duration::from_secs(300);

fn linf(dim: usize) -> SpaceContext {
    SpaceContext::new(dim, NormTag::Linf).unwrap()
}

/// Rescale any row exceeding the dual ball back onto it.
fn rescale_rows(rows: &mut [Vec<f64>]) {
    for row in rows.iter_mut() {
        let s: f64 = row.iter().map(|v| v.abs()).sum();
        if s > 1.0 {
            for v in row.iter_mut() {
                *v /= s;
            }
        }
    }
}

/// A matrix is extremal exactly when every row is a signed standard
/// basis vector; decided here from the raw entries, independently of
/// the classifier.
fn row_oracle(rows: &[Vec<f64>]) -> bool {
    rows.iter().all(|row| {
        let nonzero: Vec<f64> = row.iter().copied().filter(|v| *v != 0.0).collect();
        nonzero.len() == 1 && nonzero[0].abs() == 1.0
    })
}

#[test]
fn classifier_agrees_with_the_row_oracle() {
    let start = Instant::now();
    let budget = ProbeBudget::default();
    let entries = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut instances = 0usize;
    let mut split = 0usize;

    let mut check = |space: SpaceContext, mut rows: Vec<Vec<f64>>| {
        let expected = row_oracle(&rows);
        rescale_rows(&mut rows);
        let matrix = Matrix::from_rows(rows).unwrap();
        let verdict = classify_linear_extremal(space, &matrix, CLASSIFY_TOL, &budget).unwrap();
        assert_eq!(
            verdict.extremal, expected,
            "classifier disagrees with the row oracle on {:?}",
            matrix.to_rows()
        );
        if !verdict.extremal {
            let cert = verdict.certificate.expect("split verdicts carry a certificate");
            assert!(cert.residual <= CERT_RESIDUAL_TOL, "residual {}", cert.residual);
            for part in [&cert.g, &cert.h] {
                let (m, _) = part.linearize().expect("parts of a linear split are linear");
                let norm = m.operator_norm(NormTag::Linf).unwrap();
                assert!(norm <= 1.0 + PART_NORM_SLACK, "part norm {norm}");
            }
            split += 1;
        }
        instances += 1;
    };

    // dimension two: the whole entry family
    let space2 = linf(2);
    for a in entries {
        for b in entries {
            for c in entries {
                for d in entries {
                    check(space2, vec![vec![a, b], vec![c, d]]);
                }
            }
        }
    }

    // dimension three: a seeded sample of the family
    let space3 = linf(3);
    let mut r = rng(401);
    for _ in 0..15_000 {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| entries[r.gen_range(0..entries.len())]).collect())
            .collect();
        check(space3, rows);
    }

    let elapsed = start.elapsed();
    assert!(instances >= 10_000);
    assert!(elapsed < CLASSIFY_TIME_BUDGET, "took {elapsed:?}");
    println!(
        "[PASS] classifier agrees with the row oracle on {instances} instances \
         ({split} split, {elapsed:?})"
    );
}

#[test]
fn signed_permutations_classify_extremal_and_preserve_distances() {
    let start = Instant::now();
    let budget = ProbeBudget::default();
    let mut rotations = 0usize;

    for dim in [2usize, 3] {
        let space = linf(dim);
        let mut r = rng(402);
        let pairs: Vec<(Vector, Vector)> = (0..1000)
            .map(|_| (random_ball_point(&space, &mut r), random_ball_point(&space, &mut r)))
            .collect();
        for perm in permutations(dim) {
            for mask in 0..(1u32 << dim) {
                let signs: Vec<f64> = (0..dim)
                    .map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 })
                    .collect();
                let rot = make_rotation(space, &perm, &signs).unwrap();
                let (matrix, _) = rot.linearize().unwrap();
                let verdict =
                    classify_linear_extremal(space, &matrix, ISOMETRY_TOL, &budget).unwrap();
                assert!(verdict.extremal, "rotation {perm:?}/{signs:?} failed to classify");
                let check = rot.is_isometry_on_pairs(&pairs, ISOMETRY_TOL).unwrap();
                assert!(check.isometry, "defect {}", check.max_defect);
                rotations += 1;
            }
        }
    }

    assert_eq!(rotations, 8 + 48);
    println!(
        "[PASS] all {rotations} signed permutations classify extremal and preserve \
         distances on 1000 pairs each ({:?})",
        start.elapsed()
    );
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for slot in 0..=p.len() {
                let mut q = p.clone();
                q.insert(slot, p.len());
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[test]
fn urysohn_pairs_satisfy_their_four_properties() {
    let start = Instant::now();
    let mut r = rng(403);
    let mut tight = 0usize;

    for idx in 0..1000 {
        let k = r.gen_range(1..=50);
        let x0 = r.gen_range(0..k);
        let mut coords: Vec<f64> = (0..k).map(|_| -1.0 + 2.0 * r.gen::<f64>()).collect();
        coords[x0] = -0.9 + 1.8 * r.gen::<f64>();
        let tight_case = idx % 4 == 0;
        if tight_case {
            // pull every other value up so the marked one is the minimum
            let fx0 = coords[x0];
            for v in coords.iter_mut() {
                *v = v.max(fx0);
            }
        }
        let f = Vector::new(coords).unwrap();
        let fx0 = f.coords[x0];
        let cap = (1.0 - fx0).min(1.0 + fx0);
        let gamma = cap * (0.05 + 0.9 * r.gen::<f64>());
        let profile = if tight_case || r.gen::<bool>() {
            UrysohnProfile::Indicator
        } else {
            UrysohnProfile::Tent
        };

        let pair = urysohn_pair(&f, x0, gamma, profile).unwrap();

        // pinned values at the marked coordinate
        assert!((pair.g_plus.coords[x0] - 1.0).abs() <= URYSOHN_TOL);
        assert!((pair.g_minus.coords[x0] + 1.0).abs() <= URYSOHN_TOL);
        // agreement with the base point off the neighborhood
        for x in 0..k {
            if !pair.neighborhood.contains(&x) {
                assert!((pair.g_plus.coords[x] - f.coords[x]).abs() <= URYSOHN_TOL);
                assert!((pair.g_minus.coords[x] - f.coords[x]).abs() <= URYSOHN_TOL);
            }
        }
        // deviation bounds
        let dev_plus = deviation(&f, &pair.g_plus);
        let dev_minus = deviation(&f, &pair.g_minus);
        assert!(dev_plus <= 1.0 - fx0 + gamma + URYSOHN_TOL);
        assert!(dev_minus <= 1.0 + fx0 + gamma + URYSOHN_TOL);

        // the gamma-free bound is attained when the marked value is
        // minimal over the neighborhood and the bump is an indicator
        let min_u = pair
            .neighborhood
            .iter()
            .map(|&x| f.coords[x])
            .fold(f64::INFINITY, f64::min);
        if profile == UrysohnProfile::Indicator && fx0 <= min_u {
            assert!(
                (dev_plus - (1.0 - fx0)).abs() <= URYSOHN_TOL,
                "bound not tight: deviation {dev_plus} vs {}",
                1.0 - fx0
            );
            tight += 1;
        }
    }

    assert!(tight >= 250, "only {tight} tight instances");
    println!(
        "[PASS] 1000 perturbation pairs satisfy all four properties; \
         {tight} attained the tight bound ({:?})",
        start.elapsed()
    );
}

fn deviation(f: &Vector, g: &Vector) -> f64 {
    f.coords
        .iter()
        .zip(&g.coords)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn pinning_defects_always_yield_strict_expansion() {
    let start = Instant::now();
    let mut r = rng(404);

    for _ in 0..100 {
        let k = r.gen_range(2..=10);
        let space = linf(k);
        let x0 = r.gen_range(0..k);
        let mut coords: Vec<f64> = (0..k).map(|_| -0.95 + 1.9 * r.gen::<f64>()).collect();
        coords[x0] = coords[x0].clamp(-0.9, 0.9);
        let f0 = Vector::new(coords).unwrap();

        // move the marked value somewhere else in the interior
        let target = loop {
            let t = -0.9 + 1.8 * r.gen::<f64>();
            if (t - f0.coords[x0]).abs() >= 0.05 {
                break t;
            }
        };
        let defect = target - f0.coords[x0];

        let mut boundary = f0.clone();
        boundary.coords[x0] = if defect > 0.0 { -1.0 } else { 1.0 };
        let mut lifted = f0.clone();
        lifted.coords[x0] = target;

        // pins the boundary sample, lifts the interior one
        let op = Mapping::grid(
            space,
            vec![f0.clone(), boundary.clone()],
            vec![lifted, boundary.clone()],
        )
        .unwrap();
        assert!(verify_pinning(&op, &[(boundary, x0)], CLASSIFY_TOL)
            .unwrap()
            .is_empty());

        let w = pin_violation_witness(&op, &f0, x0, CLASSIFY_TOL).unwrap();
        assert!(w.lhs > w.rhs, "no expansion: {} vs {}", w.lhs, w.rhs);
        assert!(w.margin > 0.0);
    }

    println!(
        "[PASS] 100 pinning defects each produced a strict expansion witness ({:?})",
        start.elapsed()
    );
}

fn random_dual_rows(r: &mut impl Rng, dim: usize) -> Matrix {
    let mut rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| -1.0 + 2.0 * r.gen::<f64>()).collect())
        .collect();
    for row in rows.iter_mut() {
        let s: f64 = row.iter().map(|v| v.abs()).sum();
        for v in row.iter_mut() {
            *v /= s.max(1.0);
        }
    }
    Matrix::from_rows(rows).unwrap()
}

/// A certificate around the contractive baseline `fm`:
/// `g = f + c d`, `h = f - c (1-lambda)/lambda d`, all linear.
fn certificate_around(
    r: &mut impl Rng,
    f: &Mapping,
    fm: &Matrix,
    lambda: f64,
    budget: &ProbeBudget,
) -> (DecompositionCertificate, Matrix, f64) {
    let dim = fm.rows();
    let d = random_dual_rows(r, dim);
    let c = 0.19 * (lambda / (1.0 - lambda)).min(1.0);
    let gm = fm.add(&d.scale(c)).unwrap();
    let hm = fm.sub(&d.scale(c * (1.0 - lambda) / lambda)).unwrap();
    let cert = DecompositionCertificate::build(
        f.clone(),
        lambda,
        Mapping::linear(*f.space(), gm.clone()).unwrap(),
        Mapping::linear(*f.space(), hm).unwrap(),
        budget,
    )
    .unwrap();
    (cert, gm, c)
}

#[test]
fn certificate_algebra_validates_on_random_pairs() {
    let start = Instant::now();
    let budget = ProbeBudget::default();
    let mut r = rng(405);

    for i in 0..1000 {
        let space = linf(2 + i % 2);
        let fm = random_dual_rows(&mut r, space.dim).scale(0.8);
        let f = Mapping::linear(space, fm.clone()).unwrap();
        let lambda = 0.1 + 0.8 * r.gen::<f64>();
        let (cert, gm, c) = certificate_around(&mut r, &f, &fm, lambda, &budget);
        assert!(cert.residual <= SUITE_RESIDUAL_TOL);

        // ray: an admissible multiplier keeps the member contractive
        let tmax = 0.195 / c;
        let t = -tmax + 2.0 * tmax * r.gen::<f64>();
        let ray = ray_extend(&cert, t, &budget).unwrap();
        assert!(ray.residual <= SUITE_RESIDUAL_TOL);
        assert!((0.0..1.0).contains(&ray.lambda), "mu {}", ray.lambda);
        let expected = fm.add(&gm.sub(&fm).unwrap().scale(t)).unwrap();
        let expected = Mapping::linear(space, expected).unwrap();
        let gap = distance_infty(&ray.g, &expected, &budget).unwrap();
        assert!(gap.value <= SUITE_RESIDUAL_TOL, "ray member off by {}", gap.value);
        if t > 0.0 {
            let mu = lambda * t / (lambda * t + 1.0 - lambda);
            assert!((ray.lambda - mu).abs() <= MERGE_SYSTEM_TOL);
        }

        // merge: the proof's scalar system, recomputed from scratch
        let lambda2 = 0.1 + 0.8 * r.gen::<f64>();
        let (cert2, _, _) = certificate_around(&mut r, &f, &fm, lambda2, &budget);
        let theta = 0.01 + 0.98 * r.gen::<f64>();
        let (l1, l2) = (cert.lambda, cert2.lambda);
        let merged = merge_certs(&cert, &cert2, theta, &budget).unwrap();
        let denom = 1.0 - (theta * l1 + (1.0 - theta) * l2);
        let beta = theta * (1.0 - l1) / denom;
        let lam = (1.0 - beta) * l1 + beta * l2;
        let mu = beta * l2 / lam;
        for (label, v) in [("beta", beta), ("lambda", lam), ("mu", mu)] {
            assert!((0.0..1.0).contains(&v), "{label} = {v}");
        }
        let system = [
            (1.0 - lam) * (1.0 - theta) - (1.0 - beta) * (1.0 - l1),
            (1.0 - lam) * theta - beta * (1.0 - l2),
            lam * (1.0 - mu) - (1.0 - beta) * l1,
            lam * mu - beta * l2,
        ];
        for eq in system {
            assert!(eq.abs() <= MERGE_SYSTEM_TOL, "system residual {eq}");
        }
        assert!((merged.lambda - lam).abs() <= MERGE_SYSTEM_TOL);
        assert!(merged.residual <= SUITE_RESIDUAL_TOL);

        // complement: peel the first factor out of a composite member
        let lc = 0.1 + 0.8 * r.gen::<f64>();
        let thc = 0.01 + 0.98 * r.gen::<f64>();
        let cc = 0.095 * (lc / (1.0 - lc)).min(1.0);
        let d1 = random_dual_rows(&mut r, space.dim);
        let d2 = random_dual_rows(&mut r, space.dim);
        let g1 = fm.add(&d1.scale(cc)).unwrap();
        let g2 = fm.add(&d2.scale(cc)).unwrap();
        let member_m = g1.scale(1.0 - thc).add(&g2.scale(thc)).unwrap();
        let hm = fm
            .sub(&member_m.scale(1.0 - lc))
            .unwrap()
            .scale(1.0 / lc);
        let member = Mapping::convex_combo(
            thc,
            Mapping::linear(space, g1).unwrap(),
            Mapping::linear(space, g2).unwrap(),
        )
        .unwrap();
        let combo_cert = DecompositionCertificate::build(
            f.clone(),
            lc,
            member,
            Mapping::linear(space, hm).unwrap(),
            &budget,
        )
        .unwrap();
        let peeled = complement_witness(&f, &combo_cert, thc, &budget).unwrap();
        let mu_c = lc * (1.0 - thc) + thc;
        assert!((peeled.lambda - mu_c).abs() <= MERGE_SYSTEM_TOL);
        assert!((0.0..1.0).contains(&peeled.lambda));
        assert!(peeled.residual <= SUITE_RESIDUAL_TOL);
    }

    println!(
        "[PASS] 1000 random certificates validated through ray, merge, and \
         complement constructions ({:?})",
        start.elapsed()
    );
}

#[test]
fn porosity_balls_certify_empty_around_the_grid_identity() {
    let start = Instant::now();
    let space = linf(2);
    let samples = grid_points(&space, 9);
    let g = Mapping::identity(space).sampled_on(&samples).unwrap();

    for q in [0.1, 0.25, 0.4] {
        let params = PorosityParams::from_q_epsilon(q, 0.5).unwrap();
        let budget = ProbeBudget { points: 256, pairs: 256, seed: 406 };
        let witness = build_porosity_witness(&g, &params, &budget).unwrap();
        assert!(witness.center_distance > 0.0);
        assert!(witness.center_distance <= params.epsilon);

        let cert = certify_ball_empty(&witness, &g, 1000, 1e-3, 406, &budget).unwrap();
        assert_eq!(cert.refutations.len(), 1000);
        assert!(cert.min_margin > 0.0, "margin {}", cert.min_margin);
        for refutation in &cert.refutations {
            assert!(refutation.min_margin > 0.0, "probe {} failed", refutation.probe_index);
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < POROSITY_TIME_BUDGET, "took {elapsed:?}");
    println!(
        "[PASS] 3000 probes refuted across three window widths; every empty-ball \
         certificate closed with positive margin ({elapsed:?})"
    );
}

#[test]
fn grid_oracle_matches_the_chain_fixtures() {
    let start = Instant::now();
    let budget = ProbeBudget::default();
    let space = linf(1);
    let chain: Vec<Vector> = (0..9)
        .map(|i| Vector::new(vec![-1.0 + 0.25 * i as f64]).unwrap())
        .collect();

    let id = Mapping::identity(space).sampled_on(&chain).unwrap();
    let out = grid_extreme_oracle(&id, CLASSIFY_TOL, &budget).unwrap();
    assert!(out.extreme);

    // the zero map admits a constant perturbation; verify it directly
    let zero = Mapping::constant(space, Vector::zero(1))
        .unwrap()
        .sampled_on(&chain)
        .unwrap();
    let out = grid_extreme_oracle(&zero, CLASSIFY_TOL, &budget).unwrap();
    assert!(!out.extreme);
    let t = out.max_delta;
    assert!(t > 0.0);
    for sign in [1.0, -1.0] {
        let values: Vec<Vector> = chain.iter().map(|_| Vector::new(vec![sign * t]).unwrap()).collect();
        let shifted = Mapping::grid(space, chain.clone(), values).unwrap();
        let check = shifted.check_membership(CLASSIFY_TOL, &budget).unwrap();
        assert!(check.ok, "perturbed map left the class");
    }

    // scaling maps are extreme exactly at the isometric endpoints
    for lambda in [-1.0, -0.9, -0.5, 0.0, 0.3, 0.5, 0.9, 1.0] {
        let scaled = Mapping::linear(space, Matrix::from_rows(vec![vec![lambda]]).unwrap())
            .unwrap()
            .sampled_on(&chain)
            .unwrap();
        let out = grid_extreme_oracle(&scaled, CLASSIFY_TOL, &budget).unwrap();
        assert_eq!(out.extreme, lambda.abs() == 1.0, "lambda {lambda}");
    }

    println!(
        "[PASS] chain fixtures: identity extreme, zero map perturbable, scalings \
         extreme only at the isometric endpoints ({:?})",
        start.elapsed()
    );
}

#[test]
fn point_taxonomy_matches_the_norm_geometry() {
    let start = Instant::now();
    let mut r = rng(408);

    // every boundary point of the round ball is exposed
    let l2 = SpaceContext::new(2, NormTag::L2).unwrap();
    for _ in 0..1000 {
        let x = random_boundary_point(&l2, &mut r);
        let report = extremal::classify_point(&l2, &x, CLASSIFY_TOL).unwrap();
        assert_eq!(report.class, PointClass::Exposed, "at {:?}", x.coords);
    }

    // cube facets versus cube corners
    let cube = linf(2);
    for _ in 0..1000 {
        let t = -0.9 + 1.8 * r.gen::<f64>();
        let (a, b) = if r.gen::<bool>() { (1.0, t) } else { (t, -1.0) };
        let report = extremal::classify_point(&cube, &Vector::new(vec![a, b]).unwrap(), CLASSIFY_TOL).unwrap();
        assert_eq!(report.class, PointClass::BoundaryNotAlmostExposed);
    }
    for corner in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
        let report =
            extremal::classify_point(&cube, &Vector::new(corner.to_vec()).unwrap(), CLASSIFY_TOL)
                .unwrap();
        assert_eq!(report.class, PointClass::Exposed);
    }

    // exposure implies almost-exposure on every norm
    let mut checked = 0usize;
    for norm in [NormTag::L1, NormTag::L2, NormTag::Linf] {
        let space = SpaceContext::new(2, norm).unwrap();
        for _ in 0..10_000 {
            let x = random_boundary_point(&space, &mut r);
            let report = extremal::classify_point(&space, &x, CLASSIFY_TOL).unwrap();
            if report.exposed {
                assert!(report.almost_exposed, "at {:?} under {:?}", x.coords, norm);
            }
            checked += 1;
        }
    }

    println!(
        "[PASS] taxonomy verified: round boundary exposed, cube facets flagged, \
         exposure implies almost-exposure on {checked} samples ({:?})",
        start.elapsed()
    );
}

#[test]
fn reports_repeat_byte_identically_and_documents_round_trip() {
    let start = Instant::now();

    // repeated runs of the same seeded command agree byte for byte
    let dir = tempfile::tempdir().unwrap();
    let grid_input = dir.path().join("grid.json");
    let space = linf(2);
    let samples = grid_points(&space, 5);
    let g = Mapping::identity(space).sampled_on(&samples).unwrap();
    std::fs::write(&grid_input, emit_mapping(&g)).unwrap();
    let linear_input = dir.path().join("linear.json");
    let halved = Mapping::linear(
        space,
        Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap(),
    )
    .unwrap();
    std::fs::write(&linear_input, emit_mapping(&halved)).unwrap();

    let bin = env!("CARGO_BIN_EXE_extremal");
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .env_remove("EXTREMAL_TOL")
            .output()
            .unwrap();
        assert!(out.status.success(), "exit {:?}", out.status);
        out.stdout
    };
    let grid_str = grid_input.to_str().unwrap();
    let linear_str = linear_input.to_str().unwrap();
    for args in [
        vec!["porosity", "--input", grid_str, "--seed", "11", "--probes", "32", "--epsilon", "0.6"],
        vec!["classify", "--input", linear_str],
        vec!["oracle", "--input", grid_str, "--format", "csv-summary"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first, second, "outputs diverged for {args:?}");
        assert!(!first.is_empty());
    }

    // canonical document encoding survives a parse round trip
    let mut r = rng(409);
    for _ in 0..1000 {
        let dim = r.gen_range(1..=3);
        let norm = [NormTag::L1, NormTag::L2, NormTag::Linf][r.gen_range(0..3)];
        let space = SpaceContext::new(dim, norm).unwrap();
        let m = random_document(&mut r, space, 2);
        let text = emit_mapping(&m);
        let parsed = parse_mapping(&text).unwrap();
        assert_eq!(parsed, m, "structure changed across the round trip");
        assert_eq!(emit_mapping(&parsed), text, "bytes changed across the round trip");
    }

    println!(
        "[PASS] seeded runs repeat byte for byte; 1000 documents round-trip \
         losslessly ({:?})",
        start.elapsed()
    );
}

fn random_document(r: &mut impl Rng, space: SpaceContext, depth: usize) -> Mapping {
    let dim = space.dim;
    if depth == 0 || r.gen::<f64>() < 0.45 {
        return match r.gen_range(0..3) {
            0 => {
                let rows: Vec<Vec<f64>> = (0..dim)
                    .map(|_| (0..dim).map(|_| -1.0 + 2.0 * r.gen::<f64>()).collect())
                    .collect();
                Mapping::linear(space, Matrix::from_rows(rows).unwrap()).unwrap()
            }
            1 => {
                let rows: Vec<Vec<f64>> = (0..dim)
                    .map(|_| (0..dim).map(|_| -1.0 + 2.0 * r.gen::<f64>()).collect())
                    .collect();
                let offset = random_ball_point(&space, &mut chacha(r));
                Mapping::affine(space, Matrix::from_rows(rows).unwrap(), offset).unwrap()
            }
            _ => {
                let k = r.gen_range(1..=4);
                let mut c = chacha(r);
                let samples: Vec<Vector> = (0..k).map(|_| random_ball_point(&space, &mut c)).collect();
                let values: Vec<Vector> = (0..k).map(|_| random_ball_point(&space, &mut c)).collect();
                Mapping::grid(space, samples, values).unwrap()
            }
        };
    }
    match r.gen_range(0..3) {
        0 => Mapping::convex_combo(
            r.gen::<f64>(),
            random_document(r, space, depth - 1),
            random_document(r, space, depth - 1),
        )
        .unwrap(),
        1 => Mapping::retract_compose(
            random_document(r, space, depth - 1),
            0.1 + 1.9 * r.gen::<f64>(),
            random_ball_point(&space, &mut chacha(r)),
        )
        .unwrap(),
        _ => Mapping::translate(
            random_document(r, space, depth - 1),
            Vector::new((0..dim).map(|_| -1.0 + 2.0 * r.gen::<f64>()).collect()).unwrap(),
        )
        .unwrap(),
    }
}

fn chacha(r: &mut impl Rng) -> rand_chacha::ChaCha8Rng {
    rng(r.gen::<u64>())
}
