//! Porosity witnesses: around any mapping that is nearly isometric on
//! some close pair of points, collapsing that pair yields a nearby
//! center whose whole ball avoids the proper-decomposition members of
//! a target mapping. The certification sweeps explicit probes and
//! weights and verifies a positive expansion margin for each.

use crate::error::{Error, Result};
use crate::mapping::{distance_infty, Mapping, MethodTag};
use crate::sample::{self, ProbeBudget};
use crate::space::Vector;
use rand::Rng;

/// Width parameters tied to the weight window `[q, 1-q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PorosityParams {
    pub q: f64,
    pub epsilon: f64,
    /// Near-isometry slack: pairs must contract by less than `delta`.
    pub delta: f64,
    /// Ball-radius fraction of the center distance.
    pub alpha: f64,
}

impl PorosityParams {
    /// Derive the slack and radius fraction from the weight floor:
    /// both equal `q / (2 (1 + q))`, which keeps the refutation
    /// margin positive across the whole weight window.
    pub fn from_q_epsilon(q: f64, epsilon: f64) -> Result<PorosityParams> {
        if !(q > 0.0 && q < 0.5) {
            return Err(Error::param("q", format!("{q} outside (0, 1/2)")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::param("epsilon", format!("{epsilon} is not positive")));
        }
        let delta = q / (2.0 * (1.0 + q));
        let alpha = delta;
        // cross-check the constants against the closed form of the
        // worst-case contraction they must tolerate
        let lhs = (1.0 - delta - 2.0 * alpha) / (1.0 - 2.0 * alpha);
        let rhs = (2.0 - q) / 2.0;
        if (lhs - rhs).abs() > 1e-14 {
            return Err(Error::ResidualTooLarge {
                residual: (lhs - rhs).abs(),
                bound: 1e-14,
            });
        }
        Ok(PorosityParams {
            q,
            epsilon,
            delta,
            alpha,
        })
    }
}

/// A close pair of points on which a mapping is nearly isometric.
#[derive(Debug, Clone, PartialEq)]
pub struct NearIsometricPair {
    pub x0: Vector,
    pub y: Vector,
    /// Distance between the pair; also the retraction radius.
    pub eta: f64,
    /// Image distance over input distance, above `1 - delta`.
    pub ratio: f64,
}

/// Find a pair at distance below `epsilon` whose image distance ratio
/// exceeds `1 - delta`. Grid mappings are scanned exhaustively; other
/// mappings start from the Lipschitz witness pair and bisect the
/// segment, with seeded random pairs as fallback.
pub fn find_near_isometric_pair(
    g: &Mapping,
    params: &PorosityParams,
    budget: &ProbeBudget,
) -> Result<NearIsometricPair> {
    find_pair_attempt(g, params, budget, 0)
}

fn find_pair_attempt(
    g: &Mapping,
    params: &PorosityParams,
    budget: &ProbeBudget,
    attempt: u64,
) -> Result<NearIsometricPair> {
    let threshold = 1.0 - params.delta;
    let space = *g.space();
    if let Some(samples) = g.sample_domain() {
        let values: Vec<Vector> = samples
            .iter()
            .map(|p| g.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        let mut best_ratio = 0.0f64;
        let mut qualifying: Vec<(f64, f64, usize, usize)> = Vec::new();
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                let d = space.distance(&samples[i], &samples[j])?;
                if d <= 1e-12 || d >= params.epsilon {
                    continue;
                }
                let ratio = space.distance(&values[i], &values[j])? / d;
                best_ratio = best_ratio.max(ratio);
                if ratio > threshold {
                    qualifying.push((ratio, d, i, j));
                }
            }
        }
        qualifying.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        let Some(&(ratio, eta, i, j)) = qualifying.get(attempt as usize) else {
            return Err(Error::NoPairFound { best_ratio });
        };
        return Ok(NearIsometricPair {
            x0: samples[i].clone(),
            y: samples[j].clone(),
            eta,
            ratio,
        });
    }
    let lip = g.lipschitz_bounds(budget)?;
    let mut candidates: Vec<(Vector, Vector)> = Vec::new();
    if let Some(w) = lip.witness.clone() {
        candidates.push(w);
    }
    let mut rng = sample::stream_rng(budget.seed.wrapping_add(attempt), sample::STREAM_PAIRS);
    for _ in 0..budget.pairs.max(16) {
        candidates.push((
            sample::random_ball_point(&space, &mut rng),
            sample::random_ball_point(&space, &mut rng),
        ));
    }
    let ratio_of = |x: &Vector, y: &Vector| -> Result<Option<f64>> {
        let d = space.distance(x, y)?;
        if d <= 1e-12 {
            return Ok(None);
        }
        Ok(Some(space.distance(&g.evaluate(x)?, &g.evaluate(y)?)? / d))
    };
    let mut best_ratio = 0.0f64;
    for (mut x, mut y) in candidates {
        let Some(mut ratio) = ratio_of(&x, &y)? else {
            continue;
        };
        best_ratio = best_ratio.max(ratio);
        if ratio <= threshold {
            continue;
        }
        // halving the segment keeps the ratio on at least one side
        let mut eta = space.distance(&x, &y)?;
        let mut ok = true;
        while eta >= params.epsilon {
            let mid = x.add(&y).scale(0.5);
            let left = ratio_of(&x, &mid)?;
            let right = ratio_of(&mid, &y)?;
            if let Some(r) = left.filter(|r| *r > threshold) {
                y = mid;
                ratio = r;
            } else if let Some(r) = right.filter(|r| *r > threshold) {
                x = mid;
                ratio = r;
            } else {
                ok = false;
                break;
            }
            eta = space.distance(&x, &y)?;
            if eta <= 1e-12 {
                ok = false;
                break;
            }
        }
        if ok && eta < params.epsilon && eta > 1e-12 {
            return Ok(NearIsometricPair { x0: x, y, eta, ratio });
        }
    }
    Err(Error::NoPairFound { best_ratio })
}

/// A mapping near `g` whose ball of the stated radius contains no
/// proper-decomposition member: `collapsed` sends the near-isometric
/// pair to one point, so the second factor of any decomposition of a
/// near-isometry through this ball would have to expand the pair.
#[derive(Debug, Clone)]
pub struct PorosityWitness {
    pub params: PorosityParams,
    pub pair: NearIsometricPair,
    /// `g` composed with the radial retraction collapsing the pair.
    pub collapsed: Mapping,
    pub center_distance: f64,
    pub distance_method: MethodTag,
    pub radius: f64,
}

/// Collapse a near-isometric pair of `g` and measure the distance to
/// the collapsed mapping. Pairs whose collapse does not move `g` are
/// retried a bounded number of times.
pub fn build_porosity_witness(
    g: &Mapping,
    params: &PorosityParams,
    budget: &ProbeBudget,
) -> Result<PorosityWitness> {
    let check = g.check_membership(crate::decomp::CERT_MEMBERSHIP_TOL, budget)?;
    if !check.ok {
        return Err(Error::NotNonexpansive {
            ratio: check.lip_bound.max(check.value_bound),
        });
    }
    let mut degenerate = 0usize;
    for attempt in 0..8u64 {
        let pair = match find_pair_attempt(g, params, budget, attempt) {
            Ok(p) => p,
            Err(Error::NoPairFound { best_ratio }) => {
                if degenerate > 0 {
                    return Err(Error::DegenerateWitness { retries: degenerate });
                }
                return Err(Error::NoPairFound { best_ratio });
            }
            Err(e) => return Err(e),
        };
        let collapsed = Mapping::retract_compose(g.clone(), pair.eta, pair.x0.clone())?;
        // the retraction sends both pair points to the same center, so
        // the collapse is exact by construction
        let cy = collapsed.evaluate(&pair.y)?;
        let cx = collapsed.evaluate(&pair.x0)?;
        if g.space().distance(&cy, &cx)? != 0.0 {
            return Err(Error::param("pair", "collapse failed to identify the pair"));
        }
        let rep = distance_infty(&collapsed, g, budget)?;
        if rep.value <= 1e-12 {
            degenerate += 1;
            continue;
        }
        return Ok(PorosityWitness {
            params: *params,
            pair,
            collapsed,
            center_distance: rep.value,
            distance_method: rep.method,
            radius: params.alpha * rep.value,
        });
    }
    Err(Error::DegenerateWitness { retries: degenerate })
}

/// How a probe mapping was manufactured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// The collapsed center itself.
    Center,
    /// Convex shrink of the values toward a random ball point.
    Shrink,
    /// Translation by a vector from the feasible box.
    Shift,
    /// Accepted sample from the distance cube.
    Rejection,
    /// Convex combination with the zero mapping.
    ComboZero,
    /// Convex combination with a random constant mapping.
    ComboConstant,
}

impl ProbeKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProbeKind::Center => "CENTER",
            ProbeKind::Shrink => "SHRINK",
            ProbeKind::Shift => "SHIFT",
            ProbeKind::Rejection => "REJECTION",
            ProbeKind::ComboZero => "COMBO_ZERO",
            ProbeKind::ComboConstant => "COMBO_CONSTANT",
        }
    }
}

/// A candidate member inside the witness ball, with a certified bound
/// on its distance to the center.
#[derive(Debug, Clone)]
pub struct Probe {
    pub mapping: Mapping,
    pub dist_bound: f64,
    pub kind: ProbeKind,
}

/// One refuted probe: the minimum expansion margin over the weight
/// grid stayed positive.
#[derive(Debug, Clone)]
pub struct ProbeRefutation {
    pub probe_index: usize,
    pub kind: ProbeKind,
    pub dist_bound: f64,
    pub worst_lambda: f64,
    pub min_margin: f64,
}

/// Certificate that the witness ball contains no member of the
/// target's proper decompositions within the weight window.
#[derive(Debug, Clone)]
pub struct EmptyBallCertificate {
    pub probe_count: usize,
    pub lambda_step: f64,
    pub seed: u64,
    pub min_margin: f64,
    pub refutations: Vec<ProbeRefutation>,
}

fn grid_probes(
    witness: &PorosityWitness,
    domain: &[Vector],
    count: usize,
    seed: u64,
    budget: &ProbeBudget,
) -> Result<Vec<Probe>> {
    let tilde = &witness.collapsed;
    let space = *tilde.space();
    let radius = witness.radius;
    let values: Vec<Vector> = domain
        .iter()
        .map(|p| tilde.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = sample::stream_rng(seed, sample::STREAM_PROBES);
    let mut probes = vec![Probe {
        mapping: tilde.clone(),
        dist_bound: 0.0,
        kind: ProbeKind::Center,
    }];
    let shrink = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Probe> {
        let c = sample::random_ball_point(&space, rng);
        let reach = values
            .iter()
            .map(|v| space.norm.norm(&c.sub(v).coords))
            .fold(0.0f64, f64::max);
        let sigma = if reach <= 1e-15 {
            0.0
        } else {
            (radius / reach) * rng.gen_range(0.25..=1.0)
        };
        let shifted: Vec<Vector> = values.iter().map(|v| v.scale(1.0 - sigma).add(&c.scale(sigma))).collect();
        let dist = shifted
            .iter()
            .zip(&values)
            .map(|(a, b)| space.norm.norm(&a.sub(b).coords))
            .fold(0.0f64, f64::max);
        Ok(Probe {
            mapping: Mapping::grid(space, domain.to_vec(), shifted)?,
            dist_bound: dist,
            kind: ProbeKind::Shrink,
        })
    };
    while probes.len() < count {
        let probe = match probes.len() % 3 {
            0 => {
                // draw from the cube and keep only nonexpansive tables
                let mut accepted = None;
                for _ in 0..8 {
                    let shifted: Vec<Vector> = values
                        .iter()
                        .map(|v| {
                            Vector::new(
                                v.coords
                                    .iter()
                                    .map(|x| {
                                        (x + rng.gen_range(-radius..=radius)).clamp(-1.0, 1.0)
                                    })
                                    .collect(),
                            )
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let dist = shifted
                        .iter()
                        .zip(&values)
                        .map(|(a, b)| space.norm.norm(&a.sub(b).coords))
                        .fold(0.0f64, f64::max);
                    let table = Mapping::grid(space, domain.to_vec(), shifted)?;
                    if table.check_membership(1e-12, budget)?.ok {
                        accepted = Some(Probe {
                            mapping: table,
                            dist_bound: dist,
                            kind: ProbeKind::Rejection,
                        });
                        break;
                    }
                }
                match accepted {
                    Some(p) => p,
                    None => shrink(&mut rng)?,
                }
            }
            1 => shrink(&mut rng)?,
            _ => {
                // translation range that keeps every value inside the ball
                let dim = space.dim;
                let mut b = vec![0.0; dim];
                for (k, slot) in b.iter_mut().enumerate() {
                    let hi_room = 1.0
                        - values
                            .iter()
                            .map(|v| v.coords[k])
                            .fold(f64::NEG_INFINITY, f64::max);
                    let lo_room = 1.0
                        + values
                            .iter()
                            .map(|v| v.coords[k])
                            .fold(f64::INFINITY, f64::min);
                    let hi = radius.min(hi_room).max(0.0);
                    let lo = (-radius).max(-lo_room).min(0.0);
                    *slot = if hi > lo { rng.gen_range(lo..=hi) } else { 0.0 };
                }
                let offset = Vector::new(b)?;
                let shifted: Vec<Vector> = values.iter().map(|v| v.add(&offset)).collect();
                Probe {
                    mapping: Mapping::grid(space, domain.to_vec(), shifted)?,
                    dist_bound: space.norm.norm(&offset.coords),
                    kind: ProbeKind::Shift,
                }
            }
        };
        probes.push(probe);
    }
    Ok(probes)
}

fn expression_probes(
    witness: &PorosityWitness,
    count: usize,
    seed: u64,
) -> Result<Vec<Probe>> {
    let tilde = &witness.collapsed;
    let space = *tilde.space();
    let radius = witness.radius;
    let mut rng = sample::stream_rng(seed, sample::STREAM_PROBES);
    let mut probes = vec![Probe {
        mapping: tilde.clone(),
        dist_bound: 0.0,
        kind: ProbeKind::Center,
    }];
    while probes.len() < count {
        let probe = if probes.len() % 2 == 0 {
            // values stay within s of the center since the ball has
            // radius one
            let s = radius * rng.gen_range(0.25..=1.0);
            let zero = Mapping::constant(space, Vector::zero(space.dim))?;
            Probe {
                mapping: Mapping::convex_combo(s, tilde.clone(), zero)?,
                dist_bound: s,
                kind: ProbeKind::ComboZero,
            }
        } else {
            let c = sample::random_ball_point(&space, &mut rng);
            let norm_c = space.norm.norm(&c.coords);
            let s = radius / (1.0 + norm_c) * rng.gen_range(0.25..=1.0);
            let constant = Mapping::constant(space, c)?;
            Probe {
                mapping: Mapping::convex_combo(s, tilde.clone(), constant)?,
                dist_bound: s * (1.0 + norm_c),
                kind: ProbeKind::ComboConstant,
            }
        };
        probes.push(probe);
    }
    Ok(probes)
}

/// Sweep probes inside the witness ball against every weight on the
/// grid and certify that the implied second factor expands the
/// collapsed pair every time.
///
/// For a probe `g'` and weight `lambda`, a decomposition
/// `f = (1-lambda) g' + lambda h` forces
/// `h(y) - h(x0) = ((f(y) - f(x0)) - (1-lambda)(g'(y) - g'(x0))) / lambda`;
/// the certificate records the margin by which its norm exceeds the
/// pair distance. A nonpositive margin refutes the certification.
pub fn certify_ball_empty(
    witness: &PorosityWitness,
    f: &Mapping,
    probes: usize,
    lambda_step: f64,
    seed: u64,
    budget: &ProbeBudget,
) -> Result<EmptyBallCertificate> {
    if probes == 0 {
        return Err(Error::param("probes", "need at least one probe"));
    }
    if !(lambda_step > 0.0) || !lambda_step.is_finite() {
        return Err(Error::param(
            "lambda_step",
            format!("{lambda_step} is not positive"),
        ));
    }
    if f.space() != witness.collapsed.space() {
        return Err(Error::param("f", "target lives in a different space"));
    }
    let space = *f.space();
    let params = &witness.params;
    let x0 = &witness.pair.x0;
    let y = &witness.pair.y;
    let eta = witness.pair.eta;
    let fy = f.evaluate(y)?;
    let fx0 = f.evaluate(x0)?;
    let probe_list = match witness.collapsed.sample_domain() {
        Some(domain) => grid_probes(witness, &domain, probes, seed, budget)?,
        None => expression_probes(witness, probes, seed)?,
    };
    let mut lambdas: Vec<f64> = Vec::new();
    let mut l = params.q;
    while l < 1.0 - params.q - 1e-15 {
        lambdas.push(l);
        l += lambda_step;
    }
    lambdas.push(1.0 - params.q);
    let mut refutations = Vec::with_capacity(probe_list.len());
    let mut global_min = f64::INFINITY;
    for (idx, probe) in probe_list.iter().enumerate() {
        let gy = probe.mapping.evaluate(y)?;
        let gx0 = probe.mapping.evaluate(x0)?;
        let base = fy.sub(&fx0);
        let gdiff = gy.sub(&gx0);
        let mut min_margin = f64::INFINITY;
        let mut worst_lambda = params.q;
        for &lam in &lambdas {
            let hdiff = base.sub(&gdiff.scale(1.0 - lam)).scale(1.0 / lam);
            let margin = space.norm.norm(&hdiff.coords) - eta;
            if margin <= 0.0 {
                return Err(Error::CertificationRefuted {
                    probe: idx,
                    lambda: lam,
                    margin,
                });
            }
            if margin < min_margin {
                min_margin = margin;
                worst_lambda = lam;
            }
        }
        global_min = global_min.min(min_margin);
        refutations.push(ProbeRefutation {
            probe_index: idx,
            kind: probe.kind,
            dist_bound: probe.dist_bound,
            worst_lambda,
            min_margin,
        });
    }
    Ok(EmptyBallCertificate {
        probe_count: probe_list.len(),
        lambda_step,
        seed,
        min_margin: global_min,
        refutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::grid_points;
    use crate::space::{NormTag, SpaceContext};

    fn linf2() -> SpaceContext {
        SpaceContext::new(2, NormTag::Linf).unwrap()
    }

    fn budget() -> ProbeBudget {
        ProbeBudget {
            points: 48,
            pairs: 64,
            seed: 11,
        }
    }

    fn grid_identity(per_axis: usize) -> Mapping {
        let space = linf2();
        let samples = grid_points(&space, per_axis);
        Mapping::identity(space).sampled_on(&samples).unwrap()
    }

    #[test]
    fn params_tie_delta_and_alpha_to_q() {
        let p = PorosityParams::from_q_epsilon(0.1, 0.5).unwrap();
        assert!((p.delta - 0.1 / 2.2).abs() < 1e-16);
        assert_eq!(p.delta, p.alpha);
        assert!(PorosityParams::from_q_epsilon(0.5, 0.5).is_err());
        assert!(PorosityParams::from_q_epsilon(0.1, 0.0).is_err());
    }

    #[test]
    fn pair_scan_finds_adjacent_grid_points() {
        let g = grid_identity(9);
        let p = PorosityParams::from_q_epsilon(0.1, 0.5).unwrap();
        let pair = find_near_isometric_pair(&g, &p, &budget()).unwrap();
        assert_eq!(pair.ratio, 1.0);
        assert!((pair.eta - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pair_scan_reports_contractive_mappings() {
        let space = linf2();
        let samples = grid_points(&space, 5);
        let half = Mapping::linear(
            space,
            crate::linalg::Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(),
        )
        .unwrap()
        .sampled_on(&samples)
        .unwrap();
        let p = PorosityParams::from_q_epsilon(0.4, 0.6).unwrap();
        let err = find_near_isometric_pair(&half, &p, &budget()).unwrap_err();
        match err {
            Error::NoPairFound { best_ratio } => assert!((best_ratio - 0.5).abs() < 1e-12),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn pair_bisection_closes_in_on_linear_mappings() {
        let g = Mapping::identity(linf2());
        let p = PorosityParams::from_q_epsilon(0.25, 0.125).unwrap();
        let pair = find_near_isometric_pair(&g, &p, &budget()).unwrap();
        assert!(pair.eta < 0.125);
        assert!(pair.eta > 1e-12);
        assert!(pair.ratio > 1.0 - p.delta);
    }

    #[test]
    fn witness_collapses_the_pair_exactly() {
        let g = grid_identity(9);
        let p = PorosityParams::from_q_epsilon(0.1, 0.5).unwrap();
        let w = build_porosity_witness(&g, &p, &budget()).unwrap();
        assert!((w.center_distance - w.pair.eta).abs() < 1e-15);
        assert!(matches!(w.distance_method, MethodTag::Sampled(_)));
        assert!((w.radius - p.alpha * w.pair.eta).abs() < 1e-15);
        let cy = w.collapsed.evaluate(&w.pair.y).unwrap();
        let cx = w.collapsed.evaluate(&w.pair.x0).unwrap();
        assert_eq!(cy.coords, cx.coords);
    }

    #[test]
    fn witness_rejects_expanding_input() {
        let space = linf2();
        let g = Mapping::grid(
            space,
            vec![Vector::from(vec![0.0, 0.0]), Vector::from(vec![0.25, 0.0])],
            vec![Vector::from(vec![0.0, 0.0]), Vector::from(vec![0.9, 0.0])],
        )
        .unwrap();
        let p = PorosityParams::from_q_epsilon(0.1, 0.5).unwrap();
        assert!(build_porosity_witness(&g, &p, &budget()).is_err());
    }

    #[test]
    fn empty_ball_on_the_grid_identity() {
        let g = grid_identity(9);
        let p = PorosityParams::from_q_epsilon(0.1, 0.5).unwrap();
        let w = build_porosity_witness(&g, &p, &budget()).unwrap();
        let cert = certify_ball_empty(&w, &g, 40, 1e-2, 3, &budget()).unwrap();
        assert_eq!(cert.probe_count, 40);
        assert!(cert.min_margin > 0.0);
        // closed-form floor for the margin over the weight window
        let floor = w.pair.eta * p.q * (1.0 - 2.0 * p.alpha) / (1.0 - p.q) - 1e-9;
        assert!(
            cert.min_margin >= floor,
            "margin {} under floor {floor}",
            cert.min_margin
        );
        for r in &cert.refutations {
            assert!(r.dist_bound <= w.radius + 1e-15);
            assert!(r.min_margin > 0.0);
        }
    }

    #[test]
    fn empty_ball_certificates_are_seed_deterministic() {
        let g = grid_identity(9);
        let p = PorosityParams::from_q_epsilon(0.25, 0.5).unwrap();
        let w = build_porosity_witness(&g, &p, &budget()).unwrap();
        let c1 = certify_ball_empty(&w, &g, 25, 5e-2, 9, &budget()).unwrap();
        let c2 = certify_ball_empty(&w, &g, 25, 5e-2, 9, &budget()).unwrap();
        assert_eq!(c1.min_margin, c2.min_margin);
        let pairs: Vec<(f64, f64)> = c1
            .refutations
            .iter()
            .zip(&c2.refutations)
            .map(|(a, b)| (a.min_margin, b.min_margin))
            .collect();
        for (a, b) in pairs {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn expression_probes_cover_linear_centers() {
        let g = Mapping::identity(linf2());
        let p = PorosityParams::from_q_epsilon(0.25, 0.25).unwrap();
        let w = build_porosity_witness(&g, &p, &budget()).unwrap();
        let cert = certify_ball_empty(&w, &g, 9, 5e-2, 5, &budget()).unwrap();
        assert_eq!(cert.probe_count, 9);
        assert!(cert.min_margin > 0.0);
        let kinds: Vec<ProbeKind> = cert.refutations.iter().map(|r| r.kind).collect();
        assert!(kinds.contains(&ProbeKind::ComboZero));
        assert!(kinds.contains(&ProbeKind::ComboConstant));
    }

    #[test]
    fn certification_refuses_targets_that_collapse_the_pair() {
        // the center probe decomposes such a target trivially, so the
        // sweep must report a nonpositive margin instead of certifying
        let g = grid_identity(5);
        let p = PorosityParams::from_q_epsilon(0.4, 0.75).unwrap();
        let w = build_porosity_witness(&g, &p, &budget()).unwrap();
        let target = w.collapsed.clone();
        let err = certify_ball_empty(&w, &target, 10, 5e-2, 1, &budget()).unwrap_err();
        match err {
            Error::CertificationRefuted { probe, margin, .. } => {
                assert_eq!(probe, 0);
                assert!(margin <= 0.0);
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
