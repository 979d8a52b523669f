//! Convex-decomposition certificates and the geometry of the member
//! set `P_f = { g : f = (1-lambda) g + lambda h for some lambda in
//! [0,1), h in M }`: feasible-weight computation, ray extension,
//! certificate merging, complement witnesses, and affine-hull probes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mapping::{distance_infty, Expr, Mapping, MethodTag};
use crate::sample::{self, ProbeBudget};
use crate::space::{NormTag, SpaceContext, Vector};

/// Recombination residual accepted for general certificates.
pub const CERT_RESIDUAL_BOUND: f64 = 1e-10;

/// Residual accepted for certificates emitted by closed-form
/// constructions (classifier, merge, ray).
pub const STRICT_RESIDUAL_BOUND: f64 = 1e-12;

/// Membership tolerance for certificate parts.
pub const CERT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Feasible-weight bisection tolerance.
pub const LAMBDA_BISECT_TOL: f64 = 1e-10;

/// Membership tolerance for scanned weights.
const SCAN_TOL: f64 = 1e-9;

/// A verified triple witnessing `target = (1-lambda) g + lambda h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCertificate {
    pub lambda: f64,
    pub g: Mapping,
    pub h: Mapping,
    pub target: Mapping,
    pub residual: f64,
    pub residual_method: MethodTag,
}

impl DecompositionCertificate {
    /// Construct and validate: `lambda` in [0,1), recombination
    /// residual within `CERT_RESIDUAL_BOUND`, both parts nonexpansive
    /// self-maps.
    pub fn build(
        target: Mapping,
        lambda: f64,
        g: Mapping,
        h: Mapping,
        budget: &ProbeBudget,
    ) -> Result<DecompositionCertificate> {
        Self::build_with_bound(target, lambda, g, h, budget, CERT_RESIDUAL_BOUND)
    }

    pub fn build_with_bound(
        target: Mapping,
        lambda: f64,
        g: Mapping,
        h: Mapping,
        budget: &ProbeBudget,
        residual_bound: f64,
    ) -> Result<DecompositionCertificate> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::param("lambda", format!("{lambda} outside [0, 1)")));
        }
        for part in [&g, &h] {
            let check = part.check_membership(CERT_MEMBERSHIP_TOL, budget)?;
            if !check.ok {
                return if check.lip_bound > 1.0 + CERT_MEMBERSHIP_TOL {
                    Err(Error::NotNonexpansive {
                        ratio: check.lip_bound,
                    })
                } else {
                    Err(Error::NotSelfMap {
                        norm: check.value_bound,
                    })
                };
            }
        }
        let combo = Mapping::convex_combo(lambda, g.clone(), h.clone())?;
        let rep = distance_infty(&combo, &target, budget)?;
        if rep.value > residual_bound {
            return Err(Error::ResidualTooLarge {
                residual: rep.value,
                bound: residual_bound,
            });
        }
        Ok(DecompositionCertificate {
            lambda,
            g,
            h,
            target,
            residual: rep.value,
            residual_method: rep.method,
        })
    }

    /// The trivial membership of `f` in its own `P_f`: `lambda = 0`,
    /// with `h` recorded as `f` by convention.
    pub fn trivial(f: &Mapping, budget: &ProbeBudget) -> Result<DecompositionCertificate> {
        DecompositionCertificate::build(f.clone(), 0.0, f.clone(), f.clone(), budget)
    }
}

/// How a feasible-weight set was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeasibilityMethod {
    /// Per-row convex constraints bisected in closed form (linear
    /// mappings on the sup norm).
    ExactLinear,
    /// Membership tested on a uniform weight grid, widened to
    /// intervals only where a Lipschitz-in-lambda argument permits.
    GridScan { step: f64 },
}

/// Weights `lambda` in the window `[q, 1-q]` for which
/// `h(lambda) = (f - (1-lambda) g) / lambda` stays in `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleLambdaSet {
    pub q: f64,
    pub intervals: Vec<(f64, f64)>,
    pub method: FeasibilityMethod,
}

impl FeasibleLambdaSet {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.intervals
            .iter()
            .any(|(a, b)| *a - 1e-12 <= lambda && lambda <= *b + 1e-12)
    }
}

/// Feasible weights for `g` as a member of `P_{f,q}`.
pub fn pfq_membership(
    f: &Mapping,
    g: &Mapping,
    q: f64,
    method: FeasibilityMethod,
    budget: &ProbeBudget,
) -> Result<FeasibleLambdaSet> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::param("q", format!("{q} outside (0, 1/2)")));
    }
    if f.space() != g.space() {
        return Err(Error::param("g", "operand spaces differ"));
    }
    match method {
        FeasibilityMethod::ExactLinear => exact_linear_feasible(f, g, q),
        FeasibilityMethod::GridScan { step } => scan_feasible(f, g, q, step, budget),
    }
}

fn exact_linear_feasible(f: &Mapping, g: &Mapping, q: f64) -> Result<FeasibleLambdaSet> {
    if f.space().norm != NormTag::Linf {
        return Err(Error::param("method", "exact route requires the sup norm"));
    }
    let (fa, fb) = f
        .linearize()
        .ok_or_else(|| Error::param("method", "exact route requires linear mappings"))?;
    let (ga, gb) = g
        .linearize()
        .ok_or_else(|| Error::param("method", "exact route requires linear mappings"))?;
    if fb.coords.iter().any(|v| *v != 0.0) || gb.coords.iter().any(|v| *v != 0.0) {
        return Err(Error::param("method", "exact route requires zero offsets"));
    }
    let dim = fa.rows();
    // row constraint: w_k(l) = ||F_k - (1-l) G_k||_1 - l <= 0,
    // convex and piecewise linear in l, so its sublevel set on the
    // window is one closed interval per row
    let w = |k: usize, l: f64| -> f64 {
        (0..dim)
            .map(|j| (fa.get(k, j) - (1.0 - l) * ga.get(k, j)).abs())
            .sum::<f64>()
            - l
    };
    let (mut lo, mut hi) = (q, 1.0 - q);
    for k in 0..dim {
        let Some((a, b)) = convex_sublevel_interval(&|l| w(k, l), q, 1.0 - q) else {
            return Ok(FeasibleLambdaSet {
                q,
                intervals: vec![],
                method: FeasibilityMethod::ExactLinear,
            });
        };
        lo = lo.max(a);
        hi = hi.min(b);
        if lo > hi {
            return Ok(FeasibleLambdaSet {
                q,
                intervals: vec![],
                method: FeasibilityMethod::ExactLinear,
            });
        }
    }
    // independent confirmation at the endpoints and midpoint
    for l in [lo, 0.5 * (lo + hi), hi] {
        let h = fa.sub(&ga.scale(1.0 - l))?.scale(1.0 / l);
        let norm = h.operator_norm(NormTag::Linf)?;
        if norm > 1.0 + 1e-9 {
            return Err(Error::ResidualTooLarge {
                residual: norm - 1.0,
                bound: 1e-9,
            });
        }
    }
    Ok(FeasibleLambdaSet {
        q,
        intervals: vec![(lo, hi)],
        method: FeasibilityMethod::ExactLinear,
    })
}

/// Sublevel interval `{x in [a, b] : w(x) <= 0}` of a convex
/// function, found by ternary search for the minimum and bisection
/// for the crossings. Returned endpoints are strictly feasible.
fn convex_sublevel_interval(w: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if w(m1) <= w(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let xmin = 0.5 * (lo + hi);
    if w(xmin) > 0.0 {
        return None;
    }
    let cross = |mut bad: f64, mut good: f64| -> f64 {
        // invariant: w(bad) > 0 >= w(good)
        while (bad - good).abs() > LAMBDA_BISECT_TOL {
            let mid = 0.5 * (bad + good);
            if w(mid) > 0.0 {
                bad = mid;
            } else {
                good = mid;
            }
        }
        good
    };
    let left = if w(a) <= 0.0 { a } else { cross(a, xmin) };
    let right = if w(b) <= 0.0 { b } else { cross(b, xmin) };
    Some((left, right))
}

fn scan_feasible(
    f: &Mapping,
    g: &Mapping,
    q: f64,
    step: f64,
    budget: &ProbeBudget,
) -> Result<FeasibleLambdaSet> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::param("step", format!("{step} is not positive")));
    }
    let space = *f.space();
    let points: Vec<Vector> = match (f.sample_domain(), g.sample_domain()) {
        (Some(l), Some(r)) => l
            .into_iter()
            .filter(|p| {
                r.iter()
                    .any(|s| space.distance(p, s).unwrap_or(f64::INFINITY) <= 1e-12)
            })
            .collect(),
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => {
            let mut pts = sample::canonical_points(&space);
            let mut rng = sample::stream_rng(budget.seed, sample::STREAM_POINTS);
            for _ in 0..budget.points.min(64) {
                pts.push(sample::random_ball_point(&space, &mut rng));
            }
            pts
        }
    };
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    let fv: Vec<Vector> = points
        .iter()
        .map(|p| f.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    let gv: Vec<Vector> = points
        .iter()
        .map(|p| g.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    // d_infty(h(l), h(l')) = |1/l - 1/l'| * sup ||f - g||, so a point
    // certificate widens to a window in 1/lambda space
    let mut dist_fg = 0.0f64;
    let mut rho_min = f64::INFINITY;
    for i in 0..points.len() {
        dist_fg = dist_fg.max(space.distance(&fv[i], &gv[i])?);
        for j in (i + 1)..points.len() {
            let d = space.distance(&points[i], &points[j])?;
            if d > 1e-12 {
                rho_min = rho_min.min(d);
            }
        }
    }
    if dist_fg <= 1e-15 {
        // h(lambda) = f for every lambda
        let check = f.check_membership(SCAN_TOL, budget)?;
        if !check.ok {
            return Err(Error::NotNonexpansive {
                ratio: check.lip_bound,
            });
        }
        return Ok(FeasibleLambdaSet {
            q,
            intervals: vec![(q, 1.0 - q)],
            method: FeasibilityMethod::GridScan { step },
        });
    }
    let mut lambdas: Vec<f64> = Vec::new();
    let mut l = q;
    while l < 1.0 - q - 1e-15 {
        lambdas.push(l);
        l += step;
    }
    lambdas.push(1.0 - q);
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &li in &lambdas {
        let hv: Vec<Vector> = fv
            .iter()
            .zip(&gv)
            .map(|(fp, gp)| fp.sub(&gp.scale(1.0 - li)).scale(1.0 / li))
            .collect();
        let mut value_bound = 0.0f64;
        for v in &hv {
            value_bound = value_bound.max(space.norm.norm(&v.coords));
        }
        let mut lip_bound = 0.0f64;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = space.distance(&points[i], &points[j])?;
                if d <= 1e-12 {
                    continue;
                }
                lip_bound = lip_bound.max(space.distance(&hv[i], &hv[j])? / d);
            }
        }
        if value_bound > 1.0 + SCAN_TOL || lip_bound > 1.0 + SCAN_TOL {
            continue;
        }
        // strict margins allow widening around the certified point
        let margin = (1.0 - value_bound).min((1.0 - lip_bound) * rho_min / 2.0);
        if margin <= 0.0 {
            intervals.push((li, li));
            continue;
        }
        let shift = margin / dist_fg;
        let inv = 1.0 / li;
        let left = (1.0 / (inv + shift)).max(q);
        let right = if inv - shift > 1e-12 {
            (1.0 / (inv - shift)).min(1.0 - q)
        } else {
            1.0 - q
        };
        intervals.push((left, right));
    }
    intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in intervals {
        match merged.last_mut() {
            Some(last) if a <= last.1 + 1e-12 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    Ok(FeasibleLambdaSet {
        q,
        intervals: merged,
        method: FeasibilityMethod::GridScan { step },
    })
}

/// `f + t (g - f)` as an expression: a convex combination for `t` in
/// [0,1], an affine map when both operands linearize, a grid over the
/// common samples otherwise.
fn member_on_ray(f: &Mapping, g: &Mapping, t: f64) -> Result<Mapping> {
    if (0.0..=1.0).contains(&t) {
        return Mapping::convex_combo(t, f.clone(), g.clone());
    }
    if let (Some((fa, fb)), Some((ga, gb))) = (f.linearize(), g.linearize()) {
        let a = fa.scale(1.0 - t).add(&ga.scale(t))?;
        let b = fb.scale(1.0 - t).add(&gb.scale(t));
        return Mapping::affine(*f.space(), a, b);
    }
    let domain = match (f.sample_domain(), g.sample_domain()) {
        (Some(l), Some(r)) => {
            let space = f.space();
            let common: Vec<Vector> = l
                .iter()
                .filter(|p| {
                    r.iter()
                        .any(|s| space.distance(p, s).unwrap_or(f64::INFINITY) <= 1e-12)
                })
                .cloned()
                .collect();
            if common.is_empty() {
                return Err(Error::IncompatibleGrids {
                    left: l.len(),
                    right: r.len(),
                    common: 0,
                });
            }
            common
        }
        (Some(d), None) | (None, Some(d)) => d,
        (None, None) => {
            return Err(Error::param(
                "t",
                "extension beyond [0, 1] needs affine or grid operands",
            ))
        }
    };
    let values = domain
        .iter()
        .map(|p| {
            let fp = f.evaluate(p)?;
            let gp = g.evaluate(p)?;
            Ok(fp.axpy(t, &gp.sub(&fp)))
        })
        .collect::<Result<Vec<_>>>()?;
    Mapping::grid(*f.space(), domain, values)
}

/// Extend a certificate along the ray through its member: the point
/// `f + t (g - f)` joins `P_f` with weight `mu = lambda t / (lambda t
/// + 1 - lambda)`, reusing the old `h`. Negative `t` first swaps the
/// roles of `g` and `h`.
pub fn ray_extend(
    cert: &DecompositionCertificate,
    t: f64,
    budget: &ProbeBudget,
) -> Result<DecompositionCertificate> {
    if !t.is_finite() {
        return Err(Error::param("t", "not finite"));
    }
    if t == 0.0 {
        return DecompositionCertificate::trivial(&cert.target, budget);
    }
    if t < 0.0 {
        if cert.lambda == 0.0 {
            // g coincides with f, so the ray is a single point
            return DecompositionCertificate::trivial(&cert.target, budget);
        }
        let swapped = DecompositionCertificate::build(
            cert.target.clone(),
            1.0 - cert.lambda,
            cert.h.clone(),
            cert.g.clone(),
            budget,
        )?;
        let s = -t * cert.lambda / (1.0 - cert.lambda);
        return ray_extend(&swapped, s, budget);
    }
    let member = member_on_ray(&cert.target, &cert.g, t)?;
    let mu = cert.lambda * t / (cert.lambda * t + 1.0 - cert.lambda);
    DecompositionCertificate::build(cert.target.clone(), mu, member, cert.h.clone(), budget)
}

fn require_same_target(
    c1: &DecompositionCertificate,
    c2: &DecompositionCertificate,
) -> Result<()> {
    if c1.target == c2.target {
        return Ok(());
    }
    if let (Some((a1, b1)), Some((a2, b2))) = (c1.target.linearize(), c2.target.linearize()) {
        let space = c1.target.space();
        let d = a1.sub(&a2)?.operator_norm(space.norm)?
            + space.norm.norm(&b1.sub(&b2).coords);
        if d <= 1e-12 {
            return Ok(());
        }
    }
    Err(Error::param("certificates", "targets differ"))
}

/// Merge two certificates for the same `f` into one for the convex
/// combination of their members.
pub fn merge_certs(
    c1: &DecompositionCertificate,
    c2: &DecompositionCertificate,
    theta: f64,
    budget: &ProbeBudget,
) -> Result<DecompositionCertificate> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::param("theta", format!("{theta} outside [0, 1)")));
    }
    require_same_target(c1, c2)?;
    if theta == 0.0 {
        return Ok(c1.clone());
    }
    let (l1, l2) = (c1.lambda, c2.lambda);
    let denom = 1.0 - (theta * l1 + (1.0 - theta) * l2);
    if denom <= 1e-15 {
        return Err(Error::param("theta", "combined weight reaches 1"));
    }
    let beta = theta * (1.0 - l1) / denom;
    let lambda = (1.0 - beta) * l1 + beta * l2;
    let mu = if lambda == 0.0 { 0.0 } else { beta * l2 / lambda };
    let system = [
        (1.0 - lambda) * (1.0 - theta) - (1.0 - beta) * (1.0 - l1),
        (1.0 - lambda) * theta - beta * (1.0 - l2),
        lambda * (1.0 - mu) - (1.0 - beta) * l1,
        lambda * mu - beta * l2,
    ];
    for eq in system {
        if eq.abs() > 1e-12 {
            return Err(Error::ResidualTooLarge {
                residual: eq.abs(),
                bound: 1e-12,
            });
        }
    }
    if !(0.0..1.0).contains(&beta) || !(0.0..1.0).contains(&lambda) {
        return Err(Error::param("theta", "merged parameters left [0, 1)"));
    }
    let member = Mapping::convex_combo(theta, c1.g.clone(), c2.g.clone())?;
    let h = Mapping::convex_combo(mu, c1.h.clone(), c2.h.clone())?;
    DecompositionCertificate::build(c1.target.clone(), lambda, member, h, budget)
}

/// From a certificate whose member is `(1-theta) g1 + theta g2`,
/// produce one whose member is `g1` alone, absorbing `g2` into the
/// `h` side with weight `mu = lambda (1-theta) + theta`.
pub fn complement_witness(
    f: &Mapping,
    combo_cert: &DecompositionCertificate,
    theta: f64,
    budget: &ProbeBudget,
) -> Result<DecompositionCertificate> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::param("theta", format!("{theta} outside [0, 1)")));
    }
    if combo_cert.target != *f {
        return Err(Error::param("combo_cert", "certificate target is not f"));
    }
    let Expr::Combo {
        lambda: inner_theta,
        left,
        right,
    } = combo_cert.g.expr()
    else {
        return Err(Error::param(
            "combo_cert",
            "member is not a convex combination",
        ));
    };
    if (inner_theta - theta).abs() > 1e-12 {
        return Err(Error::param(
            "theta",
            format!("member weight {inner_theta} does not match {theta}"),
        ));
    }
    let lambda = combo_cert.lambda;
    let mu = lambda * (1.0 - theta) + theta;
    if mu == 0.0 {
        return Err(Error::param(
            "theta",
            "lambda = theta = 0 leaves only the trivial member",
        ));
    }
    let space = *f.space();
    let g1 = Mapping::from_parts(space, (**left).clone());
    let g2 = Mapping::from_parts(space, (**right).clone());
    let inner = Mapping::convex_combo(lambda / mu, g2, combo_cert.h.clone())?;
    DecompositionCertificate::build(f.clone(), mu, g1, inner, budget)
}

/// A maximal independent set of member directions together with the
/// averaged interior member `tilde_g` and its certificate.
#[derive(Debug, Clone)]
pub struct AffineHullBasis {
    pub base: Mapping,
    pub direction_indices: Vec<usize>,
    pub betas: Vec<f64>,
    pub tilde_g: Mapping,
    pub tilde_cert: DecompositionCertificate,
    pub feasibility: FeasibleLambdaSet,
}

#[derive(Debug, Clone)]
pub enum CandidateOutcome {
    InHull {
        alphas: Vec<f64>,
        cert: DecompositionCertificate,
    },
    NotInHull {
        residual: f64,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone)]
pub struct AffineHullProbeReport {
    pub basis: AffineHullBasis,
    pub candidates: Vec<CandidateOutcome>,
}

/// Probe points for direction independence: cube vertices plus facet
/// midpoints on the sup norm, the canonical set otherwise.
fn hull_probe_points(space: &SpaceContext) -> Vec<Vector> {
    if space.norm == NormTag::Linf && space.dim <= 10 {
        let mut pts = vec![Vector::zero(space.dim)];
        for mask in 0..(1usize << space.dim) {
            let coords = (0..space.dim)
                .map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            pts.push(Vector { coords });
        }
        for k in 0..space.dim {
            pts.push(Vector::unit(space.dim, k));
            pts.push(Vector::unit(space.dim, k).scale(-1.0));
        }
        pts
    } else {
        sample::canonical_points(space)
    }
}

fn direction_row(f: &Mapping, g: &Mapping, points: &[Vector]) -> Result<Vec<f64>> {
    let mut row = Vec::with_capacity(points.len() * f.space().dim);
    for p in points {
        let d = g.evaluate(p)?.sub(&f.evaluate(p)?);
        row.extend_from_slice(&d.coords);
    }
    Ok(row)
}

/// Extract independent directions from the certificates, build the
/// averaged member `tilde_g = f + (1/n) sum beta_i (g_i - f)` through
/// ray extensions and merges, cross-check it with `pfq_membership`,
/// and test each candidate for hull membership with a constructive
/// certificate on success.
pub fn affine_hull_probe(
    f: &Mapping,
    certs: &[DecompositionCertificate],
    candidates: &[Mapping],
    alphas: Option<&[f64]>,
    budget: &ProbeBudget,
) -> Result<AffineHullProbeReport> {
    if certs.is_empty() {
        return Err(Error::param("certs", "no certificates supplied"));
    }
    if let Some(a) = alphas {
        if a.len() != certs.len() {
            return Err(Error::param("alphas", "length does not match certificates"));
        }
        if a.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::param("alphas", "weights must be positive"));
        }
    }
    for c in certs {
        if c.target != *f {
            return Err(Error::param("certs", "certificate target is not f"));
        }
    }
    let points = hull_probe_points(f.space());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut selected: Vec<usize> = Vec::new();
    for (i, c) in certs.iter().enumerate() {
        let row = direction_row(f, &c.g, &points)?;
        if row.iter().map(|v| v.abs()).fold(0.0, f64::max) <= 1e-12 {
            continue;
        }
        let mut trial = rows.clone();
        trial.push(row.clone());
        let rank = Matrix::from_rows(trial)?.rank(crate::linalg::RANK_REL_TOL)?;
        if rank == rows.len() + 1 {
            rows.push(row);
            selected.push(i);
        }
    }
    if selected.is_empty() {
        return Err(Error::param("certs", "all member directions vanish"));
    }
    let n = selected.len();
    let weights: Vec<f64> = match alphas {
        Some(a) => selected.iter().map(|&i| a[i]).collect(),
        None => vec![1.0; n],
    };
    let total: f64 = weights.iter().sum();
    let betas: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut acc = ray_extend(&certs[selected[0]], betas[0], budget)?;
    for k in 1..n {
        let mk = ray_extend(&certs[selected[k]], betas[k], budget)?;
        acc = merge_certs(&acc, &mk, 1.0 / (k as f64 + 1.0), budget)?;
    }
    let tilde_g = acc.g.clone();
    let lambda_tilde = acc.lambda;
    let feasibility = if lambda_tilde == 0.0 {
        // tilde_g coincides with f, so scan the reflexive membership
        pfq_membership(
            f,
            &tilde_g,
            0.25,
            FeasibilityMethod::GridScan { step: 0.05 },
            budget,
        )?
    } else {
        let q = (0.5 * lambda_tilde.min(1.0 - lambda_tilde)).clamp(1e-6, 0.49);
        let method = if f.linearize().is_some()
            && tilde_g.linearize().is_some()
            && f.space().norm == NormTag::Linf
        {
            FeasibilityMethod::ExactLinear
        } else {
            // place lambda_tilde exactly on the scan grid
            let k = ((lambda_tilde - q) / 0.005).ceil().max(1.0);
            FeasibilityMethod::GridScan {
                step: (lambda_tilde - q) / k,
            }
        };
        let set = pfq_membership(f, &tilde_g, q, method, budget)?;
        if !set.contains(lambda_tilde) {
            return Err(Error::param(
                "tilde_g",
                "independent feasibility check missed the constructed weight",
            ));
        }
        set
    };
    let basis = AffineHullBasis {
        base: f.clone(),
        direction_indices: selected.clone(),
        betas: betas.clone(),
        tilde_g,
        tilde_cert: acc,
        feasibility,
    };
    let dir_matrix = Matrix::from_rows(rows)?;
    let gram = dir_matrix.matmul(&dir_matrix.transpose())?;
    let gram_inv = gram.inverse()?;
    let mut outcomes = Vec::new();
    for cand in candidates {
        outcomes.push(probe_candidate(
            f, certs, &selected, &dir_matrix, &gram_inv, &points, cand, budget,
        ));
    }
    Ok(AffineHullProbeReport {
        basis,
        candidates: outcomes,
    })
}

#[allow(clippy::too_many_arguments)]
fn probe_candidate(
    f: &Mapping,
    certs: &[DecompositionCertificate],
    selected: &[usize],
    dir_matrix: &Matrix,
    gram_inv: &Matrix,
    points: &[Vector],
    cand: &Mapping,
    budget: &ProbeBudget,
) -> CandidateOutcome {
    let attempt = || -> Result<CandidateOutcome> {
        let check = cand.check_membership(CERT_MEMBERSHIP_TOL, budget)?;
        if !check.ok {
            return Ok(CandidateOutcome::Failed {
                reason: "candidate is not a nonexpansive self-map".to_string(),
            });
        }
        let v = Vector::new(direction_row(f, cand, points)?)?;
        let proj = dir_matrix.matvec(&v)?;
        let alpha = gram_inv.matvec(&proj)?;
        let recon = dir_matrix.transpose().matvec(&alpha)?;
        let scale = v
            .coords
            .iter()
            .map(|x| x.abs())
            .fold(1.0f64, f64::max);
        let residual = recon
            .sub(&v)
            .coords
            .iter()
            .map(|x| x.abs())
            .fold(0.0f64, f64::max);
        if residual > 1e-8 * scale {
            return Ok(CandidateOutcome::NotInHull { residual });
        }
        // flip negative coefficients onto the h side of each ray
        let mut terms: Vec<(DecompositionCertificate, f64)> = Vec::new();
        for (slot, &ci) in selected.iter().enumerate() {
            let a = alpha.coords[slot];
            if a.abs() <= 1e-12 {
                continue;
            }
            if a > 0.0 {
                terms.push((certs[ci].clone(), a));
            } else {
                let c = &certs[ci];
                if c.lambda == 0.0 {
                    return Ok(CandidateOutcome::Failed {
                        reason: "negative coefficient on a trivial certificate".to_string(),
                    });
                }
                let flipped = DecompositionCertificate::build(
                    c.target.clone(),
                    1.0 - c.lambda,
                    c.h.clone(),
                    c.g.clone(),
                    budget,
                )?;
                terms.push((flipped, -a * c.lambda / (1.0 - c.lambda)));
            }
        }
        if terms.is_empty() {
            return Ok(CandidateOutcome::InHull {
                alphas: alpha.coords.clone(),
                cert: DecompositionCertificate::trivial(f, budget)?,
            });
        }
        let total: f64 = terms.iter().map(|(_, a)| a).sum();
        let m = terms.len() as f64;
        let mut acc = ray_extend(&terms[0].0, terms[0].1 / total, budget)?;
        for (k, (cert, a)) in terms.iter().enumerate().skip(1) {
            let mk = ray_extend(cert, a / total, budget)?;
            acc = merge_certs(&acc, &mk, 1.0 / (k as f64 + 1.0), budget)?;
        }
        let cert = ray_extend(&acc, m * total, budget)?;
        let dist = distance_infty(&cert.g, cand, budget)?;
        if dist.value > 1e-8 {
            return Ok(CandidateOutcome::Failed {
                reason: format!("reconstructed member misses the candidate by {}", dist.value),
            });
        }
        Ok(CandidateOutcome::InHull {
            alphas: alpha.coords.clone(),
            cert,
        })
    };
    match attempt() {
        Ok(out) => out,
        Err(e) => CandidateOutcome::Failed {
            reason: e.to_string(),
        },
    }
}
