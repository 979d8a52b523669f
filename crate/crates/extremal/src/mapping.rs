//! Mapping expressions over one ambient space, together with the
//! metric estimates the rest of the crate is built on: Lipschitz
//! bounds, uniform distance, isometry checks, and membership in the
//! space `M` of nonexpansive self-mappings of the ball.
//!
//! An expression is one of: a linear or affine map, a finite grid of
//! sample/value pairs (no interpolation), a convex combination, a
//! composition with the radial retraction, or a translation. All
//! nodes of one expression share the ambient [`SpaceContext`].

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sample::{self, ProbeBudget};
use crate::space::{NormTag, SpaceContext, Vector, DEFAULT_TOL};

/// Two grid points closer than this are treated as the same sample.
pub const GRID_MATCH_TOL: f64 = 1e-12;

/// Exhaustive pair checks are used up to this many restricted samples.
const EXHAUSTIVE_SAMPLE_CAP: usize = 768;

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodTag {
    /// Closed form, exact up to rounding.
    Exact,
    /// Maximum over finitely many samples; carries the sample count.
    Sampled(usize),
    /// Scan over a parameter grid; carries the step.
    Scanned(f64),
}

impl MethodTag {
    pub fn label(&self) -> String {
        match self {
            MethodTag::Exact => "EXACT".to_string(),
            MethodTag::Sampled(n) => format!("SAMPLED({n})"),
            MethodTag::Scanned(step) => format!("SCANNED({step:e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Linear {
        matrix: Matrix,
    },
    Affine {
        matrix: Matrix,
        offset: Vector,
    },
    Grid {
        samples: Vec<Vector>,
        values: Vec<Vector>,
    },
    Combo {
        lambda: f64,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Retract {
        inner: Box<Expr>,
        eta: f64,
        center: Vector,
    },
    Translate {
        inner: Box<Expr>,
        offset: Vector,
    },
}

/// A mapping expression bound to its ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Mapping {
    space: SpaceContext,
    expr: Expr,
}

impl Mapping {
    pub fn linear(space: SpaceContext, matrix: Matrix) -> Result<Mapping> {
        check_square(&space, &matrix)?;
        Ok(Mapping {
            space,
            expr: Expr::Linear { matrix },
        })
    }

    pub fn affine(space: SpaceContext, matrix: Matrix, offset: Vector) -> Result<Mapping> {
        check_square(&space, &matrix)?;
        space.check_dim(&offset)?;
        Ok(Mapping {
            space,
            expr: Expr::Affine { matrix, offset },
        })
    }

    pub fn identity(space: SpaceContext) -> Mapping {
        Mapping {
            expr: Expr::Linear {
                matrix: Matrix::identity(space.dim),
            },
            space,
        }
    }

    /// Constant mapping, encoded as an affine map with zero linear part.
    pub fn constant(space: SpaceContext, value: Vector) -> Result<Mapping> {
        space.check_in_ball(&value, DEFAULT_TOL)?;
        Ok(Mapping {
            expr: Expr::Affine {
                matrix: Matrix::zeros(space.dim, space.dim),
                offset: value,
            },
            space,
        })
    }

    /// Finite sample/value table. Samples and values must lie in the
    /// ball; evaluation is only defined at the samples.
    pub fn grid(space: SpaceContext, samples: Vec<Vector>, values: Vec<Vector>) -> Result<Mapping> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if samples.len() != values.len() {
            return Err(Error::param(
                "grid",
                format!("{} samples vs {} values", samples.len(), values.len()),
            ));
        }
        for p in samples.iter().chain(values.iter()) {
            space.check_in_ball(p, DEFAULT_TOL)?;
        }
        Ok(Mapping {
            space,
            expr: Expr::Grid { samples, values },
        })
    }

    /// Snapshot of any mapping as a grid over the given samples.
    pub fn sampled_on(&self, samples: &[Vector]) -> Result<Mapping> {
        let values = samples
            .iter()
            .map(|x| self.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        Mapping::grid(self.space, samples.to_vec(), values)
    }

    pub fn convex_combo(lambda: f64, left: Mapping, right: Mapping) -> Result<Mapping> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::param("lambda", format!("{lambda} outside [0, 1]")));
        }
        if left.space != right.space {
            return Err(Error::param("combo", "operands live in different spaces"));
        }
        Ok(Mapping {
            space: left.space,
            expr: Expr::Combo {
                lambda,
                left: Box::new(left.expr),
                right: Box::new(right.expr),
            },
        })
    }

    /// `inner` composed after the radial retraction `R_{eta, center}`.
    pub fn retract_compose(inner: Mapping, eta: f64, center: Vector) -> Result<Mapping> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("{eta} is not positive")));
        }
        inner.space.check_in_ball(&center, DEFAULT_TOL)?;
        Ok(Mapping {
            space: inner.space,
            expr: Expr::Retract {
                inner: Box::new(inner.expr),
                eta,
                center,
            },
        })
    }

    pub fn translate(inner: Mapping, offset: Vector) -> Result<Mapping> {
        inner.space.check_dim(&offset)?;
        Ok(Mapping {
            space: inner.space,
            expr: Expr::Translate {
                inner: Box::new(inner.expr),
                offset,
            },
        })
    }

    /// Rebind a subtree of an already validated expression.
    pub(crate) fn from_parts(space: SpaceContext, expr: Expr) -> Mapping {
        Mapping { space, expr }
    }

    pub fn space(&self) -> &SpaceContext {
        &self.space
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Evaluate at a ball point. Grid nodes only accept their own
    /// samples; the radial retraction takes the center branch on the
    /// closed ball `||x - center|| <= eta`.
    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        self.space.check_in_ball(x, DEFAULT_TOL)?;
        eval_expr(&self.space, &self.expr, x)
    }

    /// Affine normal form `(A, b)` when the expression is affine as a
    /// whole: linear and affine leaves glued by combos and translates.
    pub fn linearize(&self) -> Option<(Matrix, Vector)> {
        linearize_expr(&self.space, &self.expr)
    }

    /// Finite evaluation domain, if the expression contains grid nodes
    /// that restrict it. `None` means the whole ball.
    pub fn sample_domain(&self) -> Option<Vec<Vector>> {
        sample_domain_expr(&self.space, &self.expr)
    }

    /// Post-compose with a linear map: returns `m . self` as an
    /// expression of the same shape.
    pub fn post_compose_linear(&self, m: &Matrix) -> Result<Mapping> {
        check_square(&self.space, m)?;
        Ok(Mapping {
            space: self.space,
            expr: post_compose_expr(&self.expr, m)?,
        })
    }

    /// Lower and upper Lipschitz bounds with a witness pair for the
    /// lower bound. Exact for affine expressions and for expressions
    /// restricted to a small finite domain.
    pub fn lipschitz_bounds(&self, budget: &ProbeBudget) -> Result<LipschitzReport> {
        if let Some((a, _)) = self.linearize() {
            let norm = a.operator_norm(self.space.norm)?;
            let x = a.operator_norm_attainer(self.space.norm)?;
            let witness = (x.clone(), x.scale(-1.0));
            return Ok(LipschitzReport {
                lower: norm,
                upper: norm,
                exact: true,
                witness: Some(witness),
                method: MethodTag::Exact,
            });
        }
        if let Some(samples) = self.sample_domain() {
            if samples.len() < 2 {
                return Err(Error::TooFewSamples {
                    needed: 2,
                    got: samples.len(),
                });
            }
            if samples.len() <= EXHAUSTIVE_SAMPLE_CAP {
                let mut best = 0.0;
                let mut witness = (samples[0].clone(), samples[1].clone());
                for i in 0..samples.len() {
                    for j in (i + 1)..samples.len() {
                        let d = self.space.distance(&samples[i], &samples[j])?;
                        if d <= GRID_MATCH_TOL {
                            continue;
                        }
                        let fi = self.evaluate(&samples[i])?;
                        let fj = self.evaluate(&samples[j])?;
                        let ratio = self.space.distance(&fi, &fj)? / d;
                        if ratio > best {
                            best = ratio;
                            witness = (samples[i].clone(), samples[j].clone());
                        }
                    }
                }
                return Ok(LipschitzReport {
                    lower: best,
                    upper: best,
                    exact: true,
                    witness: Some(witness),
                    method: MethodTag::Sampled(samples.len()),
                });
            }
        }
        let upper = lip_upper_expr(&self.space, &self.expr)?;
        let (lower, witness, checked) = self.sampled_lip_lower(budget)?;
        Ok(LipschitzReport {
            lower,
            upper,
            exact: false,
            witness,
            method: MethodTag::Sampled(checked),
        })
    }

    fn sampled_lip_lower(
        &self,
        budget: &ProbeBudget,
    ) -> Result<(f64, Option<(Vector, Vector)>, usize)> {
        let pairs = match self.sample_domain() {
            Some(samples) => {
                let mut ps = Vec::new();
                for i in 0..samples.len() {
                    for j in (i + 1)..samples.len() {
                        ps.push((samples[i].clone(), samples[j].clone()));
                    }
                }
                ps
            }
            None => sample::probe_pairs(&self.space, budget),
        };
        let mut best = 0.0;
        let mut witness = None;
        let mut checked = 0;
        for (a, b) in pairs {
            let d = self.space.distance(&a, &b)?;
            if d <= GRID_MATCH_TOL {
                continue;
            }
            let (fa, fb) = (self.evaluate(&a)?, self.evaluate(&b)?);
            let ratio = self.space.distance(&fa, &fb)? / d;
            checked += 1;
            if ratio > best {
                best = ratio;
                witness = Some((a, b));
            }
        }
        Ok((best, witness, checked))
    }

    /// Is the mapping an isometry on every given pair, within `tol`?
    /// Reports the first violating pair.
    pub fn is_isometry_on_pairs(
        &self,
        pairs: &[(Vector, Vector)],
        tol: f64,
    ) -> Result<IsometryCheck> {
        let mut max_defect = 0.0f64;
        for (a, b) in pairs {
            let d = self.space.distance(a, b)?;
            let (fa, fb) = (self.evaluate(a)?, self.evaluate(b)?);
            let defect = (self.space.distance(&fa, &fb)? - d).abs();
            max_defect = max_defect.max(defect);
            if defect > tol {
                return Ok(IsometryCheck {
                    isometry: false,
                    max_defect,
                    violating_pair: Some((a.clone(), b.clone())),
                });
            }
        }
        Ok(IsometryCheck {
            isometry: true,
            max_defect,
            violating_pair: None,
        })
    }

    /// Check `||g(x + t e) - g(x) - t e|| <= tol` over the given
    /// `(x, t)` steps, for an almost exposed direction `e`. Collects
    /// the violations.
    pub fn directional_rigidity_check(
        &self,
        e: &Vector,
        steps: &[(Vector, f64)],
        tol: f64,
    ) -> Result<RigidityReport> {
        let report = crate::ball::classify_point(&self.space, e, DEFAULT_TOL)?;
        if !report.almost_exposed {
            return Err(Error::HypothesisNotMet {
                message: format!("direction {:?} is not almost exposed", e.coords),
            });
        }
        let mut violations = Vec::new();
        for (x, t) in steps {
            let shifted = x.axpy(*t, e);
            self.space.check_in_ball(&shifted, DEFAULT_TOL)?;
            let gx = self.evaluate(x)?;
            let gs = self.evaluate(&shifted)?;
            let drift = gs.sub(&gx).sub(&e.scale(*t));
            let magnitude = self.space.norm.norm(&drift.coords);
            if magnitude > tol {
                violations.push(RigidityViolation {
                    base: x.clone(),
                    step: *t,
                    magnitude,
                });
            }
        }
        Ok(RigidityReport { violations })
    }

    /// Membership check for the space `M` of nonexpansive self-maps.
    /// Exact for affine expressions on linf (and linear ones on every
    /// norm); exhaustive over restricted domains; sampled otherwise.
    pub fn check_membership(&self, tol: f64, budget: &ProbeBudget) -> Result<MembershipCheck> {
        if let Some((a, b)) = self.linearize() {
            let lip = a.operator_norm(self.space.norm)?;
            let offset_norm = self.space.norm.norm(&b.coords);
            let (value_bound, value_exact) = match self.space.norm {
                NormTag::Linf => {
                    // per-coordinate suprema are independent on linf
                    let bound = (0..a.rows())
                        .map(|k| {
                            a.row(k).iter().map(|v| v.abs()).sum::<f64>() + b.coords[k].abs()
                        })
                        .fold(0.0, f64::max);
                    (bound, true)
                }
                _ => {
                    if offset_norm == 0.0 {
                        (lip, true)
                    } else {
                        (lip + offset_norm, false)
                    }
                }
            };
            if value_exact || value_bound <= 1.0 + tol {
                return Ok(MembershipCheck {
                    ok: lip <= 1.0 + tol && value_bound <= 1.0 + tol,
                    lip_bound: lip,
                    value_bound,
                    method: MethodTag::Exact,
                    worst_pair: None,
                });
            }
            // conservative bound failed; fall through to sampling
        }
        let points: Vec<Vector> = match self.sample_domain() {
            Some(samples) => samples,
            None => {
                let mut pts = sample::canonical_points(&self.space);
                let mut rng = sample::stream_rng(budget.seed, sample::STREAM_POINTS);
                for _ in 0..budget.points {
                    pts.push(sample::random_ball_point(&self.space, &mut rng));
                }
                pts
            }
        };
        let restricted = self.sample_domain().is_some();
        let mut lip_bound = 0.0f64;
        let mut value_bound = 0.0f64;
        let mut worst_pair = None;
        let exhaustive = restricted && points.len() <= EXHAUSTIVE_SAMPLE_CAP;
        for (i, p) in points.iter().enumerate() {
            let v = self.evaluate(p)?;
            value_bound = value_bound.max(self.space.norm.norm(&v.coords));
            let upto = if exhaustive { i } else { 0 };
            for q in points.iter().take(upto) {
                let d = self.space.distance(p, q)?;
                if d <= GRID_MATCH_TOL {
                    continue;
                }
                let w = self.evaluate(q)?;
                let ratio = self.space.distance(&v, &w)? / d;
                if ratio > lip_bound {
                    lip_bound = ratio;
                    worst_pair = Some((p.clone(), q.clone()));
                }
            }
        }
        if !exhaustive {
            let (lower, pair, _) = self.sampled_lip_lower(budget)?;
            if lower > lip_bound {
                lip_bound = lower;
                worst_pair = pair;
            }
        }
        Ok(MembershipCheck {
            ok: lip_bound <= 1.0 + tol && value_bound <= 1.0 + tol,
            lip_bound,
            value_bound,
            method: MethodTag::Sampled(points.len()),
            worst_pair,
        })
    }
}

/// Radial retraction onto the closed `eta`-ball around `center`:
/// identity inside, radial pullback by `eta` outside. The boundary of
/// the small ball takes the center branch.
pub fn retract(space: &SpaceContext, x: &Vector, eta: f64, center: &Vector) -> Result<Vector> {
    let diff = x.sub(center);
    let d = space.norm.norm(&diff.coords);
    if d > eta {
        Ok(x.axpy(-eta / d, &diff))
    } else {
        Ok(center.clone())
    }
}

fn check_square(space: &SpaceContext, m: &Matrix) -> Result<()> {
    if m.rows() != space.dim || m.cols() != space.dim {
        return Err(Error::ShapeMismatch {
            expected_rows: space.dim,
            expected_cols: space.dim,
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

fn eval_expr(space: &SpaceContext, expr: &Expr, x: &Vector) -> Result<Vector> {
    match expr {
        Expr::Linear { matrix } => matrix.matvec(x),
        Expr::Affine { matrix, offset } => Ok(matrix.matvec(x)?.add(offset)),
        Expr::Grid { samples, values } => {
            let mut nearest = f64::INFINITY;
            for (s, v) in samples.iter().zip(values) {
                let d = space.distance(s, x)?;
                if d <= GRID_MATCH_TOL {
                    return Ok(v.clone());
                }
                nearest = nearest.min(d);
            }
            Err(Error::OffSample { nearest })
        }
        Expr::Combo {
            lambda,
            left,
            right,
        } => {
            let l = eval_expr(space, left, x)?;
            let r = eval_expr(space, right, x)?;
            Ok(l.scale(1.0 - lambda).add(&r.scale(*lambda)))
        }
        Expr::Retract { inner, eta, center } => {
            let pulled = retract(space, x, *eta, center)?;
            eval_expr(space, inner, &pulled)
        }
        Expr::Translate { inner, offset } => Ok(eval_expr(space, inner, x)?.add(offset)),
    }
}

fn linearize_expr(space: &SpaceContext, expr: &Expr) -> Option<(Matrix, Vector)> {
    match expr {
        Expr::Linear { matrix } => Some((matrix.clone(), Vector::zero(space.dim))),
        Expr::Affine { matrix, offset } => Some((matrix.clone(), offset.clone())),
        Expr::Grid { .. } | Expr::Retract { .. } => None,
        Expr::Combo {
            lambda,
            left,
            right,
        } => {
            let (la, lb) = linearize_expr(space, left)?;
            let (ra, rb) = linearize_expr(space, right)?;
            let a = la.scale(1.0 - lambda).add(&ra.scale(*lambda)).ok()?;
            let b = lb.scale(1.0 - lambda).add(&rb.scale(*lambda));
            Some((a, b))
        }
        Expr::Translate { inner, offset } => {
            let (a, b) = linearize_expr(space, inner)?;
            Some((a, b.add(offset)))
        }
    }
}

fn sample_domain_expr(space: &SpaceContext, expr: &Expr) -> Option<Vec<Vector>> {
    match expr {
        Expr::Linear { .. } | Expr::Affine { .. } => None,
        Expr::Grid { samples, .. } => Some(samples.clone()),
        Expr::Combo { left, right, .. } => {
            match (
                sample_domain_expr(space, left),
                sample_domain_expr(space, right),
            ) {
                (None, None) => None,
                (Some(s), None) | (None, Some(s)) => Some(s),
                (Some(l), Some(r)) => Some(intersect_samples(space, &l, &r)),
            }
        }
        Expr::Retract { inner, eta, center } => {
            let restricted = sample_domain_expr(space, inner)?;
            // keep the samples whose retraction lands on a sample
            let kept = restricted
                .iter()
                .filter(|x| {
                    retract(space, x, *eta, center)
                        .ok()
                        .map(|r| {
                            restricted
                                .iter()
                                .any(|s| space.distance(s, &r).unwrap_or(f64::INFINITY) <= GRID_MATCH_TOL)
                        })
                        .unwrap_or(false)
                })
                .cloned()
                .collect();
            Some(kept)
        }
        Expr::Translate { inner, .. } => sample_domain_expr(space, inner),
    }
}

fn intersect_samples(space: &SpaceContext, left: &[Vector], right: &[Vector]) -> Vec<Vector> {
    left.iter()
        .filter(|p| {
            right
                .iter()
                .any(|q| space.distance(p, q).unwrap_or(f64::INFINITY) <= GRID_MATCH_TOL)
        })
        .cloned()
        .collect()
}

fn post_compose_expr(expr: &Expr, m: &Matrix) -> Result<Expr> {
    Ok(match expr {
        Expr::Linear { matrix } => Expr::Linear {
            matrix: m.matmul(matrix)?,
        },
        Expr::Affine { matrix, offset } => Expr::Affine {
            matrix: m.matmul(matrix)?,
            offset: m.matvec(offset)?,
        },
        Expr::Grid { samples, values } => Expr::Grid {
            samples: samples.clone(),
            values: values
                .iter()
                .map(|v| m.matvec(v))
                .collect::<Result<Vec<_>>>()?,
        },
        Expr::Combo {
            lambda,
            left,
            right,
        } => Expr::Combo {
            lambda: *lambda,
            left: Box::new(post_compose_expr(left, m)?),
            right: Box::new(post_compose_expr(right, m)?),
        },
        Expr::Retract { inner, eta, center } => Expr::Retract {
            inner: Box::new(post_compose_expr(inner, m)?),
            eta: *eta,
            center: center.clone(),
        },
        Expr::Translate { inner, offset } => Expr::Translate {
            inner: Box::new(post_compose_expr(inner, m)?),
            offset: m.matvec(offset)?,
        },
    })
}

fn lip_upper_expr(space: &SpaceContext, expr: &Expr) -> Result<f64> {
    match expr {
        Expr::Linear { matrix } => matrix.operator_norm(space.norm),
        Expr::Affine { matrix, .. } => matrix.operator_norm(space.norm),
        Expr::Grid { samples, values } => {
            let mut best = 0.0f64;
            for i in 0..samples.len() {
                for j in (i + 1)..samples.len() {
                    let d = space.distance(&samples[i], &samples[j])?;
                    if d <= GRID_MATCH_TOL {
                        continue;
                    }
                    best = best.max(space.distance(&values[i], &values[j])? / d);
                }
            }
            Ok(best)
        }
        Expr::Combo {
            lambda,
            left,
            right,
        } => Ok((1.0 - lambda) * lip_upper_expr(space, left)?
            + lambda * lip_upper_expr(space, right)?),
        // the radial retraction is nonexpansive
        Expr::Retract { inner, .. } => lip_upper_expr(space, inner),
        Expr::Translate { inner, .. } => lip_upper_expr(space, inner),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    pub witness: Option<(Vector, Vector)>,
    pub method: MethodTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    /// Best certified value: exact when `exact`, otherwise a lower bound.
    pub value: f64,
    pub exact: bool,
    pub attaining_point: Option<Vector>,
    /// Certified upper bound; equals `value` when exact, may be
    /// infinite when no Lipschitz covering argument applies.
    pub upper: f64,
    pub method: MethodTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryCheck {
    pub isometry: bool,
    pub max_defect: f64,
    pub violating_pair: Option<(Vector, Vector)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityViolation {
    pub base: Vector,
    pub step: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub violations: Vec<RigidityViolation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCheck {
    pub ok: bool,
    pub lip_bound: f64,
    pub value_bound: f64,
    pub method: MethodTag,
    pub worst_pair: Option<(Vector, Vector)>,
}

/// Uniform distance `sup_x ||f(x) - g(x)||` between two mappings of
/// the same space. Exact for affine pairs on linf (and for linear
/// pairs on every norm, where it is the operator norm of the
/// difference), exhaustive over common grid samples, and otherwise a
/// sampled lower bound plus a Lipschitz covering upper bound.
pub fn distance_infty(f: &Mapping, g: &Mapping, budget: &ProbeBudget) -> Result<DistanceReport> {
    if f.space != g.space {
        return Err(Error::param("distance", "mappings live in different spaces"));
    }
    let space = f.space;
    if let (Some((fa, fb)), Some((ga, gb))) = (f.linearize(), g.linearize()) {
        let d = fa.sub(&ga)?;
        let c = fb.sub(&gb);
        let c_norm = space.norm.norm(&c.coords);
        if c_norm == 0.0 {
            let value = d.operator_norm(space.norm)?;
            let attainer = d.operator_norm_attainer(space.norm)?;
            return Ok(DistanceReport {
                value,
                exact: true,
                attaining_point: Some(attainer),
                upper: value,
                method: MethodTag::Exact,
            });
        }
        if space.norm == NormTag::Linf {
            // sup of |row.x + c_k| over the cube is ||row||_1 + |c_k|
            let mut best = 0.0;
            let mut best_k = 0;
            for k in 0..d.rows() {
                let v = d.row(k).iter().map(|a| a.abs()).sum::<f64>() + c.coords[k].abs();
                if v > best {
                    best = v;
                    best_k = k;
                }
            }
            let sign = if c.coords[best_k] >= 0.0 { 1.0 } else { -1.0 };
            let attainer = Vector {
                coords: d
                    .row(best_k)
                    .iter()
                    .map(|a| sign * if *a >= 0.0 { 1.0 } else { -1.0 })
                    .collect(),
            };
            return Ok(DistanceReport {
                value: best,
                exact: true,
                attaining_point: Some(attainer),
                upper: best,
                method: MethodTag::Exact,
            });
        }
    }
    // common finite domain: exhaustive and exact on it
    let common = match (f.sample_domain(), g.sample_domain()) {
        (Some(l), Some(r)) => {
            let c = intersect_samples(&space, &l, &r);
            if c.is_empty() {
                return Err(Error::IncompatibleGrids {
                    left: l.len(),
                    right: r.len(),
                    common: 0,
                });
            }
            Some(c)
        }
        (Some(l), None) => Some(l),
        (None, Some(r)) => Some(r),
        (None, None) => None,
    };
    if let Some(points) = common {
        let mut best = 0.0;
        let mut attaining = points[0].clone();
        for p in &points {
            let d = space.distance(&f.evaluate(p)?, &g.evaluate(p)?)?;
            if d > best {
                best = d;
                attaining = p.clone();
            }
        }
        return Ok(DistanceReport {
            value: best,
            exact: true,
            attaining_point: Some(attaining),
            upper: best,
            method: MethodTag::Sampled(points.len()),
        });
    }
    // sampled lower bound over a covering grid plus canonical points
    let per_axis = match space.dim {
        1 => 65,
        2 => 17,
        3 => 9,
        4 => 5,
        _ => 0,
    };
    let mut points = sample::canonical_points(&space);
    if per_axis > 0 {
        points.extend(sample::grid_points(&space, per_axis));
    }
    let mut rng = sample::stream_rng(budget.seed, sample::STREAM_POINTS);
    for _ in 0..budget.points {
        points.push(sample::random_ball_point(&space, &mut rng));
    }
    let mut best = 0.0;
    let mut attaining = None;
    for p in &points {
        let d = space.distance(&f.evaluate(p)?, &g.evaluate(p)?)?;
        if d > best {
            best = d;
            attaining = Some(p.clone());
        }
    }
    let mut upper = f64::INFINITY;
    if per_axis > 0 {
        let lip_sum =
            lip_upper_expr(&space, &f.expr)? + lip_upper_expr(&space, &g.expr)?;
        upper = best + lip_sum * sample::cover_radius(&space, per_axis);
    }
    // a retraction composition stays within lip * eta of its inner map
    for (outer, other) in [(f, g), (g, f)] {
        if let Expr::Retract { inner, eta, .. } = &outer.expr {
            if inner.as_ref() == other.expr() {
                upper = upper.min(lip_upper_expr(&space, inner)? * eta);
            }
        }
    }
    Ok(DistanceReport {
        value: best,
        exact: false,
        attaining_point: attaining,
        upper,
        method: MethodTag::Sampled(points.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linf2() -> SpaceContext {
        SpaceContext::new(2, NormTag::Linf).unwrap()
    }

    fn swap_map() -> Mapping {
        Mapping::linear(
            linf2(),
            Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_linear_and_affine() {
        let f = swap_map();
        let y = f.evaluate(&Vector::from(vec![0.25, -1.0])).unwrap();
        assert_eq!(y.coords, vec![-1.0, 0.25]);
        let g = Mapping::affine(
            linf2(),
            Matrix::zeros(2, 2),
            Vector::from(vec![0.5, 0.0]),
        )
        .unwrap();
        assert_eq!(g.evaluate(&Vector::zero(2)).unwrap().coords, vec![0.5, 0.0]);
    }

    #[test]
    fn grid_evaluation_is_sample_only() {
        let s = linf2();
        let samples = vec![Vector::zero(2), Vector::from(vec![1.0, 0.0])];
        let values = vec![Vector::from(vec![0.1, 0.1]), Vector::from(vec![0.9, 0.0])];
        let g = Mapping::grid(s, samples, values).unwrap();
        assert_eq!(
            g.evaluate(&Vector::from(vec![1.0, 0.0])).unwrap().coords,
            vec![0.9, 0.0]
        );
        assert!(matches!(
            g.evaluate(&Vector::from(vec![0.5, 0.0])),
            Err(Error::OffSample { .. })
        ));
    }

    #[test]
    fn retraction_branches() {
        let s = linf2();
        let id = Mapping::identity(s);
        let r1 = Mapping::retract_compose(id.clone(), 1.0, Vector::zero(2)).unwrap();
        assert_eq!(
            r1.evaluate(&Vector::from(vec![0.5, 0.0])).unwrap().coords,
            vec![0.0, 0.0]
        );
        let r2 = Mapping::retract_compose(id, 0.5, Vector::zero(2)).unwrap();
        assert_eq!(
            r2.evaluate(&Vector::from(vec![1.0, 0.0])).unwrap().coords,
            vec![0.5, 0.0]
        );
    }

    #[test]
    fn retraction_boundary_case_takes_center_branch() {
        let s = linf2();
        let x = Vector::from(vec![0.5, 0.0]);
        let r = retract(&s, &x, 0.5, &Vector::zero(2)).unwrap();
        assert_eq!(r.coords, vec![0.0, 0.0]);
    }

    #[test]
    fn retraction_output_is_convex_combination_of_x_and_center() {
        let s = SpaceContext::new(3, NormTag::L2).unwrap();
        let center = Vector::from(vec![0.1, -0.2, 0.0]);
        let x = Vector::from(vec![0.9, 0.3, -0.2]);
        let r = retract(&s, &x, 0.3, &center).unwrap();
        // r = x + t (center - x) for some t in [0, 1]
        let dir = center.sub(&x);
        let t = r.sub(&x).dot(&dir) / dir.dot(&dir);
        assert!((0.0..=1.0).contains(&t));
        let reconstructed = x.axpy(t, &dir);
        assert!(s.distance(&reconstructed, &r).unwrap() < 1e-12);
    }

    #[test]
    fn lipschitz_exact_for_linear() {
        let f = swap_map();
        let rep = f.lipschitz_bounds(&ProbeBudget::default()).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.lower, 1.0);
        assert_eq!(rep.upper, 1.0);
        let (a, b) = rep.witness.unwrap();
        let d = f.space.distance(&a, &b).unwrap();
        let fd = f
            .space
            .distance(&f.evaluate(&a).unwrap(), &f.evaluate(&b).unwrap())
            .unwrap();
        assert!((fd / d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_retraction_composition_attains_one() {
        let s = linf2();
        let r = Mapping::retract_compose(Mapping::identity(s), 0.5, Vector::zero(2)).unwrap();
        let rep = r.lipschitz_bounds(&ProbeBudget::default()).unwrap();
        assert_eq!(rep.upper, 1.0);
        // pairs outside the collapsed ball move isometrically, e.g.
        // (1,0) and (0.6,0) map to (0.5,0) and (0.1,0)
        assert!(rep.lower > 1.0 - 1e-12);
        assert!(!rep.exact);
    }

    #[test]
    fn lipschitz_exhaustive_on_grids() {
        let s = linf2();
        let samples = vec![
            Vector::zero(2),
            Vector::from(vec![0.5, 0.0]),
            Vector::from(vec![1.0, 0.0]),
        ];
        let values = vec![
            Vector::zero(2),
            Vector::from(vec![0.25, 0.0]),
            Vector::from(vec![1.0, 0.0]),
        ];
        let g = Mapping::grid(s, samples, values).unwrap();
        let rep = g.lipschitz_bounds(&ProbeBudget::default()).unwrap();
        assert!(rep.exact);
        assert!((rep.lower - 1.5).abs() < 1e-12);
        let w = rep.witness.unwrap();
        assert_eq!(w.0.coords, vec![0.5, 0.0]);
        assert_eq!(w.1.coords, vec![1.0, 0.0]);
    }

    #[test]
    fn distance_exact_for_linear_pairs() {
        let s = linf2();
        let f = Mapping::identity(s);
        let g = swap_map();
        let rep = distance_infty(&f, &g, &ProbeBudget::default()).unwrap();
        assert!(rep.exact);
        // rows of I - swap have l1 norm 2
        assert_eq!(rep.value, 2.0);
        let x = rep.attaining_point.unwrap();
        let d = s
            .distance(&f.evaluate(&x).unwrap(), &g.evaluate(&x).unwrap())
            .unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distance_exact_for_affine_pairs_on_linf() {
        let s = linf2();
        let f = Mapping::identity(s);
        let g = Mapping::affine(
            s,
            Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap(),
            Vector::from(vec![0.25, 0.0]),
        )
        .unwrap();
        let rep = distance_infty(&f, &g, &ProbeBudget::default()).unwrap();
        assert!(rep.exact);
        // first coordinate: sup |0.5 x1 - 0.25| over |x1| <= 1
        assert_eq!(rep.value, 0.75);
    }

    #[test]
    fn distance_on_common_grid_samples() {
        let s = linf2();
        let samples = vec![Vector::zero(2), Vector::from(vec![1.0, 0.0])];
        let f = Mapping::grid(
            s,
            samples.clone(),
            vec![Vector::zero(2), Vector::from(vec![1.0, 0.0])],
        )
        .unwrap();
        let g = Mapping::grid(
            s,
            samples,
            vec![Vector::from(vec![0.2, 0.0]), Vector::from(vec![1.0, 0.0])],
        )
        .unwrap();
        let rep = distance_infty(&f, &g, &ProbeBudget::default()).unwrap();
        assert!(rep.exact);
        assert!((rep.value - 0.2).abs() < 1e-15);
        assert_eq!(rep.attaining_point.unwrap().coords, vec![0.0, 0.0]);
    }

    #[test]
    fn incompatible_grids_are_rejected() {
        let s = linf2();
        let f = Mapping::grid(
            s,
            vec![Vector::zero(2)],
            vec![Vector::zero(2)],
        )
        .unwrap();
        let g = Mapping::grid(
            s,
            vec![Vector::from(vec![1.0, 0.0])],
            vec![Vector::zero(2)],
        )
        .unwrap();
        assert!(matches!(
            distance_infty(&f, &g, &ProbeBudget::default()),
            Err(Error::IncompatibleGrids { .. })
        ));
    }

    #[test]
    fn distance_to_retraction_composition_is_bounded_by_eta() {
        let s = linf2();
        let g = Mapping::identity(s);
        let gt = Mapping::retract_compose(g.clone(), 0.3, Vector::zero(2)).unwrap();
        let rep = distance_infty(&g, &gt, &ProbeBudget::default()).unwrap();
        assert!((rep.value - 0.3).abs() < 1e-12);
        assert!(rep.upper <= 0.3 + 1e-12);
    }

    #[test]
    fn isometry_check_finds_contraction_pairs() {
        let s = linf2();
        let swap = swap_map();
        let pairs = vec![
            (Vector::zero(2), Vector::from(vec![1.0, 0.0])),
            (Vector::from(vec![0.5, -0.5]), Vector::from(vec![-0.5, 0.5])),
        ];
        let check = swap.is_isometry_on_pairs(&pairs, 1e-12).unwrap();
        assert!(check.isometry);
        let shrink = Mapping::linear(s, Matrix::identity(2).scale(0.9)).unwrap();
        let check = shrink.is_isometry_on_pairs(&pairs, 1e-12).unwrap();
        assert!(!check.isometry);
        assert!(check.violating_pair.is_some());
    }

    #[test]
    fn rigidity_violation_of_the_swap_map() {
        let swap = swap_map();
        let e = Vector::from(vec![1.0, -1.0]);
        let steps = vec![(Vector::zero(2), 0.3)];
        let rep = swap.directional_rigidity_check(&e, &steps, 1e-12).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert!((rep.violations[0].magnitude - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rigidity_requires_almost_exposed_direction() {
        let swap = swap_map();
        let e = Vector::from(vec![1.0, 0.0]);
        assert!(matches!(
            swap.directional_rigidity_check(&e, &[], 1e-12),
            Err(Error::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn membership_exact_for_affine_on_linf() {
        let s = linf2();
        let ok = Mapping::affine(
            s,
            Matrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(),
            Vector::from(vec![0.5, 0.0]),
        )
        .unwrap();
        let check = ok.check_membership(1e-12, &ProbeBudget::default()).unwrap();
        assert!(check.ok);
        assert_eq!(check.method, MethodTag::Exact);
        assert_eq!(check.value_bound, 1.0);
        let too_big = Mapping::affine(
            s,
            Matrix::identity(2),
            Vector::from(vec![0.1, 0.0]),
        )
        .unwrap();
        let check = too_big
            .check_membership(1e-12, &ProbeBudget::default())
            .unwrap();
        assert!(!check.ok);
    }

    #[test]
    fn membership_exhaustive_on_grids() {
        let s = linf2();
        let samples = vec![Vector::zero(2), Vector::from(vec![0.5, 0.0])];
        let expanding = Mapping::grid(
            s,
            samples,
            vec![Vector::zero(2), Vector::from(vec![1.0, 0.0])],
        )
        .unwrap();
        let check = expanding
            .check_membership(1e-12, &ProbeBudget::default())
            .unwrap();
        assert!(!check.ok);
        assert!(check.worst_pair.is_some());
    }

    #[test]
    fn linearize_folds_combos_and_translates() {
        let s = linf2();
        let combo = Mapping::convex_combo(0.25, Mapping::identity(s), swap_map()).unwrap();
        let shifted = Mapping::translate(combo, Vector::from(vec![0.0, 0.1])).unwrap();
        let (a, b) = shifted.linearize().unwrap();
        assert_eq!(a.get(0, 0), 0.75);
        assert_eq!(a.get(0, 1), 0.25);
        assert_eq!(b.coords, vec![0.0, 0.1]);
        let x = Vector::from(vec![0.3, -0.4]);
        let direct = shifted.evaluate(&x).unwrap();
        let via = a.matvec(&x).unwrap().add(&b);
        assert!(s.distance(&direct, &via).unwrap() < 1e-15);
    }

    #[test]
    fn post_compose_distributes_over_the_tree() {
        let s = linf2();
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let inner = Mapping::convex_combo(
            0.5,
            Mapping::identity(s),
            Mapping::retract_compose(Mapping::identity(s), 0.5, Vector::zero(2)).unwrap(),
        )
        .unwrap();
        let composed = inner.post_compose_linear(&m).unwrap();
        let x = Vector::from(vec![0.9, -0.2]);
        let want = m.matvec(&inner.evaluate(&x).unwrap()).unwrap();
        let got = composed.evaluate(&x).unwrap();
        assert!(s.distance(&want, &got).unwrap() < 1e-15);
    }
}
