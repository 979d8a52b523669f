//! Extremality analysis: an exact classifier for linear mappings on
//! the sup-norm ball, signed-permutation isometries, boundary-pinning
//! diagnostics, two-sided perturbation pairs, expansion witnesses, a
//! brute-force oracle for grid mappings, and reduction of isometry
//! decompositions to the identity.

use crate::decomp::{DecompositionCertificate, STRICT_RESIDUAL_BOUND};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mapping::{Expr, Mapping};
use crate::sample::ProbeBudget;
use crate::space::{Functional, NormTag, SpaceContext, Vector};

/// Row-level data extracted by the linear classifier.
#[derive(Debug, Clone)]
pub struct RowAnalysis {
    pub functional: Functional,
    pub l1_norm: f64,
    pub support: Vec<usize>,
}

/// Shape of an extremal linear mapping on the sup norm: row `i`
/// equals `epsilon[i]` times the `pi[i]`-th coordinate functional,
/// and `fibers[k]` lists the rows supported on column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPermutationForm {
    pub pi: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub fibers: Vec<Vec<usize>>,
}

/// Outcome of [`classify_linear_extremal`]: either a signed
/// permutation shape or a validated proper decomposition.
#[derive(Debug, Clone)]
pub struct LinearExtremalityVerdict {
    pub extremal: bool,
    pub rows: Vec<RowAnalysis>,
    pub certificate: Option<DecompositionCertificate>,
    pub form: Option<SignedPermutationForm>,
}

fn unit_row(dim: usize, j: usize, sign: f64) -> Vec<f64> {
    let mut row = vec![0.0; dim];
    row[j] = sign;
    row
}

/// Decide extremality of a linear nonexpansive mapping on the
/// sup-norm ball. A mapping is extremal exactly when every row of its
/// matrix is a signed coordinate functional; otherwise the first
/// deviating row yields a proper two-sided decomposition, returned as
/// a validated certificate.
pub fn classify_linear_extremal(
    space: SpaceContext,
    matrix: &Matrix,
    tol: f64,
    budget: &ProbeBudget,
) -> Result<LinearExtremalityVerdict> {
    if space.norm != NormTag::Linf {
        return Err(Error::param("space", "classifier works on the sup norm"));
    }
    if matrix.rows() != space.dim || matrix.cols() != space.dim {
        return Err(Error::ShapeMismatch {
            expected_rows: space.dim,
            expected_cols: space.dim,
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    if !(tol >= 0.0) {
        return Err(Error::param("tol", format!("{tol} is not a tolerance")));
    }
    let opnorm = matrix.operator_norm(NormTag::Linf)?;
    if opnorm > 1.0 + tol {
        return Err(Error::NotNonexpansive { ratio: opnorm });
    }
    let dim = space.dim;
    let mut rows = Vec::with_capacity(dim);
    for i in 0..dim {
        let coords = matrix.row(i).to_vec();
        let l1_norm: f64 = coords.iter().map(|v| v.abs()).sum();
        let support: Vec<usize> = (0..dim).filter(|&j| coords[j].abs() > tol).collect();
        rows.push(RowAnalysis {
            functional: Functional::new(coords)?,
            l1_norm,
            support,
        });
    }
    let target = Mapping::linear(space, matrix.clone())?;

    // a norm-deficient row splits into a zero row and a rescaled row
    // (or opposite unit rows when it vanishes outright)
    if let Some(i) = rows.iter().position(|r| r.l1_norm < 1.0 - tol) {
        let mut g_rows = matrix.to_rows();
        let mut h_rows = matrix.to_rows();
        let mu = rows[i].l1_norm;
        let lambda = if mu == 0.0 {
            g_rows[i] = unit_row(dim, 0, -1.0);
            h_rows[i] = unit_row(dim, 0, 1.0);
            0.5
        } else {
            g_rows[i] = vec![0.0; dim];
            h_rows[i] = matrix.row(i).iter().map(|v| v / mu).collect();
            mu
        };
        let cert = DecompositionCertificate::build_with_bound(
            target,
            lambda,
            Mapping::linear(space, Matrix::from_rows(g_rows)?)?,
            Mapping::linear(space, Matrix::from_rows(h_rows)?)?,
            budget,
            STRICT_RESIDUAL_BOUND,
        )?;
        return Ok(LinearExtremalityVerdict {
            extremal: false,
            rows,
            certificate: Some(cert),
            form: None,
        });
    }

    // a saturated row with split support peels off one signed
    // coordinate against the rescaled remainder
    if let Some(i) = rows.iter().position(|r| r.support.len() >= 2) {
        let j1 = rows[i].support[0];
        let xi = matrix.get(i, j1);
        let lambda = xi.abs();
        let mut g_rows = matrix.to_rows();
        let mut h_rows = matrix.to_rows();
        for (j, val) in g_rows[i].iter_mut().enumerate() {
            *val = if j == j1 {
                0.0
            } else {
                matrix.get(i, j) / (1.0 - lambda)
            };
        }
        h_rows[i] = unit_row(dim, j1, xi.signum());
        let cert = DecompositionCertificate::build_with_bound(
            target,
            lambda,
            Mapping::linear(space, Matrix::from_rows(g_rows)?)?,
            Mapping::linear(space, Matrix::from_rows(h_rows)?)?,
            budget,
            STRICT_RESIDUAL_BOUND,
        )?;
        return Ok(LinearExtremalityVerdict {
            extremal: false,
            rows,
            certificate: Some(cert),
            form: None,
        });
    }

    // every row is a signed coordinate functional
    let mut pi = Vec::with_capacity(dim);
    let mut epsilon = Vec::with_capacity(dim);
    let mut fibers = vec![Vec::new(); dim];
    for (i, r) in rows.iter().enumerate() {
        let Some(&j) = r.support.first() else {
            return Err(Error::param("tol", "tolerance too coarse for this dimension"));
        };
        pi.push(j);
        epsilon.push(matrix.get(i, j).signum());
        fibers[j].push(i);
    }
    Ok(LinearExtremalityVerdict {
        extremal: true,
        rows,
        certificate: None,
        form: Some(SignedPermutationForm {
            pi,
            epsilon,
            fibers,
        }),
    })
}

/// The signed permutation `x -> (signs[i] * x[perm[i]])_i` as a
/// linear mapping on the sup-norm ball.
pub fn make_rotation(space: SpaceContext, perm: &[usize], signs: &[f64]) -> Result<Mapping> {
    if space.norm != NormTag::Linf {
        return Err(Error::param("space", "cube rotations live on the sup norm"));
    }
    let dim = space.dim;
    if perm.len() != dim || signs.len() != dim {
        return Err(Error::param(
            "perm",
            format!("need {dim} permutation entries and {dim} signs"),
        ));
    }
    let mut seen = vec![false; dim];
    for &p in perm {
        if p >= dim {
            return Err(Error::param("perm", format!("index {p} out of range")));
        }
        if seen[p] {
            return Err(Error::param("perm", format!("index {p} repeats")));
        }
        seen[p] = true;
    }
    for &s in signs {
        if s != 1.0 && s != -1.0 {
            return Err(Error::param("signs", format!("{s} is not a unit sign")));
        }
    }
    let rows = (0..dim)
        .map(|i| unit_row(dim, perm[i], signs[i]))
        .collect();
    Mapping::linear(space, Matrix::from_rows(rows)?)
}

/// A coordinate at which a mapping moved a boundary-attaining value.
#[derive(Debug, Clone, PartialEq)]
pub struct PinViolation {
    pub sample_index: usize,
    pub coordinate: usize,
    pub expected: f64,
    pub actual: f64,
}

/// Check that `op` fixes every coordinate where the input attains the
/// boundary. Each sample is a (point, coordinate) pair with
/// `|point[coordinate]| = 1` within `tol`; the returned list holds
/// the coordinates that moved.
pub fn verify_pinning(
    op: &Mapping,
    samples: &[(Vector, usize)],
    tol: f64,
) -> Result<Vec<PinViolation>> {
    let mut violations = Vec::new();
    for (idx, (point, coord)) in samples.iter().enumerate() {
        op.space().check_dim(point)?;
        if *coord >= op.space().dim {
            return Err(Error::param(
                "samples",
                format!("sample {idx} marks coordinate {coord} beyond the dimension"),
            ));
        }
        if (point.coords[*coord].abs() - 1.0).abs() > tol {
            return Err(Error::param(
                "samples",
                format!("sample {idx} does not attain the boundary at coordinate {coord}"),
            ));
        }
        let image = op.evaluate(point)?;
        let expected = point.coords[*coord];
        let actual = image.coords[*coord];
        if (actual - expected).abs() > tol {
            violations.push(PinViolation {
                sample_index: idx,
                coordinate: *coord,
                expected,
                actual,
            });
        }
    }
    Ok(violations)
}

/// Shape of the bump used by the two-sided perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrysohnProfile {
    /// Bump supported on the marked coordinate alone.
    Indicator,
    /// Piecewise-linear bump decaying over the whole neighborhood.
    Tent,
}

/// Two-sided perturbation of a ball point: `g_plus` and `g_minus`
/// attain +1 and -1 at the marked coordinate while agreeing with the
/// base point off a value neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct UrysohnPair {
    pub base: Vector,
    pub x0: usize,
    pub gamma: f64,
    pub profile: UrysohnProfile,
    pub neighborhood: Vec<usize>,
    pub bump: Vector,
    pub g_plus: Vector,
    pub g_minus: Vector,
}

const URYSOHN_CHECK_TOL: f64 = 1e-12;

/// Build the perturbation pair around `f` at coordinate `x0`.
///
/// Requires `||f|| <= 1`, an interior value at `x0`, and
/// `0 < gamma < min(1 + f[x0], 1 - f[x0])`. The constructed pair
/// satisfies, and is verified to satisfy:
///
/// * `g_plus[x0] = 1` and `g_minus[x0] = -1`;
/// * both agree with `f` outside the neighborhood
///   `U = { x : |f[x] - f[x0]| < gamma }`;
/// * `||f - g_plus|| <= 1 - f[x0] + gamma`;
/// * `||f - g_minus|| <= 1 + f[x0] + gamma`.
pub fn urysohn_pair(
    f: &Vector,
    x0: usize,
    gamma: f64,
    profile: UrysohnProfile,
) -> Result<UrysohnPair> {
    let k = f.len();
    if k == 0 {
        return Err(Error::param("f", "empty point"));
    }
    if x0 >= k {
        return Err(Error::param("x0", format!("{x0} beyond dimension {k}")));
    }
    let sup = f.coords.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if sup > 1.0 {
        return Err(Error::OutsideBall {
            norm: sup,
            tol: 0.0,
        });
    }
    let fx0 = f.coords[x0];
    if fx0.abs() >= 1.0 {
        return Err(Error::param(
            "x0",
            format!("value {fx0} at the marked coordinate is not interior"),
        ));
    }
    let cap = (1.0 + fx0).min(1.0 - fx0);
    if !(gamma > 0.0 && gamma < cap) {
        return Err(Error::param(
            "gamma",
            format!("{gamma} outside (0, {cap})"),
        ));
    }
    let neighborhood: Vec<usize> = (0..k)
        .filter(|&x| (f.coords[x] - fx0).abs() < gamma)
        .collect();
    let bump_coords: Vec<f64> = match profile {
        UrysohnProfile::Indicator => (0..k).map(|x| if x == x0 { 1.0 } else { 0.0 }).collect(),
        UrysohnProfile::Tent => (0..k)
            .map(|x| (1.0 - (f.coords[x] - fx0).abs() / gamma).max(0.0))
            .collect(),
    };
    let g_plus = Vector::new(
        (0..k)
            .map(|x| f.coords[x] + bump_coords[x] * (1.0 - f.coords[x]))
            .collect(),
    )?;
    let g_minus = Vector::new(
        (0..k)
            .map(|x| f.coords[x] - bump_coords[x] * (1.0 + f.coords[x]))
            .collect(),
    )?;
    let pair = UrysohnPair {
        base: f.clone(),
        x0,
        gamma,
        profile,
        neighborhood,
        bump: Vector::new(bump_coords)?,
        g_plus,
        g_minus,
    };
    verify_urysohn_pair(&pair)?;
    Ok(pair)
}

fn verify_urysohn_pair(pair: &UrysohnPair) -> Result<()> {
    let f = &pair.base;
    let fx0 = f.coords[pair.x0];
    let fail = |residual: f64| Error::ResidualTooLarge {
        residual,
        bound: URYSOHN_CHECK_TOL,
    };
    let d_plus = (pair.g_plus.coords[pair.x0] - 1.0).abs();
    let d_minus = (pair.g_minus.coords[pair.x0] + 1.0).abs();
    if d_plus > URYSOHN_CHECK_TOL || d_minus > URYSOHN_CHECK_TOL {
        return Err(fail(d_plus.max(d_minus)));
    }
    let mut sup_plus = 0.0f64;
    let mut sup_minus = 0.0f64;
    for x in 0..f.len() {
        let dp = (pair.g_plus.coords[x] - f.coords[x]).abs();
        let dm = (pair.g_minus.coords[x] - f.coords[x]).abs();
        if !pair.neighborhood.contains(&x) && dp.max(dm) > URYSOHN_CHECK_TOL {
            return Err(fail(dp.max(dm)));
        }
        if pair.g_plus.coords[x].abs() > 1.0 + URYSOHN_CHECK_TOL
            || pair.g_minus.coords[x].abs() > 1.0 + URYSOHN_CHECK_TOL
        {
            return Err(fail(pair.g_plus.coords[x].abs().max(pair.g_minus.coords[x].abs()) - 1.0));
        }
        sup_plus = sup_plus.max(dp);
        sup_minus = sup_minus.max(dm);
    }
    if sup_plus > 1.0 - fx0 + pair.gamma + URYSOHN_CHECK_TOL {
        return Err(fail(sup_plus - (1.0 - fx0 + pair.gamma)));
    }
    if sup_minus > 1.0 + fx0 + pair.gamma + URYSOHN_CHECK_TOL {
        return Err(fail(sup_minus - (1.0 + fx0 + pair.gamma)));
    }
    Ok(())
}

/// Which side of the perturbation pair witnessed the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinDirection {
    Plus,
    Minus,
}

/// Evidence that an operator expands the uniform distance, derived
/// from a boundary coordinate it fails to pin: the operator moves
/// `f0` at `x0` yet fixes the perturbed point there, so the image
/// pair is strictly farther apart than the input pair.
#[derive(Debug, Clone)]
pub struct PinViolationWitness {
    pub x0: usize,
    pub direction: PinDirection,
    pub gamma: f64,
    pub pair: UrysohnPair,
    pub perturbed: Vector,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Turn a pinning defect of `op` at `(f0, x0)` into an expansion
/// witness. Fails with a hypothesis error when `op` already pins the
/// coordinate, and with a pinning error when it also moves the
/// perturbed boundary point.
pub fn pin_violation_witness(
    op: &Mapping,
    f0: &Vector,
    x0: usize,
    tol: f64,
) -> Result<PinViolationWitness> {
    let space = *op.space();
    if space.norm != NormTag::Linf {
        return Err(Error::param("op", "pinning witnesses live on the sup norm"));
    }
    space.check_in_ball(f0, tol)?;
    if x0 >= space.dim {
        return Err(Error::param("x0", format!("{x0} beyond dimension {}", space.dim)));
    }
    let image0 = op.evaluate(f0)?;
    let defect = image0.coords[x0] - f0.coords[x0];
    if defect.abs() <= tol {
        return Err(Error::HypothesisNotMet {
            message: format!("operator pins coordinate {x0} within {tol}"),
        });
    }
    let fx0 = f0.coords[x0];
    let cap = (1.0 - fx0).min(1.0 + fx0);
    if cap <= 0.0 {
        return Err(Error::param(
            "x0",
            "the base point attains the boundary at the marked coordinate",
        ));
    }
    let gamma = 0.5 * defect.abs().min(cap);
    let pair = urysohn_pair(f0, x0, gamma, UrysohnProfile::Indicator)?;
    // push opposite to the defect so the image gap stretches past the
    // input gap
    let (direction, perturbed, expected) = if defect > 0.0 {
        (PinDirection::Minus, pair.g_minus.clone(), -1.0)
    } else {
        (PinDirection::Plus, pair.g_plus.clone(), 1.0)
    };
    let image_p = op.evaluate(&perturbed)?;
    let actual = image_p.coords[x0];
    if (actual - expected).abs() > tol {
        return Err(Error::NotBoundaryPinned {
            coord: x0,
            expected,
            actual,
        });
    }
    let lhs = space.norm_of(&image0.sub(&image_p))?;
    let rhs = space.norm_of(&f0.sub(&perturbed))?;
    let margin = lhs - rhs;
    if margin <= 0.0 {
        return Err(Error::HypothesisNotMet {
            message: "no expansion across the perturbation pair".to_string(),
        });
    }
    Ok(PinViolationWitness {
        x0,
        direction,
        gamma,
        pair,
        perturbed,
        lhs,
        rhs,
        margin,
    })
}

/// Largest two-sided perturbations a grid mapping admits.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub extreme: bool,
    /// `deltas[i][k]` is the largest `t` with both `g +- t e_k` at
    /// sample `i` admissible, jointly over all samples.
    pub deltas: Vec<Vec<f64>>,
    pub max_delta: f64,
    /// Sample and coordinate attaining `max_delta`.
    pub witness: Option<(usize, usize)>,
}

/// Brute-force extremality test for grid mappings on the sup norm.
///
/// Per coordinate, the admissible perturbation magnitudes are the
/// pointwise-largest solution of the slack system given by the range
/// bound at each sample and the nonexpansiveness bound on each pair;
/// that solution is the shortest-path distance from a virtual source.
/// The mapping is extreme exactly when every magnitude vanishes.
/// Non-extreme outcomes are re-verified by exhaustive membership of
/// both perturbed grids.
pub fn grid_extreme_oracle(g: &Mapping, tol: f64, budget: &ProbeBudget) -> Result<OracleOutcome> {
    let space = *g.space();
    if space.norm != NormTag::Linf {
        return Err(Error::param("g", "oracle works on the sup norm"));
    }
    let Expr::Grid { samples, values } = g.expr() else {
        return Err(Error::param("g", "oracle needs a grid mapping"));
    };
    let n = samples.len();
    let dim = space.dim;
    let mut pair_dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.distance(&samples[i], &samples[j])?;
            pair_dist[i][j] = d;
            pair_dist[j][i] = d;
        }
    }
    let mut deltas = vec![vec![0.0f64; dim]; n];
    for k in 0..dim {
        let mut slack = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = pair_dist[i][j] - (values[i].coords[k] - values[j].coords[k]).abs();
                if s < -tol {
                    return Err(Error::NegativeSlack { slack: s });
                }
                let s = s.max(0.0);
                slack[i][j] = s;
                slack[j][i] = s;
            }
        }
        // virtual source: initialize with the range slack, relax with
        // the pair slacks
        let mut dist: Vec<f64> = (0..n)
            .map(|i| (1.0 - values[i].coords[k].abs()).max(0.0))
            .collect();
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut u = usize::MAX;
            for v in 0..n {
                if !done[v] && (u == usize::MAX || dist[v] < dist[u]) {
                    u = v;
                }
            }
            done[u] = true;
            for v in 0..n {
                if !done[v] && dist[u] + slack[u][v] < dist[v] {
                    dist[v] = dist[u] + slack[u][v];
                }
            }
        }
        for i in 0..n {
            deltas[i][k] = dist[i];
        }
    }
    let mut max_delta = 0.0f64;
    let mut witness = None;
    for (i, row) in deltas.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            if d > max_delta {
                max_delta = d;
                witness = Some((i, k));
            }
        }
    }
    let extreme = max_delta <= tol;
    if !extreme {
        // independent confirmation that the certified perturbation is
        // admissible with both signs
        for sign in [1.0, -1.0] {
            let shifted: Vec<Vector> = values
                .iter()
                .zip(&deltas)
                .map(|(v, d)| {
                    Vector::new(
                        v.coords
                            .iter()
                            .zip(d)
                            .map(|(x, t)| (x + sign * t).clamp(-1.0, 1.0))
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let perturbed = Mapping::grid(space, samples.clone(), shifted)?;
            let check = perturbed.check_membership(tol.max(1e-9), budget)?;
            if !check.ok {
                return Err(Error::param(
                    "g",
                    "perturbed grid escaped the mapping space; slack system inconsistent",
                ));
            }
        }
    }
    Ok(OracleOutcome {
        extreme,
        deltas,
        max_delta,
        witness,
    })
}

/// Transport a decomposition of a linear isometry to a decomposition
/// of the identity by composing both parts with the inverse.
pub fn reduce_to_identity(
    iso: &Mapping,
    cert: &DecompositionCertificate,
    budget: &ProbeBudget,
) -> Result<DecompositionCertificate> {
    let space = *iso.space();
    let Some((a, b)) = iso.linearize() else {
        return Err(Error::param("iso", "the mapping must linearize"));
    };
    if space.norm_of(&b)? > 1e-12 {
        return Err(Error::NotIsometry {
            message: "nonzero offset".to_string(),
        });
    }
    let inv = a.inverse().map_err(|_| Error::NotIsometry {
        message: "linear part is singular".to_string(),
    })?;
    let fwd = a.operator_norm(space.norm)?;
    let bwd = inv.operator_norm(space.norm)?;
    if fwd > 1.0 + 1e-12 || bwd > 1.0 + 1e-12 {
        return Err(Error::NotIsometry {
            message: format!("operator norms {fwd} and {bwd} must both be one"),
        });
    }
    if cert.target != *iso {
        let close = match cert.target.linearize() {
            Some((ta, tb)) => {
                ta.sub(&a)?.operator_norm(space.norm)? + space.norm_of(&tb.sub(&b))? <= 1e-12
            }
            None => false,
        };
        if !close {
            return Err(Error::param(
                "cert",
                "certificate target differs from the isometry",
            ));
        }
    }
    let g = cert.g.post_compose_linear(&inv)?;
    let h = cert.h.post_compose_linear(&inv)?;
    DecompositionCertificate::build_with_bound(
        Mapping::identity(space),
        cert.lambda,
        g,
        h,
        budget,
        STRICT_RESIDUAL_BOUND,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn linf(dim: usize) -> SpaceContext {
        SpaceContext::new(dim, NormTag::Linf).unwrap()
    }

    fn budget() -> ProbeBudget {
        ProbeBudget {
            points: 32,
            pairs: 64,
            seed: 7,
        }
    }

    fn mat(rows: Vec<Vec<f64>>) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn classify(rows: Vec<Vec<f64>>) -> LinearExtremalityVerdict {
        let m = mat(rows);
        classify_linear_extremal(linf(m.rows()), &m, 1e-9, &budget()).unwrap()
    }

    #[test]
    fn deficient_row_splits_against_zero_and_rescaled_rows() {
        let verdict = classify(vec![vec![0.5, 0.0], vec![0.0, 1.0]]);
        assert!(!verdict.extremal);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.lambda, 0.5);
        let (g, _) = cert.g.linearize().unwrap();
        let (h, _) = cert.h.linearize().unwrap();
        assert_eq!(g.row(0), &[0.0, 0.0]);
        assert_eq!(h.row(0), &[1.0, 0.0]);
        assert_eq!(g.row(1), &[0.0, 1.0]);
        assert!(cert.residual <= 1e-12);
    }

    #[test]
    fn vanishing_row_splits_into_opposite_unit_rows() {
        let verdict = classify(vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
        assert!(!verdict.extremal);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.lambda, 0.5);
        let (g, _) = cert.g.linearize().unwrap();
        let (h, _) = cert.h.linearize().unwrap();
        assert_eq!(g.row(0), &[-1.0, 0.0]);
        assert_eq!(h.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn split_support_peels_the_first_signed_coordinate() {
        let verdict = classify(vec![vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert!(!verdict.extremal);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.lambda, 0.5);
        let (g, _) = cert.g.linearize().unwrap();
        let (h, _) = cert.h.linearize().unwrap();
        assert_eq!(g.row(0), &[0.0, 1.0]);
        assert_eq!(h.row(0), &[1.0, 0.0]);
        assert!(cert.residual <= 1e-12);
    }

    #[test]
    fn negative_entry_peels_with_its_sign() {
        let verdict = classify(vec![vec![-0.25, 0.75], vec![0.0, 1.0]]);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.lambda, 0.25);
        let (g, _) = cert.g.linearize().unwrap();
        let (h, _) = cert.h.linearize().unwrap();
        assert_eq!(g.row(0), &[0.0, 1.0]);
        assert_eq!(h.row(0), &[-1.0, 0.0]);
    }

    #[test]
    fn signed_permutations_are_extremal_with_their_shape() {
        let verdict = classify(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(verdict.extremal);
        let form = verdict.form.unwrap();
        assert_eq!(form.pi, vec![1, 0]);
        assert_eq!(form.epsilon, vec![1.0, 1.0]);
        assert_eq!(form.fibers, vec![vec![1], vec![0]]);
    }

    #[test]
    fn collapsing_permutation_keeps_fibers_together() {
        let verdict = classify(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        assert!(verdict.extremal);
        let form = verdict.form.unwrap();
        assert_eq!(form.pi, vec![0, 0]);
        assert_eq!(form.epsilon, vec![1.0, -1.0]);
        assert_eq!(form.fibers, vec![vec![0, 1], vec![]]);
    }

    #[test]
    fn classifier_rejects_expanding_and_non_sup_inputs() {
        let m = mat(vec![vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(
            classify_linear_extremal(linf(2), &m, 1e-9, &budget()),
            Err(Error::NotNonexpansive { .. })
        ));
        let l2 = SpaceContext::new(2, NormTag::L2).unwrap();
        let id = mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            classify_linear_extremal(l2, &id, 1e-9, &budget()),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn rotations_build_and_validate() {
        let rot = make_rotation(linf(2), &[1, 0], &[1.0, -1.0]).unwrap();
        let (m, _) = rot.linearize().unwrap();
        assert_eq!(m.row(0), &[0.0, 1.0]);
        assert_eq!(m.row(1), &[-1.0, 0.0]);
        let verdict =
            classify_linear_extremal(linf(2), &m, 1e-9, &budget()).unwrap();
        assert!(verdict.extremal);
        assert!(make_rotation(linf(2), &[0, 0], &[1.0, 1.0]).is_err());
        assert!(make_rotation(linf(2), &[0, 1], &[0.5, 1.0]).is_err());
        assert!(make_rotation(linf(2), &[2, 0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn rotations_preserve_distances_on_probe_pairs() {
        let space = linf(3);
        let rot = make_rotation(space, &[2, 0, 1], &[-1.0, 1.0, -1.0]).unwrap();
        let pairs = sample::probe_pairs(&space, &budget());
        let check = rot.is_isometry_on_pairs(&pairs, 1e-12).unwrap();
        assert!(check.isometry, "defect {}", check.max_defect);
    }

    #[test]
    fn pinning_passes_for_identity_and_flags_the_swap() {
        let space = linf(2);
        let id = Mapping::identity(space);
        let samples = vec![
            (Vector::from(vec![1.0, 0.3]), 0usize),
            (Vector::from(vec![-0.2, -1.0]), 1usize),
        ];
        assert!(verify_pinning(&id, &samples, 1e-9).unwrap().is_empty());
        let swap = make_rotation(space, &[1, 0], &[1.0, 1.0]).unwrap();
        let violations = verify_pinning(&swap, &samples, 1e-9).unwrap();
        assert_eq!(violations.len(), 2);
        assert_eq!(violations[0].coordinate, 0);
        assert_eq!(violations[0].expected, 1.0);
        assert_eq!(violations[0].actual, 0.3);
    }

    #[test]
    fn pinning_rejects_interior_samples() {
        let id = Mapping::identity(linf(2));
        let samples = vec![(Vector::from(vec![0.5, 0.0]), 0usize)];
        assert!(verify_pinning(&id, &samples, 1e-9).is_err());
    }

    #[test]
    fn urysohn_indicator_on_a_three_point_base() {
        let f = Vector::from(vec![0.0, 0.5, -1.0]);
        let pair = urysohn_pair(&f, 0, 0.25, UrysohnProfile::Indicator).unwrap();
        assert_eq!(pair.neighborhood, vec![0]);
        assert_eq!(pair.g_plus.coords, vec![1.0, 0.5, -1.0]);
        assert_eq!(pair.g_minus.coords, vec![-1.0, 0.5, -1.0]);
        let gap = pair
            .g_plus
            .sub(&f)
            .coords
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        assert_eq!(gap, 1.0);
    }

    #[test]
    fn urysohn_leaves_far_coordinates_alone() {
        let f = Vector::from(vec![0.9, 0.0]);
        let pair = urysohn_pair(&f, 1, 0.05, UrysohnProfile::Indicator).unwrap();
        assert_eq!(pair.neighborhood, vec![1]);
        assert_eq!(pair.g_plus.coords, vec![0.9, 1.0]);
    }

    #[test]
    fn urysohn_wide_neighborhood_still_bumps_only_x0_for_indicator() {
        let f = Vector::from(vec![0.0, 0.0]);
        let pair = urysohn_pair(&f, 0, 0.5, UrysohnProfile::Indicator).unwrap();
        assert_eq!(pair.neighborhood, vec![0, 1]);
        assert_eq!(pair.bump.coords, vec![1.0, 0.0]);
        assert_eq!(pair.g_plus.coords, vec![1.0, 0.0]);
    }

    #[test]
    fn urysohn_tent_decays_linearly_over_the_neighborhood() {
        let f = Vector::from(vec![0.0, 0.1, 0.3]);
        let pair = urysohn_pair(&f, 0, 0.2, UrysohnProfile::Tent).unwrap();
        assert_eq!(pair.neighborhood, vec![0, 1]);
        assert!((pair.bump.coords[1] - 0.5).abs() < 1e-15);
        assert_eq!(pair.bump.coords[2], 0.0);
        assert!((pair.g_plus.coords[1] - 0.55).abs() < 1e-15);
        assert!((pair.g_minus.coords[1] + 0.45).abs() < 1e-15);
        assert_eq!(pair.g_plus.coords[2], 0.3);
    }

    #[test]
    fn urysohn_rejects_inadmissible_inputs() {
        let f = Vector::from(vec![0.0, 0.5]);
        assert!(urysohn_pair(&f, 0, 0.0, UrysohnProfile::Indicator).is_err());
        assert!(urysohn_pair(&f, 0, 1.0, UrysohnProfile::Indicator).is_err());
        let boundary = Vector::from(vec![1.0, 0.0]);
        assert!(urysohn_pair(&boundary, 0, 0.1, UrysohnProfile::Indicator).is_err());
        let outside = Vector::from(vec![1.5, 0.0]);
        assert!(matches!(
            urysohn_pair(&outside, 1, 0.1, UrysohnProfile::Indicator),
            Err(Error::OutsideBall { .. })
        ));
    }

    fn lifting_grid() -> Mapping {
        let space = linf(2);
        Mapping::grid(
            space,
            vec![Vector::from(vec![0.0, 0.0]), Vector::from(vec![-1.0, 0.0])],
            vec![Vector::from(vec![0.2, 0.0]), Vector::from(vec![-1.0, 0.0])],
        )
        .unwrap()
    }

    #[test]
    fn pin_witness_on_the_lifting_toy() {
        let op = lifting_grid();
        let f0 = Vector::from(vec![0.0, 0.0]);
        let w = pin_violation_witness(&op, &f0, 0, 1e-9).unwrap();
        assert_eq!(w.direction, PinDirection::Minus);
        assert!((w.gamma - 0.1).abs() < 1e-15);
        assert_eq!(w.perturbed.coords, vec![-1.0, 0.0]);
        assert!((w.lhs - 1.2).abs() < 1e-12);
        assert!((w.rhs - 1.0).abs() < 1e-12);
        assert!((w.margin - 0.2).abs() < 1e-12);
    }

    #[test]
    fn pin_witness_needs_a_defect() {
        let id = Mapping::identity(linf(2));
        let f0 = Vector::from(vec![0.0, 0.0]);
        assert!(matches!(
            pin_violation_witness(&id, &f0, 0, 1e-9),
            Err(Error::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn pin_witness_reports_moved_boundary_points() {
        let space = linf(2);
        let op = Mapping::grid(
            space,
            vec![Vector::from(vec![0.0, 0.0]), Vector::from(vec![-1.0, 0.0])],
            vec![Vector::from(vec![0.2, 0.0]), Vector::from(vec![-0.5, 0.0])],
        )
        .unwrap();
        let f0 = Vector::from(vec![0.0, 0.0]);
        let err = pin_violation_witness(&op, &f0, 0, 1e-9).unwrap_err();
        assert!(matches!(
            err,
            Error::NotBoundaryPinned {
                coord: 0,
                expected: -1.0,
                ..
            }
        ));
    }

    #[test]
    fn pin_witness_uses_the_plus_side_for_negative_defects() {
        let space = linf(2);
        let op = Mapping::grid(
            space,
            vec![Vector::from(vec![0.0, 0.0]), Vector::from(vec![1.0, 0.0])],
            vec![Vector::from(vec![-0.2, 0.0]), Vector::from(vec![1.0, 0.0])],
        )
        .unwrap();
        let f0 = Vector::from(vec![0.0, 0.0]);
        let w = pin_violation_witness(&op, &f0, 0, 1e-9).unwrap();
        assert_eq!(w.direction, PinDirection::Plus);
        assert!((w.lhs - 1.2).abs() < 1e-12);
        assert!((w.rhs - 1.0).abs() < 1e-12);
    }

    fn chain_space() -> SpaceContext {
        linf(1)
    }

    fn chain_samples() -> Vec<Vector> {
        [-1.0, 0.0, 1.0]
            .iter()
            .map(|v| Vector::from(vec![*v]))
            .collect()
    }

    #[test]
    fn oracle_calls_the_identity_chain_extreme() {
        let g = Mapping::identity(chain_space())
            .sampled_on(&chain_samples())
            .unwrap();
        let out = grid_extreme_oracle(&g, 1e-9, &budget()).unwrap();
        assert!(out.extreme);
        assert_eq!(out.max_delta, 0.0);
    }

    #[test]
    fn oracle_gives_the_zero_chain_full_slack() {
        let g = Mapping::grid(chain_space(), chain_samples(), vec![Vector::zero(1); 3]).unwrap();
        let out = grid_extreme_oracle(&g, 1e-9, &budget()).unwrap();
        assert!(!out.extreme);
        assert_eq!(out.max_delta, 1.0);
        for row in &out.deltas {
            assert_eq!(row[0], 1.0);
        }
    }

    #[test]
    fn oracle_tracks_the_first_coordinate_pin_family() {
        let space = linf(2);
        let samples = sample::grid_points(&space, 3);
        for (lam, expect_extreme) in [(0.5, false), (1.0, true), (-1.0, true), (0.0, false)] {
            let values: Vec<Vector> = samples
                .iter()
                .map(|x| Vector::from(vec![lam, x.coords[1]]))
                .collect();
            let g = Mapping::grid(space, samples.clone(), values).unwrap();
            let out = grid_extreme_oracle(&g, 1e-9, &budget()).unwrap();
            assert_eq!(out.extreme, expect_extreme, "lambda {lam}");
            if !expect_extreme {
                assert!((out.max_delta - (1.0 - lam.abs())).abs() < 1e-12);
                let (_, coord) = out.witness.unwrap();
                assert_eq!(coord, 0);
            }
        }
    }

    #[test]
    fn oracle_rejects_expanding_grids_and_non_grids() {
        let space = chain_space();
        let g = Mapping::grid(
            space,
            vec![Vector::from(vec![0.0]), Vector::from(vec![0.5])],
            vec![Vector::from(vec![0.0]), Vector::from(vec![1.0])],
        )
        .unwrap();
        assert!(matches!(
            grid_extreme_oracle(&g, 1e-9, &budget()),
            Err(Error::NegativeSlack { .. })
        ));
        let id = Mapping::identity(space);
        assert!(grid_extreme_oracle(&id, 1e-9, &budget()).is_err());
    }

    #[test]
    fn reduce_carries_negation_to_the_identity() {
        let space = linf(2);
        let neg = make_rotation(space, &[0, 1], &[-1.0, -1.0]).unwrap();
        let cert = DecompositionCertificate::trivial(&neg, &budget()).unwrap();
        let reduced = reduce_to_identity(&neg, &cert, &budget()).unwrap();
        assert_eq!(reduced.lambda, 0.0);
        let (g, _) = reduced.g.linearize().unwrap();
        assert_eq!(g.row(0), &[1.0, 0.0]);
        assert_eq!(g.row(1), &[0.0, 1.0]);
        assert!(reduced.residual <= 1e-12);
    }

    #[test]
    fn reduce_keeps_distinct_parts_distinct() {
        let space = linf(2);
        let iso = make_rotation(space, &[0, 1], &[1.0, -1.0]).unwrap();
        let zero = Mapping::linear(space, mat(vec![vec![0.0, 0.0], vec![0.0, 0.0]])).unwrap();
        let cert =
            DecompositionCertificate::build(iso.clone(), 0.0, iso.clone(), zero, &budget())
                .unwrap();
        let reduced = reduce_to_identity(&iso, &cert, &budget()).unwrap();
        let (g, _) = reduced.g.linearize().unwrap();
        let (h, _) = reduced.h.linearize().unwrap();
        assert_eq!(g.row(0), &[1.0, 0.0]);
        assert_eq!(h.row(0), &[0.0, 0.0]);
        assert_eq!(h.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn reduce_rejects_contractions_offsets_and_mismatches() {
        let space = linf(2);
        let half = Mapping::linear(space, mat(vec![vec![0.5, 0.0], vec![0.0, 1.0]])).unwrap();
        let cert = DecompositionCertificate::trivial(&half, &budget()).unwrap();
        assert!(matches!(
            reduce_to_identity(&half, &cert, &budget()),
            Err(Error::NotIsometry { .. })
        ));
        let shifted = Mapping::affine(
            space,
            mat(vec![vec![0.5, 0.0], vec![0.0, 0.5]]),
            Vector::from(vec![0.5, 0.0]),
        )
        .unwrap();
        let cert2 = DecompositionCertificate::trivial(&shifted, &budget()).unwrap();
        assert!(matches!(
            reduce_to_identity(&shifted, &cert2, &budget()),
            Err(Error::NotIsometry { .. })
        ));
        let swap = make_rotation(space, &[1, 0], &[1.0, 1.0]).unwrap();
        let neg = make_rotation(space, &[0, 1], &[-1.0, -1.0]).unwrap();
        let cert3 = DecompositionCertificate::trivial(&swap, &budget()).unwrap();
        assert!(reduce_to_identity(&neg, &cert3, &budget()).is_err());
    }
}
