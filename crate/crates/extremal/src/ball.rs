//! Unit ball geometry: extreme points, normal cones, and the
//! exposed / almost-exposed taxonomy of boundary points.
//!
//! Almost-exposedness is decided through the supporting faces: a
//! boundary point qualifies when the intersection of all supporting
//! hyperplane faces collapses to the point itself. For the polyhedral
//! norms this is equivalent to the normal-cone generators spanning the
//! dual space; for l2 strict convexity makes every boundary point
//! both exposed and almost exposed.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, RANK_REL_TOL};
use crate::space::{Functional, NormTag, SpaceContext, Vector};

/// Cap on the l1 normal-cone enumeration: one generator per sign
/// pattern on the zero coordinates, so the count is 2^(zeros).
pub const L1_CONE_DIM_CAP: usize = 20;

/// Supporting functionals at a boundary point, each normalized to
/// dual norm one.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCone {
    pub base_point: Vector,
    pub generators: Vec<Functional>,
}

/// Boundary taxonomy tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Exposed,
    AlmostExposedOnly,
    BoundaryNotAlmostExposed,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::Interior => "INTERIOR",
            PointClass::Exposed => "EXPOSED",
            PointClass::AlmostExposedOnly => "ALMOST_EXPOSED_ONLY",
            PointClass::BoundaryNotAlmostExposed => "BOUNDARY_NOT_ALMOST_EXPOSED",
        }
    }
}

/// Full classification of a ball point. The two predicates are
/// computed independently and reported side by side; the tag is
/// derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub class: PointClass,
    pub extreme: bool,
    pub exposed: bool,
    pub almost_exposed: bool,
    pub norm: f64,
}

/// Whether `x` is an extreme point of the unit ball.
///
/// l1: exactly the signed basis vectors. linf: all coordinates of
/// modulus one. l2: the whole sphere.
pub fn is_extreme_point(space: &SpaceContext, x: &Vector, tol: f64) -> Result<bool> {
    space.check_in_ball(x, tol)?;
    match space.norm {
        NormTag::L1 => {
            let (k, _) = x
                .coords
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |acc, (i, c)| {
                    if c.abs() > acc.1 {
                        (i, c.abs())
                    } else {
                        acc
                    }
                });
            let sign = if x.coords[k] >= 0.0 { 1.0 } else { -1.0 };
            let mut ok = (x.coords[k] - sign).abs() <= tol;
            for (i, c) in x.coords.iter().enumerate() {
                if i != k {
                    ok &= c.abs() <= tol;
                }
            }
            Ok(ok)
        }
        NormTag::Linf => Ok(x.coords.iter().all(|c| (c.abs() - 1.0).abs() <= tol)),
        NormTag::L2 => {
            let n = NormTag::L2.norm(&x.coords);
            Ok((n - 1.0).abs() <= tol)
        }
    }
}

/// Normal-cone generators at a boundary point, normalized to dual
/// norm one. Errors on interior points.
///
/// linf: one signed coordinate functional per pinned coordinate.
/// l1: every sign pattern that agrees with `x` on its support
/// (enumerated, which caps the dimension at [`L1_CONE_DIM_CAP`]).
/// l2: the point itself as a functional.
pub fn normal_cone(space: &SpaceContext, x: &Vector, tol: f64) -> Result<NormalCone> {
    let n = space.check_in_ball(x, tol)?;
    if n < 1.0 - tol {
        return Err(Error::InteriorPoint { norm: n });
    }
    let dim = space.dim;
    let generators = match space.norm {
        NormTag::Linf => {
            let mut gens = Vec::new();
            for (i, c) in x.coords.iter().enumerate() {
                if c.abs() >= 1.0 - tol {
                    gens.push(Functional::unit(dim, i, c.signum()));
                }
            }
            gens
        }
        NormTag::L1 => {
            if dim > L1_CONE_DIM_CAP {
                return Err(Error::DimensionCap {
                    dim,
                    cap: L1_CONE_DIM_CAP,
                });
            }
            let zeros: Vec<usize> = (0..dim).filter(|i| x.coords[*i].abs() <= tol).collect();
            let mut gens = Vec::with_capacity(1 << zeros.len());
            for pattern in 0u64..(1u64 << zeros.len()) {
                let mut coords: Vec<f64> = x
                    .coords
                    .iter()
                    .map(|c| if *c >= 0.0 { 1.0 } else { -1.0 })
                    .collect();
                for (t, z) in zeros.iter().enumerate() {
                    coords[*z] = if pattern >> t & 1 == 0 { 1.0 } else { -1.0 };
                }
                gens.push(Functional { coords });
            }
            gens
        }
        NormTag::L2 => {
            vec![Functional {
                coords: x.coords.iter().map(|c| c / n).collect(),
            }]
        }
    };
    Ok(NormalCone {
        base_point: x.clone(),
        generators,
    })
}

/// Classify a ball point: interior, exposed, almost exposed only, or
/// boundary without the almost-exposed property, plus the extreme flag.
pub fn classify_point(space: &SpaceContext, x: &Vector, tol: f64) -> Result<PointReport> {
    let n = space.check_in_ball(x, tol)?;
    if n < 1.0 - tol {
        return Ok(PointReport {
            class: PointClass::Interior,
            extreme: false,
            exposed: false,
            almost_exposed: false,
            norm: n,
        });
    }
    let cone = normal_cone(space, x, tol)?;
    let extreme = is_extreme_point(space, x, tol)?;
    let (exposed, almost_exposed) = match space.norm {
        // strictly convex ball: the unique supporting hyperplane meets
        // the ball only at x
        NormTag::L2 => (true, true),
        NormTag::L1 | NormTag::Linf => {
            let rows: Vec<Vec<f64>> = cone.generators.iter().map(|g| g.coords.clone()).collect();
            let rank = Matrix::from_rows(rows)?.rank(RANK_REL_TOL)?;
            (extreme, rank == space.dim)
        }
    };
    let class = if exposed {
        PointClass::Exposed
    } else if almost_exposed {
        PointClass::AlmostExposedOnly
    } else {
        PointClass::BoundaryNotAlmostExposed
    };
    Ok(PointReport {
        class,
        extreme,
        exposed,
        almost_exposed,
        norm: n,
    })
}
