//! Deterministic sampling: seeded generators, structured probe sets,
//! and product grids over the ball.
//!
//! All randomized operations in the crate draw from a single
//! counter-based generator family (ChaCha8) seeded from the run
//! configuration; distinct concerns use distinct stream ids so that
//! adding samples in one place never shifts another.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::space::{NormTag, SpaceContext, Vector};

pub const STREAM_PAIRS: u64 = 1;
pub const STREAM_POINTS: u64 = 2;
pub const STREAM_PROBES: u64 = 3;
pub const STREAM_BOUNDARY: u64 = 4;
pub const STREAM_INSTANCES: u64 = 5;

/// Sampling budget for bound estimation. `seed` feeds the stream
/// generators; the structured probes are used on top of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeBudget {
    pub points: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget {
            points: 256,
            pairs: 512,
            seed: 0,
        }
    }
}

/// Root generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator on a dedicated stream, independent of other streams for
/// the same seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Structured probe points: center, signed axis points at several
/// radii, and (for small dimensions) ball vertices plus one-zero
/// relaxations of them. All points lie in the closed unit ball.
pub fn canonical_points(space: &SpaceContext) -> Vec<Vector> {
    let dim = space.dim;
    let mut pts = vec![Vector::zero(dim)];
    for k in 0..dim {
        for s in [1.0, -1.0, 0.6, -0.6, 0.25] {
            let mut v = Vector::zero(dim);
            v.coords[k] = s;
            pts.push(v);
        }
    }
    if dim <= 5 {
        let corner_norm = match space.norm {
            NormTag::Linf => 1.0,
            NormTag::L1 => dim as f64,
            NormTag::L2 => (dim as f64).sqrt(),
        };
        for pattern in 0u64..(1 << dim) {
            let corner: Vec<f64> = (0..dim)
                .map(|k| if pattern >> k & 1 == 0 { 1.0 } else { -1.0 })
                .collect();
            pts.push(Vector {
                coords: corner.iter().map(|c| c / corner_norm).collect(),
            });
            // relax one coordinate to zero: facet midpoints on linf
            for k in 0..dim {
                let mut mid = corner.clone();
                mid[k] = 0.0;
                let n = space.norm.norm(&mid);
                if n > 0.0 {
                    pts.push(Vector {
                        coords: mid.iter().map(|c| c / n.max(1.0)).collect(),
                    });
                }
            }
        }
    }
    dedup_points(pts)
}

fn dedup_points(pts: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| q == &p) {
            out.push(p);
        }
    }
    out
}

/// Product grid over [-1, 1]^dim restricted to the ball. Grid points
/// outside the ball are radially projected onto the sphere, so the
/// result covers the whole ball within [`cover_radius`].
pub fn grid_points(space: &SpaceContext, per_axis: usize) -> Vec<Vector> {
    assert!(per_axis >= 2, "grid needs at least two points per axis");
    let dim = space.dim;
    let step = 2.0 / (per_axis - 1) as f64;
    let mut pts = Vec::new();
    let total = per_axis.pow(dim as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = Vec::with_capacity(dim);
        for _ in 0..dim {
            let i = rem % per_axis;
            rem /= per_axis;
            coords.push(-1.0 + step * i as f64);
        }
        let n = space.norm.norm(&coords);
        if n <= 1.0 {
            pts.push(Vector { coords });
        } else {
            pts.push(Vector {
                coords: coords.iter().map(|c| c / n).collect(),
            });
        }
    }
    dedup_points(pts)
}

/// Covering radius of [`grid_points`] for the same arguments: every
/// ball point has a grid point within this distance.
pub fn cover_radius(space: &SpaceContext, per_axis: usize) -> f64 {
    let step = 2.0 / (per_axis - 1) as f64;
    let cube = match space.norm {
        NormTag::Linf => return step / 2.0,
        NormTag::L1 => step / 2.0 * space.dim as f64,
        NormTag::L2 => step / 2.0 * (space.dim as f64).sqrt(),
    };
    // radial projection of outside grid points at most doubles the gap
    2.0 * cube
}

/// Uniformish random point of the closed ball.
pub fn random_ball_point(space: &SpaceContext, rng: &mut ChaCha8Rng) -> Vector {
    let coords: Vec<f64> = (0..space.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let n = space.norm.norm(&coords);
    if n <= 1.0 {
        return Vector { coords };
    }
    let u: f64 = rng.gen_range(0.0..=1.0);
    Vector {
        coords: coords.iter().map(|c| c / n * u).collect(),
    }
}

/// Random point of the unit sphere.
pub fn random_boundary_point(space: &SpaceContext, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let coords: Vec<f64> = (0..space.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n = space.norm.norm(&coords);
        if n > 1e-6 {
            return Vector {
                coords: coords.iter().map(|c| c / n).collect(),
            };
        }
    }
}

/// Distinct pairs of structured probes, topped up with seeded random
/// pairs until the budget is reached.
pub fn probe_pairs(space: &SpaceContext, budget: &ProbeBudget) -> Vec<(Vector, Vector)> {
    let pts = canonical_points(space);
    let mut pairs = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            pairs.push((pts[i].clone(), pts[j].clone()));
        }
    }
    let mut r = stream_rng(budget.seed, STREAM_PAIRS);
    for _ in 0..budget.pairs {
        let a = random_ball_point(space, &mut r);
        let b = random_ball_point(space, &mut r);
        if space.distance(&a, &b).unwrap() > 1e-9 {
            pairs.push((a, b));
        }
    }
    pairs
}
