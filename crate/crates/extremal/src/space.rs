//! Finite-dimensional normed spaces and their unit balls.
//!
//! A [`SpaceContext`] fixes the ambient dimension and one of the three
//! supported norms. Every geometric operation in the crate runs relative
//! to such a context; vectors and functionals are plain coordinate
//! records and carry no norm of their own.

use crate::error::{Error, Result};

/// Absolute comparison tolerance used when an operation takes no explicit one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The three supported norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormTag {
    L1,
    L2,
    Linf,
}

impl NormTag {
    /// Tag of the dual norm: l1 and linf swap, l2 is self-dual.
    pub fn dual(self) -> NormTag {
        match self {
            NormTag::L1 => NormTag::Linf,
            NormTag::L2 => NormTag::L2,
            NormTag::Linf => NormTag::L1,
        }
    }

    /// Lowercase name as used in JSON documents.
    pub fn as_str(self) -> &'static str {
        match self {
            NormTag::L1 => "l1",
            NormTag::L2 => "l2",
            NormTag::Linf => "linf",
        }
    }

    pub fn parse(s: &str) -> Option<NormTag> {
        match s {
            "l1" => Some(NormTag::L1),
            "l2" => Some(NormTag::L2),
            "linf" => Some(NormTag::Linf),
            _ => None,
        }
    }

    /// Norm of a raw coordinate slice.
    pub fn norm(self, coords: &[f64]) -> f64 {
        match self {
            NormTag::L1 => coords.iter().map(|c| c.abs()).sum(),
            NormTag::L2 => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormTag::Linf => coords.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }
}

/// Ambient space: dimension plus norm choice. The unit ball of this
/// norm is the domain of every mapping in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceContext {
    pub dim: usize,
    pub norm: NormTag,
}

impl SpaceContext {
    pub fn new(dim: usize, norm: NormTag) -> Result<SpaceContext> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be positive"));
        }
        Ok(SpaceContext { dim, norm })
    }

    pub fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn norm_of(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.norm.norm(&v.coords))
    }

    /// Norm in the dual space, used for functionals.
    pub fn dual_norm_of(&self, f: &Functional) -> Result<f64> {
        if f.coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.coords.len(),
            });
        }
        Ok(self.norm.dual().norm(&f.coords))
    }

    /// Errors unless `v` lies in the unit ball within `tol`.
    pub fn check_in_ball(&self, v: &Vector, tol: f64) -> Result<f64> {
        let n = self.norm_of(v)?;
        if n > 1.0 + tol {
            return Err(Error::OutsideBall { norm: n, tol });
        }
        Ok(n)
    }

    pub fn distance(&self, a: &Vector, b: &Vector) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let diff: Vec<f64> = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| x - y)
            .collect();
        Ok(self.norm.norm(&diff))
    }
}

/// Point of the ambient space, written in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    pub coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Vector> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector coordinates",
            });
        }
        Ok(Vector { coords })
    }

    pub fn zero(dim: usize) -> Vector {
        Vector {
            coords: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_k`.
    pub fn unit(dim: usize, k: usize) -> Vector {
        let mut coords = vec![0.0; dim];
        coords[k] = 1.0;
        Vector { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    /// `self + t * dir`.
    pub fn axpy(&self, t: f64, dir: &Vector) -> Vector {
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&dir.coords)
                .map(|(a, d)| a + t * d)
                .collect(),
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(coords: Vec<f64>) -> Vector {
        Vector { coords }
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Continuous linear functional, written in the dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub coords: Vec<f64>,
}

impl Functional {
    pub fn new(coords: Vec<f64>) -> Result<Functional> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "functional coordinates",
            });
        }
        Ok(Functional { coords })
    }

    /// Dual basis functional `e_k^*`, optionally negated.
    pub fn unit(dim: usize, k: usize, sign: f64) -> Functional {
        let mut coords = vec![0.0; dim];
        coords[k] = sign;
        Functional { coords }
    }

    pub fn apply(&self, v: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&v.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}
