//! Finite-dimensional `lp` coordinate spaces.
//!
//! A [`Space`] is `R^dim` carrying the `lp` norm for an [`Exponent`] in
//! `[1, inf]`. Vectors are plain `f64` coordinates; the space only decides how
//! they are measured.
//!
//! Subspace membership is always decided in the Euclidean norm, whatever the
//! exponent of the ambient space. Membership in a finite-dimensional span does
//! not depend on the norm, and downstream code only consumes "distance is
//! (numerically) zero".

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Svd};
use crate::policy::NumericPolicy;

/// The `p` of an `lp` norm. Infinity is its own variant, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);
    pub const INF: Exponent = Exponent::Infinity;

    pub fn new(p: f64) -> Result<Exponent> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "exponent must be >= 1, got {p}"
            )));
        }
        if p.is_infinite() {
            return Err(Error::InvalidArgument(
                "use Exponent::Infinity (spelled \"inf\") instead of a float infinity".into(),
            ));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_one(self) -> bool {
        self == Exponent::ONE
    }

    pub fn is_two(self) -> bool {
        self == Exponent::TWO
    }

    pub fn is_inf(self) -> bool {
        self == Exponent::Infinity
    }

    /// `1/p`, with `1/inf = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Exponent> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse exponent {s:?}")))?;
        Exponent::new(p)
    }
}

/// `R^dim` with the `lp` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Space {
    dim: usize,
    exp: Exponent,
}

impl Space {
    pub fn new(dim: usize, exp: Exponent) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "space dimension must be >= 1".into(),
            ));
        }
        Ok(Space { dim, exp })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exp(&self) -> Exponent {
        self.exp
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        vec_norm(x, self.exp)
    }

    /// The canonical unit vector `e_i`.
    pub fn unit(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        e
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}^{}", self.exp, self.dim)
    }
}

/// The `lp` norm of a coordinate slice.
///
/// Computed as `m * (sum (|x_i|/m)^p)^(1/p)` with `m = max |x_i|`, so large and
/// tiny entries neither overflow nor underflow.
pub fn vec_norm(x: &[f64], exp: Exponent) -> f64 {
    let m = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    match exp {
        Exponent::Infinity => m,
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => {
            let s: f64 = x.iter().map(|v| (v / m) * (v / m)).sum();
            m * s.sqrt()
        }
        Exponent::Finite(p) => {
            let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
            m * s.powf(1.0 / p)
        }
    }
}

/// A gradient (subgradient at kinks) of `x -> ||x||_p`, written into `out`.
pub(crate) fn norm_gradient(x: &[f64], exp: Exponent, out: &mut [f64]) {
    let n = vec_norm(x, exp);
    out.iter_mut().for_each(|o| *o = 0.0);
    if n == 0.0 {
        return;
    }
    match exp {
        Exponent::Infinity => {
            let (idx, _) = x.iter().enumerate().fold((0, -1.0), |best, (i, v)| {
                if v.abs() > best.1 {
                    (i, v.abs())
                } else {
                    best
                }
            });
            out[idx] = x[idx].signum();
        }
        Exponent::Finite(p) if p == 1.0 => {
            for (o, v) in out.iter_mut().zip(x) {
                *o = if *v == 0.0 { 0.0 } else { v.signum() };
            }
        }
        Exponent::Finite(p) => {
            for (o, v) in out.iter_mut().zip(x) {
                *o = v.signum() * (v.abs() / n).powf(p - 1.0);
            }
        }
    }
}

/// A vector tied to the space it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
    space: Space,
}

impl Vector {
    pub fn new(coords: Vec<f64>, space: Space) -> Result<Vector> {
        if coords.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} coordinates, space {} needs {}",
                coords.len(),
                space,
                space.dim()
            )));
        }
        Ok(Vector { coords, space })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.coords, self.space.exp())
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }
}

/// Finitely many vectors of one space, spanning a subspace.
///
/// Linear independence is not checked on construction (codimension counts are
/// meaningful for dependent families); operations that need a genuine basis
/// call [`SubspaceBasis::ensure_independent`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    space: Space,
    vectors: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    pub fn new(space: Space, vectors: Vec<Vec<f64>>) -> Result<SubspaceBasis> {
        if let Some(v) = vectors.iter().find(|v| v.len() != space.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "basis vector of length {} in {}",
                v.len(),
                space
            )));
        }
        Ok(SubspaceBasis { space, vectors })
    }

    /// The basis made of the columns of `m`.
    pub fn from_columns(space: Space, m: &DMatrix<f64>) -> Result<SubspaceBasis> {
        let vectors = m
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        SubspaceBasis::new(space, vectors)
    }

    pub fn empty(space: Space) -> SubspaceBasis {
        SubspaceBasis {
            space,
            vectors: Vec::new(),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `dim x len` matrix whose columns are the basis vectors.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.space.dim();
        DMatrix::from_fn(n, self.vectors.len(), |r, c| self.vectors[c][r])
    }

    /// Fails unless the vectors are independent at the policy's rank cutoff.
    pub fn ensure_independent(&self, policy: &NumericPolicy) -> Result<()> {
        if self.vectors.is_empty() {
            return Ok(());
        }
        let rank = Svd::new(&self.to_matrix())?.rank(policy);
        if rank < self.vectors.len() {
            return Err(Error::DegenerateBasis(format!(
                "{} vectors span only a {rank}-dimensional subspace",
                self.vectors.len()
            )));
        }
        Ok(())
    }

    /// An orthonormal (Euclidean) basis of the same span, as matrix columns.
    pub fn orthonormal(&self, policy: &NumericPolicy) -> Result<DMatrix<f64>> {
        if self.vectors.is_empty() {
            return Ok(DMatrix::zeros(self.space.dim(), 0));
        }
        Ok(Svd::new(&self.to_matrix())?.range(policy))
    }
}

/// Deterministic points on the unit sphere of `space`.
///
/// When `count >= 2 * dim` the sample starts with the canonical directions
/// `+e_1, -e_1, +e_2, -e_2, ...`; the remaining points are Gaussian directions
/// rescaled to unit `lp` norm.
pub fn sphere_sample(space: Space, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = space.dim();
    let mut out = Vec::with_capacity(count);
    if count >= 2 * n {
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = sign;
                out.push(e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        out.push(random_unit(space, &mut rng));
    }
    out
}

pub(crate) fn random_unit(space: Space, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..space.dim())
            .map(|_| StandardNormal.sample(rng))
            .collect();
        let nrm = space.norm(&x);
        if nrm > 1e-300 {
            x.iter_mut().for_each(|v| *v /= nrm);
            return x;
        }
    }
}

/// Rescales `x` to unit norm in `space`; zero vectors are returned unchanged.
pub(crate) fn normalize(space: Space, x: &mut [f64]) {
    let n = space.norm(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Euclidean distance from `x` to `span(basis)`.
///
/// The basis must be non-empty and numerically independent. The Euclidean
/// norm is used regardless of the space's exponent; see the module docs.
pub fn subspace_distance(x: &Vector, basis: &SubspaceBasis, policy: &NumericPolicy) -> Result<f64> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("subspace basis is empty".into()));
    }
    if x.space().dim() != basis.space().dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector in {} but basis in {}",
            x.space(),
            basis.space()
        )));
    }
    basis.ensure_independent(policy)?;
    linalg::span_distance(&x.to_dvector(), &basis.to_matrix(), policy)
}
