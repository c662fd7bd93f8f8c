//! Dense operators between `lp` spaces and sound enclosures of their norms.
//!
//! Operator norms and minimum gains (`inf ||Ax|| / ||x||`) are reported as
//! [`BoundInterval`]s. For `p` in `{1, 2, inf}` the norm has a closed form and
//! the interval is a point; for other exponents the upper end comes from
//! Riesz-Thorin interpolation between the 1- and inf-norms and the lower end
//! from a multi-start sphere search. Anything downstream that needs a
//! sufficient condition reads the sound side: `upper` of a norm, `lower` of a
//! gain.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Svd;
use crate::lp::{vec_norm, Exponent, Space, SubspaceBasis};
use crate::policy::NumericPolicy;
use crate::search::{matvec, sphere_search, Goal, NormRatio};

/// An enclosure `[lower, upper]` of a nonnegative quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    /// Both ends come from a closed form and coincide.
    pub exact: bool,
}

impl BoundInterval {
    pub fn point(v: f64) -> Self {
        BoundInterval {
            lower: v,
            upper: v,
            exact: true,
        }
    }

    /// `[lower, upper]`, marked exact when the ends coincide.
    pub fn new(lower: f64, upper: f64) -> Self {
        let upper = upper.max(lower);
        BoundInterval {
            lower,
            upper,
            exact: lower == upper,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

impl fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{} (exact)", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// A bound together with the unit vector at which the search side of the
/// bound was attained.
#[derive(Debug, Clone)]
pub struct WitnessedBound {
    pub bound: BoundInterval,
    pub witness: Vec<f64>,
}

/// A real `m x n` matrix viewed as a map from `domain` (dim `n`) to
/// `codomain` (dim `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<f64>,
    domain: Space,
    codomain: Space,
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>, domain: Space, codomain: Space) -> Result<Operator> {
        if matrix.nrows() != codomain.dim() || matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot map {} to {}",
                matrix.nrows(),
                matrix.ncols(),
                domain,
                codomain
            )));
        }
        Ok(Operator {
            matrix,
            domain,
            codomain,
        })
    }

    /// `m x n` matrix between `lp^n` and `lp^m`.
    pub fn from_matrix(matrix: DMatrix<f64>, exp: Exponent) -> Result<Operator> {
        let domain = Space::new(matrix.ncols(), exp)?;
        let codomain = Space::new(matrix.nrows(), exp)?;
        Operator::new(matrix, domain, codomain)
    }

    /// Row-major construction; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>], exp: Exponent) -> Result<Operator> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "matrix rows have different lengths".into(),
            ));
        }
        Operator::from_matrix(DMatrix::from_fn(m, n, |r, c| rows[r][c]), exp)
    }

    pub fn identity(n: usize, exp: Exponent) -> Result<Operator> {
        Operator::from_matrix(DMatrix::identity(n, n), exp)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain(&self) -> Space {
        self.domain
    }

    pub fn codomain(&self) -> Space {
        self.codomain
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    /// The common exponent; mixed-exponent operators are not supported.
    pub fn exp(&self) -> Result<Exponent> {
        if self.domain.exp() != self.codomain.exp() {
            return Err(Error::Unsupported(format!(
                "mixed exponents {} -> {}",
                self.domain.exp(),
                self.codomain.exp()
            )));
        }
        Ok(self.domain.exp())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        matvec(&self.matrix, x)
    }

    fn same_shape(&self, other: &Operator) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::DimensionMismatch(format!(
                "operators {} -> {} and {} -> {}",
                self.domain, self.codomain, other.domain, other.codomain
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other)?;
        Operator::new(&self.matrix - &other.matrix, self.domain, self.codomain)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other)?;
        Operator::new(&self.matrix + &other.matrix, self.domain, self.codomain)
    }

    pub fn scaled(&self, alpha: f64) -> Operator {
        Operator {
            matrix: &self.matrix * alpha,
            ..self.clone()
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Operator) -> Result<Operator> {
        if inner.codomain != self.domain {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.domain, self.codomain, inner.domain, inner.codomain
            )));
        }
        Operator::new(&self.matrix * &inner.matrix, inner.domain, self.codomain)
    }

    pub fn transpose(&self) -> Operator {
        Operator {
            matrix: self.matrix.transpose(),
            domain: self.codomain,
            codomain: self.domain,
        }
    }

    /// `alpha I - self`, for square operators.
    pub fn shifted(&self, alpha: f64) -> Result<Operator> {
        self.require_square()?;
        let n = self.domain.dim();
        Operator::new(
            DMatrix::identity(n, n) * alpha - &self.matrix,
            self.domain,
            self.codomain,
        )
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if !self.is_square() || self.domain != self.codomain {
            return Err(Error::DimensionMismatch(format!(
                "expected an operator of a space into itself, got {} -> {}",
                self.domain, self.codomain
            )));
        }
        Ok(())
    }

    /// Enclosure of the operator norm `sup ||Ax|| / ||x||`.
    pub fn norm_bounds(&self, policy: &NumericPolicy) -> Result<BoundInterval> {
        Ok(self.norm_with_witness(policy)?.bound)
    }

    pub fn norm_with_witness(&self, policy: &NumericPolicy) -> Result<WitnessedBound> {
        let exp = self.exp()?;
        let a = &self.matrix;
        let n = self.domain.dim();
        match exp {
            Exponent::Infinity => {
                let (i, v) = max_abs_row_sum(a);
                let witness = (0..n).map(|c| sign_or_one(a[(i, c)])).collect();
                Ok(WitnessedBound {
                    bound: BoundInterval::point(v),
                    witness,
                })
            }
            _ if exp.is_one() => {
                let (j, v) = max_abs_col_sum(a);
                let mut witness = vec![0.0; n];
                witness[j] = 1.0;
                Ok(WitnessedBound {
                    bound: BoundInterval::point(v),
                    witness,
                })
            }
            _ if exp.is_two() => {
                let svd = Svd::new(a)?;
                let witness = svd.v.column(0).iter().copied().collect();
                Ok(WitnessedBound {
                    bound: BoundInterval::point(svd.sigma_max()),
                    witness,
                })
            }
            Exponent::Finite(_) => {
                let upper = riesz_thorin_upper(a, exp);
                let (j, _) = max_abs_col_sum(a);
                let (i, _) = max_abs_row_sum(a);
                let mut col_hint = vec![0.0; n];
                col_hint[j] = 1.0;
                let row_hint: Vec<f64> = (0..n).map(|c| sign_or_one(a[(i, c)])).collect();
                let svd_hint: Vec<f64> = Svd::new(a)?.v.column(0).iter().copied().collect();
                let obj = NormRatio::gain(exp, a);
                let best = sphere_search(
                    self.domain,
                    &obj,
                    Goal::Maximize,
                    &[svd_hint, col_hint, row_hint],
                    policy,
                );
                Ok(WitnessedBound {
                    bound: BoundInterval::new(best.value.min(upper), upper),
                    witness: best.point,
                })
            }
        }
    }

    /// Enclosure of the minimum gain `inf_{x != 0} ||Ax|| / ||x||`.
    pub fn min_gain_bounds(&self, policy: &NumericPolicy) -> Result<BoundInterval> {
        Ok(self.min_gain_with_witness(policy)?.bound)
    }

    pub fn min_gain_with_witness(&self, policy: &NumericPolicy) -> Result<WitnessedBound> {
        let exp = self.exp()?;
        let a = &self.matrix;
        let n = self.domain.dim();
        let svd = Svd::new(a)?;
        let unit = |mut v: Vec<f64>| {
            let nrm = vec_norm(&v, exp);
            if nrm > 0.0 {
                v.iter_mut().for_each(|x| *x /= nrm);
            }
            v
        };

        if svd.rank(policy) < n {
            let k = svd.kernel(policy);
            let witness = unit(k.column(0).iter().copied().collect());
            return Ok(WitnessedBound {
                bound: BoundInterval::point(0.0),
                witness,
            });
        }
        let smallest: Vec<f64> = svd.v.column(n - 1).iter().copied().collect();
        if exp.is_two() {
            return Ok(WitnessedBound {
                bound: BoundInterval::point(svd.sigma_min()),
                witness: smallest,
            });
        }

        // Full column rank: any left inverse L gives ||x|| <= ||L|| ||Ax||.
        let left = if self.is_square() {
            a.clone().try_inverse().unwrap_or_else(|| svd.pinv(policy))
        } else {
            svd.pinv(policy)
        };

        if self.is_square() && (exp.is_one() || exp.is_inf()) {
            // inf ||Ax||/||x|| = 1 / ||A^{-1}|| exactly, attained at the
            // preimage of the vector realizing ||A^{-1}||.
            let inv = Operator::from_matrix(left.clone(), exp)?;
            let WitnessedBound { bound, witness: y } = inv.norm_with_witness(policy)?;
            let witness = unit(matvec(&left, &y));
            return Ok(WitnessedBound {
                bound: BoundInterval::point(1.0 / bound.upper),
                witness,
            });
        }

        let left_norm_upper = match exp {
            Exponent::Infinity => max_abs_row_sum(&left).1,
            _ if exp.is_one() => max_abs_col_sum(&left).1,
            _ => riesz_thorin_upper(&left, exp),
        };
        let lower = 1.0 / left_norm_upper;
        let mut hints = vec![smallest];
        for c in 0..left.ncols().min(2 * n) {
            hints.push(left.column(c).iter().copied().collect());
        }
        let obj = NormRatio::gain(exp, a);
        let best = sphere_search(self.domain, &obj, Goal::Minimize, &hints, policy);
        Ok(WitnessedBound {
            bound: BoundInterval::new(lower.min(best.value), best.value),
            witness: best.point,
        })
    }

    /// Number of singular values above the policy cutoff.
    pub fn numeric_rank(&self, policy: &NumericPolicy) -> Result<usize> {
        Ok(Svd::new(&self.matrix)?.rank(policy))
    }

    /// Orthonormal basis of the numerical kernel, in the domain.
    pub fn kernel_basis(&self, policy: &NumericPolicy) -> Result<SubspaceBasis> {
        SubspaceBasis::from_columns(self.domain, &Svd::new(&self.matrix)?.kernel(policy))
    }

    /// Orthonormal basis of the numerical range, in the codomain.
    pub fn range_basis(&self, policy: &NumericPolicy) -> Result<SubspaceBasis> {
        SubspaceBasis::from_columns(self.codomain, &Svd::new(&self.matrix)?.range(policy))
    }

    /// The operator acting on `span(y)`, in the coordinates of `y`'s basis.
    ///
    /// The coordinate space has dimension `y.len()` and the domain's exponent.
    /// Composing with the embedding (the basis matrix) recovers ambient
    /// statements.
    pub fn restrict(&self, y: &SubspaceBasis, policy: &NumericPolicy) -> Result<Operator> {
        if y.space() != self.domain {
            return Err(Error::DimensionMismatch(format!(
                "subspace of {} but operator defined on {}",
                y.space(),
                self.domain
            )));
        }
        if y.is_empty() {
            return Err(Error::DegenerateBasis(
                "cannot restrict to the zero subspace".into(),
            ));
        }
        y.ensure_independent(policy)?;
        let coords = Space::new(y.len(), self.domain.exp())?;
        Operator::new(&self.matrix * y.to_matrix(), coords, self.codomain)
    }
}

/// `dim X - dim span(B)`.
pub fn codim(b: &SubspaceBasis, x: Space, policy: &NumericPolicy) -> Result<usize> {
    if b.space().dim() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis in {} but ambient {}",
            b.space(),
            x
        )));
    }
    if b.is_empty() {
        return Ok(x.dim());
    }
    let rank = Svd::new(&b.to_matrix())?.rank(policy);
    Ok(x.dim() - rank)
}

fn sign_or_one(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `(column index, max_j sum_i |a_ij|)`, first maximizer on ties.
pub(crate) fn max_abs_col_sum(a: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, col) in a.column_iter().enumerate() {
        let s: f64 = col.iter().map(|v| v.abs()).sum();
        if s > best.1 {
            best = (j, s);
        }
    }
    (best.0, best.1.max(0.0))
}

/// `(row index, max_i sum_j |a_ij|)`, first maximizer on ties.
pub(crate) fn max_abs_row_sum(a: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, row) in a.row_iter().enumerate() {
        let s: f64 = row.iter().map(|v| v.abs()).sum();
        if s > best.1 {
            best = (i, s);
        }
    }
    (best.0, best.1.max(0.0))
}

/// `||A||_1^{1/p} ||A||_inf^{1-1/p}`, an upper bound on `||A||_p`.
pub(crate) fn riesz_thorin_upper(a: &DMatrix<f64>, exp: Exponent) -> f64 {
    let t = exp.reciprocal();
    let n1 = max_abs_col_sum(a).1;
    let ninf = max_abs_row_sum(a).1;
    if n1 == 0.0 || ninf == 0.0 {
        return 0.0;
    }
    n1.powf(t) * ninf.powf(1.0 - t)
}
