//! Neumann-series inversion with a-priori error bounds, and certified
//! surjectivity.
//!
//! If `q >= ||I - T||` with `q < 1`, then `T^{-1} = sum_n (I - T)^n` and the
//! partial sum through `N` is off by at most `q^{N+1} / (1 - q)` in operator
//! norm. `q` is always the sound (upper) end of the norm enclosure.

use nalgebra::DMatrix;

use crate::certificates::{basic_bounds, verify_certificate, HildingCertificate};
use crate::error::{Error, Result};
use crate::lp::Vector;
use crate::operators::{BoundInterval, Operator};
use crate::policy::NumericPolicy;

#[derive(Debug, Clone)]
pub struct NeumannResult {
    pub approx_inverse: Operator,
    /// Highest power `N` included in the partial sum.
    pub terms_used: usize,
    /// Upper bound on `||I - T||`.
    pub q: f64,
    /// `q^{N+1} / (1 - q)`.
    pub error_bound: f64,
}

/// `(q, N)` for the contraction `I - T` at tolerance `tol`.
fn plan(t: &Operator, tol: f64, policy: &NumericPolicy) -> Result<(DMatrix<f64>, f64, usize)> {
    t.require_square()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = t.domain().dim();
    let residual = Operator::new(
        DMatrix::identity(n, n) - t.matrix(),
        t.domain(),
        t.codomain(),
    )?;
    let q = residual.norm_bounds(policy)?.upper;
    if !(q < 1.0) {
        return Err(Error::Precondition(format!(
            "cannot establish ||I - T|| < 1 (upper bound {q}); try a perturbation certificate instead"
        )));
    }
    let mut terms = 0usize;
    while geometric_tail(q, terms) > tol {
        terms += 1;
        if terms > policy.neumann_max_terms {
            return Err(Error::Numerical(format!(
                "Neumann series needs more than {} terms for q = {q}",
                policy.neumann_max_terms
            )));
        }
    }
    Ok((residual.matrix().clone(), q, terms))
}

fn geometric_tail(q: f64, terms: usize) -> f64 {
    q.powi(terms as i32 + 1) / (1.0 - q)
}

/// Partial Neumann sum `sum_{n <= N} (I - T)^n` with `N` the smallest count
/// whose a-priori error bound is at most `tol`.
pub fn neumann_inverse(t: &Operator, tol: f64, policy: &NumericPolicy) -> Result<NeumannResult> {
    let (r, q, terms) = plan(t, tol, policy)?;
    let n = r.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut carry = DMatrix::<f64>::zeros(n, n);
    let mut power = DMatrix::identity(n, n);
    for _ in 0..terms {
        power = &power * &r;
        // Kahan summation, entrywise.
        for (idx, p) in power.iter().enumerate() {
            let y = p - carry[idx];
            let s = sum[idx] + y;
            carry[idx] = (s - sum[idx]) - y;
            sum[idx] = s;
        }
    }
    Ok(NeumannResult {
        approx_inverse: Operator::new(sum, t.codomain(), t.domain())?,
        terms_used: terms,
        q,
        error_bound: geometric_tail(q, terms),
    })
}

/// `y` with `||y - T^{-1} b|| <= tol ||b||`, by the iteration
/// `y <- b + (I - T) y` started at `y = b`.
pub fn neumann_solve(t: &Operator, b: &Vector, tol: f64, policy: &NumericPolicy) -> Result<Vector> {
    if b.space() != t.codomain() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side in {} but operator maps into {}",
            b.space(),
            t.codomain()
        )));
    }
    let (r, _, terms) = plan(t, tol, policy)?;
    let rhs = b.to_dvector();
    let mut y = rhs.clone();
    for _ in 0..terms {
        y = &rhs + &r * &y;
    }
    Vector::new(y.iter().copied().collect(), t.domain())
}

#[derive(Debug, Clone)]
pub struct SurjectivityReport {
    pub rank: usize,
    pub codomain_dim: usize,
    pub surjective: bool,
    /// `(1 - l1) / (1 + l2)`: the certificate's lower bound on the gain.
    pub gain_floor: f64,
    pub min_gain: BoundInterval,
    /// The floor does not exceed the measured gain (upper end, plus 1e-9).
    pub consistent: bool,
    /// Slack of the certificate verification.
    pub margin: f64,
}

/// Confirms that a certificate for `(I, T)` makes `T` onto.
///
/// Refuses unless the certificate verifies soundly.
pub fn certified_surjective(
    t: &Operator,
    c: HildingCertificate,
    policy: &NumericPolicy,
) -> Result<SurjectivityReport> {
    t.require_square()?;
    let id = Operator::identity(t.domain().dim(), t.exp()?)?;
    let verdict = verify_certificate(&id, t, c, policy)?;
    if !verdict.is_verified() {
        return Err(Error::Unverified {
            status: verdict.status.as_str().into(),
            detail: "surjectivity needs a verified certificate for (I, T)".into(),
        });
    }
    let rank = t.numeric_rank(policy)?;
    let gain_floor = 1.0 / basic_bounds(c).upper;
    let min_gain = t.min_gain_bounds(policy)?;
    let codomain_dim = t.codomain().dim();
    Ok(SurjectivityReport {
        rank,
        codomain_dim,
        surjective: rank == codomain_dim,
        gain_floor,
        min_gain,
        consistent: gain_floor <= min_gain.upper + 1e-9,
        margin: verdict.margin,
    })
}
