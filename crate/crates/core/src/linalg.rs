//! Dense SVD helpers shared by the rank, kernel and distance machinery.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

/// Singular value decomposition with singular values sorted in decreasing
/// order and a complete set of right singular vectors.
///
/// Wide matrices are padded with zero rows before factorization so that `v`
/// is always `n x n`; the padding only contributes exact zero singular values,
/// which is what the kernel needs.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub rows: usize,
    pub cols: usize,
    /// `rows x n`, left singular vectors paired with `sigma`.
    pub u: DMatrix<f64>,
    /// Length `n` (the column count).
    pub sigma: Vec<f64>,
    /// `n x n`, right singular vectors as columns.
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Result<Svd> {
        let (m, n) = a.shape();
        if n == 0 {
            return Ok(Svd {
                rows: m,
                cols: 0,
                u: DMatrix::zeros(m, 0),
                sigma: Vec::new(),
                v: DMatrix::zeros(0, 0),
            });
        }
        let padded = if m < n {
            let mut p = DMatrix::zeros(n, n);
            p.view_mut((0, 0), (m, n)).copy_from(a);
            p
        } else {
            a.clone()
        };
        let svd = SVD::try_new(padded, true, true, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let u_raw = svd.u.expect("requested u");
        let vt_raw = svd.v_t.expect("requested v_t");
        let sv = svd.singular_values;

        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));

        let mut u = DMatrix::zeros(m, n);
        let mut v = DMatrix::zeros(n, n);
        let mut sigma = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            sigma.push(sv[src]);
            for r in 0..m {
                u[(r, dst)] = u_raw[(r, src)];
            }
            for r in 0..n {
                v[(r, dst)] = vt_raw[(src, r)];
            }
        }
        Ok(Svd {
            rows: m,
            cols: n,
            u,
            sigma,
            v,
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, policy: &NumericPolicy) -> usize {
        let cutoff = policy.rank_cutoff(self.rows, self.cols, self.sigma_max());
        self.sigma
            .iter()
            .filter(|&&s| s > cutoff && s > 0.0)
            .count()
    }

    /// Orthonormal basis (columns) of the numerical range.
    pub fn range(&self, policy: &NumericPolicy) -> DMatrix<f64> {
        let r = self.rank(policy);
        self.u.columns(0, r).into_owned()
    }

    /// Orthonormal basis (columns) of the numerical kernel.
    pub fn kernel(&self, policy: &NumericPolicy) -> DMatrix<f64> {
        let r = self.rank(policy);
        self.v.columns(r, self.cols - r).into_owned()
    }

    /// Orthonormal basis of the orthogonal complement of the kernel.
    pub fn corange(&self, policy: &NumericPolicy) -> DMatrix<f64> {
        let r = self.rank(policy);
        self.v.columns(0, r).into_owned()
    }

    /// Moore-Penrose pseudoinverse at the policy's rank cutoff.
    pub fn pinv(&self, policy: &NumericPolicy) -> DMatrix<f64> {
        let r = self.rank(policy);
        let mut out = DMatrix::zeros(self.cols, self.rows);
        for k in 0..r {
            let vk = self.v.column(k);
            let uk = self.u.column(k);
            out += (vk * uk.transpose()) / self.sigma[k];
        }
        out
    }
}

/// Euclidean distance from `x` to the numerical column span of `cols`.
///
/// Dependent columns are tolerated: the span is taken at the policy's rank
/// cutoff.
pub(crate) fn span_distance(
    x: &DVector<f64>,
    cols: &DMatrix<f64>,
    policy: &NumericPolicy,
) -> Result<f64> {
    if cols.ncols() == 0 {
        return Ok(x.norm());
    }
    let q = Svd::new(cols)?.range(policy);
    Ok(residual_against_orthonormal(x, &q))
}

/// `|| x - Q Q^T x ||_2`, computed with one re-orthogonalization pass.
pub(crate) fn residual_against_orthonormal(x: &DVector<f64>, q: &DMatrix<f64>) -> f64 {
    let mut r = x.clone();
    for _ in 0..2 {
        let coeffs = q.transpose() * &r;
        r -= q * coeffs;
    }
    r.norm()
}
