//! Spectra, approximate point spectrum witnesses, and real ray scans.
//!
//! In finite dimensions the spectrum, the approximate point spectrum and the
//! eigenvalues coincide, so "is `alpha I - T` an isomorphism for every
//! `alpha` on a ray" reduces to a minimum-gain scan along the ray. Fixed-point
//! and antipodal gaps are the approximate point spectrum residuals at `+1` and
//! `-1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::certificates::{ray_gain, verify_certificate, HildingCertificate};
use crate::eigen;
use crate::error::{Error, Result};
use crate::lp::vec_norm;
use crate::operators::{BoundInterval, Operator};
use crate::policy::NumericPolicy;

/// Largest dimension [`spectrum`] accepts.
pub const MAX_SPECTRUM_DIM: usize = 64;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Smallest singular value of `T - lambda I`, per eigenvalue.
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// All eigenvalues of a real square operator with their backward errors.
pub fn spectrum(t: &Operator, policy: &NumericPolicy) -> Result<SpectrumReport> {
    t.require_square()?;
    let n = t.domain().dim();
    if n > MAX_SPECTRUM_DIM {
        return Err(Error::Unsupported(format!(
            "spectrum limited to dimension {MAX_SPECTRUM_DIM}, got {n}"
        )));
    }
    let mut eigenvalues =
        eigen::eigenvalues(t.matrix(), policy.qr_deflation_tol, policy.qr_iters_per_dim)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let tc: DMatrix<Complex64> = t.matrix().map(|v| Complex64::new(v, 0.0));
    let residuals = eigenvalues
        .iter()
        .map(|&lambda| {
            let shifted = &tc - DMatrix::<Complex64>::identity(n, n) * lambda;
            shifted
                .try_svd(false, false, f64::EPSILON, 0)
                .map(|svd| {
                    svd.singular_values
                        .iter()
                        .copied()
                        .fold(f64::INFINITY, f64::min)
                })
                .ok_or_else(|| Error::Numerical("complex SVD did not converge".into()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectrumReport {
        eigenvalues,
        residuals,
    })
}

/// A unit vector nearly annihilated by `T - lambda I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxWitness {
    pub lambda: f64,
    /// Unit vector in the operator's norm.
    pub x: Vec<f64>,
    /// `||(T - lambda I) x|| / ||x||`.
    pub residual: f64,
    /// The residual equals the infimum over the sphere (closed form). When
    /// false it is only an upper bound on the infimum.
    pub exact: bool,
}

/// Best unit witness for `lambda` in the approximate point spectrum.
///
/// For `p = 2` this is the smallest right singular vector of `T - lambda I`;
/// for `p` in `{1, inf}` the infimum is `1 / ||(T - lambda I)^{-1}||` with an
/// explicit maximizing vector. Other exponents fall back to sphere search.
pub fn aps_residual(t: &Operator, lambda: f64, policy: &NumericPolicy) -> Result<ApproxWitness> {
    let shifted = t.shifted(lambda)?;
    let exp = t.exp()?;
    let found = shifted.min_gain_with_witness(policy)?;
    let x = found.witness;
    let residual = vec_norm(&shifted.apply(&x), exp) / vec_norm(&x, exp);
    Ok(ApproxWitness {
        lambda,
        residual: if found.bound.exact {
            found.bound.lower
        } else {
            residual
        },
        x,
        exact: found.bound.exact,
    })
}

/// Residual at `lambda = 1`: how close `T` comes to fixing a unit vector.
pub fn fixed_point_gap(t: &Operator, policy: &NumericPolicy) -> Result<ApproxWitness> {
    aps_residual(t, 1.0, policy)
}

/// Residual at `lambda = -1`: how close `T` comes to flipping a unit vector.
pub fn antipodal_gap(t: &Operator, policy: &NumericPolicy) -> Result<ApproxWitness> {
    aps_residual(t, -1.0, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayDirection {
    Positive,
    Negative,
}

impl RayDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            RayDirection::Positive => "positive",
            RayDirection::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RayEntry {
    pub alpha: f64,
    /// Minimum gain of `alpha I - T`.
    pub gain: BoundInterval,
    pub invertible: bool,
    /// Certified lower bound from the certificate (negative rays only).
    pub certified_gain: Option<f64>,
    /// `gain.upper >= certified_gain - 1e-9`.
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct RayScanReport {
    pub direction: RayDirection,
    pub entries: Vec<RayEntry>,
}

impl RayScanReport {
    pub fn all_invertible(&self) -> bool {
        self.entries.iter().all(|e| e.invertible)
    }

    pub fn all_consistent(&self) -> bool {
        self.entries.iter().all(|e| e.consistent.unwrap_or(true))
    }
}

/// Scans `alpha I - T` along a real ray.
///
/// With a certificate for `(I, T)` (which must verify) each negative `alpha`
/// is cross-checked against the certified ray gain.
pub fn ray_scan(
    t: &Operator,
    direction: RayDirection,
    grid: &[f64],
    certificate: Option<HildingCertificate>,
    policy: &NumericPolicy,
) -> Result<RayScanReport> {
    t.require_square()?;
    let wrong_sign = |a: f64| match direction {
        RayDirection::Positive => !(a > 0.0),
        RayDirection::Negative => !(a < 0.0),
    };
    if let Some(a) = grid.iter().copied().find(|&a| wrong_sign(a)) {
        return Err(Error::InvalidArgument(format!(
            "grid value {a} is not on the {} ray",
            direction.as_str()
        )));
    }
    if let Some(c) = certificate {
        let id = Operator::identity(t.domain().dim(), t.exp()?)?;
        let v = verify_certificate(&id, t, c, policy)?;
        if !v.is_verified() {
            return Err(Error::Unverified {
                status: v.status.as_str().into(),
                detail: "ray scan cross-check needs a verified certificate for (I, T)".into(),
            });
        }
    }
    let n = t.domain().dim();
    let mut entries = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let a = t.shifted(alpha)?;
        let gain = a.min_gain_bounds(policy)?;
        let invertible = a.numeric_rank(policy)? == n;
        let certified_gain = match (direction, certificate) {
            (RayDirection::Negative, Some(c)) => Some(ray_gain(c, alpha)?),
            _ => None,
        };
        let consistent = certified_gain.map(|g| gain.upper >= g - 1e-9);
        entries.push(RayEntry {
            alpha,
            gain,
            invertible,
            certified_gain,
            consistent,
        });
    }
    Ok(RayScanReport { direction, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Exponent;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn rotation(exp: Exponent) -> Operator {
        Operator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]], exp).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let d = Operator::from_rows(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 2.0, 0.0],
                vec![0.0, 0.0, 3.0],
            ],
            Exponent::TWO,
        )
        .unwrap();
        let s = spectrum(&d, &pol()).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0]);

        let r = spectrum(&rotation(Exponent::TWO), &pol()).unwrap();
        assert!((r.eigenvalues[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!(r.max_residual() < 1e-14);
    }

    #[test]
    fn spectrum_rejects_large_or_rectangular() {
        let big = Operator::identity(65, Exponent::TWO).unwrap();
        assert!(matches!(spectrum(&big, &pol()), Err(Error::Unsupported(_))));
        let rect = Operator::from_rows(&[vec![1.0, 2.0]], Exponent::TWO).unwrap();
        assert!(spectrum(&rect, &pol()).is_err());
    }

    #[test]
    fn aps_examples() {
        let d = Operator::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]], Exponent::TWO).unwrap();
        let w = aps_residual(&d, 1.0, &pol()).unwrap();
        assert_eq!(w.residual, 0.0);
        assert!((w.x[0].abs() - 1.0).abs() < 1e-15 && w.x[1] == 0.0);

        // T - I = [[-1, 1], [-1, -1]] has both singular values sqrt 2.
        let w = aps_residual(&rotation(Exponent::TWO), 1.0, &pol()).unwrap();
        assert!((w.residual - 2f64.sqrt()).abs() < 1e-14 && w.exact);

        let n = 100;
        let shift = Operator::from_matrix(
            DMatrix::from_fn(n, n, |i, j| if i == j + 1 { 1.0 } else { 0.0 }),
            Exponent::TWO,
        )
        .unwrap();
        let w = aps_residual(&shift, 1.0, &pol()).unwrap();
        assert!(w.residual <= 0.1);
    }

    #[test]
    fn l1_rotation_gaps() {
        let t = rotation(Exponent::ONE);
        let f = fixed_point_gap(&t, &pol()).unwrap();
        let a = antipodal_gap(&t, &pol()).unwrap();
        assert!((f.residual - 1.0).abs() < 1e-15 && f.exact);
        assert!((a.residual - 1.0).abs() < 1e-15);
        assert!((vec_norm(&f.x, Exponent::ONE) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ray_scan_examples() {
        let id = Operator::identity(3, Exponent::TWO).unwrap();
        let r = ray_scan(&id, RayDirection::Positive, &[0.5, 1.0, 2.0], None, &pol()).unwrap();
        let inv: Vec<bool> = r.entries.iter().map(|e| e.invertible).collect();
        assert_eq!(inv, vec![true, false, true]);

        let rot = rotation(Exponent::new(3.0).unwrap());
        let grid = [-3.0, -1.0, -0.1];
        assert!(ray_scan(&rot, RayDirection::Negative, &grid, None, &pol())
            .unwrap()
            .all_invertible());
        assert!(ray_scan(&rot, RayDirection::Positive, &grid, None, &pol()).is_err());

        let c = HildingCertificate::new(0.0, 0.0).unwrap();
        let r = ray_scan(&id, RayDirection::Negative, &grid, Some(c), &pol()).unwrap();
        assert!(r.all_consistent());
        assert_eq!(r.entries[1].certified_gain, Some(2.0));
    }
}
