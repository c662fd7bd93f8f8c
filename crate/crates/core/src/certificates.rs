//! Fitting, verifying and transforming two-parameter perturbation
//! certificates.
//!
//! A [`HildingCertificate`] `(l1, l2)` for a pair `S, T` asserts
//! `||Sx - Tx|| <= l1 ||Sx|| + l2 ||Tx||` for all `x`. Taking `S = I` gives the
//! one-operator form `||(I - T)x|| <= l1 ||x|| + l2 ||Tx||`.
//!
//! Note that the inequality only involves norms in the codomain. The norm of
//! the domain never enters, which is what lets [`verify_certificate`] quotient
//! out a shared kernel and still argue soundly.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, Svd};
use crate::lp::{vec_norm, Space};
use crate::operators::Operator;
use crate::policy::NumericPolicy;
use crate::search::{sphere_search, Goal, NormRatio, Term};

/// The constants `(l1, l2)`, both in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HildingCertificate {
    lambda1: f64,
    lambda2: f64,
}

impl HildingCertificate {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        Ok(HildingCertificate { lambda1, lambda2 })
    }

    pub fn symmetric(lambda: f64) -> Result<Self> {
        HildingCertificate::new(lambda, lambda)
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `max(l1, l2)`.
    pub fn max(&self) -> f64 {
        self.lambda1.max(self.lambda2)
    }
}

/// Norm-equivalence constants implied by a certificate:
/// `lower ||y|| <= ||x|| <= upper ||y||` whenever
/// `||x - y|| <= l1 ||x|| + l2 ||y||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `lower <= ||Sx|| / ||Tx|| <= upper` whenever the certificate holds.
pub fn basic_bounds(c: HildingCertificate) -> SandwichBounds {
    SandwichBounds {
        lower: (1.0 - c.lambda2) / (1.0 + c.lambda1),
        upper: (1.0 + c.lambda2) / (1.0 - c.lambda1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Verified,
    Refuted,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Verified => "verified",
            VerdictStatus::Refuted => "refuted",
            VerdictStatus::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of [`verify_certificate`].
///
/// `margin` is the sound slack `l1 g(S) + l2 g(T) - ||S - T||` when the norm
/// comparison applies (nonnegative exactly when verified), minus the witness's
/// violation when refuted, and minus the largest sampled violation per unit
/// norm when neither is available.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub witness: Option<Vec<f64>>,
    pub margin: f64,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        self.status == VerdictStatus::Verified
    }
}

/// `S` and `T` restricted to the orthogonal complement of their shared
/// numerical kernel, when they have one.
///
/// Kernel components change neither `Sx` nor `Tx`, but near the kernel both are
/// rounding noise and their ratio is meaningless. Searches therefore run on
/// the complement.
struct ReducedPair {
    s: Operator,
    t: Operator,
    diff: Operator,
    basis: Option<nalgebra::DMatrix<f64>>,
}

impl ReducedPair {
    fn new(s: &Operator, t: &Operator, policy: &NumericPolicy) -> Result<ReducedPair> {
        let ambient = || -> Result<ReducedPair> {
            Ok(ReducedPair {
                s: s.clone(),
                t: t.clone(),
                diff: s.sub(t)?,
                basis: None,
            })
        };
        let svd_s = Svd::new(s.matrix())?;
        let ks = svd_s.kernel(policy);
        if ks.ncols() == 0 {
            return ambient();
        }
        let kt = Svd::new(t.matrix())?.kernel(policy);
        let q = svd_s.corange(policy);
        if ks.ncols() != kt.ncols() || q.ncols() == 0 || !spans_agree(&ks, &kt, policy) {
            return ambient();
        }
        let coords = Space::new(q.ncols(), s.domain().exp())?;
        let reduce = |a: &Operator| Operator::new(a.matrix() * &q, coords, a.codomain());
        Ok(ReducedPair {
            s: reduce(s)?,
            t: reduce(t)?,
            diff: reduce(&s.sub(t)?)?,
            basis: Some(q),
        })
    }

    /// A point of the search space as a unit vector of the original domain.
    fn lift(&self, c: &[f64], domain: Space) -> Vec<f64> {
        match &self.basis {
            None => c.to_vec(),
            Some(q) => {
                let x = q * DVector::from_column_slice(c);
                let n = domain.norm(x.as_slice());
                x.iter().map(|v| v / n).collect()
            }
        }
    }
}

/// Sup of `||(S-T)x|| / (||Sx|| + ||Tx||)` found by search, with its
/// maximizer. Points where `Sx = Tx = 0` count as 0.
pub fn fit_lambda_witnessed(
    s: &Operator,
    t: &Operator,
    policy: &NumericPolicy,
) -> Result<(f64, Vec<f64>)> {
    let exp = s.exp()?;
    let r = ReducedPair::new(s, t, policy)?;
    let obj = NormRatio {
        exp,
        num: vec![(1.0, Term::Matrix(r.diff.matrix()))],
        den: vec![
            (1.0, Term::Matrix(r.s.matrix())),
            (1.0, Term::Matrix(r.t.matrix())),
        ],
    };
    let hints = kernel_hints(&r.s, &r.t, policy)?;
    let best = sphere_search(r.s.domain(), &obj, Goal::Maximize, &hints, policy);
    Ok((best.value, r.lift(&best.point, s.domain())))
}

/// A lower bound on the smallest symmetric constant
/// `sup ||Sx - Tx|| / (||Sx|| + ||Tx||)`.
///
/// The ratio is not concave, so the search only certifies "at least this
/// large". A value of 1 or more rules out any certificate.
pub fn fit_lambda(s: &Operator, t: &Operator, policy: &NumericPolicy) -> Result<f64> {
    Ok(fit_lambda_witnessed(s, t, policy)?.0)
}

/// The quantities of the sound norm comparison, possibly after removing a
/// common kernel.
#[derive(Debug, Clone, Copy)]
struct SoundRoute {
    diff_upper: f64,
    gain_s_lower: f64,
    gain_t_lower: f64,
}

impl SoundRoute {
    fn slack(&self, c: HildingCertificate) -> f64 {
        c.lambda1 * self.gain_s_lower + c.lambda2 * self.gain_t_lower - self.diff_upper
    }
}

/// `upper(||S - T||)` and `lower` gains of `S` and `T` on a complement of their
/// common kernel. `None` when the kernels differ (no certificate can hold).
fn sound_route(s: &Operator, t: &Operator, policy: &NumericPolicy) -> Result<Option<SoundRoute>> {
    let diff = s.sub(t)?;
    if diff.matrix().iter().all(|v| *v == 0.0) {
        return Ok(Some(SoundRoute {
            diff_upper: 0.0,
            gain_s_lower: 0.0,
            gain_t_lower: 0.0,
        }));
    }
    let svd_s = Svd::new(s.matrix())?;
    let svd_t = Svd::new(t.matrix())?;
    let ks = svd_s.kernel(policy);
    let kt = svd_t.kernel(policy);
    if ks.ncols() == 0 && kt.ncols() == 0 {
        return Ok(Some(SoundRoute {
            diff_upper: diff.norm_bounds(policy)?.upper,
            gain_s_lower: s.min_gain_bounds(policy)?.lower,
            gain_t_lower: t.min_gain_bounds(policy)?.lower,
        }));
    }
    if ks.ncols() != kt.ncols() || !spans_agree(&ks, &kt, policy) {
        return Ok(None);
    }
    let q = svd_s.corange(policy);
    if q.ncols() == 0 {
        return Ok(Some(SoundRoute {
            diff_upper: 0.0,
            gain_s_lower: 0.0,
            gain_t_lower: 0.0,
        }));
    }
    let coords = Space::new(q.ncols(), s.domain().exp())?;
    let reduce = |a: &Operator| Operator::new(a.matrix() * &q, coords, a.codomain());
    Ok(Some(SoundRoute {
        diff_upper: reduce(&diff)?.norm_bounds(policy)?.upper,
        gain_s_lower: reduce(s)?.min_gain_bounds(policy)?.lower,
        gain_t_lower: reduce(t)?.min_gain_bounds(policy)?.lower,
    }))
}

/// Every column of `a` lies in the span of `b` and vice versa.
pub(crate) fn spans_agree(
    a: &nalgebra::DMatrix<f64>,
    b: &nalgebra::DMatrix<f64>,
    policy: &NumericPolicy,
) -> bool {
    let inside = |x: &nalgebra::DMatrix<f64>, y: &nalgebra::DMatrix<f64>| {
        x.column_iter().all(|c| {
            let v = DVector::from_iterator(c.len(), c.iter().copied());
            linalg::residual_against_orthonormal(&v, y) <= policy.membership_tol * v.norm().max(1.0)
        })
    };
    inside(a, b) && inside(b, a)
}

fn kernel_hints(s: &Operator, t: &Operator, policy: &NumericPolicy) -> Result<Vec<Vec<f64>>> {
    let mut hints = Vec::new();
    for op in [s, t] {
        for v in op.kernel_basis(policy)?.vectors() {
            hints.push(v.clone());
        }
    }
    Ok(hints)
}

/// The smallest symmetric `l` the sound norm comparison can prove, if any is
/// below 1.
pub fn sound_lambda(s: &Operator, t: &Operator, policy: &NumericPolicy) -> Result<Option<f64>> {
    let Some(route) = sound_route(s, t, policy)? else {
        return Ok(None);
    };
    if route.diff_upper == 0.0 {
        return Ok(Some(0.0));
    }
    let denom = route.gain_s_lower + route.gain_t_lower;
    if denom <= 0.0 {
        return Ok(None);
    }
    let l = route.diff_upper / denom;
    Ok((l < 1.0).then_some(l))
}

/// Checks `||Sx - Tx|| <= l1 ||Sx|| + l2 ||Tx||` for all `x`.
///
/// * `Verified` only through the norm comparison
///   `upper ||S - T|| <= l1 lower g(S) + l2 lower g(T)`, where `g` is the
///   minimum gain. When `S` and `T` share a nontrivial kernel the comparison
///   is made on its orthogonal complement.
/// * `Refuted` when a searched point violates the inequality by more than
///   `policy.report_tol * (||Sx|| + ||Tx||)`; the point is returned.
/// * `Inconclusive` otherwise. Sampling alone never verifies.
pub fn verify_certificate(
    s: &Operator,
    t: &Operator,
    c: HildingCertificate,
    policy: &NumericPolicy,
) -> Result<Verdict> {
    let diff = s.sub(t)?;
    let exp = s.exp()?;
    let route = sound_route(s, t, policy)?;
    if let Some(r) = route {
        let slack = r.slack(c);
        if slack >= 0.0 {
            return Ok(Verdict {
                status: VerdictStatus::Verified,
                witness: None,
                margin: slack,
            });
        }
    }

    let r = ReducedPair::new(s, t, policy)?;
    let obj = NormRatio {
        exp,
        num: vec![
            (1.0, Term::Matrix(r.diff.matrix())),
            (-c.lambda1, Term::Matrix(r.s.matrix())),
            (-c.lambda2, Term::Matrix(r.t.matrix())),
        ],
        den: vec![(1.0, Term::Identity)],
    };
    let hints = kernel_hints(&r.s, &r.t, policy)?;
    let best = sphere_search(r.s.domain(), &obj, Goal::Maximize, &hints, policy);
    let x = &r.lift(&best.point, s.domain());
    let sx = vec_norm(&s.apply(x), exp);
    let tx = vec_norm(&t.apply(x), exp);
    let violation = vec_norm(&diff.apply(x), exp) - c.lambda1 * sx - c.lambda2 * tx;
    if violation > policy.report_tol * (sx + tx) {
        return Ok(Verdict {
            status: VerdictStatus::Refuted,
            witness: Some(x.clone()),
            margin: -violation,
        });
    }
    let margin = match route {
        Some(r) => r.slack(c),
        None => -best.value.max(0.0),
    };
    Ok(Verdict {
        status: VerdictStatus::Inconclusive,
        witness: None,
        margin,
    })
}

/// Certificate for `T^{-1}` (constants swap).
pub fn cert_inverse(c: HildingCertificate) -> HildingCertificate {
    HildingCertificate {
        lambda1: c.lambda2,
        lambda2: c.lambda1,
    }
}

/// Certificate for `alpha T`, `alpha > 0`.
///
/// For `alpha <= 1`: `(1 - alpha (1 - l1), l2)`. For `alpha > 1`:
/// `(l1, 1 - (1 - l2) / alpha)`, i.e. `(l2 + alpha - 1) / alpha`, which is the
/// constant the triangle-inequality argument actually produces. Constants
/// never decrease.
pub fn cert_scale(c: HildingCertificate, alpha: f64) -> Result<HildingCertificate> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale must be positive, got {alpha}"
        )));
    }
    let (l1, l2) = if alpha <= 1.0 {
        (1.0 - alpha * (1.0 - c.lambda1), c.lambda2)
    } else {
        (c.lambda1, 1.0 - (1.0 - c.lambda2) / alpha)
    };
    HildingCertificate::new(l1.max(c.lambda1), l2.max(c.lambda2)).map_err(|_| {
        Error::InvalidArgument(format!(
            "scale {alpha} drives a constant to 1 in floating point"
        ))
    })
}

/// Certificate for `T_alpha = (1 - alpha) I + alpha T`, `alpha` in `[0, 1]`:
/// `(alpha l1 + (1 - alpha) l2, l2)`.
pub fn cert_homotopy(c: HildingCertificate, alpha: f64) -> Result<HildingCertificate> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "homotopy parameter must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(HildingCertificate {
        lambda1: alpha * c.lambda1 + (1.0 - alpha) * c.lambda2,
        lambda2: c.lambda2,
    })
}

/// Certified lower bound on `inf ||(aI - T)x|| / ||x||` for `a < 0`.
///
/// Uses `aI - T = -(|a| + 1) T_beta` with `beta = 1 / (|a| + 1)` and the
/// homotopy certificate of `T_beta`.
pub fn ray_gain(c: HildingCertificate, a: f64) -> Result<f64> {
    if !(a < 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ray parameter must be negative, got {a}"
        )));
    }
    let scale = a.abs() + 1.0;
    let h = cert_homotopy(c, 1.0 / scale)?;
    Ok(scale * (1.0 - h.lambda1) / (1.0 + h.lambda2))
}

/// Smallest symmetric constant `delta = (l + ||T||) / (1 + ||T||)` upgrading
/// `||x - Tx|| <= l ||x|| + ||Tx||` (with bounded `T`) to
/// `||x - Tx|| <= delta (||x|| + ||Tx||)`.
///
/// An infinite norm bound yields 1: no symmetric certificate.
pub fn repair_bounded(lambda: f64, norm_t_upper: f64) -> f64 {
    if norm_t_upper.is_infinite() {
        return 1.0;
    }
    (lambda + norm_t_upper) / (1.0 + norm_t_upper)
}

/// The mirror of [`repair_bounded`] for `||x - Tx|| <= ||x|| + l ||Tx||` with
/// bounded inverse: `delta = (l + ||T^{-1}||) / (1 + ||T^{-1}||)`, which makes
/// `||T^{-1}|| <= (delta - l) / (1 - delta)`.
pub fn repair_inverse_bounded(lambda: f64, norm_tinv_upper: f64) -> f64 {
    repair_bounded(lambda, norm_tinv_upper)
}
