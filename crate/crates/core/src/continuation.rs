//! Codimension preservation along the straight path from `I` to `T`.
//!
//! If `(I, T)` restricted to a subspace `Y` carries a certificate with
//! `l = max(l1, l2) < 1`, every `T_a = (1 - a) I + a T` has gain at least
//! `(1 - l) / (1 + l)` on `Y`, and two path points closer than
//! [`epsilon_step`] differ by less than half of that gain. Walking the path in
//! such steps keeps `codim T_a(Y)` constant, so `codim Y = codim T(Y)`.
//!
//! In finite dimensions a single rank computation gives the same integer. The
//! walk is kept anyway: each step records the gain floor, the step bound and
//! the ranks so that a numerical breach is reported where it happens.

use nalgebra::{DMatrix, DVector};

use crate::certificates::{spans_agree, verify_certificate, HildingCertificate, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{self, Svd};
use crate::lp::{sphere_sample, vec_norm, Space, SubspaceBasis, Vector};
use crate::operators::Operator;
use crate::policy::NumericPolicy;

/// Longest path the verifier will walk.
pub const MAX_STEPS: usize = 1_000_000;

/// `(1/2) (1 - l) / (1 + l) / (1 + ||T||)`.
///
/// Pass a sound upper bound for `||T||`; a larger bound only shrinks the step.
pub fn epsilon_step(lambda: f64, norm_t_upper: f64) -> f64 {
    0.5 * ((1.0 - lambda) / (1.0 + lambda)) * (1.0 / (1.0 + norm_t_upper))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationStep {
    pub alpha: f64,
    /// Rank of `T_alpha` on `Y`.
    pub rank: usize,
    /// `codim_X T_alpha(Y)`.
    pub codim: usize,
    /// `|alpha - previous alpha| (1 + ||T||)`; 0 for the first step.
    pub step_gap_bound: f64,
    /// `step_gap_bound / gain_floor`, the bound on `||I - L||` for the map
    /// `L` carrying `T_prev(Y)` to `T_alpha(Y)`. Must stay at most 1/2.
    pub lemma_bound: f64,
    /// Smallest sampled `||T_alpha y|| / ||y||` over `y` in `Y`.
    pub min_gain_sampled: f64,
    /// Largest sampled `||T_alpha y - T_prev y|| / (step_gap_bound ||y||)`.
    /// Must stay at most 1.
    pub max_step_ratio: f64,
}

/// How the certificate on `Y` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationRoute {
    /// Verified for `(I, T)` on the whole space.
    Ambient,
    /// Verified for (embedding of `Y`, `T` on `Y`) in coordinates of `Y`.
    Subspace,
}

impl VerificationRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            VerificationRoute::Ambient => "ambient",
            VerificationRoute::Subspace => "subspace",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationTrace {
    pub route: VerificationRoute,
    /// `max(l1, l2)`.
    pub lambda: f64,
    /// `(1 - lambda) / (1 + lambda)`.
    pub gain_floor: f64,
    /// Upper bound for `||T||` on `Y` that fixed the step.
    pub norm_t_upper: f64,
    pub epsilon: f64,
    pub steps: Vec<ContinuationStep>,
    pub codim_y: usize,
    pub codim_ty: usize,
    /// Constant rank along the path, no breach, and `codim_y == codim_ty`.
    pub preserved: bool,
    /// Human-readable descriptions of every failed step check.
    pub breaches: Vec<String>,
}

fn require_verified(
    s: &Operator,
    t: &Operator,
    c: HildingCertificate,
    policy: &NumericPolicy,
    what: &str,
) -> Result<Verdict> {
    let v = verify_certificate(s, t, c, policy)?;
    if v.is_verified() {
        Ok(v)
    } else {
        Err(Error::Unverified {
            status: v.status.as_str().into(),
            detail: what.into(),
        })
    }
}

/// Walks `T_a = (1 - a) I + a T` on `Y` from `a = 0` to `a = 1`.
///
/// The certificate must verify either for `(I, T)` on the whole space or for
/// the pair (embedding of `Y`, `T` on `Y`).
/// A rank change or failed step check does not error; it is recorded in
/// `breaches` and clears `preserved`.
pub fn verify_codim_preservation(
    y: &SubspaceBasis,
    t: &Operator,
    c: HildingCertificate,
    policy: &NumericPolicy,
) -> Result<ContinuationTrace> {
    t.require_square()?;
    let x = t.domain();
    if y.space() != x {
        return Err(Error::DimensionMismatch(format!(
            "subspace of {} but operator on {x}",
            y.space()
        )));
    }
    if y.is_empty() {
        return Err(Error::DegenerateBasis("Y is the zero subspace".into()));
    }
    y.ensure_independent(policy)?;
    let exp = x.exp();
    let q = y.orthonormal(policy)?;
    let k = q.ncols();
    let coords = Space::new(k, exp)?;
    let embed = Operator::new(q.clone(), coords, x)?;
    let tq = Operator::new(t.matrix() * &q, coords, x)?;
    // A certificate for (I, T) on all of X restricts to Y; the coordinate
    // comparison on Y is only needed when the ambient one fails.
    let id = Operator::identity(x.dim(), exp)?;
    let route = if verify_certificate(&id, t, c, policy)?.is_verified() {
        VerificationRoute::Ambient
    } else {
        require_verified(&embed, &tq, c, policy, "certificate must verify for T on Y")?;
        VerificationRoute::Subspace
    };

    let lambda = c.max();
    let gain_floor = (1.0 - lambda) / (1.0 + lambda);
    let qt = Operator::new(q.transpose(), x, coords)?;
    let restricted = tq.norm_bounds(policy)?.upper * qt.norm_bounds(policy)?.upper;
    let norm_t_upper = t.norm_bounds(policy)?.upper.min(restricted);
    let epsilon = epsilon_step(lambda, norm_t_upper);
    let n_steps = (1.0 / epsilon).ceil();
    if !(n_steps <= MAX_STEPS as f64) {
        return Err(Error::Numerical(format!("path needs {n_steps} steps")));
    }
    let n_steps = n_steps as usize;

    let samples: Vec<DVector<f64>> =
        sphere_sample(coords, policy.samples_per_step + 2 * k, policy.seed)
            .into_iter()
            .map(DVector::from_vec)
            .collect();
    let y_norms: Vec<f64> = samples
        .iter()
        .map(|s| vec_norm((&q * s).as_slice(), exp))
        .collect();
    let path = |alpha: f64| -> DMatrix<f64> { &q * (1.0 - alpha) + tq.matrix() * alpha };

    let dim = x.dim();
    let codim_y = dim - k;
    let mut steps = Vec::with_capacity(n_steps + 1);
    let mut breaches = Vec::new();
    let mut prev: Option<(f64, DMatrix<f64>, usize)> = None;
    for i in 0..=n_steps {
        let alpha = if i == n_steps {
            1.0
        } else {
            i as f64 / n_steps as f64
        };
        let m = path(alpha);
        let rank = Svd::new(&m)?.rank(policy);
        let mut min_gain_sampled = f64::INFINITY;
        for (s, &yn) in samples.iter().zip(&y_norms) {
            min_gain_sampled = min_gain_sampled.min(vec_norm((&m * s).as_slice(), exp) / yn);
        }
        let (step_gap_bound, mut max_step_ratio) = match &prev {
            Some((a, _, _)) => ((alpha - a) * (1.0 + norm_t_upper), 0.0),
            None => (0.0, 0.0),
        };
        if let Some((a, pm, prank)) = &prev {
            let d = &m - pm;
            for (s, &yn) in samples.iter().zip(&y_norms) {
                let r = vec_norm((&d * s).as_slice(), exp) / (step_gap_bound * yn);
                max_step_ratio = f64::max(max_step_ratio, r);
            }
            if alpha - a > epsilon * (1.0 + 1e-12) {
                breaches.push(format!("step to alpha={alpha} exceeds epsilon={epsilon}"));
            }
            if rank != *prank {
                breaches.push(format!("rank {prank} -> {rank} at alpha={alpha}"));
            }
        }
        let lemma_bound = step_gap_bound / gain_floor;
        if min_gain_sampled < gain_floor - 1e-9 {
            breaches.push(format!(
                "sampled gain {min_gain_sampled} below floor {gain_floor} at alpha={alpha}"
            ));
        }
        if max_step_ratio > 1.0 + 1e-9 {
            breaches.push(format!(
                "step perturbation ratio {max_step_ratio} at alpha={alpha}"
            ));
        }
        if lemma_bound > 0.5 + 1e-12 {
            breaches.push(format!(
                "perturbation bound {lemma_bound} above 1/2 at alpha={alpha}"
            ));
        }
        steps.push(ContinuationStep {
            alpha,
            rank,
            codim: dim - rank,
            step_gap_bound,
            lemma_bound,
            min_gain_sampled,
            max_step_ratio,
        });
        prev = Some((alpha, m, rank));
    }
    let codim_ty = steps.last().map(|s| s.codim).unwrap_or(codim_y);
    if codim_ty != codim_y {
        breaches.push(format!("codim Y = {codim_y} but codim T(Y) = {codim_ty}"));
    }
    Ok(ContinuationTrace {
        route,
        lambda,
        gain_floor,
        norm_t_upper,
        epsilon,
        preserved: breaches.is_empty(),
        steps,
        codim_y,
        codim_ty,
        breaches,
    })
}

/// Codimensions of the ranges of `S` and `T` in the common codomain.
///
/// Refuses unless the symmetric certificate `(lambda, lambda)` verifies.
/// Unequal results are reported as a numerical failure.
pub fn codim_pair(
    s: &Operator,
    t: &Operator,
    lambda: f64,
    policy: &NumericPolicy,
) -> Result<(usize, usize)> {
    let c = HildingCertificate::symmetric(lambda)?;
    require_verified(
        s,
        t,
        c,
        policy,
        "codimension comparison needs a verified certificate",
    )?;
    let m = s.codomain().dim();
    let cs = m - s.numeric_rank(policy)?;
    let ct = m - t.numeric_rank(policy)?;
    if cs != ct {
        return Err(Error::Numerical(format!(
            "certified pair with codims {cs} and {ct}"
        )));
    }
    Ok((cs, ct))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FredholmReport {
    pub kernel_dim_s: usize,
    pub kernel_dim_t: usize,
    pub codim_s: usize,
    pub codim_t: usize,
    pub index_s: i64,
    pub index_t: i64,
    /// `dim domain - dim codomain`.
    pub rank_nullity_index: i64,
    /// Largest Euclidean distance of a kernel basis vector of one operator
    /// from the kernel of the other.
    pub kernel_residual: f64,
    pub kernels_agree: bool,
    /// Kernels agree and both indices equal the rank-nullity index.
    pub consistent: bool,
}

fn max_membership_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| {
            let v = DVector::from_iterator(c.len(), c.iter().copied());
            linalg::residual_against_orthonormal(&v, b)
        })
        .fold(0.0, f64::max)
}

/// Kernel dimension, range codimension and index of a certified pair.
pub fn fredholm_check(
    s: &Operator,
    t: &Operator,
    c: HildingCertificate,
    policy: &NumericPolicy,
) -> Result<FredholmReport> {
    require_verified(
        s,
        t,
        c,
        policy,
        "index comparison needs a verified certificate",
    )?;
    let n = s.domain().dim();
    let m = s.codomain().dim();
    let ks = s.kernel_basis(policy)?.to_matrix();
    let kt = t.kernel_basis(policy)?.to_matrix();
    let kernel_dim_s = ks.ncols();
    let kernel_dim_t = kt.ncols();
    let codim_s = m - (n - kernel_dim_s);
    let codim_t = m - (n - kernel_dim_t);
    let index_s = kernel_dim_s as i64 - codim_s as i64;
    let index_t = kernel_dim_t as i64 - codim_t as i64;
    let rank_nullity_index = n as i64 - m as i64;
    let kernel_residual = if kernel_dim_s == kernel_dim_t {
        max_membership_residual(&ks, &kt).max(max_membership_residual(&kt, &ks))
    } else {
        f64::INFINITY
    };
    let kernels_agree = kernel_dim_s == kernel_dim_t && spans_agree(&ks, &kt, policy);
    Ok(FredholmReport {
        kernel_dim_s,
        kernel_dim_t,
        codim_s,
        codim_t,
        index_s,
        index_t,
        rank_nullity_index,
        kernel_residual,
        kernels_agree,
        consistent: kernels_agree && index_s == rank_nullity_index && index_t == rank_nullity_index,
    })
}

/// Relative size below which a new Krylov direction counts as dependent.
const KRYLOV_BREAKDOWN: f64 = 1e-12;

/// Euclidean distance from `x` to `span{T^k x : n <= k <= big_k}`.
///
/// Refuses unless the certificate verifies for `(I, T)`. The span is built by
/// Arnoldi iteration from `T^n x`, stopping early once it becomes invariant.
pub fn krylov_membership(
    t: &Operator,
    c: HildingCertificate,
    x: &Vector,
    n: usize,
    big_k: usize,
    policy: &NumericPolicy,
) -> Result<f64> {
    t.require_square()?;
    if big_k < n {
        return Err(Error::InvalidArgument(format!(
            "K = {big_k} is below n = {n}"
        )));
    }
    if x.space() != t.domain() {
        return Err(Error::DimensionMismatch(format!(
            "vector in {} but operator on {}",
            x.space(),
            t.domain()
        )));
    }
    let id = Operator::identity(t.domain().dim(), t.exp()?)?;
    require_verified(
        &id,
        t,
        c,
        policy,
        "Krylov membership needs a verified certificate for (I, T)",
    )?;

    let a = t.matrix();
    let x0 = x.to_dvector();
    let mut v = x0.clone();
    for _ in 0..n {
        v = a * v;
    }
    let dim = x0.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let start = v.norm();
    if start > 0.0 {
        basis.push(v / start);
        while basis.len() < (big_k - n + 1).min(dim) {
            let mut w = a * basis.last().expect("basis is non-empty");
            let scale = w.norm();
            for _ in 0..2 {
                for q in &basis {
                    let h = q.dot(&w);
                    w.axpy(-h, q, 1.0);
                }
            }
            let r = w.norm();
            if scale == 0.0 || r <= KRYLOV_BREAKDOWN * scale {
                break;
            }
            basis.push(w / r);
        }
    }
    if basis.is_empty() {
        return Ok(x0.norm());
    }
    let q = DMatrix::from_columns(&basis);
    Ok(linalg::residual_against_orthonormal(&x0, &q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Exponent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pol() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn near_identity(n: usize, size: f64, seed: u64, exp: Exponent) -> Operator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let scale = size
            / crate::operators::max_abs_col_sum(&e)
                .1
                .max(crate::operators::max_abs_row_sum(&e).1);
        Operator::from_matrix(DMatrix::identity(n, n) + e * scale, exp).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_step(0.0, 1.0), 0.25);
        assert!((epsilon_step(0.5, 2.0) - 1.0 / 18.0).abs() < 1e-16);
        assert!(epsilon_step(0.6, 2.0) < epsilon_step(0.5, 2.0));
        assert!(epsilon_step(0.5, 3.0) < epsilon_step(0.5, 2.0));
    }

    #[test]
    fn identity_path_is_constant() {
        let x = Space::new(4, Exponent::TWO).unwrap();
        let y = SubspaceBasis::new(x, vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]])
            .unwrap();
        let id = Operator::identity(4, Exponent::TWO).unwrap();
        let tr =
            verify_codim_preservation(&y, &id, HildingCertificate::new(0.0, 0.0).unwrap(), &pol())
                .unwrap();
        assert!(tr.preserved, "{:?}", tr.breaches);
        assert_eq!((tr.codim_y, tr.codim_ty), (2, 2));
        assert_eq!(tr.steps.last().unwrap().alpha, 1.0);
        assert!(tr
            .steps
            .windows(2)
            .all(|w| w[1].alpha - w[0].alpha <= tr.epsilon));
    }

    #[test]
    fn random_subspace_in_r10() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = Space::new(10, Exponent::TWO).unwrap();
        let vecs = (0..5)
            .map(|_| (0..10).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y = SubspaceBasis::new(x, vecs).unwrap();
        let t = near_identity(10, 0.1, 3, Exponent::TWO);
        let c = HildingCertificate::new(0.15, 0.15).unwrap();
        let tr = verify_codim_preservation(&y, &t, c, &pol()).unwrap();
        assert!(tr.preserved, "{:?}", tr.breaches);
        assert!(tr.steps.iter().all(|s| s.rank == 5));
        assert_eq!((tr.codim_y, tr.codim_ty), (5, 5));
    }

    #[test]
    fn finite_model_uses_subspace_route() {
        let m = 3;
        for exp in [Exponent::ONE, Exponent::TWO, Exponent::INF] {
            let g = crate::gallery::example10(m, exp, 2.0, &pol()).unwrap();
            let t = g.operator("T").unwrap();
            let x = t.domain();
            let y = SubspaceBasis::new(x, (0..m).map(|i| x.unit(i)).collect()).unwrap();
            let c = HildingCertificate::new(0.6, 0.0).unwrap();
            let tr = verify_codim_preservation(&y, t, c, &pol()).unwrap();
            assert_eq!(tr.route, VerificationRoute::Subspace);
            assert!(tr.preserved, "{:?}", tr.breaches);
            assert_eq!((tr.codim_y, tr.codim_ty), (m, m));
        }
    }

    #[test]
    fn refuses_unverified() {
        let x = Space::new(2, Exponent::ONE).unwrap();
        let y = SubspaceBasis::new(x, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let rot = Operator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]], Exponent::ONE).unwrap();
        let c = HildingCertificate::new(0.9, 0.9).unwrap();
        assert!(matches!(
            verify_codim_preservation(&y, &rot, c, &pol()),
            Err(Error::Unverified { .. })
        ));
    }

    #[test]
    fn codim_pair_examples() {
        let s = near_identity(4, 0.0, 0, Exponent::TWO);
        assert_eq!(codim_pair(&s, &s, 0.0, &pol()).unwrap(), (0, 0));
        let t = near_identity(4, 0.05, 1, Exponent::TWO);
        assert_eq!(codim_pair(&s, &t, 0.2, &pol()).unwrap(), (0, 0));

        let r = Operator::from_rows(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
            Exponent::TWO,
        )
        .unwrap();
        let e = near_identity(3, 0.05, 2, Exponent::TWO);
        let rt = e.compose(&r).unwrap();
        assert_eq!(codim_pair(&r, &rt, 0.2, &pol()).unwrap(), (1, 1));
        assert!(codim_pair(&r, &rt, 1.0, &pol()).is_err());
    }

    #[test]
    fn fredholm_shared_kernel() {
        let s = Operator::from_rows(
            &[
                vec![1.0, 2.0, 0.0, 1.0],
                vec![0.0, 1.0, 1.0, 1.0],
                vec![1.0, 3.0, 1.0, 2.0],
            ],
            Exponent::TWO,
        )
        .unwrap();
        let e = near_identity(3, 0.05, 5, Exponent::TWO);
        let t = e.compose(&s).unwrap();
        let r = fredholm_check(&s, &t, HildingCertificate::new(0.2, 0.2).unwrap(), &pol()).unwrap();
        assert_eq!(r.kernel_dim_s, 2);
        assert!(r.kernels_agree && r.consistent);
        assert_eq!(r.index_s, 1);
        assert_eq!(r.index_t, r.rank_nullity_index);
        assert!(r.kernel_residual <= 1e-8);
    }

    #[test]
    fn krylov_examples() {
        let id = Operator::identity(3, Exponent::TWO).unwrap();
        let x = Vector::new(vec![1.0, 2.0, 3.0], id.domain()).unwrap();
        let c0 = HildingCertificate::new(0.0, 0.0).unwrap();
        assert!(krylov_membership(&id, c0, &x, 1, 1, &pol()).unwrap() < 1e-15);
        assert!(krylov_membership(&id, c0, &x, 2, 1, &pol()).is_err());

        let t = near_identity(8, 0.3, 11, Exponent::TWO);
        let c = HildingCertificate::symmetric(0.45).unwrap();
        let x = Vector::new((1..=8).map(|i| i as f64).collect(), t.domain()).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=8 {
            let d = krylov_membership(&t, c, &x, 1, k, &pol()).unwrap();
            assert!(d <= last + 1e-12);
            last = d;
        }
        assert!(last <= 1e-8);
    }
}
