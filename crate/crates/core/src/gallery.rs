//! Concrete operators with machine-checked claims.
//!
//! Each constructor returns the operators it builds and a list of claims, each
//! with the number that was measured to decide it. Nothing is asserted in
//! prose only.

use nalgebra::DMatrix;

use crate::certificates::{fit_lambda, repair_bounded, spans_agree};
use crate::error::{Error, Result};
use crate::lp::{sphere_sample, vec_norm, Exponent, Space, SubspaceBasis};
use crate::operators::{codim, Operator};
use crate::policy::NumericPolicy;
use crate::spectral::{antipodal_gap, fixed_point_gap, ray_scan, spectrum, RayDirection};

/// Sample count for pointwise claims.
pub const CLAIM_SAMPLES: usize = 10_000;

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = [
    "rotation_l1",
    "block_rotation",
    "truncated_shift",
    "diagonal_growth",
    "example10",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub description: String,
    pub passed: bool,
    pub measured: f64,
}

impl Claim {
    fn new(description: impl Into<String>, passed: bool, measured: f64) -> Claim {
        Claim {
            description: description.into(),
            passed,
            measured,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GalleryInstance {
    pub name: String,
    pub operators: Vec<(String, Operator)>,
    pub claims: Vec<Claim>,
    /// Modelling choices and statements that hold only asymptotically.
    pub notes: Vec<String>,
}

impl GalleryInstance {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn claim(&self, prefix: &str) -> Option<&Claim> {
        self.claims
            .iter()
            .find(|c| c.description.starts_with(prefix))
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, op)| op)
    }
}

/// Parameters for [`by_name`]; unused fields are ignored.
#[derive(Debug, Clone, Copy)]
pub struct GalleryParams {
    pub m: usize,
    pub n: usize,
    pub p: Exponent,
    pub k: f64,
}

impl Default for GalleryParams {
    fn default() -> Self {
        GalleryParams {
            m: 4,
            n: 100,
            p: Exponent::TWO,
            k: 2.0,
        }
    }
}

pub fn by_name(
    name: &str,
    params: GalleryParams,
    policy: &NumericPolicy,
) -> Result<GalleryInstance> {
    match name {
        "rotation_l1" => rotation_l1(policy),
        "block_rotation" => block_rotation(params.m, params.p, policy),
        "truncated_shift" => truncated_shift(params.n),
        "diagonal_growth" => diagonal_growth(params.n, params.p, policy),
        "example10" => example10(params.m, params.p, params.k, policy),
        _ => Err(Error::InvalidArgument(format!(
            "unknown gallery instance {name:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

/// Largest `| ||Tx|| - ||x|| |` over unit samples.
fn isometry_defect(t: &Operator, seed: u64) -> f64 {
    let exp = t.domain().exp();
    sphere_sample(t.domain(), CLAIM_SAMPLES, seed)
        .iter()
        .map(|x| (vec_norm(&t.apply(x), exp) - 1.0).abs())
        .fold(0.0, f64::max)
}

fn block_matrix(m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(2 * m, 2 * m);
    for b in 0..m {
        a[(2 * b, 2 * b + 1)] = 1.0;
        a[(2 * b + 1, 2 * b)] = -1.0;
    }
    a
}

/// `T(a1, a2) = (a2, -a1)` on `l1^2`: an onto isometry with neither
/// approximate fixed nor antipodal points, for which no `l < 1` works.
pub fn rotation_l1(policy: &NumericPolicy) -> Result<GalleryInstance> {
    let t = Operator::from_matrix(block_matrix(1), Exponent::ONE)?;
    let id = Operator::identity(2, Exponent::ONE)?;
    let lambda = fit_lambda(&id, &t, policy)?;
    let fixed = fixed_point_gap(&t, policy)?;
    let anti = antipodal_gap(&t, policy)?;
    let defect = isometry_defect(&t, policy.seed);
    let rank = t.numeric_rank(policy)?;
    Ok(GalleryInstance {
        name: "rotation_l1".into(),
        operators: vec![("T".into(), t)],
        claims: vec![
            Claim::new(
                "fitted lambda* = 1 (no l < 1 works)",
                (lambda - 1.0).abs() <= 1e-6,
                lambda,
            ),
            Claim::new(
                "fixed point gap = 1",
                (fixed.residual - 1.0).abs() <= 1e-6,
                fixed.residual,
            ),
            Claim::new(
                "antipodal gap = 1",
                (anti.residual - 1.0).abs() <= 1e-6,
                anti.residual,
            ),
            Claim::new(
                "onto isometry of l1^2",
                defect <= 1e-12 && rank == 2,
                defect,
            ),
        ],
        notes: vec![],
    })
}

/// `T(a1, a2, a3, a4, ...) = (a2, -a1, a4, -a3, ...)` on `lp^{2m}`.
pub fn block_rotation(m: usize, p: Exponent, policy: &NumericPolicy) -> Result<GalleryInstance> {
    if m == 0 {
        return Err(Error::InvalidArgument("block_rotation needs m >= 1".into()));
    }
    let t = Operator::from_matrix(block_matrix(m), p)?;
    let defect = isometry_defect(&t, policy.seed);
    let rank = t.numeric_rank(policy)?;
    let mut claims = vec![Claim::new(
        format!("onto isometry of l{p}^{}", 2 * m),
        defect <= 1e-12 && rank == 2 * m,
        defect,
    )];
    for (label, w) in [
        ("fixed point gap", fixed_point_gap(&t, policy)?),
        ("antipodal gap", antipodal_gap(&t, policy)?),
    ] {
        if p.is_two() {
            let target = 2f64.sqrt();
            claims.push(Claim::new(
                format!("{label} = sqrt 2"),
                (w.residual - target).abs() <= 1e-9,
                w.residual,
            ));
        } else {
            let floor = t.shifted(w.lambda)?.min_gain_bounds(policy)?.lower;
            claims.push(Claim::new(
                format!("{label} bounded away from 0 (certified floor {floor:.6})"),
                floor > 0.0,
                w.residual,
            ));
        }
    }
    if 2 * m <= crate::spectral::MAX_SPECTRUM_DIM {
        let s = spectrum(&t, policy)?;
        let dist = s
            .eigenvalues
            .iter()
            .map(|z| (z.re.abs()).max((z.im.abs() - 1.0).abs()))
            .fold(0.0, f64::max);
        let upper = s.eigenvalues.iter().filter(|z| z.im > 0.0).count();
        claims.push(Claim::new(
            format!("spectrum = {{i, -i}}, each with multiplicity {m}"),
            dist <= 1e-9 && upper == m,
            dist,
        ));
    }
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    let neg: Vec<f64> = grid.iter().map(|a| -a).collect();
    let pos = ray_scan(&t, RayDirection::Positive, &grid, None, policy)?;
    let negr = ray_scan(&t, RayDirection::Negative, &neg, None, policy)?;
    let worst = pos
        .entries
        .iter()
        .chain(&negr.entries)
        .map(|e| e.gain.lower)
        .fold(f64::INFINITY, f64::min);
    claims.push(Claim::new(
        "alpha I - T invertible on both real rays",
        pos.all_invertible() && negr.all_invertible() && worst > 0.0,
        worst,
    ));
    Ok(GalleryInstance {
        name: "block_rotation".into(),
        operators: vec![("T".into(), t)],
        claims,
        notes: vec![],
    })
}

/// Largest dimension for which [`truncated_shift`] also stores the dense
/// matrix.
pub const DENSE_SHIFT_LIMIT: usize = 512;

/// The lower shift on `l2^n` with the witness `n^{-1/2} (1, ..., 1)`.
pub fn truncated_shift(n: usize) -> Result<GalleryInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "truncated_shift needs n >= 2".into(),
        ));
    }
    let exp = Exponent::TWO;
    let x = vec![1.0 / (n as f64).sqrt(); n];
    // (Sx)_i = x_{i-1}, applied without forming the matrix.
    let diff: Vec<f64> = (0..n)
        .map(|i| if i == 0 { -x[0] } else { x[i - 1] - x[i] })
        .collect();
    let residual = vec_norm(&diff, exp);
    let xnorm = vec_norm(&x, exp);
    let scaled = residual * (n as f64).sqrt();
    let mut operators = Vec::new();
    if n <= DENSE_SHIFT_LIMIT {
        let s = DMatrix::from_fn(n, n, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        operators.push(("S".into(), Operator::from_matrix(s, exp)?));
    }
    Ok(GalleryInstance {
        name: "truncated_shift".into(),
        operators,
        claims: vec![
            Claim::new("witness has unit norm", (xnorm - 1.0).abs() <= 1e-12, xnorm),
            Claim::new(
                format!("||x - Sx|| = n^(-1/2) = {:.6e}", 1.0 / (n as f64).sqrt()),
                (scaled - 1.0).abs() <= 1e-12,
                residual,
            ),
            Claim::new(
                "residual * sqrt n = 1",
                (scaled - 1.0).abs() <= 1e-12,
                scaled,
            ),
        ],
        notes: vec![
            "the residual tends to 0 as n grows: the shift on l2 has approximate fixed points; \
             this holds only asymptotically, not for a fixed truncation"
                .into(),
        ],
    })
}

/// `diag(1, 2, ..., n)`, which satisfies `||(I - T)x|| <= ||Tx||`.
pub fn diagonal_growth(n: usize, p: Exponent, policy: &NumericPolicy) -> Result<GalleryInstance> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "diagonal_growth needs n >= 1".into(),
        ));
    }
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
    let t = Operator::from_matrix(d, p)?;
    let id = Operator::identity(n, p)?;
    let diff = id.sub(&t)?;
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for x in sphere_sample(t.domain(), CLAIM_SAMPLES, policy.seed) {
        let tx = vec_norm(&t.apply(&x), p);
        let excess = vec_norm(&diff.apply(&x), p) - tx;
        worst = worst.max(excess);
        if excess > 1e-12 * tx {
            violations += 1;
        }
    }
    let lambda = fit_lambda(&id, &t, policy)?;
    let vertex = (n as f64 - 1.0) / (n as f64 + 1.0);
    let norm = t.norm_bounds(policy)?;
    let repair = repair_bounded(0.0, norm.upper);
    let nf = n as f64;
    Ok(GalleryInstance {
        name: "diagonal_growth".into(),
        operators: vec![("T".into(), t)],
        claims: vec![
            Claim::new(
                format!("||(I - T)x|| <= ||Tx|| on {CLAIM_SAMPLES} samples"),
                violations == 0,
                violations as f64,
            ),
            Claim::new(
                format!("fitted symmetric lambda* in [{vertex:.6}, 1)"),
                lambda >= vertex - 1e-9 && lambda < 1.0,
                lambda,
            ),
            Claim::new(format!("||T|| = {n}"), norm.contains(nf, 1e-12), norm.upper),
            Claim::new(
                format!("repaired constant = n/(n+1) = {:.6}", nf / (nf + 1.0)),
                (repair - nf / (nf + 1.0)).abs() <= 1e-15,
                repair,
            ),
        ],
        notes: vec!["the repaired constant tends to 1 as n grows".into()],
    })
}

/// Finite model of a subspace `Y` moved onto a complemented `Z` by an
/// operator close to the identity.
///
/// `X = lp^m (+) lp^m` with the p-sum norm (so `X = lp^{2m}`), `f_i = e_i`,
/// `Y = span{(f_i, 0)}`, `Z = span{(f_i, e_i / K)}`. Requires `K >= 2`.
pub fn example10(m: usize, p: Exponent, k: f64, policy: &NumericPolicy) -> Result<GalleryInstance> {
    if m == 0 {
        return Err(Error::InvalidArgument("example10 needs m >= 1".into()));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "K must be a positive real, got {k}"
        )));
    }
    let ratio = 1.0 / k;
    if ratio > 0.5 {
        return Err(Error::InvalidArgument(format!(
            "K = {k} violates (1/K)||sum a e|| <= (1/2)||sum a f||: measured ratio {ratio}"
        )));
    }
    let dim = 2 * m;
    let x = Space::new(dim, p)?;
    let unit = |i: usize, scale: f64, j: usize| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v[j] += scale;
        v
    };
    let y = SubspaceBasis::new(x, (0..m).map(|i| unit(i, 0.0, i)).collect())?;
    let z = SubspaceBasis::new(x, (0..m).map(|i| unit(i, ratio, m + i)).collect())?;
    // T on X: (u, w) -> (u, u / K). Only its action on Y matters.
    let t = Operator::from_matrix(
        DMatrix::from_fn(dim, dim, |r, c| match (r < m, c < m) {
            (true, true) if r == c => 1.0,
            (false, true) if r - m == c => ratio,
            _ => 0.0,
        }),
        p,
    )?;
    // P(u, w) = (K w, w).
    let proj = Operator::from_matrix(
        DMatrix::from_fn(dim, dim, |r, c| match (r < m, c < m) {
            (true, false) if r == c - m => k,
            (false, false) if r == c => 1.0,
            _ => 0.0,
        }),
        p,
    )?;

    let id = Operator::identity(dim, p)?;
    let gap = id.sub(&t)?.restrict(&y, policy)?.norm_bounds(policy)?;
    let pp = proj.matrix() * proj.matrix();
    let idempotent = (&pp - proj.matrix()).amax();
    let range_p = proj.range_basis(policy)?.to_matrix();
    let z_on = z.orthonormal(policy)?;
    let range_ok = range_p.ncols() == m && spans_agree(&range_p, &z_on, policy);
    let ty = t.restrict(&y, policy)?;
    let ty_gain = ty.min_gain_bounds(policy)?;
    let ty_range = ty.range_basis(policy)?.to_matrix();
    let onto = ty_range.ncols() == m && spans_agree(&ty_range, &z_on, policy);
    let cy = codim(&y, x, policy)?;
    let cz = codim(&z, x, policy)?;

    Ok(GalleryInstance {
        name: "example10".into(),
        operators: vec![("T".into(), t), ("P".into(), proj)],
        claims: vec![
            Claim::new(
                "(1) ||(I - T)|_Y|| <= 1/2 < 1",
                gap.upper <= 0.5 + 1e-12,
                gap.upper,
            ),
            Claim::new(
                "(2) P is a projection onto Z (Z complemented)",
                idempotent <= 1e-12 && range_ok,
                idempotent,
            ),
            Claim::new(
                "(3) T maps Y isomorphically onto Z",
                onto && ty_gain.lower > 0.0,
                ty_gain.lower,
            ),
            Claim::new(format!("codim_X Y = {m}"), cy == m, cy as f64),
            Claim::new(format!("codim_X Z = {m}"), cz == m, cz as f64),
        ],
        notes: vec![
            "X carries the p-sum of the two block norms".into(),
            "f_i = e_i: an uncomplemented W has no finite-dimensional model".into(),
            "the extension distortion ||T_n|| ||T_n^-1|| >= n is not checked".into(),
        ],
    })
}
