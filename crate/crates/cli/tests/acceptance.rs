//! End-to-end acceptance run: one line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hilding::{
    basic_bounds, cert_homotopy, cert_inverse, cert_scale, certified_surjective, fredholm_check,
    gallery, krylov_membership, neumann_inverse, sphere_sample, verify_certificate,
    verify_codim_preservation, Exponent, HildingCertificate, NumericPolicy, Operator, Space,
    SubspaceBasis, Vector,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn pol() -> NumericPolicy {
    NumericPolicy::default()
}

fn naive_norm(x: &[f64], e: Exponent) -> f64 {
    match e {
        Exponent::Infinity => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(p) => x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

const P3: [Exponent; 3] = [Exponent::ONE, Exponent::TWO, Exponent::INF];

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

/// `E` rescaled so that the sound upper bound on its norm equals `size`.
fn perturbation(rng: &mut ChaCha8Rng, n: usize, size: f64, e: Exponent) -> DMatrix<f64> {
    let raw = random_matrix(rng, n, n);
    let up = Operator::from_matrix(raw.clone(), e)
        .unwrap()
        .norm_bounds(&pol())
        .unwrap()
        .upper;
    raw * (size / up)
}

fn matvec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).as_slice().to_vec()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit as f64, || {
        format!("took {elapsed:?}, limit {limit} s")
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let exps = [
        Exponent::ONE,
        Exponent::new(1.5).unwrap(),
        Exponent::TWO,
        Exponent::new(3.0).unwrap(),
        Exponent::INF,
    ];
    let (mut accepted, mut violations, mut worst) = (0usize, 0usize, f64::NEG_INFINITY);
    while accepted < 10_000 {
        let e = exps[rng.random_range(0..exps.len())];
        let d = rng.random_range(1..8);
        let l1 = rng.random_range(0.0..0.95);
        let l2 = rng.random_range(0.0..0.95);
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y: Vec<f64> = match rng.random_range(0..3) {
            // Multiples of x at the ends of the admissible range.
            0 => {
                let c = (1.0 - l1) / (1.0 + l2) * (1.0 + 1e-9);
                x.iter().map(|v| v * c).collect()
            }
            1 => {
                let c = (1.0 + l1) / (1.0 - l2) * (1.0 - 1e-9);
                x.iter().map(|v| v * c).collect()
            }
            _ => {
                let s = rng.random_range(0.0..3.0);
                let r = rng.random_range(0.0..2.0);
                x.iter()
                    .map(|v| s * v + r * rng.random_range(-5.0..5.0))
                    .collect()
            }
        };
        let (nx, ny) = (naive_norm(&x, e), naive_norm(&y, e));
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        if naive_norm(&diff, e) > l1 * nx + l2 * ny || ny == 0.0 {
            continue;
        }
        accepted += 1;
        let c = HildingCertificate::new(l1, l2).unwrap();
        let b = basic_bounds(c);
        // Oracle: the inequality solved for ||x|| / ||y|| by hand.
        let (lo, hi) = ((1.0 - l2) / (1.0 + l1), (1.0 + l2) / (1.0 - l1));
        if (b.lower - lo).abs() > 1e-15 || (b.upper - hi).abs() > 1e-15 {
            violations += 1;
        }
        let ratio = nx / ny;
        let slack = (ratio - b.lower).min(b.upper - ratio) / ratio;
        worst = worst.max(-slack);
        if slack < -1e-12 {
            violations += 1;
        }
    }
    within(start.elapsed(), 5)?;
    check(violations == 0, || {
        format!("{violations} violations, worst {worst:e}")
    })?;
    Ok(format!(
        "10000 instances, 0 violations, worst relative excess {worst:.2e}"
    ))
}

/// `T = I - E` on `lp^n` with a certificate that verifies soundly.
fn certified_near_identity(
    rng: &mut ChaCha8Rng,
    n: usize,
    e: Exponent,
) -> (Operator, HildingCertificate) {
    loop {
        let l1 = rng.random_range(0.0..0.8);
        let l2 = rng.random_range(0.0..0.8);
        let size = rng.random_range(0.2..0.99) * (l1 + l2) / (1.0 + l2);
        if size <= 1e-6 {
            continue;
        }
        let t = DMatrix::identity(n, n) - perturbation(rng, n, size, e);
        let t = Operator::from_matrix(t, e).unwrap();
        let c = HildingCertificate::new(l1, l2).unwrap();
        let id = Operator::identity(n, e).unwrap();
        if verify_certificate(&id, &t, c, &pol())
            .unwrap()
            .is_verified()
        {
            return (t, c);
        }
    }
}

/// Violations of `||x - Ax|| <= l1 ||x|| + l2 ||Ax||` on `samples`.
fn count_violations(
    a: &DMatrix<f64>,
    c: HildingCertificate,
    samples: &[Vec<f64>],
    e: Exponent,
) -> usize {
    samples
        .iter()
        .filter(|x| {
            let ax = matvec(a, x);
            let nx = naive_norm(x, e);
            let nax = naive_norm(&ax, e);
            let d: Vec<f64> = x.iter().zip(&ax).map(|(u, v)| u - v).collect();
            naive_norm(&d, e) - c.lambda1() * nx - c.lambda2() * nax > 1e-9 * (nx + nax)
        })
        .count()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut violations = 0;
    let mut checks = 0;
    for i in 0..200 {
        let e = P3[i % 3];
        let n = rng.random_range(2..7);
        let (t, c) = certified_near_identity(&mut rng, n, e);
        let samples = sphere_sample(Space::new(n, e).unwrap(), 10_000, i as u64);
        let tm = t.matrix().clone();
        let inv = tm
            .clone()
            .try_inverse()
            .ok_or("certified operator not invertible")?;
        let mut cases: Vec<(DMatrix<f64>, HildingCertificate)> = vec![(inv, cert_inverse(c))];
        for a in [0.25, 0.5, 2.0, 4.0] {
            cases.push((&tm * a, cert_scale(c, a).map_err(|e| e.to_string())?));
        }
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let ta = DMatrix::identity(n, n) * (1.0 - a) + &tm * a;
            cases.push((ta, cert_homotopy(c, a).map_err(|e| e.to_string())?));
        }
        for (a, cc) in &cases {
            violations += count_violations(a, *cc, &samples, e);
            checks += samples.len();
        }
    }
    within(start.elapsed(), 60)?;
    check(violations == 0, || format!("{violations} violations"))?;
    Ok(format!(
        "200 operators x 10 transforms, {checks} samples, 0 violations"
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst_slack = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..33);
        let q = rng.random_range(0.01..0.5);
        let r = perturbation(&mut rng, n, q, Exponent::TWO);
        let t = Operator::from_matrix(DMatrix::identity(n, n) - &r, Exponent::TWO).unwrap();
        let tol = 10f64.powf(rng.random_range(-12.0..-2.0));
        let res = neumann_inverse(&t, tol, &pol()).map_err(|e| e.to_string())?;
        let exact = t.matrix().clone().lu().try_inverse().ok_or("singular")?;
        let err = (exact - res.approx_inverse.matrix())
            .singular_values()
            .max();
        let slack = res.error_bound + 1e-12 - err;
        worst_slack = worst_slack.min(slack);
        check(slack >= 0.0, || {
            format!("error {err:e} above bound {:e}", res.error_bound)
        })?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!(
        "100 contractions, smallest slack {worst_slack:.2e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut tightest = f64::INFINITY;
    for i in 0..100 {
        let e = P3[i % 3];
        let (t, c) = certified_near_identity(&mut rng, 5, e);
        let r = certified_surjective(&t, c, &pol()).map_err(|e| e.to_string())?;
        check(r.rank == 5, || format!("rank {} for p = {e}", r.rank))?;
        let slack = r.min_gain.lower + 1e-9 - r.gain_floor;
        tightest = tightest.min(slack);
        check(slack >= 0.0, || {
            format!("floor {} above gain {}", r.gain_floor, r.min_gain.lower)
        })?;
    }
    Ok(format!(
        "100 operators, all rank 5, smallest gain slack {tightest:.2e}"
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let policy = pol();
    let mut total_steps = 0;
    for i in 0..100 {
        let e = P3[i % 3];
        let n = rng.random_range(4..21);
        let k = rng.random_range(1..n);
        let basis = random_matrix(&mut rng, n, k);
        let x = Space::new(n, e).unwrap();
        let y = SubspaceBasis::from_columns(x, &basis).unwrap();
        let size = rng.random_range(0.05..0.4);
        let t = Operator::from_matrix(
            DMatrix::identity(n, n) + perturbation(&mut rng, n, size, e),
            e,
        )
        .unwrap();
        let c = HildingCertificate::symmetric(size.min(0.4)).unwrap();
        let tr = verify_codim_preservation(&y, &t, c, &policy)
            .map_err(|e| format!("instance {i}: {e}"))?;
        // Oracle: rank of T B from an independent factorization.
        let tb = t.matrix() * &basis;
        let rank_ty = tb
            .clone()
            .svd(false, false)
            .rank(1e-10 * tb.norm().max(1.0));
        check(tr.preserved, || format!("instance {i}: {:?}", tr.breaches))?;
        check(
            tr.codim_y == n - k && tr.codim_ty == n - rank_ty && tr.codim_y == tr.codim_ty,
            || format!("instance {i}: codims {} vs {}", tr.codim_y, tr.codim_ty),
        )?;
        check(tr.steps.last().map(|s| s.alpha) == Some(1.0), || {
            "path does not end at 1".into()
        })?;
        for w in tr.steps.windows(2) {
            check(
                w[1].alpha - w[0].alpha <= tr.epsilon * (1.0 + 1e-12),
                || "step above epsilon".into(),
            )?;
            check(w[1].rank == w[0].rank, || "rank changed".into())?;
        }
        for s in &tr.steps {
            check(s.min_gain_sampled >= tr.gain_floor - 1e-9, || {
                format!(
                    "instance {i}: gain {} below floor {}",
                    s.min_gain_sampled, tr.gain_floor
                )
            })?;
        }
        total_steps += tr.steps.len();
    }
    within(start.elapsed(), 120)?;
    Ok(format!(
        "100 instances, codim preserved in all, {total_steps} path steps checked"
    ))
}

/// Rank-deficient `S` (m x n) and `T = (I + E) S` with a verified symmetric
/// certificate.
fn certified_pair(rng: &mut ChaCha8Rng, e: Exponent) -> (Operator, Operator, HildingCertificate) {
    let (m, n) = (rng.random_range(2..8), rng.random_range(2..8));
    let r = rng.random_range(1..=m.min(n));
    let s = Operator::from_matrix(random_matrix(rng, m, r) * random_matrix(rng, r, n), e).unwrap();
    let mut size = 0.2;
    loop {
        let left = DMatrix::identity(m, m) + perturbation(rng, m, size, e);
        let t = Operator::from_matrix(left * s.matrix(), e).unwrap();
        if let Some(l) = hilding::sound_lambda(&s, &t, &pol()).unwrap() {
            if l < 0.9 {
                let c = HildingCertificate::symmetric((l * 1.01).min(0.95)).unwrap();
                return (s, t, c);
            }
        }
        size /= 2.0;
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst = 0.0f64;
    let mut nontrivial = 0;
    for i in 0..100 {
        let (s, t, c) = certified_pair(&mut rng, P3[i % 3]);
        let rep = fredholm_check(&s, &t, c, &pol()).map_err(|e| format!("pair {i}: {e}"))?;
        let (m, n) = (s.codomain().dim(), s.domain().dim());
        // Oracle: kernel dimension from an independent SVD rank.
        let sm = s.matrix();
        let rank = sm
            .clone()
            .svd(false, false)
            .rank(1e-10 * sm.norm().max(1.0));
        check(rep.kernel_dim_s == n - rank, || {
            format!("pair {i}: kernel dim {}", rep.kernel_dim_s)
        })?;
        check(rep.kernels_agree && rep.kernel_residual <= 1e-8, || {
            format!("pair {i}: kernel residual {:e}", rep.kernel_residual)
        })?;
        check(rep.index_s == rep.index_t, || {
            format!("pair {i}: indices {} and {}", rep.index_s, rep.index_t)
        })?;
        check(rep.index_s == n as i64 - m as i64, || {
            format!("pair {i}: index {} != n - m", rep.index_s)
        })?;
        worst = worst.max(rep.kernel_residual);
        nontrivial += usize::from(rep.kernel_dim_s > 0);
    }
    Ok(format!(
        "100 pairs ({nontrivial} with nontrivial kernel), largest kernel residual {worst:.2e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0f64;
    let mut worst_literal = 0.0f64;
    let mut invariant = 0;
    for i in 0..60 {
        let e = P3[i % 3];
        let dim = rng.random_range(2..9);
        let (t, c) = certified_near_identity(&mut rng, dim, e);
        let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = if i % 2 == 1 && dim >= 4 {
            // Block-diagonal T with x inside the first block's invariant subspace.
            let h = dim / 2;
            let mut m = t.matrix().clone();
            for r in 0..dim {
                for col in 0..dim {
                    if (r < h) != (col < h) {
                        m[(r, col)] = 0.0;
                    }
                }
            }
            x.iter_mut().skip(h).for_each(|v| *v = 0.0);
            let op = Operator::from_matrix(m, e).unwrap();
            let id = Operator::identity(dim, e).unwrap();
            if !verify_certificate(&id, &op, c, &pol())
                .unwrap()
                .is_verified()
            {
                continue;
            }
            invariant += 1;
            op
        } else {
            t
        };
        let xv = Vector::new(x, t.domain()).unwrap();
        for n in 0..=3 {
            let d =
                krylov_membership(&t, c, &xv, n, n + dim - 1, &pol()).map_err(|e| e.to_string())?;
            worst = worst.max(d);
            check(d <= 1e-8, || {
                format!("instance {i}, n = {n}: distance {d:e}")
            })?;
        }
        for n in 0..=1 {
            let d = krylov_membership(&t, c, &xv, n, dim, &pol()).map_err(|e| e.to_string())?;
            worst_literal = worst_literal.max(d);
            check(d <= 1e-8, || {
                format!("instance {i}, n = {n}, K = dim: distance {d:e}")
            })?;
        }
    }
    Ok(format!(
        "60 operators ({invariant} with x in a proper invariant subspace); n in 0..=3 over dim \
         consecutive powers: max distance {worst:.2e}; K = dim, n <= 1: {worst_literal:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let policy = pol();
    let measured = |g: &gallery::GalleryInstance, prefix: &str| -> Result<f64, String> {
        g.claim(prefix)
            .map(|c| c.measured)
            .ok_or_else(|| format!("{}: no claim {prefix:?}", g.name))
    };
    let err = |e: hilding::Error| e.to_string();

    let rot = gallery::rotation_l1(&policy).map_err(err)?;
    for prefix in ["fitted", "fixed", "antipodal"] {
        let v = measured(&rot, prefix)?;
        check((v - 1.0).abs() <= 1e-6, || {
            format!("rotation {prefix} = {v}")
        })?;
    }
    let block = gallery::block_rotation(3, Exponent::TWO, &policy).map_err(err)?;
    for prefix in ["fixed", "antipodal"] {
        let v = measured(&block, prefix)?;
        check((v - 2f64.sqrt()).abs() <= 1e-9, || {
            format!("block rotation {prefix} = {v}")
        })?;
    }
    let spec = hilding::spectrum(block.operator("T").unwrap(), &policy).map_err(err)?;
    let off = spec
        .eigenvalues
        .iter()
        .map(|z| z.re.abs().max((z.im.abs() - 1.0).abs()))
        .fold(0.0, f64::max);
    let upper = spec.eigenvalues.iter().filter(|z| z.im > 0.0).count();
    check(off <= 1e-9 && upper == 3, || {
        format!("block rotation spectrum off by {off:e}")
    })?;
    for n in [100, 10_000] {
        let g = gallery::truncated_shift(n).map_err(err)?;
        let v = measured(&g, "residual * sqrt n")?;
        check((v - 1.0).abs() <= 1e-12, || format!("shift n = {n}: {v}"))?;
    }
    let ex = gallery::example10(4, Exponent::TWO, 2.0, &policy).map_err(err)?;
    let gap = measured(&ex, "(1)")?;
    check((gap - 0.5).abs() <= 1e-12, || {
        format!("||(I - T)|_Y|| = {gap}")
    })?;
    // Oracle: P^2 - P entrywise, recomputed here.
    let p = ex.operator("P").unwrap().matrix();
    let idem = (p * p - p).amax();
    check(idem <= 1e-12, || format!("P^2 - P = {idem:e}"))?;
    let (cy, cz) = (measured(&ex, "codim_X Y")?, measured(&ex, "codim_X Z")?);
    check(cy == 4.0 && cz == 4.0, || format!("codims {cy} and {cz}"))?;
    for g in [&rot, &block, &ex] {
        check(g.all_passed(), || format!("{} has a failing claim", g.name))?;
    }
    Ok(format!(
        "rotation gaps 1, block gaps sqrt 2, shift residual*sqrt n = 1, example10 gap {gap}, codims 4/4"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let policy = pol().with_starts(16);
    let others = [Exponent::new(1.5).unwrap(), Exponent::new(3.0).unwrap()];
    for i in 0..500 {
        let (m, n) = (rng.random_range(1..9), rng.random_range(1..9));
        let a = random_matrix(&mut rng, m, n);
        let col = (0..n)
            .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let row = (0..m)
            .map(|r| a.row(r).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let sigma = a.clone().svd(false, false).singular_values.max();
        for (e, exact) in [
            (Exponent::ONE, col),
            (Exponent::TWO, sigma),
            (Exponent::INF, row),
        ] {
            let b = Operator::from_matrix(a.clone(), e)
                .unwrap()
                .norm_bounds(&policy)
                .unwrap();
            check(b.exact && b.contains(exact, 1e-12 * exact.max(1.0)), || {
                format!(
                    "matrix {i}, p = {e}: {exact} not in [{}, {}]",
                    b.lower, b.upper
                )
            })?;
        }
        for e in others {
            let b = Operator::from_matrix(a.clone(), e)
                .unwrap()
                .norm_bounds(&policy)
                .unwrap();
            let q = e.reciprocal();
            let rt = col.powf(q) * row.powf(1.0 - q);
            let canonical = (0..n)
                .map(|j| naive_norm(a.column(j).as_slice(), e))
                .fold(0.0, f64::max);
            check(b.lower <= b.upper && b.lower <= rt * (1.0 + 1e-12), || {
                format!(
                    "matrix {i}, p = {e}: lower {} above interpolation {rt}",
                    b.lower
                )
            })?;
            check(b.lower >= canonical * (1.0 - 1e-12), || {
                format!(
                    "matrix {i}, p = {e}: lower {} below canonical {canonical}",
                    b.lower
                )
            })?;
        }
    }
    Ok("500 matrices: exact norms enclosed for p in {1, 2, inf}; p in {1.5, 3} lower bounds ordered".into())
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = Command::new(env!("CARGO_BIN_EXE_hilding"))
        .args(args)
        .current_dir(&dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    for (sample, args) in [
        ("certify", vec!["certify", "samples/certify.toml"]),
        ("codim", vec!["codim", "samples/codim.toml"]),
        ("gallery", vec!["gallery", "--file", "samples/gallery.toml"]),
    ] {
        for (format, ext) in [("text", "txt"), ("json", "json")] {
            let mut a = args.clone();
            a.extend(["--format", format]);
            let (c1, o1) = cli(&a);
            let (_, o2) = cli(&a);
            let golden = std::fs::read(dir.join(format!("tests/golden/{sample}.{ext}")))
                .map_err(|e| e.to_string())?;
            check(c1 == 0, || format!("{sample} exit {c1}"))?;
            check(o1 == o2 && o1 == golden, || {
                format!("{sample} ({format}) differs from golden")
            })?;
        }
    }
    let tmp = std::env::temp_dir().join(format!("hilding-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).map_err(|e| e.to_string())?;
    let cases = [
        (0, "p = 2\n[matrices]\nT = [[1, 0], [0, 1]]\n[certificate]\nlambda1 = 0\nlambda2 = 0\n"),
        (1, "p = 1\n[matrices]\nT = [[0, 1], [-1, 0]]\n[certificate]\nlambda1 = 0.9\nlambda2 = 0.9\n"),
        (
            2,
            "p = 2\n[matrices]\nS = [[1, 0], [0, 0.01]]\nT = [[1.5, 0], [0, 0.01]]\n\
             [certificate]\nlambda1 = 0.2\nlambda2 = 0.2\n",
        ),
    ];
    for (want, body) in cases {
        let path = tmp.join(format!("exit{want}.toml"));
        std::fs::write(&path, body).map_err(|e| e.to_string())?;
        let (code, _) = cli(&["certify", path.to_str().unwrap()]);
        check(code == want, || format!("expected exit {want}, got {code}"))?;
    }
    Ok("3 samples x 2 formats byte-identical to golden files; exits 0, 1, 2 observed".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("basic inequality sandwich", criterion_1),
        ("certificate transfer suite", criterion_2),
        ("Neumann error bound", criterion_3),
        ("certified surjectivity", criterion_4),
        ("codimension by continuation", criterion_5),
        ("kernels and index", criterion_6),
        ("Krylov membership", criterion_7),
        ("gallery numbers", criterion_8),
        ("norm enclosure soundness", criterion_9),
        ("CLI determinism and exit codes", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} ({secs:.2} s): {detail}",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name} ({secs:.2} s): {detail}",
                    i + 1
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
