use hilding::{
    basic_bounds, cert_homotopy, cert_inverse, cert_scale, gallery, ray_gain, repair_bounded,
    repair_inverse_bounded, Exponent, HildingCertificate, NumericPolicy, Operator, RayDirection,
    VerdictStatus,
};
use serde_json::{Map, Value};

use crate::problem::{ExpSpec, ProblemFile};
use crate::report::{interval, num, nums, policy as policy_value, Report};
use crate::{Failure, Outcome};

type Run = Result<(Report, Outcome), Failure>;

fn header(command: &str, f: &ProblemFile, policy: &NumericPolicy) -> Result<Report, Failure> {
    let mut r = Report::default();
    r.set("command", command);
    if f.p.is_some() {
        r.set("p", f.exponent()?.to_string());
    }
    r.set("policy", policy_value(policy));
    Ok(r)
}

fn obj(fields: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

fn cert_value(c: HildingCertificate) -> Value {
    obj(vec![
        ("lambda1", num(c.lambda1())),
        ("lambda2", num(c.lambda2())),
    ])
}

fn dims(op: &Operator) -> String {
    format!("{}x{}", op.codomain().dim(), op.domain().dim())
}

fn finish(mut r: Report, outcome: Outcome, status: &str) -> Run {
    r.set("status", status);
    Ok((r, outcome))
}

pub fn certify(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let s = f.operator_or_identity("S", &t)?;
    let mut r = header("certify", f, &policy)?;
    r.set("S", dims(&s)).set("T", dims(&t));
    let (fitted, at) = hilding::certificates::fit_lambda_witnessed(&s, &t, &policy)?;
    let sound = hilding::sound_lambda(&s, &t, &policy)?;
    r.set("fitted_lambda", num(fitted))
        .set("fitted_at", nums(&at));
    r.set("sound_lambda", sound.map(num).unwrap_or(Value::Null));
    match f.certificate()? {
        Some(c) => {
            let b = basic_bounds(c);
            r.set("certificate", cert_value(c));
            r.set(
                "sandwich",
                obj(vec![("lower", num(b.lower)), ("upper", num(b.upper))]),
            );
            let v = hilding::verify_certificate(&s, &t, c, &policy)?;
            r.set("margin", num(v.margin));
            r.set(
                "witness",
                v.witness.as_deref().map(nums).unwrap_or(Value::Null),
            );
            let outcome = match v.status {
                VerdictStatus::Verified => Outcome::Pass,
                VerdictStatus::Refuted => Outcome::Fail,
                VerdictStatus::Inconclusive => Outcome::Inconclusive,
            };
            finish(r, outcome, v.status.as_str())
        }
        None if sound.is_some() => finish(r, Outcome::Pass, "verified"),
        None if fitted >= 1.0 - policy.report_tol => finish(r, Outcome::Fail, "refuted"),
        None => finish(r, Outcome::Inconclusive, "inconclusive"),
    }
}

pub fn transform(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let c = f.require_certificate()?;
    let mut r = header("transform", f, &policy)?;
    r.set("certificate", cert_value(c));
    let b = basic_bounds(c);
    r.set(
        "sandwich",
        obj(vec![("lower", num(b.lower)), ("upper", num(b.upper))]),
    );
    r.set("inverse", cert_value(cert_inverse(c)));
    let mut rows = Vec::new();
    for &a in f.params.alpha.as_deref().unwrap_or(&[]) {
        let mut row = vec![("alpha", num(a))];
        if a > 0.0 {
            row.push(("scale", cert_value(cert_scale(c, a)?)));
        }
        if (0.0..=1.0).contains(&a) {
            row.push(("homotopy", cert_value(cert_homotopy(c, a)?)));
        }
        if a < 0.0 {
            row.push(("ray_gain", num(ray_gain(c, a)?)));
        }
        rows.push(obj(row));
    }
    if !rows.is_empty() {
        r.set("alphas", Value::Array(rows));
        r.set(
            "note",
            "scaling by alpha > 1 uses l2' = 1 - (1 - l2) / alpha",
        );
    }
    let l = c.max();
    if let Some(n) = f.params.norm_t {
        r.set("repaired", num(repair_bounded(l, n)));
    }
    if let Some(n) = f.params.norm_tinv {
        r.set("repaired_inverse", num(repair_inverse_bounded(l, n)));
    }
    finish(r, Outcome::Pass, "pass")
}

pub fn norm(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let mut r = header("norm", f, &policy)?;
    r.set("T", dims(&t));
    let n = t.norm_with_witness(&policy)?;
    r.set("norm", interval(&n.bound))
        .set("norm_witness", nums(&n.witness));
    let g = t.min_gain_with_witness(&policy)?;
    r.set("min_gain", interval(&g.bound))
        .set("min_gain_witness", nums(&g.witness));
    r.set("rank", t.numeric_rank(&policy)?);
    finish(r, Outcome::Pass, "pass")
}

pub fn invert(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let tol = f.params.tol.unwrap_or(1e-12);
    let mut r = header("invert", f, &policy)?;
    r.set("T", dims(&t)).set("tol", num(tol));
    let res = hilding::neumann_inverse(&t, tol, &policy)?;
    r.set("q", num(res.q))
        .set("terms_used", res.terms_used)
        .set("error_bound", num(res.error_bound));
    let inv: Vec<Value> = res
        .approx_inverse
        .matrix()
        .row_iter()
        .map(|row| nums(&row.iter().copied().collect::<Vec<_>>()))
        .collect();
    r.set("inverse", Value::Array(inv));
    if f.vectors.contains_key("b") {
        let b = f.vector("b", t.codomain())?;
        let y = hilding::neumann_solve(&t, &b, tol, &policy)?;
        r.set("solution", nums(y.coords()));
    }
    let mut outcome = Outcome::Pass;
    if let Some(c) = f.certificate()? {
        let s = hilding::certified_surjective(&t, c, &policy)?;
        r.set(
            "surjectivity",
            obj(vec![
                ("rank", s.rank.into()),
                ("surjective", s.surjective.into()),
                ("gain_floor", num(s.gain_floor)),
                ("min_gain", interval(&s.min_gain)),
                ("consistent", s.consistent.into()),
            ]),
        );
        if !(s.surjective && s.consistent) {
            outcome = Outcome::Fail;
        }
    }
    finish(
        r,
        outcome,
        if outcome == Outcome::Pass {
            "pass"
        } else {
            "fail"
        },
    )
}

fn complex(z: &hilding::spectral::SpectrumReport) -> Value {
    Value::Array(
        z.eigenvalues
            .iter()
            .zip(&z.residuals)
            .map(|(e, res)| {
                obj(vec![
                    ("re", num(e.re)),
                    ("im", num(e.im)),
                    ("residual", num(*res)),
                ])
            })
            .collect(),
    )
}

fn gap_value(w: &hilding::ApproxWitness) -> Value {
    obj(vec![
        ("residual", num(w.residual)),
        ("exact", w.exact.into()),
        ("witness", nums(&w.x)),
    ])
}

pub fn spectrum(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let mut r = header("spectrum", f, &policy)?;
    r.set("T", dims(&t));
    let s = hilding::spectrum(&t, &policy)?;
    r.set("eigenvalues", complex(&s));
    r.set(
        "fixed_point_gap",
        gap_value(&hilding::fixed_point_gap(&t, &policy)?),
    );
    r.set(
        "antipodal_gap",
        gap_value(&hilding::antipodal_gap(&t, &policy)?),
    );
    finish(r, Outcome::Pass, "pass")
}

pub fn rays(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let direction = match f.params.direction.as_deref() {
        Some("positive") => RayDirection::Positive,
        Some("negative") | None => RayDirection::Negative,
        Some(other) => return Err(Failure::input(format!("unknown direction {other:?}"))),
    };
    let default_grid: Vec<f64> = match direction {
        RayDirection::Positive => vec![0.25, 0.5, 1.0, 2.0, 4.0],
        RayDirection::Negative => vec![-4.0, -2.0, -1.0, -0.5, -0.25],
    };
    let grid = f.params.grid.clone().unwrap_or(default_grid);
    let mut r = header("rays", f, &policy)?;
    r.set("T", dims(&t)).set("direction", direction.as_str());
    let scan = hilding::ray_scan(&t, direction, &grid, f.certificate()?, &policy)?;
    let entries = scan
        .entries
        .iter()
        .map(|e| {
            obj(vec![
                ("alpha", num(e.alpha)),
                ("min_gain", interval(&e.gain)),
                ("invertible", e.invertible.into()),
                (
                    "certified_gain",
                    e.certified_gain.map(num).unwrap_or(Value::Null),
                ),
            ])
        })
        .collect();
    r.set("entries", Value::Array(entries));
    r.set("all_invertible", scan.all_invertible())
        .set("consistent", scan.all_consistent());
    r.set(
        "note",
        "real rays only; complex unit directions need complex operator input",
    );
    let ok = scan.all_invertible() && scan.all_consistent();
    finish(
        r,
        if ok { Outcome::Pass } else { Outcome::Fail },
        if ok { "pass" } else { "fail" },
    )
}

pub fn codim(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let y = f.subspace("Y", t.domain())?;
    let c = f.require_certificate()?;
    let mut r = header("codim", f, &policy)?;
    r.set("T", dims(&t))
        .set("dim_Y", y.len())
        .set("certificate", cert_value(c));
    let tr = hilding::verify_codim_preservation(&y, &t, c, &policy)?;
    r.set("route", tr.route.as_str());
    r.set("lambda", num(tr.lambda))
        .set("gain_floor", num(tr.gain_floor))
        .set("norm_t_upper", num(tr.norm_t_upper))
        .set("epsilon", num(tr.epsilon))
        .set("steps", tr.steps.len());
    let steps = tr
        .steps
        .iter()
        .map(|s| {
            obj(vec![
                ("alpha", num(s.alpha)),
                ("rank", s.rank.into()),
                ("codim", s.codim.into()),
                ("step_gap_bound", num(s.step_gap_bound)),
                ("lemma_bound", num(s.lemma_bound)),
                ("min_gain_sampled", num(s.min_gain_sampled)),
                ("max_step_ratio", num(s.max_step_ratio)),
            ])
        })
        .collect();
    r.set("trace", Value::Array(steps));
    r.set("codim_Y", tr.codim_y).set("codim_TY", tr.codim_ty);
    r.set(
        "breaches",
        Value::Array(
            tr.breaches
                .iter()
                .map(|b| Value::String(b.clone()))
                .collect(),
        ),
    );
    let ok = tr.preserved;
    finish(
        r,
        if ok { Outcome::Pass } else { Outcome::Fail },
        if ok { "pass" } else { "fail" },
    )
}

pub fn fredholm(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let s = f.operator_or_identity("S", &t)?;
    let c = f.require_certificate()?;
    let mut r = header("fredholm", f, &policy)?;
    r.set("S", dims(&s))
        .set("T", dims(&t))
        .set("certificate", cert_value(c));
    let rep = hilding::fredholm_check(&s, &t, c, &policy)?;
    r.set(
        "kernel_dim",
        obj(vec![
            ("S", rep.kernel_dim_s.into()),
            ("T", rep.kernel_dim_t.into()),
        ]),
    );
    r.set(
        "codim",
        obj(vec![("S", rep.codim_s.into()), ("T", rep.codim_t.into())]),
    );
    r.set(
        "index",
        obj(vec![("S", rep.index_s.into()), ("T", rep.index_t.into())]),
    );
    r.set("rank_nullity_index", rep.rank_nullity_index);
    r.set("kernel_residual", num(rep.kernel_residual));
    r.set("kernels_agree", rep.kernels_agree);
    let ok = rep.consistent;
    finish(
        r,
        if ok { Outcome::Pass } else { Outcome::Fail },
        if ok { "pass" } else { "fail" },
    )
}

pub fn krylov(f: &ProblemFile, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let t = f.operator("T")?;
    let x = f.vector("x", t.domain())?;
    let c = f.require_certificate()?;
    let dim = t.domain().dim();
    let n = f.params.n.unwrap_or(1);
    let k = f.params.k.unwrap_or(dim.max(n));
    let mut r = header("krylov", f, &policy)?;
    r.set("T", dims(&t))
        .set("certificate", cert_value(c))
        .set("n", n)
        .set("K", k);
    let d = hilding::krylov_membership(&t, c, &x, n, k, &policy)?;
    r.set("distance", num(d));
    let ok = k - n + 1 < dim || d <= policy.membership_tol;
    finish(
        r,
        if ok { Outcome::Pass } else { Outcome::Fail },
        if ok { "pass" } else { "fail" },
    )
}

pub struct GalleryArgs {
    pub name: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub p: Option<String>,
    pub k: Option<f64>,
}

pub fn gallery(f: &ProblemFile, args: GalleryArgs, seed: Option<u64>) -> Run {
    let policy = f.policy(seed);
    let spec = f.gallery.clone().unwrap_or_default();
    let name = args
        .name
        .or(spec.name)
        .ok_or_else(|| Failure::input("gallery needs a name"))?;
    let defaults = gallery::GalleryParams::default();
    let p = match (args.p, spec.p.or(f.p.clone())) {
        (Some(s), _) => match s.parse::<f64>() {
            Ok(v) => ExpSpec::Number(v).resolve()?,
            Err(_) => ExpSpec::Word(s).resolve()?,
        },
        (None, Some(e)) => e.resolve()?,
        (None, None) => defaults.p,
    };
    let params = gallery::GalleryParams {
        m: args.m.or(spec.m).unwrap_or(defaults.m),
        n: args.n.or(spec.n).unwrap_or(defaults.n),
        p,
        k: args.k.or(spec.k).unwrap_or(defaults.k),
    };
    let g = gallery::by_name(&name, params, &policy)?;
    let mut r = Report::default();
    r.set("command", "gallery").set("name", g.name.clone());
    r.set("params", gallery_params(&name, &params));
    r.set("policy", policy_value(&policy));
    let ops = g
        .operators
        .iter()
        .map(|(n, op)| obj(vec![("name", n.clone().into()), ("dims", dims(op).into())]));
    r.set("operators", Value::Array(ops.collect()));
    let claims = g.claims.iter().map(|c| {
        obj(vec![
            ("claim", c.description.clone().into()),
            ("status", if c.passed { "pass" } else { "fail" }.into()),
            ("measured", num(c.measured)),
        ])
    });
    r.set("claims", Value::Array(claims.collect()));
    r.set(
        "notes",
        Value::Array(g.notes.iter().map(|n| Value::String(n.clone())).collect()),
    );
    let ok = g.all_passed();
    finish(
        r,
        if ok { Outcome::Pass } else { Outcome::Fail },
        if ok { "pass" } else { "fail" },
    )
}

fn gallery_params(name: &str, p: &gallery::GalleryParams) -> Value {
    let exp = |e: Exponent| Value::String(e.to_string());
    match name {
        "rotation_l1" => obj(vec![]),
        "block_rotation" => obj(vec![("m", p.m.into()), ("p", exp(p.p))]),
        "truncated_shift" => obj(vec![("n", p.n.into())]),
        "diagonal_growth" => obj(vec![("n", p.n.into()), ("p", exp(p.p))]),
        _ => obj(vec![("m", p.m.into()), ("p", exp(p.p)), ("k", num(p.k))]),
    }
}
