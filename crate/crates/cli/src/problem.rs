//! The problem file: a TOML document naming matrices, subspaces, vectors, a
//! certificate, tolerances and per-command parameters.

use std::collections::BTreeMap;
use std::path::Path;

use hilding::{
    Exponent, HildingCertificate, NumericPolicy, Operator, Space, SubspaceBasis, Vector,
};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExpSpec {
    Number(f64),
    Word(String),
}

impl ExpSpec {
    pub fn resolve(&self) -> Result<Exponent, Failure> {
        match self {
            ExpSpec::Number(p) => Exponent::new(*p).map_err(Failure::from),
            ExpSpec::Word(w) if w == "inf" => Ok(Exponent::INF),
            ExpSpec::Word(w) => Err(Failure::input(format!(
                "p must be a number >= 1 or \"inf\", got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertSpec {
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rank_tol: Option<f64>,
    pub search_starts: Option<usize>,
    pub search_max_iters: Option<usize>,
    pub search_rel_tol: Option<f64>,
    pub report_tol: Option<f64>,
    pub membership_tol: Option<f64>,
    pub samples_per_step: Option<usize>,
    pub neumann_max_terms: Option<usize>,
    pub qr_deflation_tol: Option<f64>,
    pub qr_iters_per_dim: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Scale, homotopy or ray parameters for `transform`.
    pub alpha: Option<Vec<f64>>,
    /// Upper bound on `||T||` for the repaired constant.
    pub norm_t: Option<f64>,
    /// Upper bound on `||T^-1||` for the repaired constant.
    pub norm_tinv: Option<f64>,
    /// Neumann tolerance.
    pub tol: Option<f64>,
    /// `"positive"` or `"negative"`.
    pub direction: Option<String>,
    pub grid: Option<Vec<f64>>,
    /// Lowest Krylov power.
    pub n: Option<usize>,
    /// Highest Krylov power.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GallerySpec {
    pub name: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub p: Option<ExpSpec>,
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub p: Option<ExpSpec>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub subspaces: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub vectors: BTreeMap<String, Vec<f64>>,
    pub certificate: Option<CertSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
    pub gallery: Option<GallerySpec>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<ProblemFile, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        ProblemFile::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ProblemFile, Failure> {
        toml::from_str(text).map_err(|e| Failure::input(format!("bad problem file: {e}")))
    }

    pub fn exponent(&self) -> Result<Exponent, Failure> {
        self.p
            .as_ref()
            .ok_or_else(|| Failure::input("missing p"))
            .and_then(ExpSpec::resolve)
    }

    /// Policy from the tolerances table; `seed` wins over the file's seed.
    pub fn policy(&self, seed: Option<u64>) -> NumericPolicy {
        let mut p = NumericPolicy::default();
        let t = &self.tolerances;
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = t.$f { p.$f = v; } )* };
        }
        take!(
            rank_tol,
            search_starts,
            search_max_iters,
            search_rel_tol,
            report_tol,
            membership_tol,
            samples_per_step,
            neumann_max_terms,
            qr_deflation_tol,
            qr_iters_per_dim
        );
        p.seed = seed.or(self.seed).unwrap_or(0);
        p
    }

    pub fn has_matrix(&self, name: &str) -> bool {
        self.matrices.contains_key(name)
    }

    pub fn operator(&self, name: &str) -> Result<Operator, Failure> {
        let rows = self
            .matrices
            .get(name)
            .ok_or_else(|| Failure::input(format!("missing matrix {name:?} in [matrices]")))?;
        Operator::from_rows(rows, self.exponent()?)
            .map_err(|e| Failure::input(format!("matrix {name}: {e}")))
    }

    /// Matrix `name`, or the identity on `like`'s domain when absent.
    pub fn operator_or_identity(&self, name: &str, like: &Operator) -> Result<Operator, Failure> {
        if self.has_matrix(name) {
            self.operator(name)
        } else {
            Operator::identity(like.domain().dim(), self.exponent()?).map_err(Failure::from)
        }
    }

    pub fn subspace(&self, name: &str, space: Space) -> Result<SubspaceBasis, Failure> {
        let vecs = self
            .subspaces
            .get(name)
            .ok_or_else(|| Failure::input(format!("missing subspace {name:?} in [subspaces]")))?;
        SubspaceBasis::new(space, vecs.clone())
            .map_err(|e| Failure::input(format!("subspace {name}: {e}")))
    }

    pub fn vector(&self, name: &str, space: Space) -> Result<Vector, Failure> {
        let v = self
            .vectors
            .get(name)
            .ok_or_else(|| Failure::input(format!("missing vector {name:?} in [vectors]")))?;
        Vector::new(v.clone(), space).map_err(|e| Failure::input(format!("vector {name}: {e}")))
    }

    pub fn certificate(&self) -> Result<Option<HildingCertificate>, Failure> {
        self.certificate
            .map(|c| HildingCertificate::new(c.lambda1, c.lambda2).map_err(Failure::from))
            .transpose()
    }

    pub fn require_certificate(&self) -> Result<HildingCertificate, Failure> {
        self.certificate()?
            .ok_or_else(|| Failure::input("missing [certificate]"))
    }
}
