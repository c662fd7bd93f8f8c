//! Certified perturbation bounds for linear operators on finite-dimensional
//! `lp` spaces.
//!
//! The central object is a [`HildingCertificate`]: a pair `(l1, l2)` in
//! `[0, 1)^2` such that
//!
//! ```text
//! ||Sx - Tx|| <= l1 ||Sx|| + l2 ||Tx||      for every x.
//! ```
//!
//! A certificate forces `||Sx||` and `||Tx||` to be comparable, which in turn
//! transfers invertibility, surjectivity, kernels, codimensions and Fredholm
//! indices from `S` to `T`. The crate fits and verifies certificates, moves
//! them through inverses, scalings and convex homotopies, and checks each of
//! the resulting conclusions on concrete matrices.
//!
//! Every "verified" answer rests on a sound bound (an upper bound on a norm or
//! a lower bound on a gain). Randomized searches are only ever used to find
//! counterexamples or to tighten the non-sound side of an interval.
//!
//! ```
//! use hilding::{Exponent, HildingCertificate, NumericPolicy, Operator};
//!
//! let policy = NumericPolicy::default();
//! let s = Operator::identity(3, Exponent::TWO)?;
//! let t = Operator::from_rows(
//!     &[vec![1.05, 0.0, 0.02], vec![0.0, 0.97, 0.0], vec![0.01, 0.0, 1.0]],
//!     Exponent::TWO,
//! )?;
//! let cert = HildingCertificate::new(0.1, 0.0)?;
//! let verdict = hilding::verify_certificate(&s, &t, cert, &policy)?;
//! assert!(verdict.is_verified());
//! # Ok::<(), hilding::Error>(())
//! ```

pub mod certificates;
pub mod continuation;
mod eigen;
pub mod error;
pub mod gallery;
mod linalg;
pub mod lp;
pub mod neumann;
pub mod operators;
pub mod policy;
mod search;
pub mod spectral;

pub use certificates::{
    basic_bounds, cert_homotopy, cert_inverse, cert_scale, fit_lambda, ray_gain, repair_bounded,
    repair_inverse_bounded, sound_lambda, verify_certificate, HildingCertificate, SandwichBounds,
    Verdict, VerdictStatus,
};
pub use continuation::{
    codim_pair, epsilon_step, fredholm_check, krylov_membership, verify_codim_preservation,
    ContinuationStep, ContinuationTrace, FredholmReport, VerificationRoute,
};
pub use error::{Error, Result};
pub use gallery::{by_name as gallery_by_name, Claim, GalleryInstance, GalleryParams};
pub use lp::{sphere_sample, subspace_distance, vec_norm, Exponent, Space, SubspaceBasis, Vector};
pub use neumann::{
    certified_surjective, neumann_inverse, neumann_solve, NeumannResult, SurjectivityReport,
};
pub use operators::{codim, BoundInterval, Operator};
pub use policy::NumericPolicy;
pub use spectral::{
    antipodal_gap, aps_residual, fixed_point_gap, ray_scan, spectrum, ApproxWitness, RayDirection,
    RayEntry, RayScanReport, SpectrumReport,
};
