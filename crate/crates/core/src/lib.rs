//! Planar harmonic mappings `f = h + conj(g)` on the unit disk, built by the
//! shear construction and checked numerically for local univalence and for
//! convexity in a prescribed direction.
//!
//! Every analytic function is carried as a truncated [`Series`]. Closed
//! forms ([`ClosedForm`]) serve as exact oracles. Positivity statements on the
//! open disk are replaced by sampled minima over a declared [`GridSpec`],
//! and a passing check is evidence at that resolution, not a proof.

pub mod convexity;
pub mod error;
pub mod functions;
pub mod gallery;
pub mod harmonic;
pub mod render;
pub mod series;

pub use convexity::{Certificate, CertificateKind, GridSpec, POSITIVITY_MARGIN};
pub use error::{Error, Result};
pub use functions::ClosedForm;
pub use gallery::{CombinationSpec, ConvolutionBase, HarnessReport, Hypothesis};
pub use harmonic::{HarmonicMap, ShearSpec};
pub use render::PolylineSet;
pub use series::{Series, DEFAULT_ORDER};

pub use num_complex::Complex64;
