//! Reduced-energy toolkit for sign-changing blow-up in the Yamabe problem.
//!
//! The crate evaluates the exact constants, Weyl-type tensor algebra, bubble
//! and corrector identities, reduced energy coefficients, saddle
//! certificates, curvature expansions of perturbed metrics and the
//! compactness regime table, each backed by an independent quadrature
//! oracle.

pub mod bubble;
pub mod cli;
pub mod curvature;
pub mod energy;
pub mod exact;
pub mod oracle;
pub mod regimes;
pub mod saddle;
pub mod weyl;
