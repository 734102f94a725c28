//! Certification layer: audit reports, kernel identity checks, the entropy and
//! energy balance audits of the regularized system, weak-formulation residuals,
//! a priori monitors, weighted density diagnostics, manufactured solutions and
//! the existence-regime classifier.

pub mod battery;
pub mod diagnostics;
pub mod entropy;
pub mod identities;
pub mod mms;
pub mod monitor;
pub mod regime;
pub mod report;
pub mod weak;

pub use report::{AuditEntry, AuditReport, Comparison};
