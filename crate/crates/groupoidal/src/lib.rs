//! Groupoids, actions, principal bundles, anafunctors and bibundles internal
//! to finite sites: finite sets with surjections, and finite spaces with open
//! surjections.

pub mod error;
pub mod report;
pub mod site;

pub use error::{Error, Result};
pub use report::{Finding, Outcome, Report};
pub use site::{Backend, FibreProduct, Mor, Obj, Quotient, Space};
pub mod backends;
pub mod axioms;
pub mod groupoid;
pub mod morphism;
pub mod fixtures;
pub mod action;
pub mod bundle;
pub mod bibundle;
pub mod nerve;
