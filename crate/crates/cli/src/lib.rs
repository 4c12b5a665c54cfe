//! Experiment harness for the behavioral pricing model: scenario ingestion,
//! the acceptance-curve experiments, the property-certification suite, and
//! CSV/JSON/SVG emission.

// Validations use the negated-comparison form so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod report;
pub mod scenario;
pub mod svg;
