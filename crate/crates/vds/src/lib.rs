//! Experiment harness for coherence-driven variable density sampling:
//! spec files, support datasets, Monte-Carlo phase transitions and their
//! CSV/SVG outputs. The numerical work lives in `vds-core`.

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod io;
pub mod plot;
pub mod spec;

pub use error::{HarnessError, Result};
pub use experiment::{emit_outputs, run_phase_transition, ExperimentOutput, RecoveryCurve};
pub use spec::{Arm, ExperimentSpec};
