//! Modeling, simulation and design tools for fabric pneumatic actuators in
//! soft shoulder exosuits.
//!
//! The crate is organized by subsystem:
//!
//! - [`geometry`]: spindle/uniform actuator planforms and inflated volume.
//! - [`pouch`]: pouch-motor contact area and force versus compression height.
//! - [`haa`]: torque–angle map of the sewn dual-pouch adduction actuator.
//! - [`pneumatics`]: lumped filling/venting dynamics, step and frequency response.
//! - [`design`]: width-demand synthesis and minimum-volume spindle search.
//! - [`biomech`]: arm gravity torque, study trajectory and assistance metrics.
//! - [`emg`]: sEMG envelope pipeline and segmentation.
//! - [`stats`]: exact Wilcoxon, Friedman, Bonferroni, effect size, reduction.
//! - [`io`]: CSV readers/writers and the numeric output format.
//!
//! Units are fixed throughout: mm, kPa (gauge unless noted), N, N·m, s, mL.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biomech;
pub mod design;
pub mod emg;
mod error;
pub mod geometry;
pub mod haa;
pub mod io;
pub mod pneumatics;
pub mod pouch;
pub mod stats;

pub use biomech::{ArmCoefficients, ArmModel, AssistSample, MomentSurface, PressureSchedule};
pub use design::{DesignConstraints, DesignReport, FrontierPoint, OptimizeOutcome};
pub use emg::{EmgRecording, MvcRecord, PreprocessParams};
pub use error::{Error, Result};
pub use geometry::{PouchGeometry, SpindleProfile, VolumeModelConfig};
pub use haa::{BendState, HaaAssembly};
pub use pneumatics::{PneumaticCircuit, StepResult};
pub use pouch::{ContactRegime, ContactState};
pub use stats::{Significance, StatResult};
