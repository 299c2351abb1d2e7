//! Surface-code memory experiments: code layout, syndrome-extraction
//! schedule, Pauli-frame simulation, detector graphs, exact matching and
//! the decoders built on them.

pub mod decoder;
pub mod error;
pub mod frame;
pub mod graph;
pub mod harness;
pub mod layout;
pub mod matching;
pub mod schedule;
pub mod sim;

pub use decoder::{Decoder, Metric, Verdict};
pub use error::{DecodeError, GraphError, HarnessError, LayoutError, MatchingError, SimError};
pub use frame::{Pauli, PauliFrame};
pub use graph::{
    DetectionEvent, DetectorGraph, PropagationMetric, SeparationMetric, StandardMetric,
};
pub use harness::{
    estimate_threshold, exhaustive_weight_test, fit_slope, read_csv, run_experiment, write_csv,
    ExhaustiveReport, ExperimentSpec, ResultRow, SlopeFit, StopRule, ThresholdEstimate,
};
pub use layout::{Basis, CodeLayout, Site, SiteKind};
pub use matching::{augment_with_boundary, min_weight_perfect_matching, Matching, MatchingProblem};
pub use schedule::{FaultClass, FaultLocation, GateKind, GateOp, RoundSchedule};
pub use sim::{FrameSimulator, NoiseConfig, ScheduledFault, SyndromeRecord};
