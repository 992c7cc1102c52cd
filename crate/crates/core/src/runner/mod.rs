//! Scenario files, parameter studies and the verification manifest behind
//! the command-line front end.

mod scenario;
mod study;
mod verify;

pub use scenario::{
    dump_scenario_sdp, run_scenario, CpaComparison, Method, ResultFile, Scenario, ScenarioOutput,
    SCHEMA,
};
pub use study::{
    parse_values, run_study, StudyKind, StudyRow, StudyTable, Q_SWEEP_TOL, STUDY_CSV_HEADER,
};
pub use verify::{run_verify, VerifyCheck, VerifyManifest};
