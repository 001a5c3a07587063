//! Schemas shared by the `bbl-lab` binary and its test harnesses: the
//! instance file format and the verification report format.

pub mod instance;
pub mod report;
