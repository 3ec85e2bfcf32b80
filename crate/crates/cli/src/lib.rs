//! Front end: problem files, certificate bundles and the command line.

pub mod bundle;
pub mod problem;
