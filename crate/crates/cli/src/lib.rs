//! Command-line front end for exact shatter-function experiments: a curated
//! corpus of worked families, sweep / exponent / reduction subcommands, and
//! reproducible JSON and CSV reports.

pub mod chart;
pub mod corpus;
pub mod report;
pub mod run;
