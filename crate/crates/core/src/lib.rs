//! Hub labeling for public transit timetables.

pub mod bench;
pub mod cli;
pub mod generator;
pub mod graph;
pub mod index;
pub mod labeling;
pub mod mtt;
pub mod oracle;
pub mod query;
pub mod store;
pub mod superlabel;
pub mod timetable;
pub mod tsv;
