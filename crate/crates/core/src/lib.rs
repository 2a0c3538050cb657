pub mod benders;
pub mod dataio;
pub mod fleet;
pub mod schedule;
pub mod thermal;
