pub mod candidate;
pub mod dsl;
pub mod generators;
pub mod io;
pub mod landscape;
pub mod search;
pub mod similarity;
pub mod stats;
pub mod tasks;
