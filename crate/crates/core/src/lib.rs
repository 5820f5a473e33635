pub mod cli;
pub mod dynamic;
pub mod exact;
pub mod geometry;
pub mod lab;
pub mod output;
pub mod potential;
pub mod quasistatic;
pub mod scenario;
