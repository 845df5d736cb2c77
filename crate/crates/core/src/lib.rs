pub mod algebra;
pub mod classifier;
pub mod cli;
pub mod constants;
pub mod error;
pub mod flat;
pub mod linalg;
pub mod oracle;
pub mod quadratic;
pub mod rational;
pub mod sampling;
pub mod scales;
