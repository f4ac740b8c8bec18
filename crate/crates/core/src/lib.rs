pub mod benders;
pub mod bounds;
pub mod exec;
pub mod geometry;
pub mod heuristic;
pub mod instance;
pub mod model_ir;
pub mod touring;
