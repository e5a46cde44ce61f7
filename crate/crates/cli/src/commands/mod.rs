pub mod eval;
pub mod forge;
