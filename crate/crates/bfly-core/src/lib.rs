pub mod canon;
pub mod format;
pub mod graph;
pub mod swap;
