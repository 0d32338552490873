//! Switching networks for directed st-connectivity.

pub mod basis;
pub mod closed;
pub mod dstcon;
pub mod flow;
pub mod graph;
pub mod linalg;
pub mod network;
pub mod pebbling;
pub mod prep;
pub mod span;
pub mod tradeoff;
