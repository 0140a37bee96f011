pub mod arith;
pub mod cli;
pub mod critical;
pub mod divisor;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod morphism;
pub mod par;
pub mod verify;
