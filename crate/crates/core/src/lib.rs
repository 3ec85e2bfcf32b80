//! Proving first-order statements about linear operators by reduction to
//! noncommutative polynomial ideal membership.

pub mod ackermann;
pub mod herbrand;
pub mod idealise;
pub mod logic;
pub mod membership;
pub mod ncpoly;
pub mod prover;
