//! Exact potential theory on metrized graphs.
//!
//! Everything here works over arbitrary-precision rationals, so identities
//! between Green's functions, admissible constants and the graph polynomials of
//! hyperelliptic graphs are checked by equality rather than within a tolerance.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command-line
//! front end live in the `admgraph` crate.
#![no_std]

extern crate alloc;

pub mod bogomolov;
pub mod graph;
pub mod hyperelliptic;
pub mod linalg;
pub mod poly;
pub mod potential;
pub mod rational;
pub mod testkit;

pub use graph::{Divisor, Edge, MetrizedGraph};
pub use hyperelliptic::{EdgeKind, HyperellipticGraph, Involution};
pub use poly::{MultiPoly, RationalFn, Strategy};
pub use rational::Rational;
