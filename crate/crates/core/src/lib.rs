//! Exact wall-and-chamber computations for slope stability with respect to
//! movable curve classes on polarised intersection lattices.

pub mod catalog;
pub mod chambers;
pub mod error;
pub mod io;
pub mod kring;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod par;
pub mod poly;
pub mod rational;
pub mod region;
pub mod report;
pub mod sampling;
pub mod selfcheck;
pub mod sheafmodel;
pub mod walls;

pub use error::{Error, Result};
pub use lattice::{CurveClass, DivisorClass, PolarisedLattice};
pub use rational::Q;
