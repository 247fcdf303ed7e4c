//! Exact minimal resolutions of weighted projective planes `CP(a,b,c)`.
//!
//! The crate builds the resolved moment polygon of `CP(a,b,c)` by chopping
//! its three non-Delzant corners, assigns homology classes and areas to every
//! boundary sphere, and checks the combinatorial statements about the
//! resulting divisor: Hirzebruch–Jung strings, connector self-intersections,
//! exceptional gaps and affine rulings.

pub mod arith;
pub mod homlat;
pub mod polygon;
pub mod resolution;
pub mod rulings;
pub mod strings;

pub use arith::{make_weight_triple, ArithError, WeightTriple};
pub use homlat::{AreaForm, HClass, Lattice, LatticeError};
pub use polygon::{ChopSide, EpsSchedule, LatticePolygon, PolygonError, Q};
pub use resolution::{build_resolution, Def13Report, ResolutionError, ResolutionPair};
pub use rulings::{ruling, Component, Roles, RulingCase, RulingData, RulingError};
pub use strings::{DivisorConfig, OrientedString, StringError};
