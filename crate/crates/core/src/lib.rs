//! Configuration spaces of framed plane polygons and tangent-circle chains,
//! their bracket-generating distributions, the equitangent flow on
//! inscribed polygons, and bicentric polygon families.

pub mod bigon;
pub mod chain;
pub mod constructions;
pub mod distribution;
pub mod error;
pub mod flow;
pub mod framed;
pub mod geom;
pub mod io;
pub mod numerics;
pub mod poncelet;
pub mod spectral;
pub mod svg;

pub use error::{Error, ErrorKind, Result};
