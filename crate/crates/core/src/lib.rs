//! Space-filling curves generated from planar substitutions.
//!
//! A planar substitution expands every prototile by a fixed factor and cuts
//! the expansion into translated prototiles. Attaching a visit order to each
//! 1-supertile induces an order on every n-supertile; pairing those ordered
//! tiles with a labelled Cantor-set hierarchy on `[0, 1]` gives a continuous
//! surjection onto the prototile, which extends by linear interpolation to a
//! Lebesgue-type space-filling curve.
//!
//! The crate is split along that pipeline:
//!
//! - [`geometry`]: tolerance-controlled polygon primitives.
//! - [`substitution`]: prototiles, rules, supertiles, rule hypotheses.
//! - [`ordering`]: visit orders and addresses on supertiles.
//! - [`cantor`]: the exact-rational interval hierarchy.
//! - [`curve`]: evaluation, approximants, moduli and coverage checks.
//! - [`fractal`]: fixed placements and the nested dense-set construction.
//! - [`io`]: the JSON rule format, builtin catalog and SVG/JSON emitters.

pub mod cantor;
pub mod curve;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod io;
pub mod ordering;
pub mod raster;
pub mod substitution;

pub use error::{Error, Result};
pub use geometry::{Point, Polygon, Tolerance};
pub use ordering::{Address, OrderSpec};
pub use substitution::{PlacedTile, Prototile, SubstitutionRule, TileId};
