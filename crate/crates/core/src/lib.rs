//! Dimension bounds for self-affine measures on diagonal sponges.
//!
//! The crate models iterated function systems on the unit cube whose linear
//! parts are diagonal, verifies the separation conditions under which the
//! Assouad and lower dimensions of their self-affine measures are computable,
//! and evaluates the resulting bounds together with an independent symbolic
//! oracle over approximate cubes.

pub mod cubes;
pub mod dimension;
pub mod gap;
pub mod hiprec;
pub mod lp;
pub mod model;
pub mod orderings;
pub mod pipeline;
pub mod projection;
pub mod rational;
pub mod render;
pub mod report;
pub mod sampler;
pub mod separation;
pub mod spec_io;
pub mod synth;
pub mod weights;
pub mod witness;
pub mod words;

pub use model::{AffineMapSpec, RawSponge, SpongeSystem, ValidationError};
pub use projection::{Perm, ProjectionStructure};
pub use rational::Rat;
pub use words::WordSpec;
