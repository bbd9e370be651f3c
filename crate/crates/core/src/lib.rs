//! ℤ_n lattice gauge theory with the Wilson action on hypercubic boxes.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: cells of ℤ^m and its dual, boundaries, the Hodge star, boxes.
//! * [`forms`], [`potential`]: chains, forms, `d`, `δ`, `★` and Poincaré potentials.
//! * [`loops`]: generalized loops, corner edges and spanning surfaces.
//! * [`model`]: the representation ρ, θ(β), λ(β), `S_β` and the constants of the
//!   Wilson-loop theorem.
//! * [`sampler`]: heat-bath Gibbs sampling of the lattice measure and estimators.
//! * [`vortex`]: vortex decomposition, minimal vortices, `W′_γ` and the counting census.
//! * [`oracle`]: exact enumeration on small boxes; [`verify`] bundles the checks.
//! * [`io`]: run manifests and CSV output.
//!
//! Support sizes of forms, and every vortex size threshold, count *oriented*
//! cells: a minimal vortex in four dimensions has support 12, i.e. six
//! unoriented plaquettes.

pub mod error;
pub mod forms;
pub mod io;
pub mod lattice;
pub mod loops;
pub mod model;
pub mod oracle;
pub mod potential;
pub mod sampler;
pub mod verify;
pub mod vortex;

pub use error::{Error, Result};
