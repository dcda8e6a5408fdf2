//! Desk-scale laboratory for conormal Lagrangian spectral invariants on the
//! cotangent bundle of the circle.
//!
//! The pipeline: a catalog [`hamiltonian::HamiltonianSpec`] is flowed over the
//! zero section into an [`spectral::ActionProfile`]; spectral numbers
//! `ℓ(α; o_M, ν*N : H)` are read off the primitive of the (graphical) image;
//! [`homogenize`] turns iterates into the sequences `aₙ, bₙ` and the
//! limsup-homogenized `σᴺ` / `ζᴺ`; [`axioms`] fuzzes the partial
//! quasi-morphism and quasi-state properties; [`indexcalc`] checks the
//! grading arithmetic exactly; [`viterbo`] runs the base-rescaling
//! comparison.

pub mod axioms;
pub mod geometry;
pub mod hamiltonian;
pub mod homogenize;
pub mod indexcalc;
mod numerics;
pub mod spectral;
pub mod viterbo;

pub use geometry::{circle_reduce, ArcSign, BasePoint, ClassLabel, ConormalTarget, PhasePoint};
pub use hamiltonian::{HamiltonianSpec, TrigPoly};
