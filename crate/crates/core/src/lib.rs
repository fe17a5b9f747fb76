//! Rewriting, exact evaluation and translation for the dichromatic (RG) and
//! trichromatic (RGB) graphical calculi of qubits.
//!
//! Diagrams are open digraphs of coloured phase spiders. They evaluate to
//! linear maps over the ring `Z[w, 1/sqrt2]` (or floats for unrestricted
//! phases), rewrite under sound rule libraries, and translate between the
//! calculi.

pub mod corpus;
pub mod cyclo;
pub mod diagram;
pub mod dsl;
pub mod functors;
pub mod groups;
pub mod interp;
pub mod random;
pub mod rules;
pub mod scalar;
pub mod verify;

pub use cyclo::{CycloError, CycloField, CycloNum};
pub use diagram::{
    canonical_form, canonical_relabel, iso_equal, Color, ColourPerm, Decoration, Diagram, Edge,
    End, Endpoint, Flavour, Node, NodeId, Phase, PhaseGroup, Violation,
};
pub use interp::{Generator, InterpError, Matrix};
pub use rules::{load_library, Direction, Library, RuleError};
pub use scalar::Scalar;

/// Floating-point entries used by the unrestricted-phase backend.
pub type ApproxNum = num_complex::Complex64;

/// Exact matrix of a C4-phase diagram.
pub type ExactMatrix = Matrix<CycloNum>;
/// Floating-point matrix.
pub type FloatMatrix = Matrix<ApproxNum>;
