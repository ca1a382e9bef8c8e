//! Finite structural Ramsey computations on binary trees.

pub mod colorings;
pub mod error;
pub mod hl;
pub mod joyce;
pub mod strings;
pub mod tree;
pub mod types;

pub use colorings::{colors_used, Color, Coloring, ColoringSpec};
pub use error::{Error, Result};
pub use hl::{CertificateBundle, DenseMatrixCertificate, HLCertificate, LevelProductColoring, ProductColoring};
pub use strings::{cmp_q, meet, q_between, q_value, BitString};
pub use tree::{is_strong_subtree, FiniteTree, LevelFunction, StrongSubtreeWitness};
pub use types::signature::{SigKind, TypeSignature};
