//! Diagrammatic Soergel calculus evaluated on Bott–Samelson bimodules.

pub mod bimod;
pub mod category;
pub mod diagram;

pub use bimod::{basis_degree, BElem, Bimod, BimodMap, Word};
pub use category::{BSObject, HomSpace, LeafIndex, Morphism, Soergel};
pub use diagram::{Diagram, Generator, Slice};
