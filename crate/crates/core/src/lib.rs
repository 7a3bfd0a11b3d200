//! Computations in the diagrammatic Hecke category: Coxeter combinatorics,
//! the Hecke algebra, realizations and Demazure operators, double-leaves
//! bases evaluated in Soergel bimodules, Rouquier complexes, recollement
//! functors and perversity checks.

pub mod coxeter;
pub mod error;
pub mod field;
pub mod hecke;
pub mod homotopy;
pub mod laurent;
pub mod linalg;
pub mod locale;
pub mod poly;
pub mod realization;
pub mod recperv;
pub mod requiv;
pub mod soergelcalc;

pub use error::{Error, Result};
