//! Exact and numerical verification kernels for the overpartition
//! generating function P̄_ω and its completion.

pub mod appell;
pub mod classical;
pub mod combinatorics;
pub mod error;
pub mod exactalg;
pub mod hp;
pub mod indefinite;
pub mod modular;
pub mod registry;

pub use error::{Error, Result};
pub use exactalg::{Cyc8, JacobiSeries, Monomial, QSeries};
pub use hp::{HpComplex, UHPoint};
