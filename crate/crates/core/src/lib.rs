pub mod cli;
pub mod ddouble;
pub mod error;
pub mod exactpoly;
pub mod family;
pub mod linalg;
pub mod presentation;
pub mod rootfind;
pub mod torsion;
pub mod verify;
pub mod variety;

pub use error::{Result, TorsionError};
pub use family::{Family, Manifold};
