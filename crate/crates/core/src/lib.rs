//! Theta-function sections of polarized abelian varieties and a numerical
//! certificate for injectivity of the multiplication map
//! `Sym^2 H^0(A, L) -> H^0(A, L^2)`.

pub mod av;
pub mod experiments;
pub mod error;
pub mod group;
pub mod linalg;
pub mod multmap;
pub mod sections;
pub mod theta;

pub use error::{Error, Result, Verdict};
