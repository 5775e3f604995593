//! Modular symbols for Bianchi groups over the five Euclidean imaginary
//! quadratic fields: Manin symbol presentations for Γ₁(n), Hecke operators
//! through Heilbronn–Merel matrices, rational eigensystems, and numerical
//! evaluation of the Fourier–Bessel expansion of weight-2 cusp forms.

pub mod error;
pub mod fourier;
pub mod hecke;
pub mod heilbronn;
pub mod int;
pub mod linalg;
pub mod ring;
pub mod symbols;

pub use error::{Error, Result};
pub use int::Int;
pub use ring::{FieldId, QuadInt};
