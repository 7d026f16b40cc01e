pub mod binary_form;
pub mod binary_sos;
pub mod biform;
pub mod cli;
pub mod cone;
pub mod error;
pub mod factor;
pub mod enumerate;
pub mod fixtures;
pub mod gram;
pub mod homotopy;
pub mod json;
pub mod pipeline;
pub mod poly;
pub mod scalar;
pub mod surface;

pub use binary_form::BinaryForm;
pub use biform::Biform;
pub use error::{Error, Result};
pub use gram::{GramSpace, Representation};
pub use poly::Poly;
pub use scalar::Rational;
pub use surface::{MonomialBasis, SurfaceSpec};
