//! Half-space elastodynamics toolkit: Green tensors for the traction-free
//! half plane, a Nyström forward solver for obstacle scattering, point
//! spread functions and reverse-time-migration imaging.
//!
//! The medium and quadrature layers are generic over [`Real`]; the Green,
//! forward, PSF and imaging layers run in `f64`.

pub mod error;
pub mod scalar;
pub mod tensor;
pub mod medium;
pub mod quadrature;
pub mod special;
pub mod green;
pub mod forward;
pub mod psf;
pub mod imaging;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex64;
pub type Tensor2C = tensor::Tensor2<f64>;
pub type Tensor2C32 = tensor::Tensor2<f32>;
pub type ElasticMedium = medium::ElasticMedium<f64>;
pub type WaveNumbers = medium::WaveNumbers<f64>;
pub type ToleranceSpec = quadrature::ToleranceSpec<f64>;
pub type PoleSpec = quadrature::PoleSpec<f64>;
