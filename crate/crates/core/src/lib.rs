//! Reduced basis evaluation of fractional norms `‖u‖_{H^s}` and fractional
//! matrix powers `(M⁻¹A)^s u` for symmetric positive definite pencils, with
//! snapshots placed at Zolotarëv-optimal shifts.
//!
//! ```
//! use fracrb::models::synthetic_diagonal;
//! use fracrb::rbm::{RbOptions, ReducedBasis};
//! use fracrb::zolotarev::SpectralInterval;
//!
//! let pencil = synthetic_diagonal(&[1.0, 4.0, 9.0, 16.0]).unwrap();
//! let interval = SpectralInterval::new(1.0, 16.0).unwrap();
//! let u = vec![1.0; 4];
//! let basis = ReducedBasis::build_zolotarev(&pencil, &u, &interval, 8, &RbOptions::default()).unwrap();
//! assert!((basis.norm(0.5).unwrap() - 10f64.sqrt()).abs() < 1e-10);
//! ```

pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod rbm;
pub mod rng;
pub mod specfun;
pub mod verify;
pub mod zolotarev;

pub use error::{FracError, Result};
