//! Certifying entanglement of thermal states from ground-state populations.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below fix the
//! scalar for the common cases.

pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod scalar;
pub mod systems;
pub mod thermal;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrixF64 = numerics::ComplexMatrix<f64>;
pub type ComplexMatrixF32 = numerics::ComplexMatrix<f32>;
pub type DensityMatrixF64 = numerics::DensityMatrix<f64>;
pub type DensityMatrixF32 = numerics::DensityMatrix<f32>;
pub type SpectrumF64 = systems::Spectrum<f64>;
pub type SpectrumF32 = systems::Spectrum<f32>;
pub type PureStateF64 = systems::PureState<f64>;
pub type PureStateF32 = systems::PureState<f32>;
pub type ThermalPointF64 = thermal::ThermalPoint<f64>;
pub type ThermalPointF32 = thermal::ThermalPoint<f32>;
pub type RobustnessBoundF64 = entanglement::RobustnessBound<f64>;
pub type RobustnessBoundF32 = entanglement::RobustnessBound<f32>;
