//! Physical constants and unit conventions.
//!
//! Everything in this workspace uses Gaussian (CGS) units: rates and
//! detunings in rad/s, dipole moments in statC cm (electric) and erg/G
//! (magnetic), densities in cm^-3. Polarizabilities then come out in cm^3
//! and the macroscopic response functions are dimensionless.

/// Reduced Planck constant (erg s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-27;

/// Speed of light in vacuum (cm/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e10;

/// Rate quoted as "1 kHz" is interpreted as angular frequency 2*pi*10^3 rad/s.
///
/// All rate ratios in the model are dimensionless, so any consistent
/// convention reproduces the same dimensionless spectra; the convention only
/// matters for absolute-unit output and is recorded in emitted metadata.
pub const GAMMA2_DEFAULT: f64 = 2.0 * std::f64::consts::PI * 1.0e3;

/// Fine-structure-constant denominator used for the electric/magnetic
/// transition hierarchy: gamma3 = gamma5 = 137^2 gamma2.
pub const ALPHA_INV: f64 = 137.0;

/// Default probe wavelength (cm): 600 nm.
pub const LAMBDA_DEFAULT: f64 = 600.0e-7;
