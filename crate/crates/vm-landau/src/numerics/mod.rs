//! Shared numerical machinery: Gauss rules, adaptive quadrature, oscillatory
//! (Filon-type) integration, monotone cubic interpolation, least-squares fits
//! and spectral peak location.

pub mod fftutil;
pub mod fit;
pub mod gauss;
pub mod interp;
pub mod oscillatory;
pub mod par;
pub mod quad;
