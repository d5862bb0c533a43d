//! Numerical toolkit for dilation-generated biorthogonal systems on L2(0,1).
//!
//! A generator sequence a (with a[1] = 1) defines the system
//! phi_n(x) = sum_k a[k] sqrt2 sin(k n pi x); its biorthogonal dual comes from
//! the Dirichlet-convolution inverse of a. The crate provides:
//!
//! - exact integer kernels (Moebius, divisors, Dirichlet convolution/inverse),
//! - certified zeta and polylogarithm evaluation on and off the unit circle,
//! - system/dual construction, Gram spectra and Riesz corridors,
//! - expansion (analysis/synthesis) of arbitrary functions,
//! - a half-plane boundedness scan implementing the Riesz-basis criterion.

pub mod basis;
pub mod coeff;
pub mod dirichlet;
pub mod error;
pub mod expand;
pub mod family;
pub mod kahan;
pub mod special;

pub use basis::{
    bari_g_residual, biorthogonality_check, dilation_generator_check, gram_matrix,
    riesz_corridor, DilatedSystem, DilationCheck, DualSystem, GramSummary, SineVector,
};
pub use coeff::{fmt17, CoeffVector, Decay};
pub use dirichlet::{
    dirichlet_convolve, dirichlet_inverse, divisors, is_completely_multiplicative, mobius,
    mobius_sieve, MultiplicativityReport,
};
pub use error::{Error, Result};
pub use expand::{
    analyze, halfplane_scan, halfplane_scan_coeffs, sine_coefficients,
    sine_coefficients_detailed, stability_report, synthesize, ExpansionResult, QuadConfig,
    QuadMethod, Region, ScanReport, StabilityReport, Thresholds, Verdict, POLE_MASK_RADIUS,
};
pub use family::{
    family_names, make_generator, CoeffGenerator, DeltaGenerator, FamilyConfig, Generator,
    GeneratorFactory, PolylogGenerator,
};
pub use kahan::{KahanComplex, KahanSum};
pub use special::{
    dirichlet_series, phi_polylog, phi_polylog_ext, polylog_circle, zeta, SeriesValue,
    TailPolicy, ZETA_POLE_GUARD,
};
