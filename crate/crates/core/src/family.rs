//! Generator families behind a common trait, registered by name and selected
//! at runtime from configuration.
//!
//! A family supplies the generator coefficients a_n (with decay metadata) and
//! an evaluator for the associated Dirichlet series L_a(s). Power-law families
//! evaluate L_a through the zeta function, which also exposes their pole for
//! scan masking; coefficient-file families fall back to the truncated sum.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::coeff::{CoeffVector, Decay};
use crate::error::{Error, Result};
use crate::special::{self, SeriesValue, TailPolicy};

/// A dilation-generator family: the strategy interface shared by all
/// built-in and user-supplied coefficient sequences.
pub trait Generator: Send + Sync {
    fn name(&self) -> String;

    /// First `n` generator coefficients, decay metadata included when known.
    fn coefficients(&self, n: usize) -> Result<CoeffVector>;

    /// L_a(s) with a tail bound.
    fn series(&self, s: Complex64) -> Result<SeriesValue>;

    /// Poles of L_a inside or near the scan half plane, for cell masking.
    fn poles(&self) -> Vec<Complex64> {
        Vec::new()
    }

    /// Closed-form phi_n(x) when the family has one (used for cross-checks).
    fn phi_closed_form(&self, _n: usize, _x: f64) -> Option<Result<f64>> {
        None
    }
}

/// The orthonormal degenerate case a = delta: phi_n = e_n.
pub struct DeltaGenerator;

impl Generator for DeltaGenerator {
    fn name(&self) -> String {
        "delta".into()
    }

    fn coefficients(&self, n: usize) -> Result<CoeffVector> {
        Ok(CoeffVector::delta(n))
    }

    fn series(&self, _s: Complex64) -> Result<SeriesValue> {
        Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            tail_bound: 0.0,
            terms_used: 1,
        })
    }

    fn phi_closed_form(&self, n: usize, x: f64) -> Option<Result<f64>> {
        Some(Ok(2.0_f64.sqrt() * (n as f64 * std::f64::consts::PI * x).sin()))
    }
}

/// The polylog family a_n = n^{-k}, with L_a(s) = zeta(s + k).
pub struct PolylogGenerator {
    k: f64,
}

impl PolylogGenerator {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::Domain(format!(
                "polylog order k must be a positive real, got {}",
                k
            )));
        }
        Ok(Self { k })
    }

    pub fn order(&self) -> f64 {
        self.k
    }
}

impl Generator for PolylogGenerator {
    fn name(&self) -> String {
        format!("polylog(k={})", self.k)
    }

    fn coefficients(&self, n: usize) -> Result<CoeffVector> {
        let vals: Vec<f64> = (1..=n.max(1)).map(|i| (i as f64).powf(-self.k)).collect();
        CoeffVector::from_real(&vals)?.with_decay(Decay::new(1.0, self.k))
    }

    fn series(&self, s: Complex64) -> Result<SeriesValue> {
        special::zeta(s + Complex64::new(self.k, 0.0), 1e-10)
    }

    fn poles(&self) -> Vec<Complex64> {
        vec![Complex64::new(1.0 - self.k, 0.0)]
    }

    fn phi_closed_form(&self, n: usize, x: f64) -> Option<Result<f64>> {
        if self.k > 1.0 {
            Some(special::phi_polylog_ext(self.k, n as f64 * x))
        } else {
            None
        }
    }
}

/// A user-supplied coefficient sequence, typically loaded from CSV.
pub struct CoeffGenerator {
    a: CoeffVector,
    label: String,
}

impl CoeffGenerator {
    pub fn new(a: CoeffVector, label: impl Into<String>) -> Self {
        Self {
            a,
            label: label.into(),
        }
    }
}

impl Generator for CoeffGenerator {
    fn name(&self) -> String {
        format!("coeffs({})", self.label)
    }

    fn coefficients(&self, n: usize) -> Result<CoeffVector> {
        self.a.truncated(n)
    }

    fn series(&self, s: Complex64) -> Result<SeriesValue> {
        special::dirichlet_series(&self.a, s, TailPolicy::BestEffort)
    }
}

/// Runtime configuration a factory consumes to build a generator.
#[derive(Debug, Clone, Default)]
pub struct FamilyConfig {
    /// Polylog order.
    pub k: Option<f64>,
    /// Coefficient CSV path.
    pub coeff_path: Option<PathBuf>,
    /// Optional decay certificate (C, k) for coefficient files.
    pub decay: Option<(f64, f64)>,
}

pub type GeneratorFactory = fn(&FamilyConfig) -> Result<Box<dyn Generator>>;

fn make_delta(_cfg: &FamilyConfig) -> Result<Box<dyn Generator>> {
    Ok(Box::new(DeltaGenerator))
}

fn make_polylog(cfg: &FamilyConfig) -> Result<Box<dyn Generator>> {
    let k = cfg
        .k
        .ok_or_else(|| Error::Domain("polylog family requires the order k".into()))?;
    Ok(Box::new(PolylogGenerator::new(k)?))
}

fn make_coeffs(cfg: &FamilyConfig) -> Result<Box<dyn Generator>> {
    let path = cfg
        .coeff_path
        .as_ref()
        .ok_or_else(|| Error::Domain("coeffs family requires a file path".into()))?;
    let mut a = CoeffVector::load_csv(path)?;
    if let Some((c, k)) = cfg.decay {
        a = a.with_decay(Decay::new(c, k))?;
    }
    Ok(Box::new(CoeffGenerator::new(
        a,
        path.display().to_string(),
    )))
}

static REGISTRY: Lazy<BTreeMap<&'static str, GeneratorFactory>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, GeneratorFactory> = BTreeMap::new();
    m.insert("delta", make_delta as GeneratorFactory);
    m.insert("polylog", make_polylog as GeneratorFactory);
    m.insert("coeffs", make_coeffs as GeneratorFactory);
    m
});

pub fn family_names() -> Vec<&'static str> {
    REGISTRY.keys().copied().collect()
}

pub fn make_generator(name: &str, cfg: &FamilyConfig) -> Result<Box<dyn Generator>> {
    let factory = REGISTRY
        .get(name)
        .ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
    factory(cfg)
}
