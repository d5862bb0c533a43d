//! Finite coefficient sequences indexed from 1, with optional decay metadata.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Power-law decay assertion `|a[n]| <= c * n^(-k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub c: f64,
    pub k: f64,
}

impl Decay {
    pub fn new(c: f64, k: f64) -> Self {
        Self { c, k }
    }

    #[inline]
    pub fn bound(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.k)
    }
}

/// Complex sequence `a[1], ..., a[N]`.
///
/// Holds generator coefficients, dual coefficients, sine coefficients and
/// expansion coefficients alike. Indexing is 1-based through [`CoeffVector::get`];
/// index 0 does not exist.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    values: Vec<Complex64>,
    decay: Option<Decay>,
}

impl CoeffVector {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("CoeffVector length must be >= 1".into()));
        }
        Ok(Self {
            values,
            decay: None,
        })
    }

    /// Attach decay metadata, verifying every stored entry against the bound.
    pub fn with_decay(mut self, decay: Decay) -> Result<Self> {
        // Tiny rounding slack so that entries computed as n^-k pass their own bound.
        for (i, v) in self.values.iter().enumerate() {
            let b = decay.bound(i + 1);
            if v.norm() > b * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::Domain(format!(
                    "entry a[{}] = {} violates asserted decay bound {}",
                    i + 1,
                    v,
                    b
                )));
            }
        }
        self.decay = Some(decay);
        Ok(self)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The Dirichlet unit delta = (1, 0, 0, ...).
    pub fn delta(n: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); n.max(1)];
        values[0] = Complex64::new(1.0, 0.0);
        Self {
            values,
            // Any exponent certifies a sequence that is zero past n = 1; a
            // steep one keeps every downstream tail bound negligible.
            decay: Some(Decay::new(1.0, 300.0)),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based access; panics on index 0 or out of range.
    #[inline]
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    pub fn norm_l2(&self) -> f64 {
        crate::kahan::KahanSum::sum_iter(self.values.iter().map(|z| z.norm_sqr())).sqrt()
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::Length {
                requested: n,
                available: self.len(),
            });
        }
        Ok(Self {
            values: self.values[..n].to_vec(),
            decay: self.decay,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            decay: None,
        }
    }

    /// CSV serialization: header `n,re,im`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, fmt17(v.re), fmt17(v.im))?;
        }
        Ok(())
    }

    pub fn save_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut values = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 && line.starts_with('n') {
                continue;
            }
            let mut parts = line.split(',');
            let bad = || Error::Parse(format!("line {}: `{}`", lineno + 1, line));
            let n: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let im: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if n != values.len() + 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected index {}, found {}",
                    lineno + 1,
                    values.len() + 1,
                    n
                )));
            }
            values.push(Complex64::new(re, im));
        }
        Self::new(values)
    }

    pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(f)
    }
}

/// Locale-independent formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}
