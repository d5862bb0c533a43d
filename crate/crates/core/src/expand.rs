//! Analysis/synthesis in the dilated system, sine-coefficient extraction, and
//! the half-plane boundedness scan.
//!
//! Analysis against the dual and synthesis from the system are both Dirichlet
//! convolutions in coefficient space, so the round trip
//! `synthesize(analyze(psi)) = psi` is an algebraic identity (a * b = delta),
//! not an approximation.

use std::f64::consts::PI;
use std::io::Write as IoWrite;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::basis::{DilatedSystem, SineVector};
use crate::coeff::{fmt17, CoeffVector};
use crate::dirichlet::divisors;
use crate::error::{Error, Result};
use crate::family::{CoeffGenerator, Generator};
use crate::kahan::{KahanComplex, KahanSum};

// ---------------------------------------------------------------------------
// sine coefficients

/// Quadrature configuration for [`sine_coefficients`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Minimum sample density relative to the highest mode.
    pub points_per_oscillation: usize,
    /// Hard budget on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            points_per_oscillation: 8,
            max_evals: 1 << 24,
        }
    }
}

/// How the coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    /// Type-I discrete sine transform on `points` interior grid points.
    Dst { points: usize },
    /// Composite 8-point Gauss-Legendre with `panels` panels.
    Composite { panels: usize },
}

const GL8_NODES: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// psi_n = int_0^1 psi(x) sqrt2 sin(n pi x) dx for n = 1..=modes.
///
/// Uses a type-I DST on `modes` interior points when `modes + 1` is a power of
/// two (exact for psi in the span of the first `modes` sine modes), composite
/// Gauss-Legendre otherwise.
pub fn sine_coefficients(
    psi: &dyn Fn(f64) -> f64,
    modes: usize,
    quad: &QuadConfig,
) -> Result<SineVector> {
    Ok(sine_coefficients_detailed(psi, modes, quad)?.0)
}

pub fn sine_coefficients_detailed(
    psi: &dyn Fn(f64) -> f64,
    modes: usize,
    quad: &QuadConfig,
) -> Result<(SineVector, QuadMethod)> {
    if modes == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    if (modes + 1).is_power_of_two() {
        if modes > quad.max_evals {
            return Err(Error::Resolution(format!(
                "DST needs {} evaluations, budget is {}",
                modes, quad.max_evals
            )));
        }
        let v = dst_coefficients(psi, modes)?;
        Ok((v, QuadMethod::Dst { points: modes }))
    } else {
        // Panel width pi/(2 N) of sine phase keeps the GL-8 error per panel
        // far below 1e-12.
        let density = quad.points_per_oscillation.max(8);
        let panels = (modes * density / 4).max(16);
        if panels * 8 > quad.max_evals {
            return Err(Error::Resolution(format!(
                "composite rule needs {} evaluations for mode {}, budget is {}",
                panels * 8,
                modes,
                quad.max_evals
            )));
        }
        let v = composite_coefficients(psi, modes, panels)?;
        Ok((v, QuadMethod::Composite { panels }))
    }
}

fn dst_coefficients(psi: &dyn Fn(f64) -> f64, p: usize) -> Result<SineVector> {
    let q = p + 1; // power of two
    let samples: Vec<f64> = (1..=p).map(|j| psi(j as f64 / q as f64)).collect();
    // Exact sine table over a full period; sin(n pi j / q) looked up at
    // (n j) mod 2q so symmetric modes stay bit-identical.
    let table: Vec<f64> = (0..2 * q).map(|r| (PI * r as f64 / q as f64).sin()).collect();
    let coeffs: Vec<Complex64> = (1..=p)
        .into_par_iter()
        .map(|n| {
            let mut acc = KahanSum::new();
            for (j, &f) in samples.iter().enumerate() {
                acc.add(f * table[(n * (j + 1)) % (2 * q)]);
            }
            Complex64::new(2.0_f64.sqrt() / q as f64 * acc.value(), 0.0)
        })
        .collect();
    SineVector::from_complex(coeffs)
}

fn composite_coefficients(psi: &dyn Fn(f64) -> f64, modes: usize, panels: usize) -> Result<SineVector> {
    let h = 1.0 / panels as f64;
    // Sample the integrand once; reuse across modes.
    let mut xs = Vec::with_capacity(panels * 8);
    let mut wf = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for q in 0..8 {
            let x = mid + 0.5 * h * GL8_NODES[q];
            xs.push(x);
            wf.push(0.5 * h * GL8_WEIGHTS[q] * psi(x));
        }
    }
    let coeffs: Vec<Complex64> = (1..=modes)
        .into_par_iter()
        .map(|n| {
            let mut acc = KahanSum::new();
            for (x, w) in xs.iter().zip(&wf) {
                acc.add(w * (n as f64 * PI * x).sin());
            }
            Complex64::new(2.0_f64.sqrt() * acc.value(), 0.0)
        })
        .collect();
    SineVector::from_complex(coeffs)
}

// ---------------------------------------------------------------------------
// analysis / synthesis

/// Expansion of a function in the dilated system.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    /// Coefficients against {phi_n}.
    pub c: CoeffVector,
    /// The analyzed input in the sine basis.
    pub psi: SineVector,
    /// L2 norm of psi - synthesize(c) over the shared truncation.
    pub residual_l2: f64,
}

impl ExpansionResult {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"N\": {}, \"residual_l2\": {}, \"psi_norm\": {}, \"c_norm\": {}}}",
            self.c.len(),
            fmt17(self.residual_l2),
            fmt17(self.psi.norm_l2()),
            fmt17(self.c.norm_l2()),
        )
    }

    pub fn write_coeffs_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,c_re,c_im")?;
        for n in 1..=self.c.len() {
            let v = self.c.get(n);
            writeln!(w, "{},{},{}", n, fmt17(v.re), fmt17(v.im))?;
        }
        Ok(())
    }
}

/// c[n] = sum_{d|n} b[n/d] psi[d]: the pairing <phi~_n, psi>, exact at the
/// shared truncation.
pub fn analyze(sys: &DilatedSystem, psi: &SineVector) -> Result<ExpansionResult> {
    let n_out = psi.len();
    if n_out > sys.truncation() {
        return Err(Error::Length {
            requested: n_out,
            available: sys.truncation(),
        });
    }
    let dual = sys.dual(n_out)?;
    let b = dual.coefficients();
    let mut c = vec![Complex64::new(0.0, 0.0); n_out];
    for n in 1..=n_out {
        let mut acc = KahanComplex::new();
        for d in divisors(n as u64).expect("n >= 1") {
            let d = d as usize;
            acc.add(b.get(n / d) * psi.get(d));
        }
        c[n - 1] = acc.value();
    }
    let c = CoeffVector::new(c)?;
    let back = synthesize(sys, &c)?;
    let mut resid = KahanSum::new();
    for k in 1..=n_out {
        resid.add((psi.get(k) - back.get(k)).norm_sqr());
    }
    Ok(ExpansionResult {
        c,
        psi: psi.clone(),
        residual_l2: resid.value().sqrt(),
    })
}

/// psi[k] = sum_{n|k} a[k/n] c[n].
pub fn synthesize(sys: &DilatedSystem, c: &CoeffVector) -> Result<SineVector> {
    let n_out = c.len();
    if n_out > sys.truncation() {
        return Err(Error::Length {
            requested: n_out,
            available: sys.truncation(),
        });
    }
    let a = sys.generator();
    let mut psi = vec![Complex64::new(0.0, 0.0); n_out];
    for k in 1..=n_out {
        let mut acc = KahanComplex::new();
        for n in divisors(k as u64).expect("k >= 1") {
            let n = n as usize;
            acc.add(a.get(k / n) * c.get(n));
        }
        psi[k - 1] = acc.value();
    }
    SineVector::from_complex(psi)
}

/// Extremes of ||c||_2 / ||psi||_2 over random unit-norm psi on modes <= m.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub trials: usize,
    pub m: usize,
    pub seed: u64,
}

pub fn stability_report(
    sys: &DilatedSystem,
    trials: usize,
    m: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if m == 0 || m > sys.truncation() {
        return Err(Error::Domain(format!(
            "mode support M = {} out of range for N = {}",
            m,
            sys.truncation()
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let mut values: Vec<Complex64> = (0..m)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = KahanSum::sum_iter(values.iter().map(|z| z.norm_sqr())).sqrt();
        for v in &mut values {
            *v /= norm;
        }
        let psi = SineVector::from_complex(values)?;
        let result = analyze(sys, &psi)?;
        let ratio = result.c.norm_l2() / psi.norm_l2();
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    Ok(StabilityReport {
        min_ratio,
        max_ratio,
        trials,
        m,
        seed,
    })
}

// ---------------------------------------------------------------------------
// half-plane scan

/// Rectangle in the open half plane Re(s) > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn symmetric(re_min: f64, re_max: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min: -im_max,
            im_max,
        }
    }

    fn validate(&self) -> Result<()> {
        // The criterion half plane is open; stay at Re(s) >= 0.01.
        if !(self.re_min >= 0.01 - 1e-15) {
            return Err(Error::Domain(format!(
                "scan region must keep Re(s) >= 0.01, got re_min = {}",
                self.re_min
            )));
        }
        if !(self.re_max >= self.re_min && self.im_max >= self.im_min) {
            return Err(Error::Domain("empty scan region".into()));
        }
        Ok(())
    }
}

/// Verdict thresholds on |L_a(s)|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub hi: f64,
    pub lo: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { hi: 1e3, lo: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    UnboundedSuspected,
    NearZeroSuspected,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Bounded => "BOUNDED",
            Verdict::UnboundedSuspected => "UNBOUNDED_SUSPECTED",
            Verdict::NearZeroSuspected => "NEAR_ZERO_SUSPECTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Radius of the pole guard around listed poles of L_a.
pub const POLE_MASK_RADIUS: f64 = 1e-6;

/// Grid extremes of |L_a| over a half-plane rectangle, with verdict.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub region: Region,
    pub step: f64,
    pub min_abs: f64,
    pub max_abs: f64,
    pub argmin: Complex64,
    pub argmax: Complex64,
    pub masked_cells: Vec<Complex64>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        let masked: Vec<String> = self
            .masked_cells
            .iter()
            .map(|s| format!("[{}, {}]", fmt17(s.re), fmt17(s.im)))
            .collect();
        format!(
            "{{\"region\": {{\"re_min\": {}, \"re_max\": {}, \"im_min\": {}, \"im_max\": {}}}, \
             \"step\": {}, \"min_abs\": {}, \"max_abs\": {}, \
             \"argmin\": [{}, {}], \"argmax\": [{}, {}], \
             \"masked_cells\": [{}], \"verdict\": \"{}\", \
             \"thresholds\": {{\"hi\": {}, \"lo\": {}}}}}",
            fmt17(self.region.re_min),
            fmt17(self.region.re_max),
            fmt17(self.region.im_min),
            fmt17(self.region.im_max),
            fmt17(self.step),
            fmt17(self.min_abs),
            fmt17(self.max_abs),
            fmt17(self.argmin.re),
            fmt17(self.argmin.im),
            fmt17(self.argmax.re),
            fmt17(self.argmax.im),
            masked.join(", "),
            self.verdict.as_str(),
            fmt17(self.thresholds.hi),
            fmt17(self.thresholds.lo),
        )
    }
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

struct GridScan {
    min_abs: f64,
    max_abs: f64,
    argmin: Complex64,
    argmax: Complex64,
    masked: Vec<Complex64>,
}

fn scan_grid(
    gen: &dyn Generator,
    res: Vec<f64>,
    ims: Vec<f64>,
    poles: &[Complex64],
) -> Result<Option<GridScan>> {
    let points: Vec<Complex64> = res
        .iter()
        .flat_map(|&re| ims.iter().map(move |&im| Complex64::new(re, im)))
        .collect();
    let values: Vec<Option<f64>> = points
        .par_iter()
        .map(|&s| {
            if poles.iter().any(|&p| (s - p).norm() < POLE_MASK_RADIUS) {
                Ok(None)
            } else {
                gen.series(s).map(|v| Some(v.value.norm()))
            }
        })
        .collect::<Result<_>>()?;
    let mut out: Option<GridScan> = None;
    let mut masked = Vec::new();
    for (s, v) in points.iter().zip(&values) {
        match v {
            None => masked.push(*s),
            Some(v) => match &mut out {
                None => {
                    out = Some(GridScan {
                        min_abs: *v,
                        max_abs: *v,
                        argmin: *s,
                        argmax: *s,
                        masked: Vec::new(),
                    })
                }
                Some(g) => {
                    if *v < g.min_abs {
                        g.min_abs = *v;
                        g.argmin = *s;
                    }
                    if *v > g.max_abs {
                        g.max_abs = *v;
                        g.argmax = *s;
                    }
                }
            },
        }
    }
    if let Some(g) = &mut out {
        g.masked = masked;
    }
    Ok(out)
}

/// Scans |L_a| over the region at the given step, then refines once at
/// step/100 around the grid argmin and argmax. Grid cells within
/// [`POLE_MASK_RADIUS`] of a listed pole are masked and reported.
pub fn halfplane_scan(
    gen: &dyn Generator,
    region: Region,
    step: f64,
    thresholds: Thresholds,
) -> Result<ScanReport> {
    region.validate()?;
    if !(step > 0.0) {
        return Err(Error::Domain("scan step must be positive".into()));
    }
    let poles = gen.poles();
    let res = axis(region.re_min, region.re_max, step);
    let ims = axis(region.im_min, region.im_max, step);
    let coarse = scan_grid(gen, res, ims, &poles)?
        .ok_or_else(|| Error::Domain("scan region masks out every grid cell".into()))?;

    let mut min_abs = coarse.min_abs;
    let mut max_abs = coarse.max_abs;
    let mut argmin = coarse.argmin;
    let mut argmax = coarse.argmax;
    let mut masked = coarse.masked.clone();

    // One refinement pass around each extremum.
    for (center, want_max) in [(coarse.argmax, true), (coarse.argmin, false)] {
        let fine = step / 100.0;
        let res = axis(
            (center.re - step).max(region.re_min),
            (center.re + step).min(region.re_max),
            fine,
        );
        let ims = axis(
            (center.im - step).max(region.im_min),
            (center.im + step).min(region.im_max),
            fine,
        );
        if let Some(g) = scan_grid(gen, res, ims, &poles)? {
            masked.extend(g.masked);
            if want_max {
                if g.max_abs > max_abs {
                    max_abs = g.max_abs;
                    argmax = g.argmax;
                }
            } else if g.min_abs < min_abs {
                min_abs = g.min_abs;
                argmin = g.argmin;
            }
        }
    }

    let verdict = if max_abs > thresholds.hi {
        Verdict::UnboundedSuspected
    } else if min_abs < thresholds.lo {
        Verdict::NearZeroSuspected
    } else if masked.is_empty() {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    Ok(ScanReport {
        region,
        step,
        min_abs,
        max_abs,
        argmin,
        argmax,
        masked_cells: masked,
        verdict,
        thresholds,
    })
}

/// Scan over a raw coefficient sequence, evaluated by the truncated Dirichlet
/// series. Decay metadata is required so the tail is at least estimable.
pub fn halfplane_scan_coeffs(
    a: &CoeffVector,
    region: Region,
    step: f64,
    thresholds: Thresholds,
) -> Result<ScanReport> {
    if a.decay().is_none() {
        return Err(Error::InsufficientDecay(
            "half-plane scan needs decay metadata on the coefficients".into(),
        ));
    }
    let gen = CoeffGenerator::new(a.clone(), "scan");
    halfplane_scan(&gen, region, step, thresholds)
}
