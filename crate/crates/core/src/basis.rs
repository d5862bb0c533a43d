//! The dilated system {phi_n}, its exact biorthogonal dual, Gram matrices and
//! Riesz-bound corridors.
//!
//! Everything here lives in coefficient space over the orthonormal sine basis
//! e_k(x) = sqrt2 sin(k pi x). The change-of-basis operator U has
//! U[k][n] = a[k/n] when n | k, so its columns are the phi_n and the dual
//! columns are finite divisor sums built from the Dirichlet inverse of a.

use std::f64::consts::PI;
use std::io::Write as IoWrite;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeff::{fmt17, CoeffVector, Decay};
use crate::dirichlet::{dirichlet_convolve, dirichlet_inverse, divisors};
use crate::error::{Error, Result};
use crate::family::Generator;
use crate::kahan::{KahanComplex, KahanSum};

/// Coefficients of a function with respect to {e_k}: the canonical function
/// representation of the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct SineVector {
    coeffs: CoeffVector,
}

impl SineVector {
    pub fn new(coeffs: CoeffVector) -> Self {
        Self { coeffs }
    }

    pub fn from_complex(values: Vec<Complex64>) -> Result<Self> {
        Ok(Self {
            coeffs: CoeffVector::new(values)?,
        })
    }

    /// The basis vector e_n itself, padded to length `len`.
    pub fn basis(n: usize, len: usize) -> Result<Self> {
        if n == 0 || n > len {
            return Err(Error::Domain(format!("mode {} out of range 1..={}", n, len)));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); len];
        values[n - 1] = Complex64::new(1.0, 0.0);
        Self::from_complex(values)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, k: usize) -> Complex64 {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &CoeffVector {
        &self.coeffs
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.norm_l2()
    }

    /// Pointwise synthesis sum_k coeffs[k] sqrt2 sin(k pi x), ascending k,
    /// compensated accumulation.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x must lie in [0,1], got {}", x)));
        }
        let mut acc = KahanComplex::new();
        for k in 1..=self.len() {
            let c = self.coeffs.get(k);
            if c != Complex64::new(0.0, 0.0) {
                acc.add(c * 2.0_f64.sqrt() * (k as f64 * PI * x).sin());
            }
        }
        Ok(acc.value())
    }

    /// Values at the uniform grid x_i = i/p, i = 0..p-1, by folding the
    /// coefficients modulo 2p. Agrees with per-point [`SineVector::eval`] on
    /// the same truncation up to rounding, at O(K + p^2) cost instead of
    /// O(K p).
    pub fn eval_grid(&self, p: usize) -> Result<Vec<Complex64>> {
        if p == 0 {
            return Err(Error::Domain("grid size must be >= 1".into()));
        }
        // sin(k pi i / p) has period 2p in k and is odd about k = p.
        let mut folded = vec![KahanComplex::new(); p];
        for k in 1..=self.len() {
            let c = self.coeffs.get(k);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let r = k % (2 * p);
            if r == 0 || r == p {
                continue;
            }
            if r < p {
                folded[r].add(c);
            } else {
                folded[2 * p - r].add(-c);
            }
        }
        let folded: Vec<Complex64> = folded.iter().map(|a| a.value()).collect();
        let mut out = Vec::with_capacity(p);
        for i in 0..p {
            let mut acc = KahanComplex::new();
            for (m, d) in folded.iter().enumerate().skip(1) {
                if *d != Complex64::new(0.0, 0.0) {
                    acc.add(d * 2.0_f64.sqrt() * (m as f64 * PI * i as f64 / p as f64).sin());
                }
            }
            out.push(acc.value());
        }
        Ok(out)
    }
}

/// The dilated system {phi_n} generated by a coefficient sequence with
/// a[1] = 1 after normalization.
#[derive(Debug, Clone)]
pub struct DilatedSystem {
    a: CoeffVector,
    normalization: Complex64,
    family: String,
}

impl DilatedSystem {
    /// Normalizes the generator so that a[1] = 1 exactly and records the
    /// factor. The decay constant is rescaled accordingly.
    pub fn new(a: CoeffVector, family: impl Into<String>) -> Result<Self> {
        let a1 = a.get(1);
        if a1 == Complex64::new(0.0, 0.0) {
            return Err(Error::NonInvertible);
        }
        let decay = a.decay();
        let (a, normalization) = if a1 == Complex64::new(1.0, 0.0) {
            (a, Complex64::new(1.0, 0.0))
        } else {
            let mut scaled = a.scale(Complex64::new(1.0, 0.0) / a1);
            if let Some(d) = decay {
                scaled = scaled.with_decay(Decay::new(d.c / a1.norm() * (1.0 + 1e-12), d.k))?;
            }
            (scaled, a1)
        };
        Ok(Self {
            a,
            normalization,
            family: family.into(),
        })
    }

    pub fn from_generator(gen: &dyn Generator, n: usize) -> Result<Self> {
        Self::new(gen.coefficients(n)?, gen.name())
    }

    pub fn generator(&self) -> &CoeffVector {
        &self.a
    }

    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    /// System truncation N.
    pub fn truncation(&self) -> usize {
        self.a.len()
    }

    /// Column n of the dilation matrix U: coefficient of e_k is a[k/n] when
    /// n | k, zero otherwise.
    pub fn phi_coefficients(&self, n: usize, k_trunc: usize) -> Result<SineVector> {
        if n == 0 || n > self.truncation() || k_trunc > self.truncation() || k_trunc == 0 {
            return Err(Error::Domain(format!(
                "phi index n = {} / truncation {} out of range for N = {}",
                n,
                k_trunc,
                self.truncation()
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); k_trunc];
        let mut k = n;
        while k <= k_trunc {
            values[k - 1] = self.a.get(k / n);
            k += n;
        }
        SineVector::from_complex(values)
    }

    /// The biorthogonal dual, built from the Dirichlet inverse of a.
    pub fn dual(&self, n: usize) -> Result<DualSystem> {
        let b = dirichlet_inverse(&self.a, n)?;
        // invariant: (a * b) = delta to 1e-13 up to n
        let conv = dirichlet_convolve(&self.a, &b, n)?;
        let delta = CoeffVector::delta(n);
        for i in 1..=n {
            if (conv.get(i) - delta.get(i)).norm() > 1e-13 {
                return Err(Error::Numerical(format!(
                    "dual verification failed at index {}: residual {}",
                    i,
                    (conv.get(i) - delta.get(i)).norm()
                )));
            }
        }
        Ok(DualSystem { b })
    }
}

/// Dual coefficients b = a^{-1} under Dirichlet convolution; column n of
/// (U^{-1})^dagger has the finite support {divisors of n}.
#[derive(Debug, Clone)]
pub struct DualSystem {
    b: CoeffVector,
}

impl DualSystem {
    pub fn coefficients(&self) -> &CoeffVector {
        &self.b
    }

    pub fn truncation(&self) -> usize {
        self.b.len()
    }

    /// phi~_n in the sine basis: coefficient of e_d equals conj(b[n/d]) for
    /// each divisor d of n. Exact, no truncation term.
    pub fn dual_coefficients(&self, n: usize) -> Result<SineVector> {
        if n == 0 || n > self.truncation() {
            return Err(Error::Domain(format!(
                "dual index n = {} out of range for N = {}",
                n,
                self.truncation()
            )));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for d in divisors(n as u64).expect("n >= 1") {
            let d = d as usize;
            values[d - 1] = self.b.get(n / d).conj();
        }
        SineVector::from_complex(values)
    }
}

/// max over m, n <= m_max of |<phi~_m, phi_n> - delta_mn|, computed exactly in
/// coefficient space as a finite divisor sum.
pub fn biorthogonality_check(
    sys: &DilatedSystem,
    dual: &DualSystem,
    m_max: usize,
) -> Result<f64> {
    if m_max > sys.truncation() || m_max > dual.truncation() {
        return Err(Error::Length {
            requested: m_max,
            available: sys.truncation().min(dual.truncation()),
        });
    }
    let a = sys.generator();
    let b = dual.coefficients();
    let mut worst: f64 = 0.0;
    for m in 1..=m_max {
        for n in 1..=m_max {
            let mut pairing = Complex64::new(0.0, 0.0);
            if m % n == 0 {
                // <phi~_m, phi_n> = sum_{j | m/n} b[m/(n j)] a[j]
                let q = m / n;
                for j in divisors(q as u64).expect("q >= 1") {
                    let j = j as usize;
                    pairing += b.get(q / j) * a.get(j);
                }
            }
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((pairing - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Truncated Gram matrix with extreme eigenvalues and a tail bound.
#[derive(Debug, Clone)]
pub struct GramSummary {
    pub m_size: usize,
    pub k_trunc: usize,
    /// Row-major Hermitian entries, m_size x m_size.
    pub entries: Vec<Complex64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub cond: f64,
    pub tail_bound: f64,
}

impl GramSummary {
    #[inline]
    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m - 1) * self.m_size + (n - 1)]
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"M\": {}, \"K\": {}, \"lambda_min\": {}, \"lambda_max\": {}, \"cond\": {}, \"tail_bound\": {}}}",
            self.m_size,
            self.k_trunc,
            fmt17(self.lambda_min),
            fmt17(self.lambda_max),
            fmt17(self.cond),
            fmt17(self.tail_bound),
        )
    }

    pub fn write_entries_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "m,n,re,im")?;
        for m in 1..=self.m_size {
            for n in 1..=self.m_size {
                let e = self.entry(m, n);
                writeln!(w, "{},{},{},{}", m, n, fmt17(e.re), fmt17(e.im))?;
            }
        }
        Ok(())
    }
}

/// G[m][n] = sum_{k <= K, lcm(m,n) | k} conj(a[k/m]) a[k/n], with extreme
/// eigenvalues from a converged Hermitian eigensolver.
pub fn gram_matrix(sys: &DilatedSystem, m_size: usize, k_trunc: usize) -> Result<GramSummary> {
    let a = sys.generator();
    let decay = a
        .decay()
        .ok_or_else(|| Error::InsufficientDecay("Gram tail bound needs decay metadata".into()))?;
    if m_size == 0 || k_trunc < m_size || k_trunc > a.len() {
        return Err(Error::Domain(format!(
            "need M <= K <= N, got M = {}, K = {}, N = {}",
            m_size,
            k_trunc,
            a.len()
        )));
    }
    if 2.0 * decay.k <= 1.0 {
        return Err(Error::InsufficientDecay(format!(
            "Gram entries do not converge for decay exponent k = {}",
            decay.k
        )));
    }

    // Lower triangle in parallel; each entry has a fixed ascending summation
    // order so results do not depend on the worker count.
    let pairs: Vec<(usize, usize)> = (1..=m_size)
        .flat_map(|m| (1..=m).map(move |n| (m, n)))
        .collect();
    let computed: Vec<(usize, usize, Complex64, f64)> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let l = lcm(m, n);
            let mut acc = KahanComplex::new();
            if l <= k_trunc {
                let step_m = l / m;
                let step_n = l / n;
                let mut j = 1usize;
                while j * l <= k_trunc {
                    acc.add(a.get(step_m * j).conj() * a.get(step_n * j));
                    j += 1;
                }
            }
            let tail = entry_tail(&decay, m, n, l, k_trunc);
            (m, n, acc.value(), tail)
        })
        .collect();

    let mut entries = vec![Complex64::new(0.0, 0.0); m_size * m_size];
    let mut tails = vec![0.0f64; m_size * m_size];
    for (m, n, v, t) in computed {
        entries[(m - 1) * m_size + (n - 1)] = v;
        entries[(n - 1) * m_size + (m - 1)] = v.conj();
        tails[(m - 1) * m_size + (n - 1)] = t;
        tails[(n - 1) * m_size + (m - 1)] = t;
    }
    // Operator-norm bound on the truncation perturbation via max row sum.
    let tail_bound = (0..m_size)
        .map(|r| KahanSum::sum_iter(tails[r * m_size..(r + 1) * m_size].iter().copied()))
        .fold(0.0f64, f64::max);

    let mat = DMatrix::from_fn(m_size, m_size, |r, c| entries[r * m_size + c]);
    let eig = nalgebra::SymmetricEigen::try_new(mat, 1e-12, 100_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lambda_min = lambda_min.min(l);
        lambda_max = lambda_max.max(l);
    }
    let cond = if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else {
        f64::INFINITY
    };
    Ok(GramSummary {
        m_size,
        k_trunc,
        entries,
        lambda_min,
        lambda_max,
        cond,
        tail_bound,
    })
}

fn entry_tail(decay: &Decay, m: usize, n: usize, l: usize, k_trunc: usize) -> f64 {
    // sum_{k > K, lcm | k} |a[k/m] a[k/n]| <= C^2 (mn)^dk L^{-2 dk} sum_{j > J} j^{-2 dk}
    // with (mn) L^{-2} = gcd(m,n)/L computed as a ratio so steep exponents
    // cannot overflow.
    let dk = decay.k;
    let j_last = (k_trunc / l) as f64;
    let scale = decay.c * decay.c * ((gcd(m, n) as f64) / (l as f64)).powf(dk);
    let tail_sum = if j_last >= 1.0 {
        j_last.powf(1.0 - 2.0 * dk) / (2.0 * dk - 1.0)
    } else {
        1.0 + 1.0 / (2.0 * dk - 1.0)
    };
    scale * tail_sum
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Grid extremes (inf^2, sup^2) of |L_a(1/2 + i t)| over |t| <= t_max.
pub fn riesz_corridor(gen: &dyn Generator, t_max: f64, step: f64) -> Result<(f64, f64)> {
    if !(step > 0.0) {
        return Err(Error::Domain("corridor step must be positive".into()));
    }
    let j_max = (t_max / step).floor() as i64;
    let values: Vec<f64> = (-j_max..=j_max)
        .into_par_iter()
        .map(|j| {
            let s = Complex64::new(0.5, j as f64 * step);
            gen.series(s).map(|v| v.value.norm_sqr())
        })
        .collect::<Result<_>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// max over n <= m_size of the relative coefficient-space residual of
/// phi_n - (U U^dagger) phi~_n, all products truncated at k_trunc.
pub fn bari_g_residual(
    sys: &DilatedSystem,
    dual: &DualSystem,
    m_size: usize,
    k_trunc: usize,
) -> Result<f64> {
    if m_size > dual.truncation() || k_trunc > sys.truncation() || m_size > k_trunc {
        return Err(Error::Domain(format!(
            "need M <= K <= N, got M = {}, K = {}, N = {}",
            m_size,
            k_trunc,
            sys.truncation()
        )));
    }
    let a = sys.generator();
    let mut worst: f64 = 0.0;
    for n in 1..=m_size {
        let tilde = dual.dual_coefficients(n)?;
        // w = U^dagger phi~_n is supported on the divisors of n
        let divs: Vec<usize> = divisors(n as u64)
            .expect("n >= 1")
            .into_iter()
            .map(|d| d as usize)
            .collect();
        let mut w = vec![Complex64::new(0.0, 0.0); divs.len()];
        for (wi, &j) in divs.iter().enumerate() {
            let mut acc = KahanComplex::new();
            for &k in &divs {
                if k % j == 0 && k <= k_trunc {
                    acc.add(a.get(k / j).conj() * tilde.get(k));
                }
            }
            w[wi] = acc.value();
        }
        // v = U w, compared against phi_n up to k_trunc
        let phi = sys.phi_coefficients(n, k_trunc)?;
        let mut num = KahanSum::new();
        let mut den = KahanSum::new();
        for k in 1..=k_trunc {
            let mut acc = KahanComplex::new();
            for (wi, &j) in divs.iter().enumerate() {
                if k % j == 0 && k / j <= a.len() {
                    acc.add(a.get(k / j) * w[wi]);
                }
            }
            let diff = acc.value() - phi.get(k);
            num.add(diff.norm_sqr());
            den.add(phi.get(k).norm_sqr());
        }
        let denom = den.value().sqrt();
        if denom > 0.0 {
            worst = worst.max(num.value().sqrt() / denom);
        }
    }
    Ok(worst)
}

/// Relative errors of the dilation identity and of the generator x f'(x).
#[derive(Debug, Clone, Copy)]
pub struct DilationCheck {
    /// Identity route: f(e^lambda x) against coefficient-space dilation.
    /// Only defined when e^lambda rounds to an integer.
    pub identity_rel_err: Option<f64>,
    /// Central difference of lambda -> f(e^lambda x) at 0 against x f'(x),
    /// relative; f' also by central differences.
    pub generator_rel_err: f64,
}

/// Numerical check of e^{i lambda xp} f(x) = f(e^lambda x) and of its
/// generator x d/dx.
pub fn dilation_generator_check(
    f: &dyn Fn(f64) -> f64,
    x: f64,
    lambda: f64,
    h: f64,
) -> Result<DilationCheck> {
    let scale = lambda.exp();
    let y = scale * x;
    if !(0.0 < x && x < 1.0 && 0.0 < y && y < 1.0) {
        return Err(Error::Domain(format!(
            "dilation check needs x and e^lambda x inside (0,1); got x = {}, e^lambda x = {}",
            x, y
        )));
    }
    if !(h > 0.0 && x + h < 1.0 && x - h > 0.0 && h.exp() * x < 1.0) {
        return Err(Error::Domain("step h leaves the interval".into()));
    }

    let identity_rel_err = {
        let n = scale.round();
        if n >= 1.0 && (scale - n).abs() < 1e-9 {
            let n = n as usize;
            let modes = 64usize;
            let psi = crate::expand::sine_coefficients(f, modes, &crate::expand::QuadConfig::default())?;
            let mut values = vec![Complex64::new(0.0, 0.0); modes * n];
            for k in 1..=modes {
                values[k * n - 1] = psi.get(k);
            }
            let dilated = SineVector::from_complex(values)?;
            let direct = f(y);
            let via_coeffs = dilated.eval(x)?.re;
            Some((via_coeffs - direct).abs() / direct.abs().max(1.0))
        } else {
            None
        }
    };

    let dilation_derivative = (f(h.exp() * x) - f((-h).exp() * x)) / (2.0 * h);
    let fprime = (f(x + h) - f(x - h)) / (2.0 * h);
    let exact = x * fprime;
    let generator_rel_err =
        (dilation_derivative - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);

    Ok(DilationCheck {
        identity_rel_err,
        generator_rel_err,
    })
}
