//! Exact integer kernels: Moebius function, divisor enumeration, Dirichlet
//! convolution and convolution inverse of coefficient sequences.

use num_complex::Complex64;

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};

/// Moebius function by single-value factorization (trial division).
pub fn mobius(n: u64) -> Result<i32> {
    if n == 0 {
        return Err(Error::Domain("mobius requires n >= 1".into()));
    }
    let mut m = n;
    let mut factors = 0;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return Ok(0);
            }
            factors += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors += 1;
    }
    Ok(if factors % 2 == 0 { 1 } else { -1 })
}

/// Batch Moebius values mu(1..=n_max) via a smallest-prime-factor sieve.
pub fn mobius_sieve(n_max: usize) -> Vec<i32> {
    let mut spf = vec![0usize; n_max + 1];
    let mut primes = Vec::new();
    let mut mu = vec![0i32; n_max + 1];
    if n_max >= 1 {
        mu[1] = 1;
    }
    for i in 2..=n_max {
        if spf[i] == 0 {
            spf[i] = i;
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if p > spf[i] || i * p > n_max {
                break;
            }
            spf[i * p] = p;
            mu[i * p] = if i % p == 0 { 0 } else { -mu[i] };
        }
    }
    mu.remove(0);
    mu
}

/// Ascending divisor list by trial division up to sqrt(n).
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Domain("divisors requires n >= 1".into()));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Ok(small)
}

/// Dirichlet convolution `(a * b)[n] = sum_{d|n} a[d] b[n/d]` for n <= n_out.
///
/// Loop order is "for each d, for each multiple", with ascending d, so the
/// accumulation order per entry is fixed and results are bit-reproducible.
pub fn dirichlet_convolve(a: &CoeffVector, b: &CoeffVector, n_out: usize) -> Result<CoeffVector> {
    for v in [a, b] {
        if n_out > v.len() {
            return Err(Error::Length {
                requested: n_out,
                available: v.len(),
            });
        }
    }
    if n_out == 0 {
        return Err(Error::Domain("convolution length must be >= 1".into()));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n_out];
    for d in 1..=n_out {
        let ad = a.get(d);
        if ad == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut n = d;
        while n <= n_out {
            out[n - 1] += ad * b.get(n / d);
            n += d;
        }
    }
    CoeffVector::new(out)
}

/// Dirichlet inverse by the triangular recursion
/// `b[1] = 1/a[1]`, `b[n] = -(1/a[1]) * sum_{d|n, d<n} b[d] a[n/d]`.
///
/// The Moebius closed form `b[n] = mu(n) a[n]` is not assumed; it only holds
/// for completely multiplicative sequences.
pub fn dirichlet_inverse(a: &CoeffVector, n_out: usize) -> Result<CoeffVector> {
    if n_out > a.len() {
        return Err(Error::Length {
            requested: n_out,
            available: a.len(),
        });
    }
    let a1 = a.get(1);
    if a1 == Complex64::new(0.0, 0.0) {
        return Err(Error::NonInvertible);
    }
    let inv_a1 = Complex64::new(1.0, 0.0) / a1;
    let mut b = vec![Complex64::new(0.0, 0.0); n_out];
    b[0] = inv_a1;
    for n in 2..=n_out {
        let mut acc = Complex64::new(0.0, 0.0);
        for d in divisors(n as u64).expect("n >= 2") {
            let d = d as usize;
            if d == n {
                continue;
            }
            acc += b[d - 1] * a.get(n / d);
        }
        b[n - 1] = -inv_a1 * acc;
    }
    CoeffVector::new(b)
}

/// Complete-multiplicativity report: first index pair (m, n) with
/// `|a[mn] - a[m]a[n]| > tol`, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicativityReport {
    pub verdict: bool,
    pub first_violation: Option<(usize, usize)>,
}

pub fn is_completely_multiplicative(
    a: &CoeffVector,
    n_max: usize,
    tol: f64,
) -> Result<MultiplicativityReport> {
    if n_max > a.len() {
        return Err(Error::Length {
            requested: n_max,
            available: a.len(),
        });
    }
    if a.get(1) == Complex64::new(0.0, 0.0) {
        return Err(Error::NonInvertible);
    }
    for m in 1..=n_max {
        for n in m..=n_max / m {
            if (a.get(m * n) - a.get(m) * a.get(n)).norm() > tol {
                return Ok(MultiplicativityReport {
                    verdict: false,
                    first_violation: Some((m, n)),
                });
            }
        }
    }
    Ok(MultiplicativityReport {
        verdict: true,
        first_violation: None,
    })
}
