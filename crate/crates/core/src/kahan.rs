//! Compensated (Neumaier) accumulators used by every summation in the crate.
//!
//! Accumulation order is always the caller's iteration order, so results are
//! reproducible across runs and across thread counts as long as the caller
//! feeds terms in a fixed order.

use num_complex::Complex64;

/// Neumaier variant of Kahan summation for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Componentwise compensated accumulator for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn sum_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 under naive summation.
        let s = KahanSum::sum_iter([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn complex_matches_componentwise() {
        let terms: Vec<Complex64> = (1..=1000)
            .map(|n| Complex64::new(1.0 / n as f64, -1.0 / (n * n) as f64))
            .collect();
        let s = KahanComplex::sum_iter(terms.iter().copied());
        let re = KahanSum::sum_iter(terms.iter().map(|z| z.re));
        let im = KahanSum::sum_iter(terms.iter().map(|z| z.im));
        assert_eq!(s, Complex64::new(re, im));
    }
}
