//! Sinc basis, its indefinite integral and the sine integral.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation index `N` and mesh size `h`; the basis has `2N + 1` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincGrid {
    truncation: usize,
    step: f64,
}

impl SincGrid {
    pub fn new(truncation: usize, step: f64) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Parameter("truncation index N must be >= 1".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parameter(format!(
                "mesh size must be positive, got {step}"
            )));
        }
        Ok(Self { truncation, step })
    }

    /// `N`.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `h`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// `n = 2N + 1`.
    pub fn len(&self) -> usize {
        2 * self.truncation + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Logical indices `-N..=N`, in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.truncation as i64;
        -n..=n
    }

    /// Storage position of logical index `j`.
    pub fn slot(&self, j: i64) -> usize {
        (j + self.truncation as i64) as usize
    }
}

const SINC_SERIES_THRESHOLD: f64 = 1e-8;

#[inline]
fn sinc_scaled(z: f64) -> f64 {
    if z.abs() < SINC_SERIES_THRESHOLD {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// `S(j,h)(x) = sin(π(x - jh)/h) / (π(x - jh)/h)`.
pub fn sinc_basis(j: i64, h: f64, x: f64) -> f64 {
    sinc_scaled(PI * (x - j as f64 * h) / h)
}

/// `Σ_j coeffs[j] S(j,h)(x)` over `j = -N..=N`, where `coeffs` has length `2N + 1`.
///
/// Uses a single sine evaluation: with `z = x/h = m + r`, `|r| <= 1/2`,
/// `sin(π(z - j)) = (-1)^(m-j) sin(πr)`.
pub fn sinc_sum(h: f64, x: f64, coeffs: &[f64]) -> f64 {
    debug_assert!(coeffs.len() % 2 == 1);
    let n = (coeffs.len() / 2) as i64;
    let z = x / h;
    if !z.is_finite() {
        return 0.0;
    }
    if z.abs() > 2f64.powi(52) {
        return 0.0;
    }
    let m = z.round();
    let r = z - m;
    let sin_r = (PI * r).sin();
    // sign of (-1)^(m - j) for j = -N
    let mut sign = if ((m as i64) + n).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let mut acc = 0.0;
    for (slot, &c) in coeffs.iter().enumerate() {
        let j = slot as i64 - n;
        if c != 0.0 {
            let d = PI * ((m - j as f64) + r);
            let basis = if d.abs() < SINC_SERIES_THRESHOLD {
                sinc_scaled(d)
            } else {
                sign * sin_r / d
            };
            acc += c * basis;
        }
        sign = -sign;
    }
    acc
}

thread_local! {
    static SI_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of sine-integral evaluations made on the current thread.
pub fn sine_integral_calls() -> u64 {
    SI_CALLS.with(Cell::get)
}

pub fn reset_sine_integral_calls() {
    SI_CALLS.with(|c| c.set(0));
}

/// `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("sine integral of non-finite {x}")));
    }
    Ok(si(x))
}

/// Sine integral for finite arguments.
pub(crate) fn si(x: f64) -> f64 {
    SI_CALLS.with(|c| c.set(c.get() + 1));
    let ax = x.abs();
    let value = if ax <= 4.0 {
        si_series(ax)
    } else {
        si_asymptotic(ax)
    };
    value.copysign(x)
}

fn si_series(x: f64) -> f64 {
    // Σ (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        let contrib = term / (2.0 * k + 3.0);
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum
}

// Modified Lentz evaluation of the continued fraction for E1(ix); then
// Si(x) = π/2 + Im(e^{-ix} E1-part).
fn si_asymptotic(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    let h = Complex64::new(x.cos(), -x.sin()) * h;
    FRAC_PI_2 + h.im
}

/// `J(j,h)(x) = h (1/2 + Si(π(x - jh)/h) / π)`, the antiderivative of `S(j,h)` vanishing at -∞.
pub fn indefinite_basis(j: i64, h: f64, x: f64) -> f64 {
    if x == f64::INFINITY {
        return h;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    h * (0.5 + si(PI * (x - j as f64 * h) / h) / PI)
}

/// `δ_k = 1/2 + Si(πk)/π`, so that `J(j,h)(ih) = h δ_{i-j}`.
pub fn delta_weight(k: i64) -> f64 {
    0.5 + si(PI * k as f64) / PI
}

/// `δ_k` for `k = -span..=span`, stored at `k + span`.
pub fn delta_table(span: usize) -> Vec<f64> {
    let s = span as i64;
    (-s..=s).map(delta_weight).collect()
}
