//! Γ and log-Γ by the Lanczos approximation (g = 7, nine coefficients), with
//! exact factorial tables for integer arguments.

use std::f64::consts::PI;
use std::sync::OnceLock;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest `n` with `n!` finite in `f64`.
pub const MAX_FACTORIAL: usize = 170;

fn factorials() -> &'static [f64; MAX_FACTORIAL + 1] {
    static TABLE: OnceLock<[f64; MAX_FACTORIAL + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_FACTORIAL + 1];
        for i in 1..=MAX_FACTORIAL {
            t[i] = t[i - 1] * i as f64;
        }
        t
    })
}

/// `n!` (infinite beyond 170).
pub fn factorial(n: usize) -> f64 {
    factorials().get(n).copied().unwrap_or(f64::INFINITY)
}

fn as_small_nonneg_int(x: f64) -> Option<usize> {
    (x >= 0.0 && x.fract() == 0.0 && x <= (MAX_FACTORIAL + 1) as f64).then_some(x as usize)
}

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Γ(x) for real `x` (poles at non-positive integers give ±∞/NaN).
pub fn gamma(x: f64) -> f64 {
    if let Some(n) = as_small_nonneg_int(x) {
        if n >= 1 {
            return factorial(n - 1);
        }
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let a = lanczos_sum(x);
    if x > 140.0 {
        return ln_gamma(x + 1.0).exp();
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if let Some(n) = as_small_nonneg_int(x) {
        if n >= 1 {
            return factorial(n - 1).ln();
        }
    }
    if x < 0.5 {
        // reflection; valid for 0 < x < 0.5
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// Pochhammer symbol `(a)_j = a (a+1) ⋯ (a+j−1)` by forward recurrence.
pub fn pochhammer(a: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// `ln (a)_j` for `a > 0`.
pub fn ln_pochhammer(a: f64, j: usize) -> f64 {
    (0..j).map(|i| (a + i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_integer_values() {
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn log_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 1.3, 7.25, 33.3, 120.5] {
            let rel = (ln_gamma(x).exp() - gamma(x)).abs() / gamma(x);
            assert!(rel < 1e-13, "x={x} rel={rel}");
        }
        // Stirling check far out.
        let x: f64 = 1000.5;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x);
        assert!((ln_gamma(x) - stirling).abs() < 1e-9);
    }

    #[test]
    fn pochhammer_basics() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
        assert!((ln_pochhammer(1.5, 4) - pochhammer(1.5, 4).ln()).abs() < 1e-14);
    }
}
