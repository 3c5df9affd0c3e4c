//! Small numeric building blocks shared by the higher-level modules:
//! compensated summation, Gauss-Legendre and tanh-sinh rules, least squares
//! and univariate complex root finding.

use num_complex::Complex64;

/// Kahan-Babuška (Neumaier) compensated accumulator over complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, x.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl FromIterator<Complex64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|&x| mid + half * x).collect(),
        w.iter().map(|&w| half * w).collect(),
    )
}

/// Result of an adaptive tanh-sinh integration.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub value: f64,
    pub error: f64,
    pub levels: usize,
}

/// Tanh-sinh (double exponential) quadrature of `f` over `[a, b]`.
///
/// The integrand receives both the abscissa and its distance to the nearer
/// endpoint (`x - a` or `b - x`), so that endpoint singularities can be
/// evaluated without cancellation.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64, max_level: usize) -> TanhSinh
where
    F: Fn(f64, f64) -> f64,
{
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    // (x, distance to endpoint, weight factor) for abscissa index k at step h.
    let point = |t: f64| -> Option<(f64, f64, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let dist = (b - a) * e / (1.0 + e);
        if dist <= f64::MIN_POSITIVE * 1e10 {
            return None;
        }
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        let x = if t < 0.0 { a + dist } else if t > 0.0 { b - dist } else { mid };
        Some((x, if t == 0.0 { half } else { dist }, w))
    };
    let sum_odd = |h: f64, step: usize| -> f64 {
        // Sum over k ≡ offset (mod step) with k != 0, both signs.
        let mut acc = 0.0;
        let mut comp = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let mut any = false;
            for s in [-1.0, 1.0] {
                if let Some((x, d, w)) = point(s * t) {
                    let v = w * f(x, d);
                    if v.is_finite() {
                        neumaier(&mut acc, &mut comp, v);
                    }
                    if w > 1e-300 {
                        any = true;
                    }
                }
            }
            if !any || t > 6.5 {
                break;
            }
            k += step;
        }
        acc + comp
    };

    let mut h = 1.0;
    let (x0, d0, w0) = point(0.0).expect("midpoint");
    let mut total = w0 * f(x0, d0) + sum_odd(h, 1);
    let mut estimate = h * total;
    let mut error = f64::INFINITY;
    let mut level = 0;
    while level < max_level {
        level += 1;
        h *= 0.5;
        total += sum_odd(h, 2);
        let next = h * total;
        error = (next - estimate).abs();
        estimate = next;
        if level >= 3 && error <= rel_tol * estimate.abs() {
            break;
        }
    }
    TanhSinh {
        value: estimate,
        error,
        levels: level,
    }
}

/// Ordinary least squares `y ≈ X β` for a handful of columns via the normal
/// equations (columns are centred first when an intercept column is present
/// to keep the system well conditioned). Returns `(β, rms residual)`.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let p = columns.len();
    let m = y.len();
    if m < p || columns.iter().any(|c| c.len() != m) {
        return None;
    }
    // Scale each column to unit max-norm to improve conditioning.
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().fold(0.0_f64, |a, &v| a.max(v.abs())).max(1e-300))
        .collect();
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            ata[i][j] = (0..m)
                .map(|r| columns[i][r] / scales[i] * columns[j][r] / scales[j])
                .sum();
        }
        aty[i] = (0..m).map(|r| columns[i][r] / scales[i] * y[r]).sum();
    }
    let beta_scaled = solve_dense(ata, aty)?;
    let beta: Vec<f64> = beta_scaled
        .iter()
        .zip(&scales)
        .map(|(b, s)| b / s)
        .collect();
    let rss: f64 = (0..m)
        .map(|r| {
            let fit: f64 = (0..p).map(|i| beta[i] * columns[i][r]).sum();
            (y[r] - fit).powi(2)
        })
        .sum();
    Some((beta, (rss / m as f64).sqrt()))
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (x, y) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Roots of the univariate polynomial `Σ c_k x^k` (ascending coefficients)
/// by Aberth-Ehrlich iteration. Leading zero coefficients are dropped.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let c: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    if deg == 1 {
        return vec![-c[0]];
    }
    // Cauchy bound for initial radius.
    let radius = 1.0 + c[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Order-preserving map, run on the rayon pool when the `parallel` feature
/// is enabled.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // ∫_{-1}^{1} x^14 dx = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!(x1, vec![0.0]);
        assert!((w1[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = tanh_sinh(|x, d| if x < 0.5 { d.powf(-0.5) } else { x.powf(-0.5) }, 0.0, 1.0, 1e-14, 12);
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn least_squares_recovers_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x - 2.0).collect();
        let (b, res) = least_squares(&[x.clone(), vec![1.0; 10]], &y).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] + 2.0).abs() < 1e-12 && res < 1e-12);
    }

    #[test]
    fn aberth_finds_roots() {
        // (x-1)(x+2)(x-i)
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let c = [2.0 * i, -2.0 - i, 1.0 - i, one].map(|x| x * one);
        let c = [c[0], c[1], c[2], c[3]];
        // expand check: (x-1)(x+2) = x^2 + x - 2; times (x - i) = x^3 + (1-i)x^2 + (-2-i)x + 2i
        let mut r = poly_roots(&c);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - i).norm() < 1e-12);
        assert!((r[2] - one).norm() < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_summation() {
        let xs = [1e16, 1.0, -1e16].map(|x| Complex64::new(x, 0.0));
        let k: KahanSum = xs.iter().copied().collect();
        assert_eq!(k.value().re, 1.0);
    }
}
