//! Reference implementations that share no code with the library kernels.
#![allow(dead_code, clippy::too_many_arguments, clippy::type_complexity)]

use std::f64::consts::FRAC_PI_2;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over [a, b].
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Upper tail of Student's t by integrating the unnormalised density after
/// the substitution t = tan(theta), normalised by the same integral over the
/// whole line.
pub fn t_sf_quadrature(t: f64, df: f64) -> f64 {
    let g = move |theta: f64| {
        let c = theta.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let x = theta.tan();
        (1.0 + x * x / df).powf(-(df + 1.0) / 2.0) / (c * c)
    };
    let total = integrate(&g, -FRAC_PI_2, FRAC_PI_2, 1e-14);
    integrate(&g, t.atan(), FRAC_PI_2, 1e-14) / total
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Welch statistic and Satterthwaite degrees of freedom.
pub fn welch_t_df(a: &[f64], b: &[f64]) -> (f64, f64) {
    let va = var(a) / a.len() as f64;
    let vb = var(b) / b.len() as f64;
    let t = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    (t, df)
}

pub fn welch_two_sided_quadrature(a: &[f64], b: &[f64]) -> f64 {
    let (t, df) = welch_t_df(a, b);
    2.0 * t_sf_quadrature(t.abs(), df)
}

/// Exhaustive two-sided permutation p-value of |Welch t| over all splits.
pub fn permutation_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    assert!(n <= 20);
    let observed = welch_t_df(a, b).0.abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (x, y): (Vec<(usize, f64)>, Vec<(usize, f64)>) =
            pooled.iter().copied().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
        let x: Vec<f64> = x.into_iter().map(|p| p.1).collect();
        let y: Vec<f64> = y.into_iter().map(|p| p.1).collect();
        total += 1;
        if welch_t_df(&x, &y).0.abs() >= observed - 1e-12 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

/// Magnitude in dB of the DTFT of `h` at `f_hz`, summed directly.
pub fn dtft_db(h: &[f64], f_hz: f64, fs: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * f_hz / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (n, &c) in h.iter().enumerate() {
        re += c * (w * n as f64).cos();
        im -= c * (w * n as f64).sin();
    }
    20.0 * re.hypot(im).max(1e-300).log10()
}

/// Normal scores for a sample of size `n`, (i + 0.5) / n quantiles, rounded
/// to six places. Well-behaved small samples for the permutation check.
pub const NORMAL_SCORES_8: [f64; 8] = [-1.534121, -0.887147, -0.488776, -0.157311, 0.157311, 0.488776, 0.887147, 1.534121];
pub const NORMAL_SCORES_7: [f64; 7] = [-1.465234, -0.791639, -0.366106, 0.0, 0.366106, 0.791639, 1.465234];
