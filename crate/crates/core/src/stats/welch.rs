//! Welch's unequal-variance t-test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::tdist::t_sf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sidedness {
    TwoSided,
    /// Alternative: mean(a) > mean(b).
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub t_statistic: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    pub p_value: f64,
    pub sided: Sidedness,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance (n - 1 denominator).
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

pub fn welch_t_test(a: &[f64], b: &[f64], sided: Sidedness) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Stats(format!(
            "need at least two samples per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Stats("samples must be finite".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let se2 = va + vb;
    if se2 == 0.0 {
        return Err(Error::Stats("both groups have zero variance".into()));
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p = match sided {
        Sidedness::TwoSided => (2.0 * t_sf(t.abs(), df)).min(1.0),
        Sidedness::Greater => t_sf(t, df),
    };
    Ok(TestResult {
        t_statistic: t,
        df,
        p_value: p.clamp(0.0, 1.0),
        sided,
    })
}
