//! BHLD aggregation by (method, crossover) with t-based confidence intervals.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::condition::{NoiseId, SignalId};
use crate::dsp::BoosterMethod;
use crate::error::{Error, Result};
use crate::record::TrialRecord;
use crate::stats::tdist::t_quantile;
use crate::stats::welch::{mean, variance};

pub const CONFIDENCE_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Grouping {
    Overall,
    BySignal,
    ByNoise,
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grouping::Overall => "overall",
            Grouping::BySignal => "by-signal",
            Grouping::ByNoise => "by-noise",
        })
    }
}

impl FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overall" => Ok(Grouping::Overall),
            "by-signal" => Ok(Grouping::BySignal),
            "by-noise" => Ok(Grouping::ByNoise),
            _ => Err(Error::param(format!("unknown grouping `{s}`"))),
        }
    }
}

/// Mean, sample SD and confidence interval of one group. The interval uses
/// df = n - 1; SD and interval are absent when n < 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub grouping: Grouping,
    /// Signal or noise letter for the split groupings.
    pub group: Option<char>,
    pub method: BoosterMethod,
    pub n: usize,
    pub mean_db: f64,
    pub sd_db: Option<f64>,
    pub ci_low_db: Option<f64>,
    pub ci_high_db: Option<f64>,
    pub level: f64,
}

/// (mean, sd, half-width) at the given two-sided level.
pub fn mean_ci(values: &[f64], level: f64) -> Result<(f64, f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Stats("confidence interval needs n >= 2".into()));
    }
    let m = mean(values);
    let sd = variance(values).sqrt();
    let t = t_quantile(0.5 + level / 2.0, (values.len() - 1) as f64)?;
    Ok((m, sd, t * sd / (values.len() as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    pub rows: Vec<StatsRow>,
    /// Expected groups with no trials; these produce no row.
    pub empty_groups: Vec<String>,
}

/// One row per (group, method) over scored records. Rows are ordered by
/// group, then method in canonical order.
pub fn aggregate_bhld(records: &[TrialRecord], grouping: Grouping) -> Result<Aggregation> {
    let key = |r: &TrialRecord| -> Option<char> {
        match grouping {
            Grouping::Overall => None,
            Grouping::BySignal => Some(r.condition.signal.letter()),
            Grouping::ByNoise => Some(r.condition.noise.letter()),
        }
    };
    let mut buckets: BTreeMap<(Option<char>, BoosterMethod), Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.scored) {
        buckets
            .entry((key(r), r.condition.method))
            .or_default()
            .push(r.bhld_db as f64);
    }

    let groups: Vec<Option<char>> = match grouping {
        Grouping::Overall => vec![None],
        Grouping::BySignal => SignalId::ALL.iter().map(|s| Some(s.letter())).collect(),
        Grouping::ByNoise => NoiseId::ALL.iter().map(|n| Some(n.letter())).collect(),
    };
    let mut rows = Vec::new();
    let mut empty_groups = Vec::new();
    for g in groups {
        for method in BoosterMethod::all() {
            let Some(values) = buckets.get(&(g, method)) else {
                empty_groups.push(match g {
                    Some(c) => format!("{grouping} {c} {method}"),
                    None => format!("{grouping} {method}"),
                });
                continue;
            };
            let row = if values.len() >= 2 {
                let (m, sd, half) = mean_ci(values, CONFIDENCE_LEVEL)?;
                StatsRow {
                    grouping,
                    group: g,
                    method,
                    n: values.len(),
                    mean_db: m,
                    sd_db: Some(sd),
                    ci_low_db: Some(m - half),
                    ci_high_db: Some(m + half),
                    level: CONFIDENCE_LEVEL,
                }
            } else {
                StatsRow {
                    grouping,
                    group: g,
                    method,
                    n: values.len(),
                    mean_db: mean(values),
                    sd_db: None,
                    ci_low_db: None,
                    ci_high_db: None,
                    level: CONFIDENCE_LEVEL,
                }
            };
            rows.push(row);
        }
    }
    Ok(Aggregation { rows, empty_groups })
}

/// BHLD values for one method (and optional group), for hypothesis tests.
pub fn bhld_values(records: &[TrialRecord], method: BoosterMethod, filter: impl Fn(&TrialRecord) -> bool) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.scored && r.condition.method == method && filter(r))
        .map(|r| r.bhld_db as f64)
        .collect()
}

pub const FIGURE_HEADER: [&str; 11] = [
    "grouping", "group", "method", "kind", "fc_hz", "n", "mean_db", "sd_db", "ci_low_db", "ci_high_db", "level",
];

/// Per-method rows for plotting. Missing values are empty cells.
pub fn export_figure_data<W: Write>(rows: &[StatsRow], out: W) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIGURE_HEADER)?;
    for r in rows {
        w.write_record([
            r.grouping.to_string(),
            r.group.map(String::from).unwrap_or_default(),
            r.method.to_string(),
            format!("{:?}", r.method.kind()),
            r.method.fc_hz().to_string(),
            r.n.to_string(),
            format!("{:.6}", r.mean_db),
            opt(r.sd_db),
            opt(r.ci_low_db),
            opt(r.ci_high_db),
            r.level.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values_give_degenerate_interval() {
        let (m, sd, half) = mean_ci(&[3.0; 10], 0.95).unwrap();
        assert_eq!((m, sd, half), (3.0, 0.0, 0.0));
        assert!(mean_ci(&[1.0], 0.95).is_err());
    }

    #[test]
    fn empty_export_is_header_only() {
        let mut out = Vec::new();
        export_figure_data(&[], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "grouping,group,method,kind,fc_hz,n,mean_db,sd_db,ci_low_db,ci_high_db,level\n"
        );
    }

    #[test]
    fn grouping_parse() {
        assert_eq!("by-noise".parse::<Grouping>().unwrap(), Grouping::ByNoise);
        assert!("bynoise".parse::<Grouping>().is_err());
    }
}
