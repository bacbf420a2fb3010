use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::PairScore;
use crate::io::SCHEMA_VERSION;

/// Mean scores over the pairs of one bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub count: usize,
    pub mean_si_sdri_db: f64,
    pub mean_si_sdr_est_db: f64,
    pub mean_si_sdr_mix_db: f64,
}

impl Bucket {
    fn from_scores<'a>(scores: impl Iterator<Item = &'a PairScore>) -> Option<Self> {
        let (mut n, mut i, mut e, mut m) = (0usize, 0.0, 0.0, 0.0);
        for s in scores {
            n += 1;
            i += s.si_sdri_db;
            e += s.si_sdr_est_db;
            m += s.si_sdr_mix_db;
        }
        (n > 0).then(|| Bucket {
            count: n,
            mean_si_sdri_db: i / n as f64,
            mean_si_sdr_est_db: e / n as f64,
            mean_si_sdr_mix_db: m / n as f64,
        })
    }
}

/// The three columns of the results table. Empty buckets are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub all: Option<Bucket>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub only_close_secondary: Option<Bucket>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub no_close_secondary: Option<Bucket>,
}

pub fn aggregate(scores: &[PairScore]) -> BucketSummary {
    BucketSummary {
        all: Bucket::from_scores(scores.iter()),
        only_close_secondary: Bucket::from_scores(scores.iter().filter(|s| s.close_secondary)),
        no_close_secondary: Bucket::from_scores(scores.iter().filter(|s| !s.close_secondary)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub algorithm: String,
    pub summary: BucketSummary,
    pub pairs: Vec<PairScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub pairs_evaluated: usize,
    /// Pair directories skipped by the integrity check, relative to the dataset.
    pub pairs_skipped: Vec<String>,
    pub algorithms: Vec<AlgorithmReport>,
}

impl EvalReport {
    pub fn new(pairs_evaluated: usize, pairs_skipped: Vec<String>, algorithms: Vec<AlgorithmReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pairs_evaluated,
            pairs_skipped,
            algorithms,
        }
    }

    pub fn algorithm(&self, name: &str) -> Option<&AlgorithmReport> {
        self.algorithms.iter().find(|a| a.algorithm == name)
    }

    /// Aligned text table with one row per algorithm.
    pub fn to_table(&self) -> String {
        let header = ["Algorithm", "SI-SDRi [dB] (all)", "(only close secondary)", "(no close secondary)"];
        let cell = |b: &Option<Bucket>| match b {
            Some(b) => format!("{:.2} (n={})", b.mean_si_sdri_db, b.count),
            None => "n/a".to_string(),
        };
        let rows: Vec<[String; 4]> = self
            .algorithms
            .iter()
            .map(|a| {
                [
                    a.algorithm.clone(),
                    cell(&a.summary.all),
                    cell(&a.summary.only_close_secondary),
                    cell(&a.summary.no_close_secondary),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..4)
            .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |cells: [&str; 4], out: &mut String| {
            let _ = write!(out, "{:<w$}", cells[0], w = widths[0]);
            for i in 1..4 {
                let _ = write!(out, " | {:>w$}", cells[i], w = widths[i]);
            }
            out.push('\n');
        };
        line(header, &mut out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for r in &rows {
            line([&r[0], &r[1], &r[2], &r[3]], &mut out);
        }
        let _ = writeln!(out, "pairs evaluated: {}, skipped: {}", self.pairs_evaluated, self.pairs_skipped.len());
        out
    }
}
