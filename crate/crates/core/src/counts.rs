// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Measured bitstring counts: validation, population estimates and
//! comparison against a reference trace.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::circuit::MeasurementRecord;
use crate::error::{Error, Result};
use crate::linalg::BASIS_LABELS;
use crate::propagator::PopulationTrace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountsFile {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

fn as_count(key: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Counts(format!("`{key}` must be a nonnegative integer, got {v}")))
}

/// Parse `{"00": n, ..., "shots": N}`; keys are 2-bit labels with q0 first.
pub fn parse_counts(json: &str) -> Result<CountsFile> {
    let v: Value = serde_json::from_str(json).map_err(|e| Error::Counts(format!("malformed JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Counts("top level must be an object".into()))?;
    let shots = as_count("shots", obj.get("shots").ok_or_else(|| Error::Counts("missing `shots`".into()))?)?;
    let mut counts = BTreeMap::new();
    for (k, v) in obj {
        if k == "shots" {
            continue;
        }
        if !BASIS_LABELS.contains(&k.as_str()) {
            return Err(Error::Counts(format!("unknown outcome `{k}`; allowed 00, 01, 10, 11")));
        }
        counts.insert(k.clone(), as_count(k, v)?);
    }
    let file = CountsFile { counts, shots };
    file.validate()?;
    Ok(file)
}

impl CountsFile {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Counts("`shots` must be positive".into()));
        }
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return Err(Error::Counts(format!("counts sum to {total} but shots = {}", self.shots)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.counts {
            map.insert(k.clone(), Value::from(*v));
        }
        map.insert("shots".into(), Value::from(self.shots));
        serde_json::to_string_pretty(&Value::Object(map)).expect("counts serialize")
    }
}

impl From<&MeasurementRecord> for CountsFile {
    fn from(r: &MeasurementRecord) -> Self {
        CountsFile {
            counts: r.counts.clone(),
            shots: r.shots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationEstimate {
    pub label: &'static str,
    pub probability: f64,
    /// Binomial 1σ, √(p(1−p)/shots).
    pub sigma: f64,
    /// p is 0 or 1, so the binomial interval has zero width.
    pub zero_width: bool,
}

pub fn estimate_populations(counts: &CountsFile) -> [PopulationEstimate; 4] {
    let n = counts.shots as f64;
    BASIS_LABELS.map(|label| {
        let p = *counts.counts.get(label).unwrap_or(&0) as f64 / n;
        PopulationEstimate {
            label,
            probability: p,
            sigma: (p * (1.0 - p) / n).sqrt(),
            zero_width: p == 0.0 || p == 1.0,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: &'static str,
    pub measured: f64,
    pub sigma: f64,
    pub expected: f64,
    /// (measured − expected) / σ; infinite for a zero-width interval that misses.
    pub pull: f64,
    pub zero_width: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointComparison {
    pub time_us: f64,
    pub shots: u64,
    pub rows: Vec<ComparisonRow>,
}

impl CheckpointComparison {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "checkpoint t = {} us, shots = {} (bit order q0 q1)\nstate  measured  sigma     expected  pull\n",
            self.time_us, self.shots
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:<9.4} {:<9.4} {:<9.4} {:.2}{}",
                r.label,
                r.measured,
                r.sigma,
                r.expected,
                r.pull,
                if r.zero_width { "  (zero-width interval)" } else { "" }
            );
        }
        out
    }
}

/// Side-by-side populations from counts and from `expected` at time `t`.
pub fn ingest_counts(counts: &CountsFile, expected: &PopulationTrace, t: f64) -> Result<CheckpointComparison> {
    counts.validate()?;
    let reference = expected.interpolate(t).ok_or_else(|| {
        Error::config(
            "time",
            format!(
                "checkpoint {t} us lies outside the reference trace [{}, {}]",
                expected.times.first().copied().unwrap_or(f64::NAN),
                expected.times.last().copied().unwrap_or(f64::NAN)
            ),
        )
    })?;
    let rows = estimate_populations(counts)
        .into_iter()
        .zip(reference)
        .map(|(e, want)| {
            let diff = e.probability - want;
            let pull = if e.sigma > 0.0 {
                diff / e.sigma
            } else if diff.abs() < 1e-12 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            };
            ComparisonRow {
                label: e.label,
                measured: e.probability,
                sigma: e.sigma,
                expected: want,
                pull,
                zero_width: e.zero_width,
            }
        })
        .collect();
    Ok(CheckpointComparison {
        time_us: t,
        shots: counts.shots,
        rows,
    })
}
