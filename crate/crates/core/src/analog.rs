//! Feature vectors and metric distance for analog (image) content, plus
//! triangle-inequality migration budgeting.
//!
//! Distance is deliberately not an identity mechanism: there is no
//! equality or "same image" operation here, only a metric and budget
//! arithmetic bounding drift across migrations.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::projection::SensoryImpression;

pub const HISTOGRAM_BINS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalogError {
    #[error("feature vectors have different dimensionality: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Grid-cell mean intensities followed by a normalized global intensity
/// histogram. Intentionally has no equality operation.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    pub dims: Vec<f64>,
    pub source_digest: String,
}

impl FeatureVector {
    /// Comma-separated decimal line with 17 significant digits.
    pub fn to_csv_line(&self) -> String {
        self.dims
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Per-cell mean intensity over an evenly partitioned grid plus a 16-bin
/// global histogram normalized to sum 1.
pub fn feature_vector(
    impression: &SensoryImpression,
    grid_rows: u32,
    grid_cols: u32,
) -> FeatureVector {
    assert!(
        grid_rows >= 1 && grid_cols >= 1,
        "grid must be at least 1x1"
    );
    let (w, h) = (impression.width, impression.height);
    let mut dims = Vec::with_capacity((grid_rows * grid_cols) as usize + HISTOGRAM_BINS);

    for r in 0..grid_rows {
        let y0 = (r as u64 * h as u64 / grid_rows as u64) as u32;
        let y1 = ((r as u64 + 1) * h as u64 / grid_rows as u64) as u32;
        for c in 0..grid_cols {
            let x0 = (c as u64 * w as u64 / grid_cols as u64) as u32;
            let x1 = ((c as u64 + 1) * w as u64 / grid_cols as u64) as u32;
            let area = (y1 - y0) as u64 * (x1 - x0) as u64;
            if area == 0 {
                dims.push(0.0);
                continue;
            }
            let mut sum = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    sum += impression.get(x, y);
                }
            }
            dims.push(sum / area as f64);
        }
    }

    let mut bins = [0u64; HISTOGRAM_BINS];
    let total = w as u64 * h as u64;
    for y in 0..h {
        for x in 0..w {
            let v = impression.get(x, y).clamp(0.0, 1.0);
            let bin = ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            bins[bin] += 1;
        }
    }
    for b in bins {
        dims.push(if total == 0 {
            0.0
        } else {
            b as f64 / total as f64
        });
    }

    let mut hasher = Sha256::new();
    hasher.update(impression.to_pgm());
    let source_digest = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();

    FeatureVector {
        dims,
        source_digest,
    }
}

/// Euclidean distance between two feature vectors.
pub fn distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64, AnalogError> {
    if a.dims.len() != b.dims.len() {
        return Err(AnalogError::DimensionMismatch {
            left: a.dims.len(),
            right: b.dims.len(),
        });
    }
    Ok(a.dims
        .iter()
        .zip(&b.dims)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Running bound on drift from the original across migration steps. By
/// the triangle inequality, the distance from the original after k steps
/// is at most `spent`, the sum of per-step distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationBudget {
    pub threshold: f64,
    pub spent: f64,
}

impl MigrationBudget {
    pub fn new(threshold: f64) -> MigrationBudget {
        assert!(threshold >= 0.0, "threshold must be nonnegative");
        MigrationBudget {
            threshold,
            spent: 0.0,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.spent > self.threshold
    }

    /// Lower bound on budget still available: threshold minus spent.
    pub fn remaining_lower_bound(&self) -> f64 {
        self.threshold - self.spent
    }
}

/// Charge one migration step against the budget.
pub fn migration_budget_update(budget: MigrationBudget, step_distance: f64) -> MigrationBudget {
    assert!(step_distance >= 0.0, "step distance must be nonnegative");
    MigrationBudget {
        threshold: budget.threshold,
        spent: budget.spent + step_distance,
    }
}
