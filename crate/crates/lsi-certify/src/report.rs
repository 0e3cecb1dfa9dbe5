//! Shared check-report type: every verification in the toolkit reduces to a
//! worst margin (positive = satisfied) against a stated tolerance.

use serde::Serialize;

/// Outcome of one pointwise/sampled inequality check. `passed` holds exactly
/// when `worst_margin ≥ −tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Most-violated slack across all samples; positive means satisfied.
    pub worst_margin: f64,
    /// Node/time identifier of the worst sample.
    pub worst_location: String,
    /// Number of samples inspected.
    pub samples: usize,
    /// Samples skipped to avoid log singularities or boundary artifacts.
    pub skipped: usize,
    /// Tolerance the margins were compared against.
    pub tolerance: f64,
}

impl CheckReport {
    /// Fold `(margin, location)` samples into a report with the given tolerance.
    pub fn from_margins<I>(name: &str, tolerance: f64, samples: I) -> Self
    where
        I: IntoIterator<Item = (f64, String)>,
    {
        let mut worst_margin = f64::INFINITY;
        let mut worst_location = String::from("none");
        let mut count = 0;
        for (margin, location) in samples {
            count += 1;
            if margin < worst_margin {
                worst_margin = margin;
                worst_location = location;
            }
        }
        if count == 0 {
            worst_margin = 0.0;
        }
        CheckReport {
            name: name.to_string(),
            passed: worst_margin >= -tolerance,
            worst_margin,
            worst_location,
            samples: count,
            skipped: 0,
            tolerance,
        }
    }

    pub fn with_skipped(mut self, skipped: usize) -> Self {
        self.skipped = skipped;
        self
    }
}
