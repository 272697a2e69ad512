//! Summable weight sequences `{a_n}` and the class-T membership test.
//!
//! Class T: sequences in `l^1` with `0 < a_{n+1} < a_n < 1` and
//! `a_{n+1}/a_n -> 1`. Membership is verified on a finite prefix plus a
//! declared tail rule; this is a documented finite proxy for the limit
//! statements.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    /// `a_n = (n+1)^{-2}`.
    InverseSquare,
    /// `a_n = scale * ((1+shift)/(n+shift))^2`; a slowly decreasing class-T
    /// family whose early entries stay close to `scale`.
    ShiftedQuadratic { scale: f64, shift: f64 },
    /// Finite table continued by the quadratic tail
    /// `a_n = a_K * (K+1)^2/(n+1)^2` for `n > K`.
    Table { values: Vec<f64> },
}

impl WeightSequence {
    /// Desk-scale default for base-2 construction-1 schedules.
    pub fn desk_default() -> WeightSequence {
        WeightSequence::ShiftedQuadratic { scale: 0.95, shift: 60.0 }
    }

    /// `a_n` for `n >= 1`.
    pub fn a(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from n = 1");
        match self {
            WeightSequence::InverseSquare => {
                let x = (n + 1) as f64;
                1.0 / (x * x)
            }
            WeightSequence::ShiftedQuadratic { scale, shift } => {
                let r = (1.0 + shift) / (n as f64 + shift);
                scale * r * r
            }
            WeightSequence::Table { values } => {
                let k = values.len();
                if n <= k {
                    values[n - 1]
                } else {
                    let last = values[k - 1];
                    let ratio = (k + 1) as f64 / (n + 1) as f64;
                    last * ratio * ratio
                }
            }
        }
    }

    /// Upper bound for `sum_{n>=1} a_n` (exact where a closed form exists,
    /// otherwise partial sum plus an integral tail majorant).
    pub fn sum_upper_bound(&self) -> f64 {
        match self {
            WeightSequence::InverseSquare => std::f64::consts::PI.powi(2) / 6.0 - 1.0,
            _ => {
                let cut = 100_000usize;
                let partial: f64 = (1..=cut).map(|n| self.a(n)).sum();
                // every variant decays at least quadratically past the table
                let tail = self.a(cut) * (cut + 1) as f64;
                partial + tail
            }
        }
    }

    /// Class-T membership on a `10^4`-term prefix: strict monotone decrease
    /// inside `(0,1)`, ratios approaching 1 monotonically within the
    /// tabulated range (the quadratic tail rule is class-T by construction),
    /// and summability via the declared tail rule.
    pub fn check_class_t(&self) -> Result<()> {
        let prefix = 10_000usize;
        // the monotone-ratio scan stops at the table/tail seam
        let ratio_scan_end = match self {
            WeightSequence::Table { values } => values.len().max(2),
            _ => prefix,
        };
        let mut prev = self.a(1);
        if !(prev > 0.0 && prev < 1.0) {
            return Err(Error::NotClassT(format!("a_1 = {prev} outside (0,1)")));
        }
        let mut prev_gap = f64::INFINITY;
        for n in 2..=prefix {
            let cur = self.a(n);
            if !(cur > 0.0 && cur < prev) {
                return Err(Error::NotClassT(format!(
                    "monotonicity fails at n = {n}: a_n = {cur}, a_(n-1) = {prev}"
                )));
            }
            if n <= ratio_scan_end {
                let gap = 1.0 - cur / prev;
                if gap > prev_gap + 1e-9 {
                    return Err(Error::NotClassT(format!(
                        "ratio approach to 1 not monotone at n = {n}"
                    )));
                }
                prev_gap = gap;
            }
            prev = cur;
        }
        let last_ratio = self.a(prefix) / self.a(prefix - 1);
        if (1.0 - last_ratio) > 0.01 {
            return Err(Error::NotClassT(format!(
                "ratio a_(n+1)/a_n = {last_ratio} still far from 1 at n = {prefix}"
            )));
        }
        if !self.sum_upper_bound().is_finite() {
            return Err(Error::NotClassT("partial sums unbounded".into()));
        }
        Ok(())
    }
}
