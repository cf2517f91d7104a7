//! Ensemble time series, threshold times, and curve crossings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-timestep ensemble statistics for one observable (values in nats).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub name: String,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub sem: Vec<f64>,
    pub n_traj: usize,
}

impl ObservableSeries {
    /// Builds a series from explicit statistics, checking the invariants.
    pub fn new(
        name: impl Into<String>,
        times: Vec<f64>,
        mean: Vec<f64>,
        sem: Vec<f64>,
        n_traj: usize,
    ) -> Result<Self> {
        let s = Self { name: name.into(), times, mean, sem, n_traj };
        s.validate()?;
        Ok(s)
    }

    /// A series with zero uncertainty, mostly for fixtures.
    pub fn from_means(name: impl Into<String>, times: Vec<f64>, mean: Vec<f64>) -> Result<Self> {
        let sem = vec![0.0; mean.len()];
        Self::new(name, times, mean, sem, 1)
    }

    /// Statistics over `samples[trajectory][time]`, summed in trajectory order.
    pub fn from_samples(name: impl Into<String>, times: Vec<f64>, samples: &[Vec<f64>]) -> Result<Self> {
        let refs: Vec<&[f64]> = samples.iter().map(Vec::as_slice).collect();
        Self::from_sample_rows(name, times, &refs)
    }

    pub fn from_sample_rows(name: impl Into<String>, times: Vec<f64>, samples: &[&[f64]]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Invalid("no trajectories".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != times.len()) {
            return Err(Error::Invalid(format!(
                "trajectory has {} samples for {} times",
                bad.len(),
                times.len()
            )));
        }
        let (mean, sem) = (0..times.len())
            .map(|k| mean_and_sem(samples.iter().map(|s| s[k])))
            .unzip();
        Self::new(name, times, mean, sem, samples.len())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if self.mean.len() != n || self.sem.len() != n {
            return Err(Error::Invalid(format!("series '{}' has mismatched lengths", self.name)));
        }
        if self.sem.iter().any(|&s| s.is_nan() || s < 0.0) {
            return Err(Error::Invalid(format!("series '{}' has a negative sem", self.name)));
        }
        if self.times.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::Invalid(format!("series '{}' times not increasing", self.name)));
        }
        Ok(())
    }

    /// Linear interpolation of the mean; `None` outside the sampled range.
    pub fn mean_at(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t < first || t > last {
            return None;
        }
        let k = self.times.partition_point(|&x| x < t);
        if self.times[k] == t {
            return Some(self.mean[k]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (y0, y1) = (self.mean[k - 1], self.mean[k]);
        Some(y0 + (y1 - y0) * (t - t0) / (t1 - t0))
    }
}

/// Sample mean and standard error (`stddev / √n`, with the `n − 1`
/// estimator). The error is 0 for a single value.
pub fn mean_and_sem(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Sign of `x` with exact zero kept distinct.
fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// First time the ensemble mean reaches `threshold`, linearly interpolated
/// between the bracketing samples; `None` if it never does.
///
/// The crossing direction is fixed by the first sample: a series starting
/// above the threshold must fall to it, one starting below must rise to it.
pub fn first_threshold_time(series: &ObservableSeries, threshold: f64) -> Option<f64> {
    let start = sign(*series.mean.first()? - threshold);
    if start == 0 {
        return Some(series.times[0]);
    }
    for k in 1..series.len() {
        let d = series.mean[k] - threshold;
        if sign(d) != start {
            let (t0, t1) = (series.times[k - 1], series.times[k]);
            let d0 = series.mean[k - 1] - threshold;
            return Some(t0 + (t1 - t0) * d0 / (d0 - d));
        }
    }
    None
}

/// Earliest time at which `curve1 − curve2` strictly changes sign.
///
/// Both curves are compared on the union of their sample times inside the
/// overlapping range. Touching without changing sign does not count; when the
/// difference sits at zero before flipping, the first zero time is returned.
pub fn curve_crossing(curve1: &ObservableSeries, curve2: &ObservableSeries) -> Option<f64> {
    let lo = curve1.times.first()?.max(*curve2.times.first()?);
    let hi = curve1.times.last()?.min(*curve2.times.last()?);
    if lo > hi {
        return None;
    }
    let mut grid: Vec<f64> = curve1
        .times
        .iter()
        .chain(&curve2.times)
        .copied()
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut last: Option<(f64, f64, i8)> = None;
    let mut first_zero: Option<f64> = None;
    for &t in &grid {
        let d = curve1.mean_at(t)? - curve2.mean_at(t)?;
        let sd = sign(d);
        if sd == 0 {
            if last.is_some() && first_zero.is_none() {
                first_zero = Some(t);
            }
            continue;
        }
        if let Some((t_prev, d_prev, s_prev)) = last {
            if sd != s_prev {
                return Some(match first_zero {
                    Some(z) => z,
                    None => t_prev + (t - t_prev) * d_prev / (d_prev - d),
                });
            }
        }
        last = Some((t, d, sd));
        first_zero = None;
    }
    None
}

/// Resamples `n` trajectory indices with replacement.
pub fn bootstrap_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Percentile (`q` in `[0, 1]`) by linear interpolation on sorted values.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

pub fn median(values: &[f64]) -> Option<f64> {
    percentile(values, 0.5)
}
