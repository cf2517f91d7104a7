//! Ensemble experiments and their tabular records.
//!
//! Each experiment evolves an [`Ensemble`], evaluates an observable on every
//! trajectory, and reduces in trajectory order. Record field names are the
//! CSV column names.

use std::f64::consts::LN_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitConfig;
use crate::diagnostics::{
    bootstrap_indices, entropy_scan_bits, fit_scaling, first_threshold_time, mean_and_sem, median, quarter_regions,
    tripartite_mutual_information_bits, volume_law_threshold, FitModel, FitResult, ObservableSeries,
};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::geometry::{make_region, GeometryKind};
use crate::teleport::{self, TeleportTask, BOOTSTRAP_RESAMPLES};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyScanRecord {
    pub t: usize,
    pub size: usize,
    pub geometry: GeometryKind,
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub entropy_mean_nats: f64,
    pub entropy_sem: f64,
    pub n_traj: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripartiteRecord {
    pub t: usize,
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub geometry: GeometryKind,
    pub tmi_mean_nats: f64,
    pub tmi_sem: f64,
    pub n_traj: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportRecord {
    pub t: usize,
    pub j: usize,
    pub linear_distance: usize,
    pub two_adic_distance: usize,
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub fidelity_mean_nats: f64,
    pub fidelity_sem: f64,
    pub n_traj: usize,
}

/// One size of a scaling study. The fit columns repeat the study-wide fit on
/// every row and are empty when no fit was made.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: f64,
    pub observable: String,
    pub value: Option<f64>,
    pub value_err: Option<f64>,
    pub model: String,
    pub fit_param_1: Option<f64>,
    pub fit_param_2: Option<f64>,
    pub residual: Option<f64>,
}

pub const ENTROPY_SCAN_HEADER: &str = "t,size,geometry,s,N,entropy_mean_nats,entropy_sem,n_traj";
pub const TRIPARTITE_HEADER: &str = "t,s,N,geometry,tmi_mean_nats,tmi_sem,n_traj";
pub const TELEPORT_HEADER: &str = "t,j,linear_distance,two_adic_distance,s,N,fidelity_mean_nats,fidelity_sem,n_traj";
pub const SCALING_HEADER: &str = "N,s,observable,value,value_err,model,fit_param_1,fit_param_2,residual";

/// Entropy scans of contiguous regions from site 0 at times `0..=t_max`,
/// with the measured gate rate.
pub fn entropy_scan_experiment(
    config: &CircuitConfig,
    kind: GeometryKind,
) -> Result<(Vec<EntropyScanRecord>, Option<f64>)> {
    let mut ens = Ensemble::new(config)?;
    let n = config.n;
    let mut out = Vec::with_capacity((config.t_max + 1) * (n - 1));
    loop {
        let scans = ens.observe(|_, t| entropy_scan_bits(t, kind, 0));
        let scans = scans.into_iter().collect::<Result<Vec<_>>>()?;
        for k in 0..n - 1 {
            let (mean, sem) = mean_and_sem(scans.iter().map(|sc| sc[k].1 as f64 * LN_2));
            out.push(EntropyScanRecord {
                t: ens.time(),
                size: k + 1,
                geometry: kind,
                s: config.s,
                n,
                entropy_mean_nats: mean,
                entropy_sem: sem,
                n_traj: ens.len(),
            });
        }
        if ens.time() == config.t_max {
            return Ok((out, ens.gates_per_site_rate()));
        }
        ens.step();
    }
}

/// Per-trajectory TMI of the contiguous quarters, in bits.
fn tmi_bits(ens: &Ensemble, kind: GeometryKind) -> Result<Vec<i64>> {
    let [a, b, c] = quarter_regions(kind, ens.circuit().n())?;
    ens.observe(|_, t| tripartite_mutual_information_bits(t, &a, &b, &c)).into_iter().collect()
}

/// Per-trajectory `S_A` in bits of the contiguous half starting at site 0.
fn half_entropy_bits(ens: &Ensemble, kind: GeometryKind) -> Result<Vec<usize>> {
    let n = ens.circuit().n();
    let half = make_region(kind, 0, n / 2, n)?;
    ens.observe(|_, t| t.renyi_entropy_bits(&half)).into_iter().collect()
}

/// Per-trajectory samples of one observable at successive integer times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSeries {
    pub name: String,
    pub times: Vec<f64>,
    /// `[trajectory][time]`, in nats.
    pub samples: Vec<Vec<f64>>,
    pub gates_per_site_rate: Option<f64>,
}

impl SampledSeries {
    fn new(name: &str, trajectories: usize) -> Self {
        Self { name: name.into(), times: Vec::new(), samples: vec![Vec::new(); trajectories], gates_per_site_rate: None }
    }

    fn push(&mut self, t: usize, values: impl IntoIterator<Item = f64>) {
        self.times.push(t as f64);
        for (row, v) in self.samples.iter_mut().zip(values) {
            row.push(v);
        }
    }

    pub fn statistics(&self) -> Result<ObservableSeries> {
        ObservableSeries::from_samples(self.name.clone(), self.times.clone(), &self.samples)
    }

    pub fn n_traj(&self) -> usize {
        self.samples.len()
    }
}

/// When to stop stepping a series.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Stop {
    AtTime,
    /// Stop once the ensemble mean has fallen to the value.
    MeanBelow(f64),
    /// Stop once the ensemble mean has risen to the value.
    MeanAbove(f64),
}

fn sample_until<F>(config: &CircuitConfig, name: &str, stop: Stop, mut observe: F) -> Result<SampledSeries>
where
    F: FnMut(&Ensemble) -> Result<Vec<f64>>,
{
    let mut ens = Ensemble::new(config)?;
    let mut series = SampledSeries::new(name, ens.len());
    loop {
        let values = observe(&ens)?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        series.push(ens.time(), values);
        let done = match stop {
            Stop::AtTime => false,
            Stop::MeanBelow(v) => mean <= v,
            Stop::MeanAbove(v) => mean >= v,
        };
        if done || ens.time() >= config.t_max {
            break;
        }
        ens.step();
    }
    series.gates_per_site_rate = ens.gates_per_site_rate();
    Ok(series)
}

/// TMI of the contiguous quarters at times `0..=t_max`.
pub fn tripartite_series(config: &CircuitConfig, kind: GeometryKind) -> Result<SampledSeries> {
    sample_until(config, "tmi", Stop::AtTime, |ens| {
        Ok(tmi_bits(ens, kind)?.into_iter().map(|b| b as f64 * LN_2).collect())
    })
}

pub fn tripartite_records(series: &SampledSeries, config: &CircuitConfig, kind: GeometryKind) -> Result<Vec<TripartiteRecord>> {
    let stats = series.statistics()?;
    Ok((0..stats.len())
        .map(|k| TripartiteRecord {
            t: stats.times[k] as usize,
            s: config.s,
            n: config.n,
            geometry: kind,
            tmi_mean_nats: stats.mean[k],
            tmi_sem: stats.sem[k],
            n_traj: stats.n_traj,
        })
        .collect())
}

/// A threshold time of the ensemble mean with trajectory-bootstrap error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTime {
    pub time: Option<f64>,
    /// Standard deviation of the bootstrapped threshold time.
    pub error: Option<f64>,
    /// Median of the per-trajectory threshold times; `None` when fewer than
    /// half the trajectories reached the threshold.
    pub trajectory_median: Option<f64>,
    pub series: SampledSeries,
}

fn threshold_time(series: SampledSeries, threshold: f64, seed: u64) -> Result<ThresholdTime> {
    let stats = series.statistics()?;
    let time = first_threshold_time(&stats, threshold);

    let error = if time.is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb007_57a9);
        let mut boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let rows: Vec<&[f64]> =
                bootstrap_indices(series.n_traj(), &mut rng).into_iter().map(|k| series.samples[k].as_slice()).collect();
            let resampled = ObservableSeries::from_sample_rows("boot", series.times.clone(), &rows)?;
            if let Some(t) = first_threshold_time(&resampled, threshold) {
                boot.push(t);
            }
        }
        let (_, sem) = mean_and_sem(boot.iter().copied());
        // `mean_and_sem` divides by √n; undo it to get the spread.
        (boot.len() >= 2).then(|| sem * (boot.len() as f64).sqrt())
    } else {
        None
    };

    let per_traj: Vec<f64> = series
        .samples
        .iter()
        .map(|row| {
            let one = ObservableSeries::from_means("traj", series.times.clone(), row.clone())?;
            Ok(first_threshold_time(&one, threshold).unwrap_or(f64::INFINITY))
        })
        .collect::<Result<_>>()?;
    let trajectory_median = median(&per_traj).filter(|m| m.is_finite());
    Ok(ThresholdTime { time, error, trajectory_median, series })
}

/// `t0`: first time the ensemble-mean TMI reaches `−ln 2`. Stepping stops
/// at the crossing or at `t_max`.
pub fn t0(config: &CircuitConfig, kind: GeometryKind) -> Result<ThresholdTime> {
    let series = sample_until(config, "tmi", Stop::MeanBelow(-LN_2), |ens| {
        Ok(tmi_bits(ens, kind)?.into_iter().map(|b| b as f64 * LN_2).collect())
    })?;
    threshold_time(series, -LN_2, config.seed)
}

/// `t_vol`: first time the ensemble-mean half-system entropy reaches 95% of
/// its scrambled value.
pub fn t_vol(config: &CircuitConfig, kind: GeometryKind) -> Result<ThresholdTime> {
    let target = volume_law_threshold(config.n)?;
    let series = sample_until(config, "half_entropy", Stop::MeanAbove(target), |ens| {
        Ok(half_entropy_bits(ens, kind)?.into_iter().map(|b| b as f64 * LN_2).collect())
    })?;
    threshold_time(series, target, config.seed)
}

/// Lightcone records from input site `input_site` at times `0..=t_max`,
/// with the measured gate rate.
pub fn teleport_records(config: &CircuitConfig, input_site: usize) -> Result<(Vec<TeleportRecord>, Option<f64>)> {
    let mut task = TeleportTask::new(config.clone());
    task.input_site = input_site;
    let map = teleport::lightcone_map(&task)?;
    let rows = map
        .points
        .iter()
        .map(|p| TeleportRecord {
            t: p.t,
            j: p.j,
            linear_distance: p.linear_distance,
            two_adic_distance: p.two_adic_distance,
            s: config.s,
            n: config.n,
            fidelity_mean_nats: p.fidelity_mean,
            fidelity_sem: p.fidelity_sem,
            n_traj: map.n_traj,
        })
        .collect();
    Ok((rows, map.gates_per_site_rate))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingObservable {
    T0,
    TVol,
}

impl fmt::Display for ScalingObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingObservable::T0 => "t0",
            ScalingObservable::TVol => "t_vol",
        })
    }
}

impl FromStr for ScalingObservable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t0" => Ok(ScalingObservable::T0),
            "t_vol" | "tvol" => Ok(ScalingObservable::TVol),
            other => Err(Error::Invalid(format!("unknown observable '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub observable: ScalingObservable,
    pub s: f64,
    pub sizes: Vec<usize>,
    pub times: Vec<ThresholdTime>,
    /// Fit over the sizes that produced a time; `None` with fewer than three.
    pub fit: Option<FitResult>,
}

impl ScalingStudy {
    pub fn records(&self, model: FitModel) -> Vec<ScalingRecord> {
        let p = |k: usize| self.fit.as_ref().map(|f| f.params[k]);
        self.sizes
            .iter()
            .zip(&self.times)
            .map(|(&n, t)| ScalingRecord {
                n,
                s: self.s,
                observable: self.observable.to_string(),
                value: t.time,
                value_err: t.error,
                model: model.to_string(),
                fit_param_1: p(0),
                fit_param_2: p(1),
                residual: self.fit.as_ref().map(|f| f.residual),
            })
            .collect()
    }
}

/// Measures `observable` at each size and fits `model` to the result.
///
/// `base.n` is replaced by each size; other settings are shared.
pub fn scaling_study(
    base: &CircuitConfig,
    sizes: &[usize],
    kind: GeometryKind,
    observable: ScalingObservable,
    model: FitModel,
) -> Result<ScalingStudy> {
    if sizes.is_empty() {
        return Err(Error::Underdetermined { needed: 1, got: 0 });
    }
    let times = sizes
        .iter()
        .map(|&n| {
            let config = CircuitConfig { n, ..base.clone() };
            match observable {
                ScalingObservable::T0 => t0(&config, kind),
                ScalingObservable::TVol => t_vol(&config, kind),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) =
        sizes.iter().zip(&times).filter_map(|(&n, t)| t.time.map(|v| (n as f64, v))).unzip();
    let fit = if x.len() >= 3 { Some(fit_scaling(&x, &y, model)?) } else { None };
    Ok(ScalingStudy { observable, s: base.s, sizes: sizes.to_vec(), times, fit })
}

/// Crossing-time records in the scaling schema: one `t_c_pair` row per
/// consecutive size pair (labelled by the smaller size) and one `t_c` row
/// labelled by the largest size, whose error is the half-width of the
/// bootstrap interval.
pub fn critical_time_records(ct: &teleport::CriticalTime, s: f64) -> Vec<ScalingRecord> {
    let row = |n: usize, observable: &str, value: Option<f64>, value_err: Option<f64>| ScalingRecord {
        n,
        s,
        observable: observable.into(),
        value,
        value_err,
        model: "crossing".into(),
        fit_param_1: None,
        fit_param_2: None,
        residual: None,
    };
    let mut out: Vec<ScalingRecord> =
        ct.sizes.iter().zip(&ct.pair_crossings).map(|(&n, &c)| row(n, "t_c_pair", c, None)).collect();
    let largest = ct.sizes.iter().copied().max().unwrap_or(0);
    out.push(row(largest, "t_c", ct.t_c, ct.ci.map(|(lo, hi)| (hi - lo) / 2.0)));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EntropyScan,
    Tripartite,
    TeleportLightcone,
    TeleportCritical,
    ScalingStudy,
}

/// One geometry, or both in turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometrySelection {
    Linear,
    Treelike,
    Both,
}

impl GeometrySelection {
    pub fn kinds(self) -> Vec<GeometryKind> {
        match self {
            GeometrySelection::Linear => vec![GeometryKind::Linear],
            GeometrySelection::Treelike => vec![GeometryKind::Treelike],
            GeometrySelection::Both => GeometryKind::ALL.to_vec(),
        }
    }
}

impl FromStr for GeometrySelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(GeometrySelection::Linear),
            "treelike" => Ok(GeometrySelection::Treelike),
            "both" => Ok(GeometrySelection::Both),
            other => Err(Error::Invalid(format!("unknown geometry '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: CircuitConfig,
    pub geometry: GeometrySelection,
    pub output: Option<PathBuf>,
    /// Teleportation input site.
    pub input_site: usize,
    /// System sizes for critical-time and scaling runs.
    pub sizes: Vec<usize>,
    pub observable: Option<ScalingObservable>,
    pub model: FitModel,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, config: CircuitConfig) -> Self {
        Self {
            kind,
            config,
            geometry: GeometrySelection::Linear,
            output: None,
            input_site: 0,
            sizes: Vec::new(),
            observable: None,
            model: FitModel::PowerLaw,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ExperimentKind::TeleportCritical | ExperimentKind::ScalingStudy => {
                let needed = if self.kind == ExperimentKind::TeleportCritical { 2 } else { 1 };
                if self.sizes.len() < needed {
                    return Err(Error::Underdetermined { needed, got: self.sizes.len() });
                }
                for &n in &self.sizes {
                    CircuitConfig { n, ..self.config.clone() }.validate()?;
                }
                if self.kind == ExperimentKind::ScalingStudy && self.observable.is_none() {
                    return Err(Error::Invalid("scaling study needs an observable".into()));
                }
                if self.kind == ExperimentKind::TeleportCritical && self.geometry == GeometrySelection::Both {
                    return Err(Error::Invalid("critical time needs a single geometry".into()));
                }
            }
            ExperimentKind::TeleportLightcone => {
                self.config.validate()?;
                if self.input_site >= self.config.n {
                    return Err(Error::QubitOutOfRange { index: self.input_site, n: self.config.n });
                }
            }
            ExperimentKind::EntropyScan | ExperimentKind::Tripartite => self.config.validate()?,
        }
        Ok(())
    }
}

/// Rows produced by a run, in CSV order.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Records {
    EntropyScan(Vec<EntropyScanRecord>),
    Tripartite(Vec<TripartiteRecord>),
    Teleport(Vec<TeleportRecord>),
    Scaling(Vec<ScalingRecord>),
}

impl Records {
    pub fn header(&self) -> &'static str {
        match self {
            Records::EntropyScan(_) => ENTROPY_SCAN_HEADER,
            Records::Tripartite(_) => TRIPARTITE_HEADER,
            Records::Teleport(_) => TELEPORT_HEADER,
            Records::Scaling(_) => SCALING_HEADER,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Records::EntropyScan(r) => r.len(),
            Records::Tripartite(r) => r.len(),
            Records::Teleport(r) => r.len(),
            Records::Scaling(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub spec: ExperimentSpec,
    pub records: Records,
    /// Measured gate incidences per site per timestep, when a single
    /// ensemble was run.
    pub gates_per_site_rate: Option<f64>,
    pub units: &'static str,
}

pub fn run_ensemble(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let cfg = &spec.config;
    let mut rate = None;
    let records = match spec.kind {
        ExperimentKind::EntropyScan => {
            let mut rows = Vec::new();
            for kind in spec.geometry.kinds() {
                let (scan, r) = entropy_scan_experiment(cfg, kind)?;
                rate = r;
                rows.extend(scan);
            }
            Records::EntropyScan(rows)
        }
        ExperimentKind::Tripartite => {
            let mut rows = Vec::new();
            for kind in spec.geometry.kinds() {
                let series = tripartite_series(cfg, kind)?;
                rate = series.gates_per_site_rate;
                rows.extend(tripartite_records(&series, cfg, kind)?);
            }
            Records::Tripartite(rows)
        }
        ExperimentKind::TeleportLightcone => {
            let (rows, r) = teleport_records(cfg, spec.input_site)?;
            rate = r;
            Records::Teleport(rows)
        }
        ExperimentKind::TeleportCritical => {
            let kind = spec.geometry.kinds()[0];
            let ct = teleport::critical_time(cfg, &spec.sizes, kind)?;
            Records::Scaling(critical_time_records(&ct, cfg.s))
        }
        ExperimentKind::ScalingStudy => {
            let observable = spec.observable.expect("validated");
            let mut rows = Vec::new();
            for kind in spec.geometry.kinds() {
                rows.extend(scaling_study(cfg, &spec.sizes, kind, observable, spec.model)?.records(spec.model));
            }
            Records::Scaling(rows)
        }
    };
    Ok(ExperimentOutput { spec: spec.clone(), records, gates_per_site_rate: rate, units: "nats" })
}
