//! Teleportation of a reference-entangled qubit through the circuit.
//!
//! A reference qubit `R` (the last index) starts in a Bell pair with input
//! site `i`. After evolving the system, every qubit except `R` and an output
//! `j` is measured in the Z basis and the mutual information `I(R; j)` of the
//! post-measurement state is the fidelity. Measurements always act on a
//! working copy.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitConfig;
use crate::diagnostics::{bootstrap_indices, curve_crossing, mean_and_sem, median, percentile, ObservableSeries};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::geometry::{self, GeometryKind};
use crate::tableau::Tableau;

/// Bootstrap resamples used for crossing-time confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// `|0⟩^{N+1}` with H on `R = N` followed by CNOT(R → i).
pub fn prepare_with_reference(n: usize, i: usize) -> Result<Tableau> {
    if i >= n {
        return Err(Error::QubitOutOfRange { index: i, n });
    }
    let mut t = Tableau::new_product_state(n + 1)?;
    t.apply_hadamard(n)?;
    t.apply_cnot(n, i)?;
    Ok(t)
}

/// `I(R; j)` in bits after Z measurements of every qubit other than `R` and
/// `j`, computed by explicit measurement on a copy. `R` is the last qubit.
pub fn conditional_mutual_information_bits(t: &Tableau, j: usize) -> Result<usize> {
    let total = t.n_qubits();
    let r = total - 1;
    if j >= r {
        return Err(Error::QubitOutOfRange { index: j, n: r });
    }
    let mut work = t.clone();
    for q in (0..r).filter(|&q| q != j) {
        work.measure_z(q)?;
    }
    let (s_r, s_j) = (work.entropy_bits_of(&[r]), work.entropy_bits_of(&[j]));
    Ok(s_r + s_j - work.entropy_bits_of(&[j, r]))
}

/// [`conditional_mutual_information_bits`] in nats.
pub fn conditional_mutual_information(t: &Tableau, j: usize) -> Result<f64> {
    Ok(conditional_mutual_information_bits(t, j)? as f64 * LN_2)
}

/// `I(R; j)` in bits for every system site `j` at once.
///
/// After measuring everything but `R` and `j` the pair is in a pure state, so
/// the fidelity is `2 S_R`, and `S_R = 0` exactly when some stabilizer with no
/// X part on the system, no Z part on `j`, and a nontrivial part on `R`
/// exists. Such elements live in the subgroup with vanishing system X bits,
/// which a single elimination exposes for all `j`.
pub fn teleport_fidelities_bits(t: &Tableau) -> Vec<u8> {
    let total = t.n_qubits();
    let n = total - 1;
    let mut rows = t.to_rows();
    let rank = rows.eliminate_leading_columns(n);
    let (xr, zr) = (n, total + n);
    let kernel: Vec<usize> = (rank..total).collect();
    (0..n)
        .map(|j| {
            // Span of the projections onto (z_j, x_R, z_R), as a set of 3-bit masks.
            let mut span: u8 = 1;
            for &row in &kernel {
                let v = rows.get(row, total + j) as u8
                    | (rows.get(row, xr) as u8) << 1
                    | (rows.get(row, zr) as u8) << 2;
                if v != 0 && span & (1 << v) == 0 {
                    let mut grown = span;
                    for u in 0..8 {
                        if span & (1 << u) != 0 {
                            grown |= 1 << (u ^ v);
                        }
                    }
                    span = grown;
                }
            }
            // Masks with z_j = 0 and a nontrivial reference part: 0b010, 0b100, 0b110.
            if span & 0b0101_0100 != 0 {
                0
            } else {
                2
            }
        })
        .collect()
}

/// Input site, output sites and measurement times for a lightcone run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportTask {
    pub config: CircuitConfig,
    pub input_site: usize,
    pub output_sites: Vec<usize>,
    pub measure_times: Vec<usize>,
}

impl TeleportTask {
    /// Input at site 0, every site as output, times `0..=t_max`.
    pub fn new(config: CircuitConfig) -> Self {
        let n = config.n;
        let t_max = config.t_max;
        Self { config, input_site: 0, output_sites: (0..n).collect(), measure_times: (0..=t_max).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let n = self.config.n;
        if let Some(&bad) = std::iter::once(&self.input_site).chain(&self.output_sites).find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { index: bad, n });
        }
        if self.measure_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("measure times must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// One entry of a lightcone map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightconePoint {
    pub t: usize,
    pub j: usize,
    pub linear_distance: usize,
    /// `N |i − j|_2`, i.e. `2^{log2 N − v}`; 0 for `j = i`.
    pub two_adic_distance: usize,
    pub fidelity_mean: f64,
    pub fidelity_sem: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightconeMap {
    pub n: usize,
    pub s: f64,
    pub input_site: usize,
    pub n_traj: usize,
    pub points: Vec<LightconePoint>,
    pub gates_per_site_rate: Option<f64>,
}

impl LightconeMap {
    pub fn fidelity(&self, t: usize, j: usize) -> Option<f64> {
        self.points.iter().find(|p| p.t == t && p.j == j).map(|p| p.fidelity_mean)
    }

    /// Output sites in Monna order of their offset from the input.
    pub fn monna_axis(&self) -> Result<Vec<usize>> {
        let n = self.n;
        let mut sites: Vec<usize> = self.points.iter().map(|p| p.j).collect();
        sites.sort_unstable();
        sites.dedup();
        let mut keyed = sites
            .into_iter()
            .map(|j| Ok((geometry::monna((j + n - self.input_site) % n, n)?, j)))
            .collect::<Result<Vec<_>>>()?;
        keyed.sort_unstable();
        Ok(keyed.into_iter().map(|(_, j)| j).collect())
    }
}

/// `N |i − j|_2` as an integer: the tree scale at which `i` and `j` split.
pub fn scaled_two_adic_distance(i: usize, j: usize, n: usize) -> Result<usize> {
    Ok(match geometry::two_adic_valuation(i, j, n)? {
        None => 0,
        Some(v) => n >> v,
    })
}

/// Per-trajectory fidelities in bits, `[trajectory][time][output]`.
type FidelitySamples = Vec<Vec<Vec<u8>>>;

fn fidelity_samples(task: &TeleportTask) -> Result<(FidelitySamples, Option<f64>)> {
    task.validate()?;
    let n = task.config.n;
    let mut ens = Ensemble::with_initial_state(&task.config, |_| prepare_with_reference(n, task.input_site))?;
    let mut out = vec![Vec::with_capacity(task.measure_times.len()); ens.len()];
    for &t in &task.measure_times {
        while ens.time() < t {
            ens.step();
        }
        let per_traj = ens.observe(|_, tab| {
            let all = teleport_fidelities_bits(tab);
            task.output_sites.iter().map(|&j| all[j]).collect::<Vec<u8>>()
        });
        for (acc, f) in out.iter_mut().zip(per_traj) {
            acc.push(f);
        }
    }
    Ok((out, ens.gates_per_site_rate()))
}

/// Ensemble-mean fidelity for every output site and measurement time.
pub fn lightcone_map(task: &TeleportTask) -> Result<LightconeMap> {
    let (samples, rate) = fidelity_samples(task)?;
    let n = task.config.n;
    let i = task.input_site;
    let mut points = Vec::with_capacity(task.measure_times.len() * task.output_sites.len());
    for (k, &t) in task.measure_times.iter().enumerate() {
        for (o, &j) in task.output_sites.iter().enumerate() {
            let (mean, sem) = mean_and_sem(samples.iter().map(|s| s[k][o] as f64 * LN_2));
            points.push(LightconePoint {
                t,
                j,
                linear_distance: geometry::linear_distance(i, j, n)?,
                two_adic_distance: scaled_two_adic_distance(i, j, n)?,
                fidelity_mean: mean,
                fidelity_sem: sem,
            });
        }
    }
    Ok(LightconeMap { n, s: task.config.s, input_site: i, n_traj: samples.len(), points, gates_per_site_rate: rate })
}

/// Output sites maximally separated from `i`: `i + N/2` in linear distance,
/// or the two neighbours `i ± 1` (2-adic norm 1) whose fidelities are averaged.
pub fn target_sites(kind: GeometryKind, i: usize, n: usize) -> Vec<usize> {
    match kind {
        GeometryKind::Linear => vec![(i + n / 2) % n],
        GeometryKind::Treelike => vec![(i + n - 1) % n, (i + 1) % n],
    }
}

/// Per-trajectory fidelity curves (nats, averaged over the target sites)
/// for times `0..=t_max`, as `[trajectory][time]`.
pub fn target_fidelity_curves(config: &CircuitConfig, kind: GeometryKind, input_site: usize) -> Result<Vec<Vec<f64>>> {
    let task = TeleportTask {
        config: config.clone(),
        input_site,
        output_sites: target_sites(kind, input_site, config.n),
        measure_times: (0..=config.t_max).collect(),
    };
    let (samples, _) = fidelity_samples(&task)?;
    Ok(samples
        .into_iter()
        .map(|traj| {
            traj.into_iter()
                .map(|f| f.iter().map(|&b| b as f64).sum::<f64>() * LN_2 / f.len() as f64)
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalTime {
    pub sizes: Vec<usize>,
    /// Crossing of the curves for `sizes[k]` and `sizes[k + 1]`.
    pub pair_crossings: Vec<Option<f64>>,
    /// Median of the crossings that exist; `None` when there are none.
    pub t_c: Option<f64>,
    /// 2.5 and 97.5 percentiles of the bootstrapped median.
    pub ci: Option<(f64, f64)>,
    /// Ensemble-mean fidelity curve per size.
    pub curves: Vec<ObservableSeries>,
}

impl CriticalTime {
    pub fn ci_width(&self) -> Option<f64> {
        self.ci.map(|(lo, hi)| hi - lo)
    }
}

fn median_crossing(curves: &[ObservableSeries]) -> (Vec<Option<f64>>, Option<f64>) {
    let crossings: Vec<Option<f64>> = curves.windows(2).map(|w| curve_crossing(&w[0], &w[1])).collect();
    let found: Vec<f64> = crossings.iter().flatten().copied().collect();
    (crossings, median(&found))
}

/// Crossing time of target-pair fidelity curves across consecutive sizes.
///
/// `base` supplies `s`, seed, trajectory count and `t_max`; its `n` is
/// replaced by each size in turn.
pub fn critical_time(base: &CircuitConfig, sizes: &[usize], kind: GeometryKind) -> Result<CriticalTime> {
    if sizes.len() < 2 {
        return Err(Error::Underdetermined { needed: 2, got: sizes.len() });
    }
    let times: Vec<f64> = (0..=base.t_max).map(|t| t as f64).collect();
    let samples = sizes
        .iter()
        .map(|&n| {
            let config = CircuitConfig { n, ..base.clone() };
            target_fidelity_curves(&config, kind, 0)
        })
        .collect::<Result<Vec<_>>>()?;
    let curves = samples
        .iter()
        .zip(sizes)
        .map(|(s, n)| ObservableSeries::from_samples(format!("fidelity_N{n}"), times.clone(), s))
        .collect::<Result<Vec<_>>>()?;
    let (pair_crossings, t_c) = median_crossing(&curves);

    let ci = if t_c.is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(base.seed ^ 0x7eb0_07c1);
        let mut medians = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let resampled = samples
                .iter()
                .map(|s| {
                    let rows: Vec<&[f64]> = bootstrap_indices(s.len(), &mut rng).into_iter().map(|k| s[k].as_slice()).collect();
                    ObservableSeries::from_sample_rows("boot", times.clone(), &rows)
                })
                .collect::<Result<Vec<_>>>()?;
            if let (_, Some(m)) = median_crossing(&resampled) {
                medians.push(m);
            }
        }
        percentile(&medians, 0.025).zip(percentile(&medians, 0.975))
    } else {
        None
    };
    Ok(CriticalTime { sizes: sizes.to_vec(), pair_crossings, t_c, ci, curves })
}
