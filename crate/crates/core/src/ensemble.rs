//! Trajectory ensembles with deterministic per-trajectory random streams.
//!
//! Trajectory `k` of a run with master seed `s` draws from ChaCha8 seeded with
//! `s` on stream `k`, so its gate sequence does not depend on how many
//! threads run the ensemble or in which order trajectories are scheduled.
//! Reductions always sum in trajectory-index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, CircuitConfig};
use crate::error::Result;
use crate::tableau::Tableau;

pub type TrajectoryRng = ChaCha8Rng;

/// The random stream owned by trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> TrajectoryRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` for every trajectory index in parallel; results come back in
/// index order.
pub fn run_trajectories<T, F>(trajectories: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut TrajectoryRng) -> T + Sync,
{
    (0..trajectories)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k as u64);
            f(k, &mut rng)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub tableau: Tableau,
    pub rng: TrajectoryRng,
    pub gates: u64,
}

/// All trajectories of one configuration, advanced in lockstep.
///
/// Keeping every tableau alive lets callers stop as soon as an ensemble
/// statistic reaches a target, without fixing `t_max` in advance.
#[derive(Clone, Debug)]
pub struct Ensemble {
    circuit: Circuit,
    trajectories: Vec<Trajectory>,
    time: usize,
}

impl Ensemble {
    /// `trajectories` product states of `config.n` qubits.
    pub fn new(config: &CircuitConfig) -> Result<Self> {
        Self::with_initial_state(config, |_| Tableau::new_product_state(config.n))
    }

    /// Uses `init(k)` as the starting state of trajectory `k`. The state may
    /// carry extra qubits beyond `config.n`; the circuit never touches them.
    pub fn with_initial_state<F>(config: &CircuitConfig, init: F) -> Result<Self>
    where
        F: Fn(usize) -> Result<Tableau>,
    {
        config.validate()?;
        let circuit = Circuit::new(config)?;
        let trajectories = (0..config.trajectories)
            .map(|k| {
                Ok(Trajectory {
                    tableau: init(k)?,
                    rng: trajectory_rng(config.seed, k as u64),
                    gates: 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { circuit, trajectories, time: 0 })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    /// Advances every trajectory by one timestep.
    pub fn step(&mut self) {
        let circuit = &self.circuit;
        self.trajectories.par_iter_mut().for_each(|tr| {
            tr.gates += circuit.step(&mut tr.tableau, &mut tr.rng) as u64;
        });
        self.time += 1;
    }

    /// Evaluates `f` on every trajectory state, in index order.
    pub fn observe<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &Tableau) -> T + Sync,
    {
        self.trajectories
            .par_iter()
            .enumerate()
            .map(|(k, tr)| f(k, &tr.tableau))
            .collect()
    }

    pub fn total_gates(&self) -> u64 {
        self.trajectories.iter().map(|t| t.gates).sum()
    }

    /// Measured gate incidences per site per timestep, averaged over the
    /// ensemble so far. `None` before the first step.
    pub fn gates_per_site_rate(&self) -> Option<f64> {
        if self.time == 0 || self.trajectories.is_empty() {
            return None;
        }
        let incidences = 2.0 * self.total_gates() as f64;
        Some(incidences / (self.circuit.n() * self.time * self.trajectories.len()) as f64)
    }
}
