//! Sparse bricklayer circuits with power-of-two gate distances.
//!
//! Sites `i` and `j = i + 2^{m−1} (mod N)` may interact for `m = 1..=log₂N`.
//! A block of parity `π` visits, for each `m`, every site `i` with
//! `⌊i / 2^{m−1}⌋ mod 2 = π` and fires a uniformly random two-qubit Clifford
//! on `(i, j)` with probability `p(2^{m−1}, s) = r^s / N_s`. One timestep is an
//! even block followed by an odd block.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::log2_size;
use crate::symplectic::TwoQubitSymplectic;
use crate::tableau::Tableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Order in which distance layers are visited inside a block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerOrder {
    /// `m = 1, 2, …, log₂N`.
    #[default]
    ShortestFirst,
    LongestFirst,
}

/// Where the distance-`N/2` layer is placed. Its even and odd candidate sets
/// contain the same physical pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfSystemLayer {
    /// Once per timestep, in the even block.
    #[default]
    EvenBlockOnly,
    /// In both blocks, as the parity rule alone would give.
    BothBlocks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub n: usize,
    pub s: f64,
    pub seed: u64,
    pub trajectories: usize,
    pub t_max: usize,
    #[serde(default)]
    pub layer_order: LayerOrder,
    #[serde(default)]
    pub half_system_layer: HalfSystemLayer,
}

impl CircuitConfig {
    pub fn new(n: usize, s: f64) -> Self {
        Self {
            n,
            s,
            seed: 0,
            trajectories: 1,
            t_max: 1,
            layer_order: LayerOrder::default(),
            half_system_layer: HalfSystemLayer::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trajectories(mut self, trajectories: usize) -> Self {
        self.trajectories = trajectories;
        self
    }

    pub fn with_t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        log2_size(self.n)?;
        if self.n < 4 {
            return Err(Error::SystemTooSmall { n: self.n, min: 4 });
        }
        if !self.s.is_finite() {
            return Err(Error::Invalid(format!("exponent s = {} is not finite", self.s)));
        }
        if self.trajectories == 0 {
            return Err(Error::Invalid("trajectories must be at least 1".into()));
        }
        if self.t_max == 0 {
            return Err(Error::Invalid("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<u32> {
    let bits = log2_size(n)?;
    if n < 4 {
        return Err(Error::SystemTooSmall { n, min: 4 });
    }
    Ok(bits)
}

/// `N_s = ½ ((N/2)^s + 2 Σ_{k=0}^{log₂N−2} 2^{ks})`.
pub fn normalization(n: usize, s: f64) -> Result<f64> {
    let bits = check_size(n)?;
    let sum: f64 = (0..=bits as i32 - 2).map(|k| 2f64.powf(k as f64 * s)).sum();
    Ok(0.5 * ((n as f64 / 2.0).powf(s) + 2.0 * sum))
}

/// `r^s / N_s` for power-of-two `r`, and 0 for other distances.
///
/// This is the raw formula; see [`firing_probability`] for the value used to
/// draw gates.
pub fn gate_probability(r: usize, s: f64, n: usize) -> Result<f64> {
    check_size(n)?;
    if r == 0 || r > n / 2 {
        return Err(Error::InvalidDistance { r, n });
    }
    if !r.is_power_of_two() {
        return Ok(0.0);
    }
    Ok((r as f64).powf(s) / normalization(n, s)?)
}

/// [`gate_probability`] clamped to 1.
pub fn firing_probability(r: usize, s: f64, n: usize) -> Result<f64> {
    let p = gate_probability(r, s, n)?;
    if p > 1.0 {
        log::warn!("gate probability {p:.4} at r = {r}, s = {s}, N = {n} exceeds 1; clamping");
        Ok(1.0)
    } else {
        Ok(p)
    }
}

/// Candidate pairs `(i, i + 2^{m−1} mod N)` for sites with
/// `⌊i / 2^{m−1}⌋ mod 2` equal to the parity bit.
pub fn candidate_pairs(n: usize, m: usize, parity: Parity) -> Result<Vec<(usize, usize)>> {
    let bits = check_size(n)? as usize;
    if m == 0 || m > bits {
        return Err(Error::InvalidLayer { m, max: bits });
    }
    let d = 1usize << (m - 1);
    Ok((0..n)
        .filter(|&i| (i / d) % 2 == parity.bit())
        .map(|i| (i, (i + d) % n))
        .collect())
}

/// One `(m, parity)` layer of candidate positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub m: usize,
    pub distance: usize,
    pub parity: Parity,
    pub probability: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// A gate drawn for one candidate position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateEvent {
    pub layer: usize,
    pub i: usize,
    pub j: usize,
    pub gate: TwoQubitSymplectic,
}

/// The precomputed block schedule for one `(N, s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    s: f64,
    even: Vec<Layer>,
    odd: Vec<Layer>,
}

impl Circuit {
    pub fn new(config: &CircuitConfig) -> Result<Self> {
        let bits = check_size(config.n)? as usize;
        let (n, s) = (config.n, config.s);
        let build = |parity: Parity| -> Result<Vec<Layer>> {
            let mut ms: Vec<usize> = (1..=bits).collect();
            if parity == Parity::Odd && config.half_system_layer == HalfSystemLayer::EvenBlockOnly {
                ms.pop();
            }
            if config.layer_order == LayerOrder::LongestFirst {
                ms.reverse();
            }
            ms.into_iter()
                .map(|m| {
                    let distance = 1 << (m - 1);
                    Ok(Layer {
                        m,
                        distance,
                        parity,
                        probability: firing_probability(distance, s, n)?,
                        pairs: candidate_pairs(n, m, parity)?,
                    })
                })
                .collect()
        };
        Ok(Self { n, s, even: build(Parity::Even)?, odd: build(Parity::Odd)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn layers(&self, parity: Parity) -> &[Layer] {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// Expected number of gates touching a given site in one timestep.
    pub fn expected_incident_gates_per_step(&self) -> f64 {
        self.even
            .iter()
            .chain(&self.odd)
            .map(|l| l.probability * 2.0 * l.pairs.len() as f64 / self.n as f64)
            .sum()
    }

    /// Draws the gates of one block in schedule order and hands each to `f`.
    ///
    /// Each candidate consumes one Bernoulli draw, followed by one group-index
    /// draw when it fires.
    pub fn for_each_gate<R, F>(&self, parity: Parity, rng: &mut R, mut f: F) -> usize
    where
        R: Rng + ?Sized,
        F: FnMut(GateEvent),
    {
        let mut count = 0;
        for (layer, l) in self.layers(parity).iter().enumerate() {
            if l.probability <= 0.0 {
                continue;
            }
            for &(i, j) in &l.pairs {
                if rng.gen_bool(l.probability) {
                    f(GateEvent { layer, i, j, gate: TwoQubitSymplectic::sample(rng) });
                    count += 1;
                }
            }
        }
        count
    }

    /// Applies one block to the first `N` qubits of `t`; returns the gate count.
    ///
    /// `t` may carry extra qubits (e.g. a reference); they are never touched.
    pub fn apply_block<R: Rng + ?Sized>(&self, t: &mut Tableau, parity: Parity, rng: &mut R) -> usize {
        assert!(t.n_qubits() >= self.n, "tableau has fewer qubits than the circuit");
        self.for_each_gate(parity, rng, |e| t.apply_symplectic_unchecked(e.i, e.j, &e.gate))
    }

    /// One timestep: even block then odd block.
    pub fn step<R: Rng + ?Sized>(&self, t: &mut Tableau, rng: &mut R) -> usize {
        self.apply_block(t, Parity::Even, rng) + self.apply_block(t, Parity::Odd, rng)
    }
}
