//! Dense statevector reference used to check the tableau.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use sparse_clifford::symplectic::TwoQubitSymplectic;
use sparse_clifford::Tableau;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    P(usize),
    Cnot(usize, usize),
}

/// Generators on a local pair `(i, j)`, as used for the gate words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalGate {
    H0,
    H1,
    P0,
    P1,
    Cnot01,
}

impl LocalGate {
    const ALL: [LocalGate; 5] = [LocalGate::H0, LocalGate::H1, LocalGate::P0, LocalGate::P1, LocalGate::Cnot01];

    fn matrix(self) -> TwoQubitSymplectic {
        match self {
            LocalGate::H0 => TwoQubitSymplectic::hadamard(0),
            LocalGate::H1 => TwoQubitSymplectic::hadamard(1),
            LocalGate::P0 => TwoQubitSymplectic::phase(0),
            LocalGate::P1 => TwoQubitSymplectic::phase(1),
            LocalGate::Cnot01 => TwoQubitSymplectic::cnot(),
        }
    }

    pub fn on(self, i: usize, j: usize) -> Gate {
        match self {
            LocalGate::H0 => Gate::H(i),
            LocalGate::H1 => Gate::H(j),
            LocalGate::P0 => Gate::P(i),
            LocalGate::P1 => Gate::P(j),
            LocalGate::Cnot01 => Gate::Cnot(i, j),
        }
    }
}

/// A shortest word in {H, P, CNOT} for every two-qubit symplectic matrix,
/// found by breadth-first search from the identity.
pub fn gate_words() -> &'static HashMap<TwoQubitSymplectic, Vec<LocalGate>> {
    static WORDS: OnceLock<HashMap<TwoQubitSymplectic, Vec<LocalGate>>> = OnceLock::new();
    WORDS.get_or_init(|| {
        let mut words = HashMap::new();
        words.insert(TwoQubitSymplectic::IDENTITY, Vec::new());
        let mut frontier = vec![TwoQubitSymplectic::IDENTITY];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in frontier {
                for g in LocalGate::ALL {
                    let child = m.then(&g.matrix());
                    if !words.contains_key(&child) {
                        let mut w = words[&m].clone();
                        w.push(g);
                        words.insert(child, w);
                        next.push(child);
                    }
                }
            }
            frontier = next;
        }
        words
    })
}

pub fn expand(m: &TwoQubitSymplectic, i: usize, j: usize) -> Vec<Gate> {
    gate_words()[m].iter().map(|g| g.on(i, j)).collect()
}

/// `2^n` complex amplitudes; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn apply(&mut self, g: Gate) {
        match g {
            Gate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let bit = 1 << q;
                for k in 0..self.amps.len() {
                    if k & bit == 0 {
                        let (a, b) = (self.amps[k], self.amps[k | bit]);
                        self.amps[k] = (a + b) * s;
                        self.amps[k | bit] = (a - b) * s;
                    }
                }
            }
            Gate::P(q) => {
                for (k, a) in self.amps.iter_mut().enumerate() {
                    if k >> q & 1 == 1 {
                        *a *= Complex64::i();
                    }
                }
            }
            Gate::Cnot(c, t) => {
                for k in 0..self.amps.len() {
                    if k >> c & 1 == 1 && k >> t & 1 == 0 {
                        self.amps.swap(k, k | 1 << t);
                    }
                }
            }
        }
    }

    pub fn probability_of_one(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().filter(|(k, _)| k >> q & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects qubit `q` onto `outcome` and renormalizes. Returns false when
    /// that outcome has probability zero (the state is left unchanged).
    pub fn project(&mut self, q: usize, outcome: bool) -> bool {
        let p1 = self.probability_of_one(q);
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p < 1e-9 {
            return false;
        }
        let scale = 1.0 / p.sqrt();
        for (k, a) in self.amps.iter_mut().enumerate() {
            if (k >> q & 1 == 1) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        true
    }

    /// `Tr ρ_A²` of the sites in the bitmask `region`.
    pub fn purity(&self, region: usize) -> f64 {
        let inside: Vec<usize> = (0..self.n).filter(|q| region >> q & 1 == 1).collect();
        let outside: Vec<usize> = (0..self.n).filter(|q| region >> q & 1 == 0).collect();
        let place = |bits: usize, sites: &[usize]| {
            sites.iter().enumerate().fold(0, |acc, (k, &q)| acc | (bits >> k & 1) << q)
        };
        let da = 1 << inside.len();
        let db = 1 << outside.len();
        let mut psi = vec![Complex64::new(0.0, 0.0); da * db];
        for a in 0..da {
            let ia = place(a, &inside);
            for b in 0..db {
                psi[a * db + b] = self.amps[ia | place(b, &outside)];
            }
        }
        let mut total = 0.0;
        for a in 0..da {
            for a2 in 0..da {
                let mut rho = Complex64::new(0.0, 0.0);
                for b in 0..db {
                    rho += psi[a * db + b] * psi[a2 * db + b].conj();
                }
                total += rho.norm_sqr();
            }
        }
        total
    }

    /// Renyi-2 entropy in bits, which must be an integer for a stabilizer
    /// state. The smaller side of the cut is used.
    pub fn renyi2_bits(&self, region: usize) -> usize {
        let full = (1 << self.n) - 1;
        let small = if (region as u32).count_ones() as usize * 2 > self.n { full & !region } else { region };
        let s = -self.purity(small).log2();
        let rounded = s.round();
        assert!((s - rounded).abs() < 1e-6, "non-integer entropy {s}");
        rounded as usize
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Op {
    H(usize),
    P(usize),
    Cnot(usize, usize),
    Sym(usize, usize, TwoQubitSymplectic),
    MeasureZ(usize),
}

pub fn random_program<R: Rng>(n: usize, len: usize, rng: &mut R) -> Vec<Op> {
    let pair = |rng: &mut R| {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        (i, j)
    };
    (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0 | 1 => Op::H(rng.gen_range(0..n)),
            2 | 3 => Op::P(rng.gen_range(0..n)),
            4 | 5 if n > 1 => {
                let (i, j) = pair(rng);
                Op::Cnot(i, j)
            }
            6..=8 if n > 1 => {
                let (i, j) = pair(rng);
                Op::Sym(i, j, TwoQubitSymplectic::sample(rng))
            }
            _ => Op::MeasureZ(rng.gen_range(0..n)),
        })
        .collect()
}

pub fn run_tableau(n: usize, program: &[Op]) -> Tableau {
    let mut t = Tableau::new_product_state(n).unwrap();
    for op in program {
        match *op {
            Op::H(q) => t.apply_hadamard(q).unwrap(),
            Op::P(q) => t.apply_phase(q).unwrap(),
            Op::Cnot(i, j) => t.apply_cnot(i, j).unwrap(),
            Op::Sym(i, j, m) => t.apply_two_qubit_symplectic(i, j, &m).unwrap(),
            Op::MeasureZ(q) => {
                t.measure_z(q).unwrap();
            }
        }
    }
    t
}

/// Runs the program on a statevector. Measurement `k` takes outcome
/// `branches >> k & 1` when that outcome is possible and the other otherwise.
pub fn run_statevector(n: usize, program: &[Op], branches: u64) -> StateVector {
    let mut psi = StateVector::zero(n);
    let mut k = 0;
    for op in program {
        match *op {
            Op::H(q) => psi.apply(Gate::H(q)),
            Op::P(q) => psi.apply(Gate::P(q)),
            Op::Cnot(i, j) => psi.apply(Gate::Cnot(i, j)),
            Op::Sym(i, j, m) => expand(&m, i, j).into_iter().for_each(|g| psi.apply(g)),
            Op::MeasureZ(q) => {
                let want = branches >> (k % 64) & 1 == 1;
                if !psi.project(q, want) {
                    assert!(psi.project(q, !want));
                }
                k += 1;
            }
        }
    }
    psi
}

pub fn measurement_count(program: &[Op]) -> usize {
    program.iter().filter(|op| matches!(op, Op::MeasureZ(_))).count()
}

pub fn sites_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|q| mask >> q & 1 == 1).collect()
}
