//! Two-qubit Clifford gates modulo Paulis and phases, i.e. the 720 elements
//! of Sp(4, GF(2)).
//!
//! A gate acts on the bit 4-vector `(x_i, x_j, z_i, z_j)` of every tableau
//! row. Row `k` of the matrix is stored as a 4-bit mask so that the `k`-th
//! output bit is the parity of `mask & input`.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Order of Sp(4, GF(2)).
pub const GROUP_ORDER: usize = 720;

/// Bit positions in the local 4-vector.
pub const XI: usize = 0;
pub const XJ: usize = 1;
pub const ZI: usize = 2;
pub const ZJ: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoQubitSymplectic {
    rows: [u8; 4],
}

impl TwoQubitSymplectic {
    pub const IDENTITY: Self = Self { rows: [0b0001, 0b0010, 0b0100, 0b1000] };

    /// Returns `None` unless the rows are 4-bit masks forming a symplectic matrix.
    pub fn from_rows(rows: [u8; 4]) -> Option<Self> {
        let m = Self { rows };
        (rows.iter().all(|&r| r < 16) && m.is_symplectic()).then_some(m)
    }

    pub fn rows(&self) -> [u8; 4] {
        self.rows
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> bool {
        (self.rows[row] >> col) & 1 == 1
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self { rows: [0b0001, 0b0011, 0b1100, 0b1000] }
    }

    /// CNOT with the second qubit as control.
    pub fn cnot_reversed() -> Self {
        Self { rows: [0b0011, 0b0010, 0b0100, 0b1100] }
    }

    /// Hadamard on local qubit `q` (0 or 1).
    pub fn hadamard(q: usize) -> Self {
        let mut rows = Self::IDENTITY.rows;
        rows[q] = 1 << (q + 2);
        rows[q + 2] = 1 << q;
        Self { rows }
    }

    /// Phase gate on local qubit `q` (0 or 1).
    pub fn phase(q: usize) -> Self {
        let mut rows = Self::IDENTITY.rows;
        rows[q + 2] |= 1 << q;
        Self { rows }
    }

    pub fn swap() -> Self {
        Self { rows: [0b0010, 0b0001, 0b1000, 0b0100] }
    }

    /// Image of a packed 4-bit vector.
    #[inline]
    pub fn apply(&self, v: u8) -> u8 {
        let mut out = 0;
        for (k, &r) in self.rows.iter().enumerate() {
            out |= (((r & v).count_ones() & 1) as u8) << k;
        }
        out
    }

    /// The gate obtained by applying `self` first and `next` second.
    pub fn then(&self, next: &Self) -> Self {
        // (next * self) row k = XOR of self rows selected by next row k.
        let mut rows = [0u8; 4];
        for (k, out) in rows.iter_mut().enumerate() {
            for l in 0..4 {
                if next.entry(k, l) {
                    *out ^= self.rows[l];
                }
            }
        }
        Self { rows }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = [0u8; 4];
        for (k, out) in rows.iter_mut().enumerate() {
            for l in 0..4 {
                if self.entry(l, k) {
                    *out |= 1 << l;
                }
            }
        }
        Self { rows }
    }

    fn column(&self, l: usize) -> u8 {
        (0..4).fold(0, |acc, k| acc | ((self.entry(k, l) as u8) << k))
    }

    /// Checks `mᵀ Ω m = Ω`, with Ω pairing `x_k` and `z_k`.
    pub fn is_symplectic(&self) -> bool {
        let cols = [self.column(0), self.column(1), self.column(2), self.column(3)];
        (0..4).all(|a| (0..4).all(|b| symplectic_form(cols[a], cols[b]) == ((a ^ b) == 2)))
    }

    /// All 720 group elements, in increasing order of their row encoding.
    pub fn group() -> &'static [TwoQubitSymplectic] {
        static GROUP: OnceLock<Vec<TwoQubitSymplectic>> = OnceLock::new();
        GROUP.get_or_init(|| {
            let elements: Vec<_> = (0u32..1 << 16)
                .map(|bits| Self {
                    rows: [
                        (bits & 0xf) as u8,
                        ((bits >> 4) & 0xf) as u8,
                        ((bits >> 8) & 0xf) as u8,
                        ((bits >> 12) & 0xf) as u8,
                    ],
                })
                .filter(Self::is_symplectic)
                .collect();
            assert_eq!(elements.len(), GROUP_ORDER);
            elements
        })
    }

    /// Uniformly random group element.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::group()[rng.gen_range(0..GROUP_ORDER)]
    }
}

/// Symplectic product of two packed `(x_i, x_j, z_i, z_j)` vectors.
#[inline]
pub fn symplectic_form(u: u8, v: u8) -> bool {
    let cross = (u & 0b0011) & (v >> 2) ^ (u >> 2) & (v & 0b0011);
    cross.count_ones() & 1 == 1
}

impl fmt::Debug for TwoQubitSymplectic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sp4[")?;
        for (k, r) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            for l in 0..4 {
                write!(f, "{}", (r >> l) & 1)?;
            }
        }
        write!(f, "]")
    }
}
