//! Sign-free stabilizer tableau.
//!
//! The state of `n` qubits is an `n × 2n` binary matrix whose row `ℓ` holds
//! the bits `(x_0..x_{n-1}, z_0..z_{n-1})` of generator `g_ℓ`. Phases are not
//! tracked: every observable computed here (Renyi-2 entropies and the mutual
//! informations built from them) is independent of generator signs, and
//! measurements only update the stabilizer group, never sample an outcome.
//!
//! Storage is column-major: column `c` is a packed bit vector over the `n`
//! generators. Clifford gates touch two or four columns and run word-parallel
//! over rows, and a region's rank is the rank of its `2|A|` gathered column
//! vectors, so no transposition is needed at entropy time.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::bitmatrix::{self, words_for, BitMatrix, WORD_BITS};
use crate::error::{Error, Result};
use crate::region::Region;
use crate::symplectic::TwoQubitSymplectic;

/// Outcome class of a Z-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementKind {
    /// `Z_q` (up to sign) was already in the stabilizer group.
    Deterministic,
    /// Some generator anticommuted with `Z_q`; the group was updated.
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tableau {
    n: usize,
    words: usize,
    cols: Vec<u64>,
}

thread_local! {
    static SCRATCH: RefCell<Vec<u64>> = const { RefCell::new(Vec::new()) };
}

impl Tableau {
    /// The product state `|0⟩^⊗n`, stabilized by `Z_0, …, Z_{n-1}`.
    pub fn new_product_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoQubits);
        }
        let words = words_for(n);
        let mut t = Self { n, words, cols: vec![0; 2 * n * words] };
        for l in 0..n {
            t.set_bit(n + l, l);
        }
        Ok(t)
    }

    /// Builds a tableau from an `n × 2n` matrix of generator rows.
    ///
    /// The rows must be independent and pairwise commuting.
    pub fn from_rows(rows: &BitMatrix) -> Result<Self> {
        let n = rows.rows();
        if n == 0 {
            return Err(Error::NoQubits);
        }
        if rows.cols() != 2 * n {
            return Err(Error::Invalid(format!(
                "expected {} columns for {n} generators, got {}",
                2 * n,
                rows.cols()
            )));
        }
        let words = words_for(n);
        let mut t = Self { n, words, cols: vec![0; 2 * n * words] };
        for r in 0..n {
            for c in 0..2 * n {
                if rows.get(r, c) {
                    t.set_bit(c, r);
                }
            }
        }
        if !t.is_valid() {
            return Err(Error::Invalid("generators are dependent or do not commute".into()));
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Generator rows as an `n × 2n` matrix.
    pub fn to_rows(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n, 2 * self.n);
        for c in 0..2 * self.n {
            for r in 0..self.n {
                if self.bit(c, r) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Bits `(x_q, z_q)` of generator `row`.
    pub fn pauli(&self, row: usize, q: usize) -> (bool, bool) {
        (self.bit(q, row), self.bit(self.n + q, row))
    }

    /// Full rank and pairwise commuting generators.
    pub fn is_valid(&self) -> bool {
        let rows = self.to_rows();
        if rows.rank() != self.n {
            return false;
        }
        let n = self.n;
        (0..n).all(|g| {
            (g + 1..n).all(|h| {
                let mut s = false;
                for i in 0..n {
                    s ^= (rows.get(g, i) & rows.get(h, n + i)) ^ (rows.get(g, n + i) & rows.get(h, i));
                }
                !s
            })
        })
    }

    #[inline]
    fn column(&self, c: usize) -> &[u64] {
        &self.cols[c * self.words..(c + 1) * self.words]
    }

    #[inline]
    fn bit(&self, c: usize, r: usize) -> bool {
        (self.cols[c * self.words + r / WORD_BITS] >> (r % WORD_BITS)) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, c: usize, r: usize) {
        self.cols[c * self.words + r / WORD_BITS] |= 1 << (r % WORD_BITS);
    }

    #[inline]
    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { index: q, n: self.n })
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(Error::SameQubit(i));
        }
        Ok(())
    }

    /// XORs column `src` into column `dst`.
    #[inline]
    fn xor_column(&mut self, src: usize, dst: usize) {
        let w = self.words;
        let (s, d) = (src * w, dst * w);
        for k in 0..w {
            let v = self.cols[s + k];
            self.cols[d + k] ^= v;
        }
    }

    /// Hadamard: swaps columns `i` and `i + n`.
    pub fn apply_hadamard(&mut self, i: usize) -> Result<()> {
        self.check_qubit(i)?;
        let w = self.words;
        let (a, b) = (i * w, (self.n + i) * w);
        for k in 0..w {
            self.cols.swap(a + k, b + k);
        }
        Ok(())
    }

    /// Phase gate: column `i + n` ← column `i + n` ⊕ column `i`.
    pub fn apply_phase(&mut self, i: usize) -> Result<()> {
        self.check_qubit(i)?;
        self.xor_column(i, self.n + i);
        Ok(())
    }

    /// CNOT with control `i`, target `j`.
    pub fn apply_cnot(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.xor_column(i, j);
        self.xor_column(self.n + j, self.n + i);
        Ok(())
    }

    /// Replaces `(x_i, x_j, z_i, z_j)` in every row by its image under `g`.
    pub fn apply_two_qubit_symplectic(
        &mut self,
        i: usize,
        j: usize,
        g: &TwoQubitSymplectic,
    ) -> Result<()> {
        self.check_pair(i, j)?;
        self.apply_symplectic_unchecked(i, j, g);
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_symplectic_unchecked(&mut self, i: usize, j: usize, g: &TwoQubitSymplectic) {
        let w = self.words;
        let offsets = [i * w, j * w, (self.n + i) * w, (self.n + j) * w];
        let rows = g.rows();
        for k in 0..w {
            let v = [
                self.cols[offsets[0] + k],
                self.cols[offsets[1] + k],
                self.cols[offsets[2] + k],
                self.cols[offsets[3] + k],
            ];
            for (out, &mask) in rows.iter().enumerate() {
                let mut acc = 0u64;
                for (l, &vl) in v.iter().enumerate() {
                    if (mask >> l) & 1 == 1 {
                        acc ^= vl;
                    }
                }
                self.cols[offsets[out] + k] = acc;
            }
        }
    }

    /// Measures `Z_q`, pivoting on the lowest-index anticommuting generator.
    pub fn measure_z(&mut self, q: usize) -> Result<MeasurementKind> {
        self.check_qubit(q)?;
        let pivot = self.column(q).iter().enumerate().find_map(|(k, &w)| {
            (w != 0).then(|| k * WORD_BITS + w.trailing_zeros() as usize)
        });
        match pivot {
            None => Ok(MeasurementKind::Deterministic),
            Some(p) => {
                self.collapse(q, p);
                Ok(MeasurementKind::Random)
            }
        }
    }

    /// Measures `Z_q` using generator `pivot`, which must have `x_q = 1`.
    pub fn measure_z_with_pivot(&mut self, q: usize, pivot: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.check_qubit(pivot)?;
        if !self.bit(q, pivot) {
            return Err(Error::Invalid(format!("generator {pivot} commutes with Z_{q}")));
        }
        self.collapse(q, pivot);
        Ok(())
    }

    /// Generators that anticommute with `Z_q`.
    pub fn anticommuting_rows(&self, q: usize) -> Vec<usize> {
        (0..self.n).filter(|&r| self.bit(q, r)).collect()
    }

    fn collapse(&mut self, q: usize, p: usize) {
        let w = self.words;
        let (pw, pmask) = (p / WORD_BITS, 1u64 << (p % WORD_BITS));
        // Rows other than the pivot that anticommute with Z_q.
        let mut others: Vec<u64> = self.column(q).to_vec();
        others[pw] &= !pmask;
        for c in 0..2 * self.n {
            let base = c * w;
            if self.cols[base + pw] & pmask != 0 {
                for (dst, &o) in self.cols[base..base + w].iter_mut().zip(&others) {
                    *dst ^= o;
                }
                self.cols[base + pw] &= !pmask;
            }
        }
        self.cols[(self.n + q) * w + pw] |= pmask;
    }

    /// GF(2) rank of the tableau restricted to the columns of `sites`.
    ///
    /// `sites` must be in range; duplicates only reduce the rank.
    pub fn restricted_rank(&self, sites: &[usize]) -> usize {
        let w = self.words;
        let k = 2 * sites.len();
        SCRATCH.with(|cell| {
            let mut buf = cell.borrow_mut();
            buf.clear();
            buf.reserve(k * w);
            for &q in sites {
                buf.extend_from_slice(self.column(q));
                buf.extend_from_slice(self.column(self.n + q));
            }
            bitmatrix::rank_in_place(&mut buf, k, w)
        })
    }

    /// Renyi-2 entropy of `region` in bits: `rank(M_A) − |A|`.
    pub fn renyi_entropy_bits(&self, region: &Region) -> Result<usize> {
        region.check_bounds(self.n)?;
        Ok(self.entropy_bits_of(region.indices()))
    }

    /// Renyi-2 entropy of `region` in nats.
    pub fn renyi_entropy(&self, region: &Region) -> Result<f64> {
        Ok(self.renyi_entropy_bits(region)? as f64 * LN_2)
    }

    /// Entropy in bits of a set of in-range, distinct sites.
    ///
    /// The smaller of the set and its complement is ranked; both give the same
    /// answer for a pure state.
    pub(crate) fn entropy_bits_of(&self, sites: &[usize]) -> usize {
        if 2 * sites.len() > self.n {
            let mut member = vec![false; self.n];
            for &q in sites {
                member[q] = true;
            }
            let rest: Vec<usize> = (0..self.n).filter(|&q| !member[q]).collect();
            self.restricted_rank(&rest) - rest.len()
        } else {
            self.restricted_rank(sites) - sites.len()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::RegionTag;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn region(ix: &[usize]) -> Region {
        Region::new(ix.to_vec(), RegionTag::Arbitrary).unwrap()
    }

    fn bell() -> Tableau {
        let mut t = Tableau::new_product_state(2).unwrap();
        t.apply_hadamard(0).unwrap();
        t.apply_cnot(0, 1).unwrap();
        t
    }

    fn random_tableau(n: usize, gates: usize, rng: &mut ChaCha8Rng) -> Tableau {
        let mut t = Tableau::new_product_state(n).unwrap();
        for _ in 0..gates {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            t.apply_two_qubit_symplectic(i, j, &TwoQubitSymplectic::sample(rng)).unwrap();
        }
        t
    }

    #[test]
    fn product_state_rows_are_single_z() {
        let t = Tableau::new_product_state(2).unwrap();
        assert_eq!(t.pauli(0, 0), (false, true));
        assert_eq!(t.pauli(0, 1), (false, false));
        assert_eq!(t.pauli(1, 1), (false, true));
        assert_eq!(t.renyi_entropy_bits(&region(&[0])).unwrap(), 0);
        assert_eq!(Tableau::new_product_state(4).unwrap().to_rows().rank(), 4);
        assert_eq!(Tableau::new_product_state(0), Err(Error::NoQubits));
    }

    #[test]
    fn hadamard_exchanges_x_and_z_and_is_an_involution() {
        let mut t = Tableau::new_product_state(3).unwrap();
        t.apply_hadamard(0).unwrap();
        assert_eq!(t.pauli(0, 0), (true, false));
        let before = t.clone();
        t.apply_hadamard(2).unwrap();
        t.apply_hadamard(2).unwrap();
        assert_eq!(t, before);
        assert!(t.apply_hadamard(3).is_err());
    }

    #[test]
    fn phase_maps_x_to_y_and_fixes_z() {
        let mut t = Tableau::new_product_state(2).unwrap();
        t.apply_phase(1).unwrap();
        assert_eq!(t.pauli(1, 1), (false, true));
        t.apply_hadamard(0).unwrap();
        t.apply_phase(0).unwrap();
        assert_eq!(t.pauli(0, 0), (true, true));
        let before = t.clone();
        t.apply_phase(0).unwrap();
        t.apply_phase(0).unwrap();
        assert_eq!(t, before);
    }

    #[test]
    fn cnot_follows_the_column_rules() {
        let mut t = Tableau::new_product_state(2).unwrap();
        t.apply_cnot(0, 1).unwrap();
        // Z_1 -> Z_0 Z_1
        assert_eq!(t.pauli(1, 0), (false, true));
        assert_eq!(t.pauli(1, 1), (false, true));

        let mut t = Tableau::new_product_state(2).unwrap();
        t.apply_hadamard(0).unwrap();
        t.apply_cnot(0, 1).unwrap();
        // X_0 -> X_0 X_1
        assert_eq!(t.pauli(0, 0), (true, false));
        assert_eq!(t.pauli(0, 1), (true, false));

        assert_eq!(t.apply_cnot(1, 1), Err(Error::SameQubit(1)));
        assert!(t.apply_cnot(0, 2).is_err());
    }

    #[test]
    fn bell_pair_has_one_bit_of_entropy() {
        let t = bell();
        assert_eq!(t.renyi_entropy_bits(&region(&[0])).unwrap(), 1);
        assert!((t.renyi_entropy(&region(&[1])).unwrap() - LN_2).abs() < 1e-12);
        assert_eq!(t.renyi_entropy_bits(&region(&[0, 1])).unwrap(), 0);
        assert!(t.renyi_entropy_bits(&region(&[2])).is_err());
    }

    #[test]
    fn symplectic_cnot_matches_apply_cnot() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t = random_tableau(7, 30, &mut rng);
            let mut a = t.clone();
            let mut b = t.clone();
            a.apply_cnot(2, 5).unwrap();
            b.apply_two_qubit_symplectic(2, 5, &TwoQubitSymplectic::cnot()).unwrap();
            assert_eq!(a, b);
            let mut c = t.clone();
            c.apply_two_qubit_symplectic(5, 2, &TwoQubitSymplectic::cnot_reversed()).unwrap();
            assert_eq!(a, c);
            let mut d = t.clone();
            d.apply_two_qubit_symplectic(1, 4, &TwoQubitSymplectic::IDENTITY).unwrap();
            assert_eq!(d, t);
        }
    }

    #[test]
    fn measurement_on_product_state_is_deterministic() {
        let mut t = Tableau::new_product_state(4).unwrap();
        let before = t.clone();
        assert_eq!(t.measure_z(2).unwrap(), MeasurementKind::Deterministic);
        assert_eq!(t, before);
    }

    #[test]
    fn measuring_half_a_bell_pair_disentangles_it() {
        let mut t = bell();
        assert_eq!(t.measure_z(0).unwrap(), MeasurementKind::Random);
        assert!(t.is_valid());
        for r in [&[0][..], &[1], &[0, 1]] {
            assert_eq!(t.renyi_entropy_bits(&region(r)).unwrap(), 0);
        }
        assert_eq!(t.measure_z(1).unwrap(), MeasurementKind::Deterministic);
    }

    #[test]
    fn gates_and_measurements_preserve_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [3, 10, 65, 70] {
            let mut t = random_tableau(n, 4 * n, &mut rng);
            assert!(t.is_valid());
            for _ in 0..n / 2 {
                t.measure_z(rng.gen_range(0..n)).unwrap();
            }
            assert!(t.is_valid());
            t.apply_hadamard(0).unwrap();
            t.apply_phase(n - 1).unwrap();
            t.apply_cnot(n - 1, 0).unwrap();
            assert!(t.is_valid());
        }
    }

    #[test]
    fn measured_qubit_is_stabilized_by_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut t = random_tableau(6, 40, &mut rng);
        t.measure_z(3).unwrap();
        // No generator anticommutes with Z_3 and S_{3} = 0.
        assert!(t.anticommuting_rows(3).is_empty());
        assert_eq!(t.renyi_entropy_bits(&region(&[3])).unwrap(), 0);
    }

    #[test]
    fn pivot_choice_does_not_change_entropies() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let t = random_tableau(n, 25, &mut rng);
            let q = rng.gen_range(0..n);
            let pivots = t.anticommuting_rows(q);
            let mut reference: Option<Vec<usize>> = None;
            for p in pivots {
                let mut u = t.clone();
                u.measure_z_with_pivot(q, p).unwrap();
                assert!(u.is_valid());
                let ent: Vec<usize> = (0u32..1 << n)
                    .map(|mask| {
                        let sites: Vec<usize> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
                        u.renyi_entropy_bits(&region(&sites)).unwrap()
                    })
                    .collect();
                match &reference {
                    None => reference = Some(ent),
                    Some(r) => assert_eq!(r, &ent),
                }
            }
        }
    }

    #[test]
    fn entropy_is_complement_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 10;
        let t = random_tableau(n, 60, &mut rng);
        for mask in 0u32..1 << n {
            let sites: Vec<usize> = (0..n).filter(|&b| mask >> b & 1 == 1).collect();
            let a = region(&sites);
            let s = t.renyi_entropy_bits(&a).unwrap();
            let sc = t.restricted_rank(a.complement(n).indices()) - (n - sites.len());
            let sa = t.restricted_rank(&sites) - sites.len();
            assert_eq!(s, sa);
            assert_eq!(sa, sc);
            assert!(s <= sites.len().min(n - sites.len()));
        }
    }

    #[test]
    fn from_rows_rejects_invalid_generators() {
        let rows = BitMatrix::from_rows(&[vec![true, false, false, false], vec![false, false, true, false]]);
        // X_0 and Z_0 anticommute.
        assert!(Tableau::from_rows(&rows).is_err());
        let t = bell();
        assert_eq!(Tableau::from_rows(&t.to_rows()).unwrap(), t);
    }
}
