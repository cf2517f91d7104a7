//! Dense binary matrices over GF(2), packed 64 entries per word.
//!
//! Rows are stored contiguously in `u64` words. The main consumer is
//! [`rank_in_place`], which runs bit-parallel Gaussian elimination over a
//! scratch buffer of packed rows; the tableau reuses it for region ranks.

use serde::{Deserialize, Serialize};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A row-major binary matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of booleans. All rows must have equal length.
    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        (self.data[row * self.words + col / WORD_BITS] >> (col % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        debug_assert!(row < self.rows && col < self.cols);
        let w = &mut self.data[row * self.words + col / WORD_BITS];
        let mask = 1u64 << (col % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.data[row * self.words..(row + 1) * self.words]
    }

    /// XORs row `src` into row `dst`.
    pub fn xor_row(&mut self, src: usize, dst: usize) {
        if src == dst {
            self.data[dst * self.words..(dst + 1) * self.words].fill(0);
            return;
        }
        for w in 0..self.words {
            let v = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    /// Forward Gaussian elimination on columns `0..cols`, pivoting in column
    /// order with row swaps and XORs below the pivot only.
    ///
    /// Returns the number of pivots `r`. Afterwards rows `r..` are zero on
    /// those columns and span the subspace of row combinations that vanish
    /// there.
    pub fn eliminate_leading_columns(&mut self, cols: usize) -> usize {
        let w = self.words;
        let mut rank = 0;
        for c in 0..cols.min(self.cols) {
            if rank == self.rows {
                break;
            }
            let (cw, mask) = (c / WORD_BITS, 1u64 << (c % WORD_BITS));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * w + cw] & mask != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..w {
                    self.data.swap(p * w + k, rank * w + k);
                }
            }
            for r in rank + 1..self.rows {
                if self.data[r * w + cw] & mask != 0 {
                    for k in cw..w {
                        let v = self.data[rank * w + k];
                        self.data[r * w + k] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rank over GF(2). The matrix itself is left untouched; elimination
    /// runs on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        rank_in_place(&mut scratch, self.rows, self.words)
    }
}

/// Rank over GF(2) of `n_rows` packed rows of `words` words each.
///
/// The buffer is destroyed (left in a row-echelon form of the input).
pub fn rank_in_place(data: &mut [u64], n_rows: usize, words: usize) -> usize {
    debug_assert!(data.len() >= n_rows * words);
    let mut rank = 0;
    for w in 0..words {
        if rank == n_rows {
            break;
        }
        // Every row below `rank` is zero in all bit positions already scanned,
        // and XORs of such rows only ever clear bits of this union.
        let mut candidates = 0u64;
        for r in rank..n_rows {
            candidates |= data[r * words + w];
        }
        while candidates != 0 && rank < n_rows {
            let bit = candidates.trailing_zeros();
            candidates &= candidates - 1;
            let mask = 1u64 << bit;
            let Some(p) = (rank..n_rows).find(|&r| data[r * words + w] & mask != 0) else {
                continue;
            };
            if p != rank {
                for k in w..words {
                    data.swap(p * words + k, rank * words + k);
                }
            }
            let (head, tail) = data.split_at_mut((rank + 1) * words);
            let pivot = &head[rank * words..];
            for row in tail[..(n_rows - rank - 1) * words].chunks_exact_mut(words) {
                if row[w] & mask != 0 {
                    for k in w..words {
                        row[k] ^= pivot[k];
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}
