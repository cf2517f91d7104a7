//! Linear (periodic) and treelike (2-adic) geometry on `N = 2^n` sites.
//!
//! The canonical 2-adic quantity is the dyadic valuation of `i − j`; norms and
//! tree distances are derived from it with integer arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::{Region, RegionTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Linear,
    Treelike,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 2] = [GeometryKind::Linear, GeometryKind::Treelike];

    pub fn region_tag(self) -> RegionTag {
        match self {
            GeometryKind::Linear => RegionTag::Linear,
            GeometryKind::Treelike => RegionTag::Treelike,
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::Linear => "linear",
            GeometryKind::Treelike => "treelike",
        })
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(GeometryKind::Linear),
            "treelike" => Ok(GeometryKind::Treelike),
            other => Err(Error::Invalid(format!("unknown geometry '{other}'"))),
        }
    }
}

/// `log₂ n`, or an error if `n` is not a power of two.
pub fn log2_size(n: usize) -> Result<u32> {
    if n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

fn check_site(i: usize, n: usize) -> Result<()> {
    if i < n {
        Ok(())
    } else {
        Err(Error::QubitOutOfRange { index: i, n })
    }
}

/// Periodic distance `min(|i − j|, N − |i − j|)`.
pub fn linear_distance(i: usize, j: usize, n: usize) -> Result<usize> {
    check_site(i, n)?;
    check_site(j, n)?;
    let d = i.abs_diff(j);
    Ok(d.min(n - d))
}

/// Binary digit reversal of `x` in `log₂ N` bits. Its own inverse.
pub fn monna(x: usize, n: usize) -> Result<usize> {
    let bits = log2_size(n)?;
    check_site(x, n)?;
    Ok(reverse_bits(x, bits))
}

#[inline]
pub(crate) fn reverse_bits(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Dyadic valuation `v₂(i − j)`, `None` when `i = j`.
pub fn two_adic_valuation(i: usize, j: usize, n: usize) -> Result<Option<u32>> {
    log2_size(n)?;
    check_site(i, n)?;
    check_site(j, n)?;
    Ok((i != j).then(|| i.abs_diff(j).trailing_zeros()))
}

/// The 2-adic norm `|i − j|₂ = 2^{−v₂(i−j)}`, and 0 for `i = j`.
///
/// The value is an exact power of two.
pub fn two_adic_norm(i: usize, j: usize, n: usize) -> Result<f64> {
    Ok(match two_adic_valuation(i, j, n)? {
        None => 0.0,
        Some(v) => 2f64.powi(-(v as i32)),
    })
}

/// The same norm written through the tree distance, `2^{d_tree/2} / N`.
pub fn rescaled_two_adic_norm(i: usize, j: usize, n: usize) -> Result<f64> {
    let d = tree_distance(i, j, n)?;
    if d == 0 {
        return Ok(0.0);
    }
    Ok(2f64.powi((d / 2) as i32) / n as f64)
}

/// Number of edges between leaves `i` and `j` in the binary tree whose leaves
/// are the sites in Monna order: `2 (log₂N − v₂(i − j))`.
pub fn tree_distance(i: usize, j: usize, n: usize) -> Result<u32> {
    let bits = log2_size(n)?;
    Ok(match two_adic_valuation(i, j, n)? {
        None => 0,
        Some(v) => 2 * (bits - v),
    })
}

/// A contiguous region of `size` sites starting at `anchor`.
///
/// Linear regions are cyclic intervals; treelike regions are Monna images of
/// cyclic intervals.
pub fn make_region(kind: GeometryKind, anchor: usize, size: usize, n: usize) -> Result<Region> {
    check_site(anchor, n)?;
    if size == 0 || size > n {
        return Err(Error::InvalidRegionSize { size, n });
    }
    let interval = (anchor..anchor + size).map(|y| y % n);
    let indices: Vec<usize> = match kind {
        GeometryKind::Linear => interval.collect(),
        GeometryKind::Treelike => {
            let bits = log2_size(n)?;
            interval.map(|y| reverse_bits(y, bits)).collect()
        }
    };
    Region::new(indices, kind.region_tag())
}

/// Whether `region` is a cyclic interval in the ordering of `kind`
/// (identity for linear, Monna for treelike).
pub fn is_contiguous(region: &Region, kind: GeometryKind, n: usize) -> bool {
    if region.check_bounds(n).is_err() {
        return false;
    }
    let k = region.len();
    if k == 0 || k == n {
        return true;
    }
    let bits = match kind {
        GeometryKind::Linear => None,
        GeometryKind::Treelike => match log2_size(n) {
            Ok(b) => Some(b),
            Err(_) => return false,
        },
    };
    let mut member = vec![false; n];
    for &i in region.indices() {
        let pos = bits.map_or(i, |b| reverse_bits(i, b));
        member[pos] = true;
    }
    // A proper cyclic interval has exactly one member whose successor is missing.
    let ends = (0..n).filter(|&p| member[p] && !member[(p + 1) % n]).count();
    ends == 1
}
