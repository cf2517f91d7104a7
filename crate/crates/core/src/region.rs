use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a region was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Linear,
    Treelike,
    Arbitrary,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionTag::Linear => "linear",
            RegionTag::Treelike => "treelike",
            RegionTag::Arbitrary => "arbitrary",
        })
    }
}

/// An ordered set of distinct qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    indices: Vec<usize>,
    tag: RegionTag,
}

impl Region {
    pub fn new(indices: Vec<usize>, tag: RegionTag) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self { indices, tag })
    }

    pub fn arbitrary(indices: Vec<usize>) -> Result<Self> {
        Self::new(indices, RegionTag::Arbitrary)
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new(), tag: RegionTag::Arbitrary }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn tag(&self) -> RegionTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.indices.contains(&q)
    }

    /// Fails if any index is `>= n`.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i >= n) {
            Some(&index) => Err(Error::QubitOutOfRange { index, n }),
            None => Ok(()),
        }
    }

    /// Sites of `0..n` not in the region, in increasing order.
    pub fn complement(&self, n: usize) -> Region {
        let mut member = vec![false; n];
        for &i in &self.indices {
            if i < n {
                member[i] = true;
            }
        }
        let indices = (0..n).filter(|&i| !member[i]).collect();
        Region { indices, tag: RegionTag::Arbitrary }
    }

    /// Union of disjoint regions; overlap is an error.
    pub fn disjoint_union(regions: &[&Region]) -> Result<Region> {
        let mut seen = HashSet::new();
        let mut indices = Vec::new();
        for r in regions {
            for &i in &r.indices {
                if !seen.insert(i) {
                    return Err(Error::OverlappingRegions(i));
                }
                indices.push(i);
            }
        }
        Ok(Region { indices, tag: RegionTag::Arbitrary })
    }
}
