//! Seeded random merge trees.
//!
//! Heights are drawn from the grid of multiples of [`HEIGHT_GRID`], so sums,
//! differences, halves and dyadic interpolations of them are computed
//! exactly in `f64`. The test suites rely on that to compare distances
//! without tolerances.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{reconstruct_from_matrix, validate, MergeTree, RawNode};
use crate::error::{Error, Result};

pub const HEIGHT_GRID: f64 = 1.0 / 1024.0;

/// Half-open interval `[lo, hi)` of admissible heights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for HeightRange {
    fn default() -> Self {
        Self { lo: 0.0, hi: 8.0 }
    }
}

impl HeightRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Grid indices covered by the range.
    fn grid(&self) -> Result<(i64, usize)> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidHeightRange(self.lo, self.hi));
        }
        let first = (self.lo / HEIGHT_GRID).ceil() as i64;
        let end = (self.hi / HEIGHT_GRID).ceil() as i64;
        Ok((first, (end - first).max(0) as usize))
    }

    /// `count` distinct grid heights in increasing order.
    fn sample_sorted(&self, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let (first, size) = self.grid()?;
        if size < count {
            return Err(Error::InvalidHeightRange(self.lo, self.hi));
        }
        let mut idx: Vec<usize> = sample(rng, size, count).into_vec();
        idx.sort_unstable();
        Ok(idx
            .into_iter()
            .map(|i| (first + i as i64) as f64 * HEIGHT_GRID)
            .collect())
    }
}

/// A random binary merge tree with exactly `n` leaves and pairwise distinct
/// node heights inside `range`.
///
/// Heights are `2n - 1` distinct grid values swept upwards; at each value the
/// sweep either starts a new leaf or merges two random components.
pub fn random_tree(n: usize, seed: u64, range: HeightRange) -> Result<MergeTree> {
    if n == 0 {
        return Err(Error::InvalidLeafCount(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heights = range.sample_sorted(2 * n - 1, &mut rng)?;

    let mut raw: Vec<RawNode> = Vec::with_capacity(2 * n - 1);
    let mut components: Vec<usize> = Vec::new();
    let mut leaves_left = n;
    for h in heights {
        let can_merge = components.len() >= 2;
        let new_leaf = leaves_left > 0 && (!can_merge || rng.gen_bool(0.5));
        let id = raw.len();
        raw.push(RawNode::new(h, None));
        if new_leaf {
            leaves_left -= 1;
        } else {
            let a = components.swap_remove(rng.gen_range(0..components.len()));
            let b = components.swap_remove(rng.gen_range(0..components.len()));
            raw[a].parent = Some(id);
            raw[b].parent = Some(id);
        }
        components.push(id);
    }
    debug_assert_eq!(components.len(), 1);
    validate(&raw)
}

/// A random tree with the same order pattern of cophenetic entries as `t`:
/// every distinct entry value is replaced by a fresh grid value, preserving
/// their relative order.
pub fn random_chamber_partner(t: &MergeTree, seed: u64, range: HeightRange) -> Result<MergeTree> {
    let m = t.cophenetic();
    let mut values: Vec<f64> = m.entries.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fresh = range.sample_sorted(values.len(), &mut rng)?;
    let remap = |x: f64| {
        let pos = values
            .binary_search_by(|v| v.total_cmp(&x))
            .expect("value comes from the matrix");
        fresh[pos]
    };
    let entries: Vec<Vec<f64>> = m
        .entries
        .iter()
        .map(|row| row.iter().map(|&x| remap(x)).collect())
        .collect();
    let diag: Vec<f64> = (0..entries.len()).map(|i| entries[i][i]).collect();
    reconstruct_from_matrix(&diag, &entries)
}
