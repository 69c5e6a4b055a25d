//! Small modifications that move a tree by at most `eps` in interleaving
//! distance: padding with extra leaves and separating equal leaf heights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{validate, MergeTree, PointOnTree, RawNode};
use crate::error::{Error, Result};

/// Hangs new leaves `eps` below `attach` until the tree has exactly `n`
/// leaves.
///
/// `attach` may be a branch point, an interior point of an edge, or a point
/// on the ray above the root, but not a leaf.
pub fn add_padding_leaves(
    t: &MergeTree,
    n: usize,
    eps: f64,
    attach: PointOnTree,
) -> Result<MergeTree> {
    let k = t.leaf_count();
    if k > n {
        return Err(Error::TooManyLeaves { found: k, limit: n });
    }
    if k == n {
        return Ok(t.clone());
    }
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let p = t.point(attach.base, attach.height)?;
    if t.is_leaf(p.base) && p.height == t.height(p.base) {
        return Err(Error::InvalidPoint(format!(
            "cannot hang leaves below leaf {}",
            p.base
        )));
    }

    let mut raw = t.to_raw();
    let anchor = if p.height == t.height(p.base) {
        p.base
    } else {
        let id = raw.len();
        raw.push(RawNode::new(p.height, t.parent(p.base)));
        raw[p.base].parent = Some(id);
        id
    };
    let leaf_height = p.height - eps;
    for _ in k..n {
        raw.push(RawNode::new(leaf_height, Some(anchor)));
    }
    validate(&raw)
}

/// Lowers every leaf by a distinct multiple of `eps / (2k)` in `(0, eps]`,
/// chosen from `seed`, so that the resulting leaf heights are pairwise
/// distinct.
pub fn perturb_leaf_heights(t: &MergeTree, eps: f64, seed: u64) -> Result<MergeTree> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let k = t.leaf_count();
    let slots = 2 * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = t.to_raw();
    let mut used = vec![false; slots + 1];
    let mut taken: Vec<f64> = Vec::with_capacity(k);
    for &leaf in t.leaves() {
        let h = t.height(leaf);
        let lowered = |m: usize| h - (m as f64 * eps / slots as f64).min(eps);
        // at most k - 1 slots are used and at most k - 1 heights collide
        let options: Vec<usize> = (1..=slots)
            .filter(|&m| !used[m] && !taken.contains(&lowered(m)))
            .collect();
        let &m = options
            .choose(&mut rng)
            .expect("2k slots always leave a free choice");
        used[m] = true;
        taken.push(lowered(m));
        raw[leaf].height = lowered(m);
    }
    validate(&raw)
}
