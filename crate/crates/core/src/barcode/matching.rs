//! Partial matchings between barcodes and the bottleneck distance.
//!
//! The cost of a matching is the largest of: the worst endpoint
//! displacement over matched pairs, and half the length of every unmatched
//! interval on either side.

use super::{Barcode, Interval};
use crate::error::{Error, Result};

/// Largest combined interval count accepted by [`bottleneck_bruteforce`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Injective pairing of interval indices `(in b1, in b2)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialMatching {
    pub pairs: Vec<(usize, usize)>,
}

impl PartialMatching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    fn check(&self, n1: usize, n2: usize) -> Result<()> {
        let mut left = vec![false; n1];
        let mut right = vec![false; n2];
        for &(i, j) in &self.pairs {
            if i >= n1 || j >= n2 {
                return Err(Error::InvalidMatching(format!(
                    "pair ({i}, {j}) out of range"
                )));
            }
            if left[i] || right[j] {
                return Err(Error::InvalidMatching(format!(
                    "pair ({i}, {j}) reuses an index"
                )));
            }
            left[i] = true;
            right[j] = true;
        }
        Ok(())
    }
}

/// `|a - b|`, infinite when exactly one side is infinite, zero when equal.
pub(crate) fn endpoint_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

pub(crate) fn pair_cost(a: &Interval, b: &Interval) -> f64 {
    endpoint_diff(a.birth, b.birth).max(endpoint_diff(a.death, b.death))
}

pub fn matching_cost(b1: &Barcode, b2: &Barcode, m: &PartialMatching) -> Result<f64> {
    m.check(b1.len(), b2.len())?;
    let mut used1 = vec![false; b1.len()];
    let mut used2 = vec![false; b2.len()];
    let mut cost: f64 = 0.0;
    for &(i, j) in &m.pairs {
        used1[i] = true;
        used2[j] = true;
        cost = cost.max(pair_cost(&b1.intervals[i], &b2.intervals[j]));
    }
    for (iv, used) in b1.intervals.iter().zip(&used1) {
        if !used {
            cost = cost.max(iv.half_persistence());
        }
    }
    for (iv, used) in b2.intervals.iter().zip(&used2) {
        if !used {
            cost = cost.max(iv.half_persistence());
        }
    }
    Ok(cost)
}

/// Bipartite graph for the threshold test. Left vertices are the intervals
/// of `b1` followed by one diagonal slot per interval of `b2`; right
/// vertices are the intervals of `b2` followed by one diagonal slot per
/// interval of `b1`.
struct ThresholdGraph<'a> {
    b1: &'a [Interval],
    b2: &'a [Interval],
}

impl ThresholdGraph<'_> {
    fn size(&self) -> usize {
        self.b1.len() + self.b2.len()
    }

    fn allowed(&self, left: usize, right: usize, threshold: f64) -> bool {
        let (n1, n2) = (self.b1.len(), self.b2.len());
        match (left < n1, right < n2) {
            (true, true) => pair_cost(&self.b1[left], &self.b2[right]) <= threshold,
            (true, false) => right - n2 == left && self.b1[left].half_persistence() <= threshold,
            (false, true) => left - n1 == right && self.b2[right].half_persistence() <= threshold,
            (false, false) => true,
        }
    }

    /// Perfect matching of the threshold graph via augmenting paths, as a
    /// right partner per left vertex, or `None` when none exists.
    fn perfect_matching(&self, threshold: f64) -> Option<Vec<usize>> {
        let size = self.size();
        let mut match_right: Vec<Option<usize>> = vec![None; size];
        for left in 0..size {
            let mut visited = vec![false; size];
            if !self.augment(left, threshold, &mut visited, &mut match_right) {
                return None;
            }
        }
        let mut partner = vec![usize::MAX; size];
        for (right, left) in match_right.iter().enumerate() {
            partner[left.expect("perfect matching covers every vertex")] = right;
        }
        Some(partner)
    }

    fn augment(
        &self,
        left: usize,
        threshold: f64,
        visited: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for right in 0..self.size() {
            if visited[right] || !self.allowed(left, right, threshold) {
                continue;
            }
            visited[right] = true;
            let free = match match_right[right] {
                None => true,
                Some(other) => self.augment(other, threshold, visited, match_right),
            };
            if free {
                match_right[right] = Some(left);
                return true;
            }
        }
        false
    }
}

/// Exact bottleneck distance and a matching attaining it.
///
/// The optimum is one of finitely many candidate values (pairwise endpoint
/// displacements and half-lengths); a binary search over them uses a
/// perfect-matching test on the threshold graph. Infinite intervals can
/// only pair with infinite intervals, so unequal infinite counts give
/// `+inf`.
pub fn bottleneck(b1: &Barcode, b2: &Barcode) -> (f64, PartialMatching) {
    if b1.infinite_count() != b2.infinite_count() {
        return (f64::INFINITY, PartialMatching::default());
    }
    let mut candidates = vec![0.0];
    for a in &b1.intervals {
        for b in &b2.intervals {
            candidates.push(pair_cost(a, b));
        }
    }
    candidates.extend(b1.intervals.iter().map(Interval::half_persistence));
    candidates.extend(b2.intervals.iter().map(Interval::half_persistence));
    candidates.retain(|c| c.is_finite());
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let graph = ThresholdGraph {
        b1: &b1.intervals,
        b2: &b2.intervals,
    };
    // the largest candidate is always feasible once infinite counts agree
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if graph.perfect_matching(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let best = graph
        .perfect_matching(candidates[lo])
        .expect("binary search ends on a feasible candidate");
    let pairs = (0..b1.len())
        .filter(|&i| best[i] < b2.len())
        .map(|i| (i, best[i]))
        .collect();
    (candidates[lo], PartialMatching::new(pairs))
}

/// Minimum matching cost over every partial matching, by enumeration.
pub fn bottleneck_bruteforce(b1: &Barcode, b2: &Barcode) -> Result<f64> {
    let total = b1.len() + b2.len();
    if total > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            found: total,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    fn go(
        i: usize,
        b1: &Barcode,
        b2: &Barcode,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        best: &mut f64,
    ) {
        if i == b1.len() {
            let cost = matching_cost(b1, b2, &PartialMatching::new(pairs.clone()))
                .expect("enumerated matchings are valid");
            if cost < *best {
                *best = cost;
            }
            return;
        }
        go(i + 1, b1, b2, used, pairs, best);
        for j in 0..b2.len() {
            if !used[j] {
                used[j] = true;
                pairs.push((i, j));
                go(i + 1, b1, b2, used, pairs, best);
                pairs.pop();
                used[j] = false;
            }
        }
    }

    let mut best = f64::INFINITY;
    go(
        0,
        b1,
        b2,
        &mut vec![false; b2.len()],
        &mut Vec::new(),
        &mut best,
    );
    Ok(best)
}
