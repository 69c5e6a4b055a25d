//! Interleaving distance between small merge trees.
//!
//! An `eps`-interleaving is a pair of maps `alpha: T -> T'`, `beta: T' -> T`
//! raising heights by `eps` whose composites are the `2 eps` upward shift.
//! Both maps commute with upward shifts, so they are determined by where they
//! send the leaves. At a given height the possible images of a leaf are one
//! point per edge crossing that height (or the ray), which makes the decision
//! an exhaustive search over finitely many leaf assignments.
//!
//! The exact distance scans a finite candidate set of `eps` values built from
//! vertex heights and cross-checks it against a bisection.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tree::{trivial_interleaving_bound, MergeTree, NodeId, PointOnTree};

pub const DEFAULT_MAX_LEAVES: usize = 6;

/// Environment variable overriding [`OracleConfig::max_leaves`].
pub const MAX_LEAVES_ENV: &str = "MERGEMETRICS_MAX_ORACLE_LEAVES";

/// Bisection tolerance of the cross-check in [`interleaving_distance_exact`].
pub const BISECTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest leaf count accepted per tree.
    pub max_leaves: usize,
    /// Re-derive the exact distance by bisection and fail on disagreement.
    pub cross_check: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_leaves: DEFAULT_MAX_LEAVES,
            cross_check: true,
        }
    }
}

impl OracleConfig {
    /// Default configuration with the leaf limit taken from
    /// `MERGEMETRICS_MAX_ORACLE_LEAVES` when it is set to a positive integer.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(n) = std::env::var(MAX_LEAVES_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            cfg.max_leaves = n;
        }
        cfg
    }

    fn check(&self, t1: &MergeTree, t2: &MergeTree) -> Result<()> {
        for t in [t1, t2] {
            if t.leaf_count() > self.max_leaves {
                return Err(Error::TooManyLeaves {
                    found: t.leaf_count(),
                    limit: self.max_leaves,
                });
            }
        }
        Ok(())
    }
}

/// Leaf images of an interleaving. `alpha[i]` is the image in `t2` of the
/// `i`-th leaf of `t1` (in `t1.leaves()` order), `beta[j]` the image in `t1`
/// of the `j`-th leaf of `t2`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingWitness {
    pub eps: f64,
    pub alpha: Vec<PointOnTree>,
    pub beta: Vec<PointOnTree>,
}

impl InterleavingWitness {
    /// Checks the height, well-definedness and composition laws through the
    /// public point operations of the two trees.
    pub fn verify(&self, t1: &MergeTree, t2: &MergeTree) -> Result<()> {
        check_direction(t1, t2, &self.alpha, &self.beta, self.eps, "alpha")?;
        check_direction(t2, t1, &self.beta, &self.alpha, self.eps, "beta")
    }

    /// The witness composed with the upward shift by `delta`, which is an
    /// `(eps + delta)`-interleaving.
    pub fn shifted(&self, t1: &MergeTree, t2: &MergeTree, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::NegativeEpsilon(delta));
        }
        let eps = self.eps + delta;
        let raise = |src: &MergeTree, dst: &MergeTree, images: &[PointOnTree]| {
            src.leaves()
                .iter()
                .zip(images)
                .map(|(&l, p)| dst.point(p.base, src.height(l) + eps))
                .collect::<Result<Vec<_>>>()
        };
        Ok(Self {
            eps,
            alpha: raise(t1, t2, &self.alpha)?,
            beta: raise(t2, t1, &self.beta)?,
        })
    }
}

fn check_direction(
    src: &MergeTree,
    dst: &MergeTree,
    forward: &[PointOnTree],
    backward: &[PointOnTree],
    eps: f64,
    name: &str,
) -> Result<()> {
    let defect = |msg: String| Err(Error::WitnessDefect(format!("{name}: {msg}")));
    if forward.len() != src.leaf_count() || backward.len() != dst.leaf_count() {
        return defect("wrong number of leaf images".into());
    }
    let leaves = src.leaves();
    for (i, (&l, p)) in leaves.iter().zip(forward).enumerate() {
        if p.height != src.height(l) + eps {
            return defect(format!("leaf {i} is sent to height {}", p.height));
        }
        if dst.point(p.base, p.height)? != *p {
            return defect(format!("image of leaf {i} is not a normalized point"));
        }
    }
    for i in 0..leaves.len() {
        for k in (i + 1)..leaves.len() {
            let meet = src.height(src.node_lca(leaves[i], leaves[k]));
            if dst.lca(forward[i], forward[k])?.height > meet + eps {
                return defect(format!("leaves {i} and {k} are not mapped consistently"));
            }
        }
    }
    for (i, (&l, p)) in leaves.iter().zip(forward).enumerate() {
        let top = p.height + eps;
        let target = src.point(l, top)?;
        for (j, &lj) in dst.leaves().iter().enumerate() {
            let below = dst.lca(dst.node_point(lj), *p)? == *p;
            if below && src.point(backward[j].base, top)? != target {
                return defect(format!(
                    "composite through leaf {j} does not shift leaf {i} by 2 eps"
                ));
            }
        }
    }
    Ok(())
}

struct Side<'a> {
    tree: &'a MergeTree,
    leaves: &'a [NodeId],
    heights: Vec<f64>,
    meet: Vec<Vec<f64>>,
    /// Leaf positions below each node.
    below: Vec<Vec<usize>>,
}

impl<'a> Side<'a> {
    fn new(tree: &'a MergeTree) -> Self {
        let leaves = tree.leaves();
        let m = tree.cophenetic();
        let position = |l: NodeId| leaves.binary_search(&l).expect("leaf id");
        let below = (0..tree.node_count())
            .map(|v| tree.leaves_below(v).into_iter().map(position).collect())
            .collect();
        Self {
            tree,
            leaves,
            heights: m.diagonal(),
            meet: m.entries,
            below,
        }
    }

    fn anc(&self, v: NodeId, h: f64) -> NodeId {
        self.tree.ancestor_at(v, h)
    }

    /// One node per edge crossing height `h`, plus the root when `h` is at or
    /// above it: the normalized bases of all points at that height.
    fn crossings(&self, h: f64) -> Vec<NodeId> {
        (0..self.tree.node_count())
            .filter(|&v| {
                self.tree.height(v) <= h
                    && self.tree.parent(v).is_none_or(|p| self.tree.height(p) > h)
            })
            .collect()
    }
}

struct Search<'a> {
    src: Side<'a>,
    dst: Side<'a>,
    eps: f64,
    alpha_options: Vec<Vec<NodeId>>,
    beta_options: Vec<Vec<NodeId>>,
    alpha: Vec<NodeId>,
    beta: Vec<NodeId>,
    /// src leaves whose composite check becomes possible once the indexed
    /// dst leaf is assigned.
    ready: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(t1: &'a MergeTree, t2: &'a MergeTree, eps: f64) -> Self {
        let src = Side::new(t1);
        let dst = Side::new(t2);
        let alpha_options = src.heights.iter().map(|h| dst.crossings(h + eps)).collect();
        let beta_options = dst.heights.iter().map(|h| src.crossings(h + eps)).collect();
        let (n, m) = (src.leaves.len(), dst.leaves.len());
        Self {
            src,
            dst,
            eps,
            alpha_options,
            beta_options,
            alpha: Vec::with_capacity(n),
            beta: Vec::with_capacity(m),
            ready: vec![Vec::new(); m],
        }
    }

    fn run(&mut self) -> bool {
        self.assign_alpha(0)
    }

    fn assign_alpha(&mut self, i: usize) -> bool {
        if i == self.src.leaves.len() {
            for r in &mut self.ready {
                r.clear();
            }
            for (k, &a) in self.alpha.iter().enumerate() {
                let last = *self.dst.below[a]
                    .last()
                    .expect("every node has a leaf below");
                self.ready[last].push(k);
            }
            return self.assign_beta(0);
        }
        for c in 0..self.alpha_options[i].len() {
            let v = self.alpha_options[i][c];
            if self.consistent(&self.src, &self.dst, &self.alpha, i, v) {
                self.alpha.push(v);
                if self.assign_alpha(i + 1) {
                    return true;
                }
                self.alpha.pop();
            }
        }
        false
    }

    fn assign_beta(&mut self, j: usize) -> bool {
        if j == self.dst.leaves.len() {
            return true;
        }
        for c in 0..self.beta_options[j].len() {
            let v = self.beta_options[j][c];
            if !self.consistent(&self.dst, &self.src, &self.beta, j, v) {
                continue;
            }
            self.beta.push(v);
            if self.alpha_after_beta(j) && self.beta_after_alpha(j) && self.assign_beta(j + 1) {
                return true;
            }
            self.beta.pop();
        }
        false
    }

    /// Well-definedness: the image `v` of leaf `i` must meet the images of
    /// earlier leaves no higher than their meeting height plus `eps`.
    fn consistent(&self, from: &Side, to: &Side, images: &[NodeId], i: usize, v: NodeId) -> bool {
        images.iter().enumerate().all(|(k, &w)| {
            let level = from.meet[i][k] + self.eps;
            to.anc(v, level) == to.anc(w, level)
        })
    }

    /// `alpha(beta(l'_j))` is `l'_j` raised by `2 eps`.
    fn alpha_after_beta(&self, j: usize) -> bool {
        let top = (self.dst.heights[j] + self.eps) + self.eps;
        let target = self.dst.anc(self.dst.leaves[j], top);
        self.src.below[self.beta[j]]
            .iter()
            .all(|&i| self.dst.anc(self.alpha[i], top) == target)
    }

    /// `beta(alpha(l_i))` is `l_i` raised by `2 eps`, for every src leaf whose
    /// image has all dst leaves below it assigned by now.
    fn beta_after_alpha(&self, j: usize) -> bool {
        self.ready[j].iter().all(|&i| {
            let top = (self.src.heights[i] + self.eps) + self.eps;
            let target = self.src.anc(self.src.leaves[i], top);
            self.dst.below[self.alpha[i]]
                .iter()
                .all(|&k| self.src.anc(self.beta[k], top) == target)
        })
    }

    fn witness(&self) -> InterleavingWitness {
        let points = |from: &Side, images: &[NodeId]| {
            from.heights
                .iter()
                .zip(images)
                .map(|(&h, &v)| PointOnTree {
                    base: v,
                    height: h + self.eps,
                })
                .collect()
        };
        InterleavingWitness {
            eps: self.eps,
            alpha: points(&self.src, &self.alpha),
            beta: points(&self.dst, &self.beta),
        }
    }
}

/// Finds an `eps`-interleaving between `t1` and `t2`, or `None` when none
/// exists.
pub fn decide_interleaving(
    t1: &MergeTree,
    t2: &MergeTree,
    eps: f64,
    cfg: &OracleConfig,
) -> Result<Option<InterleavingWitness>> {
    if !(eps >= 0.0) {
        return Err(Error::NegativeEpsilon(eps));
    }
    cfg.check(t1, t2)?;
    let mut search = Search::new(t1, t2, eps);
    Ok(search.run().then(|| search.witness()))
}

fn feasible(t1: &MergeTree, t2: &MergeTree, eps: f64) -> bool {
    Search::new(t1, t2, eps).run()
}

/// Candidate values for the interleaving distance: zero, and every
/// difference and half-difference of two vertex heights.
pub fn candidate_epsilons(t1: &MergeTree, t2: &MergeTree) -> Vec<f64> {
    let heights: Vec<f64> = t1
        .nodes()
        .iter()
        .chain(t2.nodes())
        .map(|n| n.height)
        .collect();
    let mut out = vec![0.0];
    for (a, b) in heights.iter().tuple_combinations() {
        let d = (a - b).abs();
        out.push(d);
        out.push(d / 2.0);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Exact interleaving distance and an interleaving attaining it.
///
/// Every candidate up to the trivial bound is decided (in parallel); the
/// smallest feasible one is the distance, and every larger candidate must be
/// feasible as well. With `cfg.cross_check` the value is re-derived by
/// bisection on `[0, trivial bound]`.
pub fn interleaving_distance_exact(
    t1: &MergeTree,
    t2: &MergeTree,
    cfg: &OracleConfig,
) -> Result<(f64, InterleavingWitness)> {
    cfg.check(t1, t2)?;
    let bound = trivial_interleaving_bound(t1, t2);
    let candidates: Vec<f64> = candidate_epsilons(t1, t2)
        .into_iter()
        .filter(|&e| e <= bound)
        .collect();
    let verdicts: Vec<bool> = candidates
        .par_iter()
        .map(|&e| feasible(t1, t2, e))
        .collect();
    let first = verdicts
        .iter()
        .position(|&ok| ok)
        .ok_or(Error::CandidateScanDefect {
            scan: f64::NAN,
            bisect: bound,
        })?;
    if let Some(k) = verdicts[first..].iter().position(|&ok| !ok) {
        return Err(Error::MonotonicityDefect {
            feasible: candidates[first],
            infeasible: candidates[first + k],
        });
    }
    let distance = candidates[first];
    if cfg.cross_check {
        let bisect = bisect_interleaving_distance(t1, t2, BISECTION_TOLERANCE, cfg)?;
        if (bisect - distance).abs() > BISECTION_TOLERANCE {
            return Err(Error::CandidateScanDefect {
                scan: distance,
                bisect,
            });
        }
    }
    let witness =
        decide_interleaving(t1, t2, distance, cfg)?.expect("candidate was decided feasible");
    Ok((distance, witness))
}

/// Interleaving distance located by bisection to within `tol`, returning the
/// feasible end of the final bracket.
pub fn bisect_interleaving_distance(
    t1: &MergeTree,
    t2: &MergeTree,
    tol: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    cfg.check(t1, t2)?;
    if feasible(t1, t2, 0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, trivial_interleaving_bound(t1, t2));
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if feasible(t1, t2, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest entrywise difference of the cophenetic matrices when the `i`-th
/// leaf of `t1` is paired with the `bijection[i]`-th leaf of `t2`; an upper
/// bound on the interleaving distance.
pub fn cophenetic_upper_bound(t1: &MergeTree, t2: &MergeTree, bijection: &[usize]) -> Result<f64> {
    let n = t1.leaf_count();
    if n != t2.leaf_count() {
        return Err(Error::LeafCountMismatch(n, t2.leaf_count()));
    }
    let mut seen = vec![false; n];
    if bijection.len() != n
        || bijection
            .iter()
            .any(|&j| j >= n || std::mem::replace(&mut seen[j], true))
    {
        return Err(Error::OrderMismatch(format!(
            "{bijection:?} is not a permutation of 0..{n}"
        )));
    }
    let (m1, m2) = (t1.cophenetic(), t2.cophenetic());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m1.get(i, j) - m2.get(bijection[i], bijection[j])).abs());
        }
    }
    Ok(worst)
}

/// Minimum of [`cophenetic_upper_bound`] over every leaf bijection; ties go
/// to the lexicographically first bijection.
pub fn best_labeled_upper_bound(
    t1: &MergeTree,
    t2: &MergeTree,
    cfg: &OracleConfig,
) -> Result<(f64, Vec<usize>)> {
    let n = t1.leaf_count();
    if n != t2.leaf_count() {
        return Err(Error::LeafCountMismatch(n, t2.leaf_count()));
    }
    cfg.check(t1, t2)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..n).permutations(n) {
        let value = cophenetic_upper_bound(t1, t2, &perm)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, perm));
        }
    }
    Ok(best.expect("at least one bijection"))
}
