//! Discrete paths in the space of merge trees.
//!
//! A path is a finite list of waypoints; its length under a metric is the
//! sum of the distances between consecutive waypoints, which can only grow
//! when waypoints are inserted.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::barcode::{bottleneck, elder_rule};
use crate::error::{Error, Result};
use crate::interleaving::{best_labeled_upper_bound, interleaving_distance_exact, OracleConfig};
use crate::io::write_tree;
use crate::tree::{
    random_tree, reconstruct_from_matrix, shift, HeightRange, MergeTree, PointOnTree,
};
use crate::union_find::UnionFind;

/// Waypoints `(t, tree)` with `t` running from 0 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    waypoints: Vec<(f64, MergeTree)>,
}

impl DiscretePath {
    /// Requires at least two waypoints, parameters nondecreasing from 0 to 1.
    pub fn new(waypoints: Vec<(f64, MergeTree)>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs at least two waypoints".into(),
            ));
        }
        let ts: Vec<f64> = waypoints.iter().map(|w| w.0).collect();
        if ts[0] != 0.0 || ts[ts.len() - 1] != 1.0 {
            return Err(Error::InvalidPath(
                "parameters must start at 0 and end at 1".into(),
            ));
        }
        if ts.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidPath(
                "parameters must be nondecreasing".into(),
            ));
        }
        Ok(Self { waypoints })
    }

    /// Trees placed at `t = k / (len - 1)`.
    pub fn uniform(trees: Vec<MergeTree>) -> Result<Self> {
        if trees.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs at least two waypoints".into(),
            ));
        }
        let last = (trees.len() - 1) as f64;
        Self::new(
            trees
                .into_iter()
                .enumerate()
                .map(|(k, t)| (k as f64 / last, t))
                .collect(),
        )
    }

    pub fn waypoints(&self) -> &[(f64, MergeTree)] {
        &self.waypoints
    }

    pub fn trees(&self) -> impl Iterator<Item = &MergeTree> {
        self.waypoints.iter().map(|w| &w.1)
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn first(&self) -> &MergeTree {
        &self.waypoints[0].1
    }

    pub fn last(&self) -> &MergeTree {
        &self.waypoints[self.waypoints.len() - 1].1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Bottleneck distance of the Elder Rule barcodes.
    Bottleneck,
    /// Exact interleaving distance (leaf-count limited).
    Interleaving,
    /// Best cophenetic upper bound over leaf bijections (equal leaf counts).
    CopheneticUpper,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Bottleneck => "bottleneck",
            Metric::Interleaving => "interleaving",
            Metric::CopheneticUpper => "cophenetic-upper",
        }
    }

    pub fn distance(self, t1: &MergeTree, t2: &MergeTree, cfg: &OracleConfig) -> Result<f64> {
        match self {
            Metric::Bottleneck => Ok(bottleneck(&elder_rule(t1), &elder_rule(t2)).0),
            Metric::Interleaving => Ok(interleaving_distance_exact(t1, t2, cfg)?.0),
            Metric::CopheneticUpper => Ok(best_labeled_upper_bound(t1, t2, cfg)?.0),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bottleneck" => Ok(Metric::Bottleneck),
            "interleaving" => Ok(Metric::Interleaving),
            "cophenetic-upper" => Ok(Metric::CopheneticUpper),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

/// Distances between consecutive waypoints.
pub fn leg_lengths(p: &DiscretePath, metric: Metric, cfg: &OracleConfig) -> Result<Vec<f64>> {
    p.waypoints
        .windows(2)
        .map(|w| metric.distance(&w[0].1, &w[1].1, cfg))
        .collect()
}

pub fn discrete_length(p: &DiscretePath, metric: Metric, cfg: &OracleConfig) -> Result<f64> {
    Ok(leg_lengths(p, metric, cfg)?.iter().sum())
}

/// Shifts every waypoint up by `eps`.
pub fn prune_path(p: &DiscretePath, eps: f64) -> Result<DiscretePath> {
    let waypoints = p
        .waypoints
        .iter()
        .map(|(t, tree)| Ok((*t, shift(tree, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscretePath { waypoints })
}

/// The path `s -> shift(t, s * eps)` sampled at `s = k / samples`.
pub fn shrink_legs(t: &MergeTree, eps: f64, samples: usize) -> Result<DiscretePath> {
    if samples == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let trees = (0..=samples)
        .map(|k| shift(t, k as f64 * eps / samples as f64))
        .collect::<Result<Vec<_>>>()?;
    DiscretePath::uniform(trees)
}

/// Minimax closure of the off-diagonal entries: `out[i][j]` is the least,
/// over index paths from `i` to `j`, of the largest entry along the path.
/// Diagonal entries are copied.
///
/// Computed with Kruskal's algorithm: when an edge of weight `w` first joins
/// two components, every pair across them gets `w`.
pub fn minimax_closure(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((m[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { m[i][i] } else { f64::NAN })
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(n);
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for (w, i, j) in edges {
        let (ri, rj) = (uf.find(i), uf.find(j));
        if ri == rj {
            continue;
        }
        for &a in &members[ri] {
            for &b in &members[rj] {
                out[a][b] = w;
                out[b][a] = w;
            }
        }
        let rep = uf.union(ri, rj);
        let moved = std::mem::take(&mut members[if rep == ri { rj } else { ri }]);
        members[rep].extend(moved);
    }
    out
}

/// A discrete path between two trees whose bottleneck length is at most
/// their interleaving distance.
#[derive(Debug, Clone)]
pub struct GeodesicWitness {
    pub path: DiscretePath,
    /// Interleaving distance of the endpoints.
    pub distance: f64,
    /// Largest entrywise difference of the two labelled matrices.
    pub matrix_gap: f64,
}

fn labelled_matrix(t: &MergeTree, points: &[PointOnTree]) -> Result<Vec<Vec<f64>>> {
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for a in 0..n {
        m[a][a] = points[a].height;
        for b in (a + 1)..n {
            let h = t.lca(points[a], points[b])?.height;
            m[a][b] = h;
            m[b][a] = h;
        }
    }
    Ok(m)
}

/// Interpolates labelled cophenetic matrices of `t1` and `t2` over the
/// common labels `leaves(t1) ⊔ leaves(t2)`, placed through an optimal
/// interleaving, and reconstructs a tree at every `t = k / samples` after
/// repairing the off-diagonal entries by minimax closure.
pub fn geodesic_witness(
    t1: &MergeTree,
    t2: &MergeTree,
    samples: usize,
    cfg: &OracleConfig,
) -> Result<GeodesicWitness> {
    if samples == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let (distance, w) = interleaving_distance_exact(t1, t2, cfg)?;
    let in_t1: Vec<PointOnTree> = t1
        .leaves()
        .iter()
        .map(|&l| t1.node_point(l))
        .chain(w.beta.iter().copied())
        .collect();
    let in_t2: Vec<PointOnTree> = w
        .alpha
        .iter()
        .copied()
        .chain(t2.leaves().iter().map(|&l| t2.node_point(l)))
        .collect();
    let m0 = labelled_matrix(t1, &in_t1)?;
    let m1 = labelled_matrix(t2, &in_t2)?;
    let n = m0.len();
    let mut matrix_gap: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            matrix_gap = matrix_gap.max((m0[a][b] - m1[a][b]).abs());
        }
    }
    if matrix_gap > distance + 1e-9 {
        return Err(Error::WitnessDefect(format!(
            "labelled matrices differ by {matrix_gap}, more than {distance}"
        )));
    }

    let trees = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let mt: Vec<Vec<f64>> = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| (1.0 - t) * m0[a][b] + t * m1[a][b])
                        .collect()
                })
                .collect();
            let repaired = minimax_closure(&mt);
            let diag: Vec<f64> = (0..n).map(|a| repaired[a][a]).collect();
            reconstruct_from_matrix(&diag, &repaired)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeodesicWitness {
        path: DiscretePath::uniform(trees)?,
        distance,
        matrix_gap,
    })
}

/// Tolerance of the hard upper check `S <= d_I`.
pub const HARD_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the soft check `|S - d_I|`.
pub const SOFT_TOLERANCE: f64 = 1e-6;
/// Tolerance of the refinement check between the two sample counts.
pub const REFINEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremConfig {
    pub trials: usize,
    pub max_leaves: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub leaves: (usize, usize),
    pub interleaving: f64,
    pub bottleneck: f64,
    pub matrix_gap: f64,
    /// Bottleneck length of the witness path at the requested sample count.
    pub length: f64,
    /// The other sample count of the refinement check and its length.
    pub refinement_samples: usize,
    pub refinement_length: f64,
    pub upper_ok: bool,
    pub bottleneck_ok: bool,
    pub close_ok: bool,
    pub refinement_ok: bool,
    /// Tree documents of the pair, kept for failing trials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<[String; 2]>,
}

impl TrialRecord {
    pub fn hard_ok(&self) -> bool {
        self.upper_ok && self.bottleneck_ok && self.refinement_ok
    }

    pub fn all_ok(&self) -> bool {
        self.hard_ok() && self.close_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub trials: usize,
    pub max_leaves: usize,
    pub samples: usize,
    pub seed: u64,
    pub upper_pass: usize,
    pub bottleneck_pass: usize,
    pub close_pass: usize,
    pub refinement_pass: usize,
    pub hard_pass: usize,
    pub records: Vec<TrialRecord>,
}

impl TheoremReport {
    pub fn close_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.close_pass as f64 / self.trials as f64
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.all_ok())
    }
}

/// Runs every check of one trial on the pair `(t1, t2)`.
///
/// The refinement check compares against half the sample count when it is
/// even (those waypoints are a subset) and double it otherwise.
pub fn run_trial(
    trial: usize,
    t1: &MergeTree,
    t2: &MergeTree,
    samples: usize,
    cfg: &OracleConfig,
) -> Result<TrialRecord> {
    let witness = geodesic_witness(t1, t2, samples, cfg)?;
    let d_i = witness.distance;
    let length = discrete_length(&witness.path, Metric::Bottleneck, cfg)?;
    let d_b = Metric::Bottleneck.distance(t1, t2, cfg)?;

    let refinement_samples = if samples % 2 == 0 {
        samples / 2
    } else {
        samples * 2
    };
    let other = geodesic_witness(t1, t2, refinement_samples, cfg)?;
    let refinement_length = discrete_length(&other.path, Metric::Bottleneck, cfg)?;
    let (coarse, fine) = if refinement_samples < samples {
        (refinement_length, length)
    } else {
        (length, refinement_length)
    };

    let mut record = TrialRecord {
        trial,
        leaves: (t1.leaf_count(), t2.leaf_count()),
        interleaving: d_i,
        bottleneck: d_b,
        matrix_gap: witness.matrix_gap,
        length,
        refinement_samples,
        refinement_length,
        upper_ok: length <= d_i + HARD_TOLERANCE,
        bottleneck_ok: d_b <= d_i,
        close_ok: (length - d_i).abs() <= SOFT_TOLERANCE * d_i.max(1.0),
        refinement_ok: coarse <= fine + REFINEMENT_TOLERANCE,
        fixture: None,
    };
    if !record.all_ok() {
        record.fixture = Some([write_tree(t1), write_tree(t2)]);
    }
    Ok(record)
}

/// The random pair of trial `trial`; each trial has its own generator
/// stream so the pairs do not depend on scheduling.
pub fn trial_pair(seed: u64, trial: usize, max_leaves: usize) -> Result<(MergeTree, MergeTree)> {
    if max_leaves == 0 {
        return Err(Error::InvalidLeafCount(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let n1 = rng.gen_range(1..=max_leaves);
    let n2 = rng.gen_range(1..=max_leaves);
    let t1 = random_tree(n1, rng.gen(), HeightRange::default())?;
    let t2 = random_tree(n2, rng.gen(), HeightRange::default())?;
    Ok((t1, t2))
}

/// Compares, on random pairs, the bottleneck length of the witness path
/// with the interleaving distance of its endpoints.
pub fn verify_intrinsic_theorem(
    cfg: &TheoremConfig,
    oracle: &OracleConfig,
) -> Result<TheoremReport> {
    if cfg.max_leaves > oracle.max_leaves {
        return Err(Error::TooManyLeaves {
            found: cfg.max_leaves,
            limit: oracle.max_leaves,
        });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let (t1, t2) = trial_pair(cfg.seed, trial, cfg.max_leaves)?;
            run_trial(trial, &t1, &t2, cfg.samples, oracle)
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |f: fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count();
    Ok(TheoremReport {
        trials: cfg.trials,
        max_leaves: cfg.max_leaves,
        samples: cfg.samples,
        seed: cfg.seed,
        upper_pass: count(|r| r.upper_ok),
        bottleneck_pass: count(|r| r.bottleneck_ok),
        close_pass: count(|r| r.close_ok),
        refinement_pass: count(|r| r.refinement_ok),
        hard_pass: count(TrialRecord::hard_ok),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures::*;
    use crate::tree::{check_three_point, isomorphic};

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn minimax_oracle(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = m.len();
        let mut d = m.to_vec();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i != j && i != k && j != k {
                        d[i][j] = d[i][j].min(d[i][k].max(d[k][j]));
                    }
                }
            }
        }
        d
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = rng.gen_range(0..8) as f64;
            for j in 0..i {
                let v = rng.gen_range(0..64) as f64 / 4.0;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }

    #[test]
    fn path_validation() {
        assert!(DiscretePath::new(vec![(0.0, t_a())]).is_err());
        assert!(DiscretePath::new(vec![(0.0, t_a()), (0.5, t_b())]).is_err());
        assert!(
            DiscretePath::new(vec![(0.0, t_a()), (0.7, t_b()), (0.5, t_a()), (1.0, t_a())])
                .is_err()
        );
        let p = DiscretePath::uniform(vec![t_a(), t_b(), t_c()]).unwrap();
        assert_eq!(p.waypoints()[1].0, 0.5);
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn length_examples() {
        let constant = DiscretePath::uniform(vec![t_c(); 4]).unwrap();
        for metric in [
            Metric::Bottleneck,
            Metric::Interleaving,
            Metric::CopheneticUpper,
        ] {
            assert_eq!(discrete_length(&constant, metric, &cfg()).unwrap(), 0.0);
        }
        let leg = DiscretePath::uniform(vec![t_a(), t_c()]).unwrap();
        let d = bottleneck(&elder_rule(&t_a()), &elder_rule(&t_c())).0;
        assert_eq!(
            discrete_length(&leg, Metric::Bottleneck, &cfg()).unwrap(),
            d
        );
        assert_eq!(
            discrete_length(&leg, Metric::CopheneticUpper, &cfg())
                .unwrap_err()
                .code(),
            "LeafCountMismatch"
        );
        assert_eq!(
            "cophenetic-upper".parse::<Metric>().unwrap(),
            Metric::CopheneticUpper
        );
        assert!("euclid".parse::<Metric>().is_err());
    }

    #[test]
    fn refinement_never_shortens() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..30u64 {
            let trees: Vec<MergeTree> = (0..4)
                .map(|k| {
                    random_tree(rng.gen_range(1..=3), seed * 10 + k, HeightRange::default())
                        .unwrap()
                })
                .collect();
            let coarse = DiscretePath::uniform(trees.clone()).unwrap();
            let mut finer = trees.clone();
            let extra =
                random_tree(rng.gen_range(1..=3), seed + 999, HeightRange::default()).unwrap();
            finer.insert(rng.gen_range(1..trees.len()), extra);
            let finer = DiscretePath::uniform(finer).unwrap();
            for metric in [Metric::Bottleneck, Metric::Interleaving] {
                let a = discrete_length(&coarse, metric, &cfg()).unwrap();
                let b = discrete_length(&finer, metric, &cfg()).unwrap();
                assert!(a <= b + 1e-12, "{metric}: {a} > {b}");
            }
            let bl = leg_lengths(&finer, Metric::Bottleneck, &cfg()).unwrap();
            let il = leg_lengths(&finer, Metric::Interleaving, &cfg()).unwrap();
            assert!(bl.iter().zip(&il).all(|(b, i)| b <= i));
        }
    }

    #[test]
    fn pruning_examples() {
        let p = DiscretePath::uniform(vec![t_a(), t_c(), t_b()]).unwrap();
        let same = prune_path(&p, 0.0).unwrap();
        for (a, b) in p.trees().zip(same.trees()) {
            assert!(isomorphic(a, b));
        }
        let pruned = prune_path(&p, 0.75).unwrap();
        assert!(pruned.trees().all(|t| t.leaf_count() <= 2));
        assert_eq!(prune_path(&p, -1.0).unwrap_err().code(), "NegativeEpsilon");
        let before = leg_lengths(&p, Metric::Bottleneck, &cfg()).unwrap();
        let after = leg_lengths(&pruned, Metric::Bottleneck, &cfg()).unwrap();
        assert!(after.iter().zip(&before).all(|(a, b)| a <= b));
    }

    #[test]
    fn shrinking_examples() {
        let t = t_c();
        let p = shrink_legs(&t, 0.75, 3).unwrap();
        assert_eq!(p.len(), 4);
        assert!(isomorphic(p.last(), &shift(&t, 0.75).unwrap()));
        for d in leg_lengths(&p, Metric::Interleaving, &cfg()).unwrap() {
            assert!(d <= 0.25, "{d}");
        }
        assert!(discrete_length(&p, Metric::Bottleneck, &cfg()).unwrap() <= 0.75);
        let still = shrink_legs(&t, 0.0, 5).unwrap();
        assert!(still.trees().all(|w| isomorphic(w, &t)));
        assert_eq!(
            shrink_legs(&t, 1.0, 0).unwrap_err().code(),
            "InvalidSampleCount"
        );
    }

    #[test]
    fn closure_matches_floyd_warshall() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=7 {
            for _ in 0..40 {
                let m = random_symmetric(n, &mut rng);
                let c = minimax_closure(&m);
                assert_eq!(c, minimax_oracle(&m));
                // idempotent, below the input, ultrametric off the diagonal
                assert_eq!(minimax_closure(&c), c);
                for i in 0..n {
                    for j in 0..n {
                        assert!(i == j || c[i][j] <= m[i][j]);
                    }
                }
                check_three_point(&c).unwrap();
            }
        }
    }

    #[test]
    fn closure_fixes_ultrametrics_and_is_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..50u64 {
            let m = random_tree(1 + seed as usize % 6, seed, HeightRange::default())
                .unwrap()
                .cophenetic()
                .entries;
            assert_eq!(minimax_closure(&m), m);

            let n = m.len();
            let a = random_symmetric(n, &mut rng);
            let b = random_symmetric(n, &mut rng);
            let gap = |x: &[Vec<f64>], y: &[Vec<f64>]| {
                let mut g: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        g = g.max((x[i][j] - y[i][j]).abs());
                    }
                }
                g
            };
            assert!(gap(&minimax_closure(&a), &minimax_closure(&b)) <= gap(&a, &b));
        }
    }

    #[test]
    fn geodesic_examples() {
        let g = geodesic_witness(&t_a(), &t_b(), 8, &cfg()).unwrap();
        assert_eq!(g.distance, 1.0);
        assert_eq!(
            discrete_length(&g.path, Metric::Bottleneck, &cfg()).unwrap(),
            1.0
        );
        assert!(isomorphic(g.path.first(), &t_a()));
        assert!(isomorphic(g.path.last(), &t_b()));

        let g = geodesic_witness(&t_c(), &t_c(), 4, &cfg()).unwrap();
        assert_eq!(g.distance, 0.0);
        assert!(g.path.trees().all(|t| isomorphic(t, &t_c())));
    }

    #[test]
    fn geodesic_postconditions_on_random_pairs() {
        for trial in 0..40 {
            let (t1, t2) = trial_pair(99, trial, 4).unwrap();
            let g = geodesic_witness(&t1, &t2, 16, &cfg()).unwrap();
            assert!(isomorphic(g.path.first(), &t1), "trial {trial}");
            assert!(isomorphic(g.path.last(), &t2), "trial {trial}");
            for d in leg_lengths(&g.path, Metric::Bottleneck, &cfg()).unwrap() {
                assert!(d <= g.matrix_gap / 16.0 + 1e-12);
            }
            assert!(
                discrete_length(&g.path, Metric::Bottleneck, &cfg()).unwrap() <= g.distance + 1e-9
            );
        }
    }

    #[test]
    fn theorem_trials() {
        let r = run_trial(0, &t_a(), &t_b(), 8, &cfg()).unwrap();
        assert_eq!((r.length, r.interleaving), (1.0, 1.0));
        assert!(r.all_ok() && r.fixture.is_none());
        let r = run_trial(1, &t_c(), &t_c(), 8, &cfg()).unwrap();
        assert_eq!((r.length, r.interleaving), (0.0, 0.0));

        let tc = TheoremConfig {
            trials: 12,
            max_leaves: 3,
            samples: 16,
            seed: 4,
        };
        let a = verify_intrinsic_theorem(&tc, &cfg()).unwrap();
        assert_eq!(a, verify_intrinsic_theorem(&tc, &cfg()).unwrap());
        assert_eq!(a.hard_pass, 12);
        let big = TheoremConfig {
            max_leaves: 7,
            ..tc
        };
        assert_eq!(
            verify_intrinsic_theorem(&big, &cfg()).unwrap_err().code(),
            "TooManyLeaves"
        );
    }
}
