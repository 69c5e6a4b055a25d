//! Chambers: trees with distinct leaf heights whose cophenetic entries
//! share one order pattern.
//!
//! Leaves are labelled by increasing height before the pattern is read off,
//! so two trees in the same chamber come with a canonical leaf bijection.
//! Inside a chamber the bottleneck and interleaving distances agree. The
//! largest entrywise difference of the labelled matrices bounds both from
//! above; it is attained when matching bars by label is optimal, which
//! holds for nearby trees but not across a whole chamber (see the
//! `labelled_difference_can_exceed_bottleneck` test).

use crate::error::{Error, Result};
use crate::paths::DiscretePath;
use crate::tree::{cophenetic_matrix, reconstruct_from_matrix, MergeTree, NodeId};

/// Dense ranks of the upper-triangular cophenetic entries `(i, j)`, `i <= j`,
/// in row-major order, with leaves sorted by increasing height. Equal
/// entries share a rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChamberSignature {
    pub n: usize,
    pub ranking: Vec<usize>,
}

impl ChamberSignature {
    /// Rank of the entry `(i, j)` in the height-sorted labelling.
    pub fn rank(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows before i hold n + (n - 1) + ... + (n - i + 1) entries
        let offset = i * self.n - i * (i.saturating_sub(1)) / 2;
        self.ranking[offset + (j - i)]
    }
}

/// Leaves sorted by increasing height; fails on a repeated leaf height.
fn height_order(t: &MergeTree) -> Result<Vec<NodeId>> {
    let mut leaves = t.leaves().to_vec();
    leaves.sort_by(|&a, &b| t.height(a).total_cmp(&t.height(b)));
    if let Some(w) = leaves.windows(2).find(|w| t.height(w[0]) == t.height(w[1])) {
        return Err(Error::DuplicateLeafHeights(t.height(w[0])));
    }
    Ok(leaves)
}

/// Cophenetic matrix with leaves sorted by increasing height.
pub fn sorted_matrix(t: &MergeTree) -> Result<Vec<Vec<f64>>> {
    Ok(cophenetic_matrix(t, &height_order(t)?)?.entries)
}

pub fn chamber_signature(t: &MergeTree) -> Result<ChamberSignature> {
    let m = sorted_matrix(t)?;
    let n = m.len();
    let entries: Vec<f64> = (0..n).flat_map(|i| m[i][i..].iter().copied()).collect();
    let mut values = entries.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let ranking = entries
        .iter()
        .map(|x| {
            values
                .binary_search_by(|v| v.total_cmp(x))
                .expect("value present")
        })
        .collect();
    Ok(ChamberSignature { n, ranking })
}

pub fn same_chamber(t1: &MergeTree, t2: &MergeTree) -> Result<bool> {
    Ok(chamber_signature(t1)? == chamber_signature(t2)?)
}

fn require_same_chamber(t1: &MergeTree, t2: &MergeTree) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if !same_chamber(t1, t2)? {
        return Err(Error::NotSameChamber);
    }
    Ok((sorted_matrix(t1)?, sorted_matrix(t2)?))
}

fn max_difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Largest entrywise difference of the height-sorted matrices of two trees
/// in the same chamber; an upper bound on their interleaving distance.
pub fn chamber_distance(t1: &MergeTree, t2: &MergeTree) -> Result<f64> {
    let (m1, m2) = require_same_chamber(t1, t2)?;
    Ok(max_difference(&m1, &m2))
}

/// Death heights of the Elder Rule in the height-sorted labelling: leaf `j`
/// dies where it first meets a lower leaf, and the lowest leaf never dies.
pub fn elder_right_endpoints(t: &MergeTree) -> Result<Vec<f64>> {
    let m = sorted_matrix(t)?;
    Ok((0..m.len())
        .map(|j| m[j][..j].iter().copied().fold(f64::INFINITY, f64::min))
        .collect())
}

/// `max_j max(|f_j - f'_j|, |a_j - a'_j|)` over the height-sorted leaves of
/// two trees in the same chamber: the cost of matching bars by label. It
/// coincides with [`chamber_distance`], since every off-diagonal entry is an
/// Elder death in both trees at the same position.
pub fn matching_lower_bound(t1: &MergeTree, t2: &MergeTree) -> Result<f64> {
    let (m1, m2) = require_same_chamber(t1, t2)?;
    let (a1, a2) = (elder_right_endpoints(t1)?, elder_right_endpoints(t2)?);
    let mut bound: f64 = 0.0;
    for j in 0..m1.len() {
        bound = bound.max((m1[j][j] - m2[j][j]).abs());
        if j > 0 {
            bound = bound.max((a1[j] - a2[j]).abs());
        }
    }
    Ok(bound)
}

/// Reconstructions of `(1 - t) M1 + t M2` at `t = k / samples`. All
/// waypoints stay in the chamber; the bottleneck length grows with
/// `samples` up to [`chamber_distance`], reached once every leg is short
/// compared with the bars.
pub fn chamber_linear_path(t1: &MergeTree, t2: &MergeTree, samples: usize) -> Result<DiscretePath> {
    if samples == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let (m1, m2) = require_same_chamber(t1, t2)?;
    let n = m1.len();
    let trees = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let m: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (1.0 - t) * m1[i][j] + t * m2[i][j])
                        .collect()
                })
                .collect();
            let diag: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
            reconstruct_from_matrix(&diag, &m)
        })
        .collect::<Result<Vec<_>>>()?;
    DiscretePath::uniform(trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::{bottleneck, elder_rule};
    use crate::interleaving::{interleaving_distance_exact, OracleConfig};
    use crate::paths::{discrete_length, Metric};
    use crate::tree::fixtures::*;
    use crate::tree::{
        check_three_point, isomorphic, random_chamber_partner, random_tree, validate,
    };
    use crate::tree::{HeightRange, RawNode};

    #[test]
    fn signature_examples() {
        let s = chamber_signature(&t_a()).unwrap();
        // entries (0,0)=0, (0,1)=3, (1,1)=1
        assert_eq!(
            s,
            ChamberSignature {
                n: 2,
                ranking: vec![0, 2, 1]
            }
        );
        assert_eq!(s.rank(1, 0), 2);
        assert_eq!(chamber_signature(&t_b()).unwrap(), s);
        let tied = validate(&[
            RawNode::new(0.0, Some(2)),
            RawNode::new(0.0, Some(2)),
            RawNode::new(1.0, None),
        ])
        .unwrap();
        assert_eq!(
            chamber_signature(&tied).unwrap_err().code(),
            "DuplicateLeafHeights"
        );
    }

    #[test]
    fn signature_ranks_follow_sorted_leaves() {
        let t = t_c();
        let s = chamber_signature(&t).unwrap();
        let m = sorted_matrix(&t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(m[i][j] < m[k][l], s.rank(i, j) < s.rank(k, l));
                    }
                }
            }
        }
        assert!((1..3).all(|i| s.rank(i - 1, i - 1) < s.rank(i, i)));
    }

    #[test]
    fn same_chamber_examples() {
        assert!(same_chamber(&t_a(), &t_b()).unwrap());
        assert!(!same_chamber(&t_a(), &t_c()).unwrap());
        assert!(same_chamber(&t_c(), &t_c()).unwrap());
        assert_eq!(
            chamber_distance(&t_a(), &t_c()).unwrap_err().code(),
            "NotSameChamber"
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(chamber_distance(&t_a(), &t_b()).unwrap(), 1.0);
        assert_eq!(chamber_distance(&t_c(), &t_c()).unwrap(), 0.0);
        assert_eq!(matching_lower_bound(&t_a(), &t_b()).unwrap(), 1.0);
        assert_eq!(matching_lower_bound(&t_c(), &t_c()).unwrap(), 0.0);
    }

    #[test]
    fn elder_endpoint_examples() {
        let inf = f64::INFINITY;
        assert_eq!(elder_right_endpoints(&t_a()).unwrap(), vec![inf, 3.0]);
        assert_eq!(elder_right_endpoints(&t_c()).unwrap(), vec![inf, 4.0, 2.5]);
        let s = MergeTree::single_leaf(1.0).unwrap();
        assert_eq!(elder_right_endpoints(&s).unwrap(), vec![inf]);
    }

    #[test]
    fn elder_endpoints_match_barcode_deaths() {
        for seed in 0..100 {
            let t = random_tree(1 + seed as usize % 7, seed, HeightRange::default()).unwrap();
            let mut a = elder_right_endpoints(&t).unwrap();
            let mut deaths: Vec<f64> = elder_rule(&t).intervals.iter().map(|i| i.death).collect();
            a.sort_by(f64::total_cmp);
            deaths.sort_by(f64::total_cmp);
            assert_eq!(a, deaths);
        }
    }

    #[test]
    fn in_chamber_distances_agree() {
        let cfg = OracleConfig::default();
        for seed in 0..60 {
            let t1 = random_tree(1 + seed as usize % 4, seed, HeightRange::default()).unwrap();
            let t2 = random_chamber_partner(&t1, seed + 77, HeightRange::default()).unwrap();
            assert!(same_chamber(&t1, &t2).unwrap());
            let d = chamber_distance(&t1, &t2).unwrap();
            let d_b = bottleneck(&elder_rule(&t1), &elder_rule(&t2)).0;
            let d_i = interleaving_distance_exact(&t1, &t2, &cfg).unwrap().0;
            assert_eq!(d_b, d_i, "seed {seed}");
            assert!(d_i <= d);
            assert_eq!(matching_lower_bound(&t1, &t2).unwrap(), d);

            let (a1, a2) = (
                elder_right_endpoints(&t1).unwrap(),
                elder_right_endpoints(&t2).unwrap(),
            );
            for j in 0..a1.len() {
                for k in 0..a1.len() {
                    assert_eq!(a1[j] <= a1[k], a2[j] <= a2[k]);
                }
            }
        }
    }

    #[test]
    fn labelled_difference_can_exceed_bottleneck() {
        let t1 = validate(&[
            RawNode::new(1.609375, Some(2)),
            RawNode::new(1.6669921875, Some(2)),
            RawNode::new(6.5322265625, None),
        ])
        .unwrap();
        let t2 = validate(&[
            RawNode::new(1.16015625, Some(2)),
            RawNode::new(4.6416015625, Some(2)),
            RawNode::new(6.328125, None),
        ])
        .unwrap();
        assert!(same_chamber(&t1, &t2).unwrap());
        // matching the finite bars costs |1.667 - 4.642|, dropping both
        // costs only half the longer one
        assert_eq!(chamber_distance(&t1, &t2).unwrap(), 2.974609375);
        let d_b = bottleneck(&elder_rule(&t1), &elder_rule(&t2)).0;
        assert_eq!(d_b, (6.5322265625 - 1.6669921875) / 2.0);
        let cfg = OracleConfig::default();
        assert_eq!(interleaving_distance_exact(&t1, &t2, &cfg).unwrap().0, d_b);
    }

    #[test]
    fn linear_path_examples() {
        let p = chamber_linear_path(&t_a(), &t_b(), 2).unwrap();
        let mid = &p.waypoints()[1].1;
        assert_eq!(mid.leaf_count(), 2);
        assert_eq!(mid.root_height(), 2.5);
        let cfg = OracleConfig::default();
        assert_eq!(discrete_length(&p, Metric::Bottleneck, &cfg).unwrap(), 1.0);
        for k in [1, 3, 8] {
            let p = chamber_linear_path(&t_a(), &t_b(), k).unwrap();
            assert_eq!(discrete_length(&p, Metric::Bottleneck, &cfg).unwrap(), 1.0);
        }
        let still = chamber_linear_path(&t_c(), &t_c(), 4).unwrap();
        assert!(still.trees().all(|t| isomorphic(t, &t_c())));
    }

    #[test]
    fn linear_paths_stay_in_the_chamber() {
        let cfg = OracleConfig::default();
        for seed in 0..30 {
            let t1 = random_tree(1 + seed as usize % 5, seed, HeightRange::default()).unwrap();
            let t2 = random_chamber_partner(&t1, seed + 3, HeightRange::default()).unwrap();
            let p = chamber_linear_path(&t1, &t2, 8).unwrap();
            assert!(isomorphic(p.first(), &t1));
            assert!(isomorphic(p.last(), &t2));
            for t in p.trees() {
                assert!(same_chamber(t, &t1).unwrap());
                check_three_point(&sorted_matrix(t).unwrap()).unwrap();
            }
            let d = chamber_distance(&t1, &t2).unwrap();
            let coarse = discrete_length(&p, Metric::Bottleneck, &cfg).unwrap();
            let fine = chamber_linear_path(&t1, &t2, 64).unwrap();
            let fine = discrete_length(&fine, Metric::Bottleneck, &cfg).unwrap();
            assert!(coarse <= fine && fine <= d, "seed {seed}");
        }
    }
}
