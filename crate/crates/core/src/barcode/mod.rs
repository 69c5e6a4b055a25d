//! Degree-zero barcodes of merge trees.
//!
//! [`elder_rule`] detaches branches of the tree following the Elder Rule;
//! [`filtration_barcode_oracle`] sweeps sublevel sets with a union-find and
//! serves as an independent cross-check.

mod matching;

pub use matching::{
    bottleneck, bottleneck_bruteforce, matching_cost, PartialMatching, BRUTE_FORCE_LIMIT,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tree::{HeightRange, MergeTree, NodeId, HEIGHT_GRID};
use crate::union_find::UnionFind;

/// Half-open interval `[birth, death)`; `death` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() || death.is_nan() || death == f64::NEG_INFINITY || !(birth < death) {
            return Err(Error::InvalidInterval(format!(
                "[{birth}, {death}) is not a valid interval"
            )));
        }
        Ok(Self { birth, death })
    }

    pub fn infinite(birth: f64) -> Self {
        Self {
            birth,
            death: f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// Half the length: the cost of leaving the interval unmatched.
    pub fn half_persistence(&self) -> f64 {
        matching::endpoint_diff(self.death, self.birth) / 2.0
    }
}

/// Multiset of intervals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Intervals sorted by `(birth, death)`.
    pub fn sorted(&self) -> Vec<Interval> {
        let mut v = self.intervals.clone();
        v.sort_by(|a, b| {
            a.birth
                .total_cmp(&b.birth)
                .then_with(|| a.death.total_cmp(&b.death))
        });
        v
    }

    /// Equality as multisets.
    pub fn same_multiset(&self, other: &Barcode) -> bool {
        self.sorted() == other.sorted()
    }

    pub fn infinite_count(&self) -> usize {
        self.intervals.iter().filter(|i| i.is_infinite()).count()
    }
}

/// Barcode of a merge tree by the Elder Rule.
///
/// At each branch point the child whose subtree holds the lowest leaf
/// (smallest leaf id on ties) continues upwards; every other child's eldest
/// leaf dies at the branch height. The eldest leaf overall never dies.
pub fn elder_rule(t: &MergeTree) -> Barcode {
    fn eldest(t: &MergeTree, v: NodeId, out: &mut Vec<Interval>) -> (f64, NodeId) {
        if t.is_leaf(v) {
            return (t.height(v), v);
        }
        let mut elders: Vec<(f64, NodeId)> =
            t.children(v).iter().map(|&c| eldest(t, c, out)).collect();
        elders.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let h = t.height(v);
        for &(birth, _) in &elders[1..] {
            out.push(Interval { birth, death: h });
        }
        elders[0]
    }

    let mut out = Vec::with_capacity(t.leaf_count());
    let (birth, _) = eldest(t, t.root(), &mut out);
    out.push(Interval::infinite(birth));
    Barcode::new(Barcode::new(out).sorted())
}

/// Barcode of the sublevel-set filtration, computed by sweeping node heights
/// upwards and merging components in a union-find; at each merge the
/// younger components die.
pub fn filtration_barcode_oracle(t: &MergeTree) -> Barcode {
    let n = t.node_count();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by(|&a, &b| t.height(a).total_cmp(&t.height(b)));

    let mut uf = UnionFind::new(n);
    let mut birth = vec![f64::NAN; n];
    let mut out = Vec::with_capacity(t.leaf_count());
    for v in order {
        let h = t.height(v);
        if t.is_leaf(v) {
            birth[v] = h;
            continue;
        }
        let mut roots: Vec<usize> = t.children(v).iter().map(|&c| uf.find(c)).collect();
        roots.sort_by(|&a, &b| birth[a].total_cmp(&birth[b]));
        let survivor_birth = birth[roots[0]];
        for &r in &roots[1..] {
            out.push(Interval {
                birth: birth[r],
                death: h,
            });
        }
        let mut rep = v;
        for r in roots {
            rep = uf.union(rep, r);
        }
        birth[rep] = survivor_birth;
    }
    let top = uf.find(t.root());
    out.push(Interval::infinite(birth[top]));
    Barcode::new(Barcode::new(out).sorted())
}

/// Random barcode with `count` intervals on the height grid; roughly one in
/// four intervals is infinite.
pub fn random_barcode(count: usize, seed: u64, range: HeightRange) -> Barcode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = ((range.hi - range.lo) / HEIGHT_GRID).floor().max(2.0) as i64;
    let intervals = (0..count)
        .map(|_| {
            let b = rng.gen_range(0..steps - 1);
            let birth = range.lo + b as f64 * HEIGHT_GRID;
            if rng.gen_bool(0.25) {
                Interval::infinite(birth)
            } else {
                let d = rng.gen_range(b + 1..steps);
                Interval {
                    birth,
                    death: range.lo + d as f64 * HEIGHT_GRID,
                }
            }
        })
        .collect();
    Barcode::new(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures::*;
    use crate::tree::{random_tree, validate, RawNode};

    fn bars(v: &[(f64, f64)]) -> Barcode {
        Barcode::new(
            v.iter()
                .map(|&(b, d)| Interval { birth: b, death: d })
                .collect(),
        )
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn elder_rule_examples() {
        assert!(elder_rule(&t_a()).same_multiset(&bars(&[(0.0, INF), (1.0, 3.0)])));
        let s = MergeTree::single_leaf(2.0).unwrap();
        assert!(elder_rule(&s).same_multiset(&bars(&[(2.0, INF)])));
        assert!(elder_rule(&t_c()).same_multiset(&bars(&[(0.0, INF), (1.0, 4.0), (2.0, 2.5)])));
    }

    #[test]
    fn oracle_examples() {
        assert!(filtration_barcode_oracle(&t_a()).same_multiset(&bars(&[(0.0, INF), (1.0, 3.0)])));
        let tied = validate(&[
            RawNode::new(0.0, Some(2)),
            RawNode::new(0.0, Some(2)),
            RawNode::new(1.0, None),
        ])
        .unwrap();
        let expected = bars(&[(0.0, INF), (0.0, 1.0)]);
        assert!(filtration_barcode_oracle(&tied).same_multiset(&expected));
        assert!(elder_rule(&tied).same_multiset(&expected));
        let s = MergeTree::single_leaf(-1.0).unwrap();
        assert!(filtration_barcode_oracle(&s).same_multiset(&bars(&[(-1.0, INF)])));
    }

    #[test]
    fn elder_rule_matches_oracle_on_random_trees() {
        for seed in 0..300 {
            let t = random_tree(1 + seed as usize % 8, seed, HeightRange::default()).unwrap();
            let b = elder_rule(&t);
            assert!(
                b.same_multiset(&filtration_barcode_oracle(&t)),
                "seed {seed}"
            );
            assert_eq!(b.len(), t.leaf_count());
            assert_eq!(b.infinite_count(), 1);

            let mut births: Vec<f64> = b.intervals.iter().map(|i| i.birth).collect();
            let mut leaves = t.leaf_heights();
            births.sort_by(f64::total_cmp);
            leaves.sort_by(f64::total_cmp);
            assert_eq!(births, leaves);

            let mut deaths: Vec<f64> = b
                .intervals
                .iter()
                .filter(|i| !i.is_infinite())
                .map(|i| i.death)
                .collect();
            deaths.sort_by(f64::total_cmp);
            let mut branch = t.branch_heights();
            branch.sort_by(f64::total_cmp);
            // binary random trees: one death per branch point
            assert_eq!(deaths, branch);
        }
    }

    #[test]
    fn polytomy_deaths_repeat_with_multiplicity() {
        let t = validate(&[
            RawNode::new(0.0, Some(3)),
            RawNode::new(1.0, Some(3)),
            RawNode::new(2.0, Some(3)),
            RawNode::new(5.0, None),
        ])
        .unwrap();
        let b = elder_rule(&t);
        assert!(b.same_multiset(&bars(&[(0.0, INF), (1.0, 5.0), (2.0, 5.0)])));
        assert!(b.same_multiset(&filtration_barcode_oracle(&t)));
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).unwrap().is_infinite());
        assert_eq!(Interval::infinite(0.0).half_persistence(), f64::INFINITY);
        assert_eq!(Interval::new(1.0, 3.0).unwrap().half_persistence(), 1.0);
    }
}
