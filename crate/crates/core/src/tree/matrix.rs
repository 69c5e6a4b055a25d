//! Cophenetic matrices and the single-linkage reconstruction that inverts
//! them.

use super::{validate, MergeTree, NodeId, RawNode};
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Leaf heights on the diagonal, heights of pairwise least common ancestors
/// off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CopheneticMatrix {
    pub order: Vec<NodeId>,
    pub entries: Vec<Vec<f64>>,
}

impl CopheneticMatrix {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.entries[i][i]).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }
}

/// Cophenetic matrix of `t` with rows in the given leaf order.
pub fn cophenetic_matrix(t: &MergeTree, order: &[NodeId]) -> Result<CopheneticMatrix> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != t.leaves() {
        return Err(Error::OrderMismatch(format!(
            "expected a permutation of {:?}, got {:?}",
            t.leaves(),
            order
        )));
    }
    let n = order.len();
    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        entries[i][i] = t.height(order[i]);
        for j in (i + 1)..n {
            let h = t.height(t.node_lca(order[i], order[j]));
            entries[i][j] = h;
            entries[j][i] = h;
        }
    }
    Ok(CopheneticMatrix {
        order: order.to_vec(),
        entries,
    })
}

impl MergeTree {
    /// Cophenetic matrix in the tree's own leaf order.
    pub fn cophenetic(&self) -> CopheneticMatrix {
        cophenetic_matrix(self, self.leaves()).expect("own leaves form a valid order")
    }
}

/// Checks `m[i][j] <= max(m[i][k], m[j][k])` over every triple.
pub fn check_three_point(m: &[Vec<f64>]) -> Result<()> {
    let n = m.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if m[i][j] > m[i][k].max(m[j][k]) {
                    return Err(Error::ThreePointViolation { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// Builds the merge tree whose labelled points realise `diag` and `m`.
///
/// Label `i` sits at height `diag[i]` and `m[i][j]` is the height where the
/// labels meet. A label lying on the upward path of another label (entry
/// equal to its own height) does not create a leaf; ties between labels at
/// the same point keep the lowest index.
pub fn reconstruct_from_matrix(diag: &[f64], m: &[Vec<f64>]) -> Result<MergeTree> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::MalformedMatrix("no labels".into()));
    }
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::MalformedMatrix(format!("expected a {n}x{n} matrix")));
    }
    for i in 0..n {
        if !diag[i].is_finite() {
            return Err(Error::MalformedMatrix(format!(
                "diagonal entry {i} is not finite"
            )));
        }
        if m[i][i] != diag[i] {
            return Err(Error::MalformedMatrix(format!(
                "entry ({i}, {i}) = {} differs from diagonal height {}",
                m[i][i], diag[i]
            )));
        }
        for j in 0..n {
            if !m[i][j].is_finite() {
                return Err(Error::MalformedMatrix(format!(
                    "entry ({i}, {j}) is not finite"
                )));
            }
            if m[i][j] != m[j][i] {
                return Err(Error::MalformedMatrix(format!(
                    "entry ({i}, {j}) is not symmetric"
                )));
            }
            if m[i][j] < diag[i].max(diag[j]) {
                return Err(Error::DiagonalDominanceViolation { i, j });
            }
        }
    }
    check_three_point(m)?;

    let redundant = |i: usize| {
        (0..n).any(|j| {
            j != i && m[i][j] == diag[i] && (diag[j] < diag[i] || (diag[j] == diag[i] && j < i))
        })
    };
    let leaves: Vec<usize> = (0..n).filter(|&i| !redundant(i)).collect();
    let k = leaves.len();

    let mut raw: Vec<RawNode> = leaves
        .iter()
        .map(|&i| RawNode::new(diag[i], None))
        .collect();
    let mut levels: Vec<f64> = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            levels.push(m[leaves[a]][leaves[b]]);
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let mut uf = UnionFind::new(k);
    let mut component_node: Vec<usize> = (0..k).collect();
    for h in levels {
        let old_root: Vec<usize> = (0..k).map(|a| uf.find(a)).collect();
        for a in 0..k {
            for b in (a + 1)..k {
                if m[leaves[a]][leaves[b]] == h {
                    uf.union(a, b);
                }
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut seen = vec![false; k];
        for a in 0..k {
            let r = old_root[a];
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let new_root = uf.find(r);
            match groups.iter_mut().find(|(root, _)| *root == new_root) {
                Some((_, members)) => members.push(r),
                None => groups.push((new_root, vec![r])),
            }
        }
        for (new_root, members) in groups {
            if members.len() < 2 {
                continue;
            }
            let id = raw.len();
            raw.push(RawNode::new(h, None));
            for r in members {
                raw[component_node[r]].parent = Some(id);
            }
            component_node[new_root] = id;
        }
    }
    validate(&raw)
}

/// The shifted tree `i^eps(T)`: every point moved up by `eps`, which prunes
/// branches shorter than `eps`.
pub fn shift(t: &MergeTree, eps: f64) -> Result<MergeTree> {
    if !(eps >= 0.0) {
        return Err(Error::NegativeEpsilon(eps));
    }
    let m = t.cophenetic();
    let n = m.len();
    let diag: Vec<f64> = m.diagonal().iter().map(|h| h + eps).collect();
    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            entries[i][j] = if i == j {
                diag[i]
            } else {
                m.get(i, j).max(diag[i]).max(diag[j])
            };
        }
    }
    reconstruct_from_matrix(&diag, &entries)
}
