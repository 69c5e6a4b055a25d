//! Merge trees: a rooted tree with strictly increasing heights towards the
//! root, continued by an implicit unbounded ray above the root.
//!
//! Nodes live in a flat arena and are addressed by [`NodeId`]. A tree built
//! through [`validate`] is always in canonical form: every non-root internal
//! node has at least two children, and so does the root unless the tree is a
//! single point.

mod matrix;
mod perturb;
mod random;

pub use matrix::{
    check_three_point, cophenetic_matrix, reconstruct_from_matrix, shift, CopheneticMatrix,
};
pub use perturb::{add_padding_leaves, perturb_leaf_heights};
pub use random::{random_chamber_partner, random_tree, HeightRange, HEIGHT_GRID};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// A node as supplied by a caller, before validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawNode {
    pub height: f64,
    pub parent: Option<usize>,
}

impl RawNode {
    pub fn new(height: f64, parent: Option<usize>) -> Self {
        Self { height, parent }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub height: f64,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A validated merge tree in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    nodes: Vec<Node>,
    root: NodeId,
    leaves: Vec<NodeId>,
}

/// A point of a merge tree: the unique point at `height` on the increasing
/// path from `base` towards the root and the ray above it.
///
/// Points handed out by [`MergeTree::point`] are normalized, meaning `base`
/// is the deepest node at or below the point, so two normalized points are
/// the same point exactly when they compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOnTree {
    pub base: NodeId,
    pub height: f64,
}

/// Checks a raw node list and returns the canonical tree it describes.
///
/// Non-root nodes with a single child are smoothed away, and so is a chain
/// of single-child nodes at the top of the tree.
pub fn validate(raw: &[RawNode]) -> Result<MergeTree> {
    if raw.is_empty() {
        return Err(Error::EmptyTree);
    }
    let n = raw.len();
    for (i, node) in raw.iter().enumerate() {
        if !node.height.is_finite() {
            return Err(Error::NonFiniteHeight {
                node: i,
                height: node.height,
            });
        }
        if let Some(p) = node.parent {
            if p >= n {
                return Err(Error::ParentOutOfRange { node: i, parent: p });
            }
        }
    }

    let mut root = None;
    for (i, node) in raw.iter().enumerate() {
        if node.parent.is_none() {
            match root {
                None => root = Some(i),
                Some(first) => return Err(Error::MultipleRoots { first, second: i }),
            }
        }
    }

    // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            match state[v] {
                2 => break,
                1 => return Err(Error::CycleDetected { node: v }),
                _ => {}
            }
            state[v] = 1;
            walk.push(v);
            match raw[v].parent {
                Some(p) => v = p,
                None => break,
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    let root = root.ok_or(Error::CycleDetected { node: 0 })?;

    for (i, node) in raw.iter().enumerate() {
        if let Some(p) = node.parent {
            if node.height >= raw[p].height {
                return Err(Error::NonIncreasingHeight {
                    node: i,
                    parent: p,
                    child: node.height,
                    parent_height: raw[p].height,
                });
            }
        }
    }

    let mut children = vec![Vec::new(); n];
    for (i, node) in raw.iter().enumerate() {
        if let Some(p) = node.parent {
            children[p].push(i);
        }
    }

    let mut top = root;
    while children[top].len() == 1 {
        top = children[top][0];
    }
    // nodes strictly above `top` are all single-child and get dropped
    let mut kept = vec![false; n];
    let mut stack = vec![top];
    while let Some(v) = stack.pop() {
        kept[v] = children[v].len() != 1 || v == top;
        stack.extend(children[v].iter().copied());
    }
    let mut new_id = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if kept[v] {
            new_id[v] = count;
            count += 1;
        }
    }

    let mut nodes: Vec<Node> = Vec::with_capacity(count);
    for v in 0..n {
        if !kept[v] {
            continue;
        }
        let parent = if v == top {
            None
        } else {
            let mut p = raw[v].parent.expect("non-top node has a parent");
            while !kept[p] {
                p = raw[p].parent.expect("walk stays below top");
            }
            Some(new_id[p])
        };
        nodes.push(Node {
            height: raw[v].height,
            parent,
            children: Vec::new(),
        });
    }
    for v in 0..count {
        if let Some(p) = nodes[v].parent {
            nodes[p].children.push(v);
        }
    }
    let leaves = (0..count).filter(|&v| nodes[v].is_leaf()).collect();
    Ok(MergeTree {
        nodes,
        root: new_id[top],
        leaves,
    })
}

impl MergeTree {
    /// The tree consisting of a single leaf, which is also the root.
    pub fn single_leaf(height: f64) -> Result<Self> {
        validate(&[RawNode::new(height, None)])
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Leaf node ids in increasing id order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn height(&self, id: NodeId) -> f64 {
        self.nodes[id].height
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].is_leaf()
    }

    pub fn root_height(&self) -> f64 {
        self.height(self.root)
    }

    pub fn min_height(&self) -> f64 {
        self.leaves
            .iter()
            .map(|&l| self.height(l))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn leaf_heights(&self) -> Vec<f64> {
        self.leaves.iter().map(|&l| self.height(l)).collect()
    }

    /// Heights of all internal nodes.
    pub fn branch_heights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .filter(|n| !n.is_leaf())
            .map(|n| n.height)
            .collect()
    }

    /// Raw node list describing this tree; `validate` maps it back to an
    /// identical tree.
    pub fn to_raw(&self) -> Vec<RawNode> {
        self.nodes
            .iter()
            .map(|n| RawNode::new(n.height, n.parent))
            .collect()
    }

    /// Deepest node on the upward path from `node` whose height is at most
    /// `height`. That node is the normalized base of the point at `height`.
    pub fn ancestor_at(&self, node: NodeId, height: f64) -> NodeId {
        let mut v = node;
        while let Some(p) = self.nodes[v].parent {
            if self.nodes[p].height <= height {
                v = p;
            } else {
                break;
            }
        }
        v
    }

    /// Builds the normalized point at `height` above `base`.
    pub fn point(&self, base: NodeId, height: f64) -> Result<PointOnTree> {
        if base >= self.nodes.len() {
            return Err(Error::InvalidPoint(format!("node {base} does not exist")));
        }
        if !(height >= self.height(base)) || !height.is_finite() {
            return Err(Error::InvalidPoint(format!(
                "height {height} lies below node {base} at {}",
                self.height(base)
            )));
        }
        Ok(PointOnTree {
            base: self.ancestor_at(base, height),
            height,
        })
    }

    /// The point of a node itself.
    pub fn node_point(&self, node: NodeId) -> PointOnTree {
        PointOnTree {
            base: node,
            height: self.height(node),
        }
    }

    /// Moves `p` up by `amount` along the increasing path (the map `i^t`).
    pub fn shift_point(&self, p: PointOnTree, amount: f64) -> Result<PointOnTree> {
        if amount < 0.0 {
            return Err(Error::NegativeEpsilon(amount));
        }
        self.point(p.base, p.height + amount)
    }

    /// Deepest node that lies above both `a` and `b` (inclusive).
    pub fn node_lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let mut above_a = vec![false; self.nodes.len()];
        let mut v = Some(a);
        while let Some(x) = v {
            above_a[x] = true;
            v = self.nodes[x].parent;
        }
        let mut w = b;
        while !above_a[w] {
            w = self.nodes[w].parent.expect("root is above every node");
        }
        w
    }

    /// Least common ancestor of two points.
    pub fn lca(&self, u: PointOnTree, v: PointOnTree) -> Result<PointOnTree> {
        self.check_point(u)?;
        self.check_point(v)?;
        let c = self.node_lca(u.base, v.base);
        let h = self.height(c).max(u.height).max(v.height);
        self.point(c, h)
    }

    fn check_point(&self, p: PointOnTree) -> Result<()> {
        let q = self.point(p.base, p.height)?;
        if q.base != p.base {
            return Err(Error::InvalidPoint(format!(
                "point at {} above node {} is not normalized",
                p.height, p.base
            )));
        }
        Ok(())
    }

    /// Leaf nodes in the subtree rooted at `node`, in increasing id order.
    pub fn leaves_below(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            if self.is_leaf(v) {
                out.push(v);
            } else {
                stack.extend(self.children(v).iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    /// Exact, collision-free canonical encoding of the height-labelled
    /// rooted tree. Two trees are isomorphic iff their encodings are equal.
    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm(self.encode(self.root).1)
    }

    fn encode(&self, v: NodeId) -> (f64, Vec<Token>) {
        let mut kids: Vec<(f64, Vec<Token>)> =
            self.children(v).iter().map(|&c| self.encode(c)).collect();
        kids.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let h = self.height(v);
        let mut tokens = vec![Token::Open(height_bits(h))];
        let mut min = h;
        for (m, t) in kids {
            min = min.min(m);
            tokens.extend(t);
        }
        tokens.push(Token::Close);
        (min, tokens)
    }
}

fn height_bits(h: f64) -> u64 {
    // -0.0 and 0.0 are the same height
    if h == 0.0 {
        0
    } else {
        h.to_bits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Token {
    Open(u64),
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm(Vec<Token>);

/// Whether two merge trees are isomorphic as height-labelled rooted trees.
pub fn isomorphic(t1: &MergeTree, t2: &MergeTree) -> bool {
    t1.node_count() == t2.node_count() && t1.canonical_form() == t2.canonical_form()
}

/// Upper bound on the interleaving distance from sending everything onto the
/// two root rays: the larger root height minus the smallest height present.
pub fn trivial_interleaving_bound(t1: &MergeTree, t2: &MergeTree) -> f64 {
    let a = t1.root_height().max(t2.root_height());
    let b = t1.min_height().min(t2.min_height());
    a - b
}
