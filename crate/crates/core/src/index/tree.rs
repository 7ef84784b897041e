use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::index::metric::Metric;

pub const DEFAULT_LEAF_SIZE: usize = 15;

/// Counters for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub distance_evaluations: u64,
    pub nodes_visited: u64,
    pub wall_time: Duration,
}

/// A `(index, distance)` result, ordered by distance then index.
pub type Neighbor = (usize, f64);

#[derive(Clone, Debug)]
struct Node<P> {
    centroid: P,
    radius: f64,
    kind: NodeKind,
}

#[derive(Clone, Copy, Debug)]
enum NodeKind {
    Leaf { start: usize, end: usize },
    Internal { left: usize, right: usize },
}

/// Exact metric ball tree.
///
/// Each node keeps a centroid and the largest distance from it to any
/// point below. Nodes are split by the two-farthest-seeds rule: the point
/// farthest from the centroid, then the point farthest from that one;
/// each point joins the nearer seed. If that leaves a side empty (all
/// points coincide) the node is halved instead.
#[derive(Clone, Debug)]
pub struct BallTree<M: Metric> {
    metric: M,
    points: Vec<M::Point>,
    order: Vec<usize>,
    nodes: Vec<Node<M::Point>>,
    leaf_size: usize,
}

impl<M: Metric> BallTree<M> {
    pub fn build(points: Vec<M::Point>, metric: M, leaf_size: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("ball tree input"));
        }
        if leaf_size == 0 {
            return Err(Error::InvalidParameter("leaf size must be positive".into()));
        }
        let mut tree = Self {
            metric,
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
            leaf_size,
        };
        tree.build_node(0, tree.points.len());
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let idx = &self.order[start..end];
        let centroid = self.metric.centroid(&self.points, idx);
        let dc: Vec<f64> = idx
            .iter()
            .map(|&i| self.metric.distance(&centroid, &self.points[i]))
            .collect();
        let radius = dc.iter().copied().fold(0.0, f64::max);
        let id = self.nodes.len();
        self.nodes.push(Node {
            centroid,
            radius,
            kind: NodeKind::Leaf { start, end },
        });
        if end - start <= self.leaf_size {
            return id;
        }
        let a = idx[argmax(&dc)];
        let da: Vec<f64> = idx
            .iter()
            .map(|&i| self.metric.distance(&self.points[a], &self.points[i]))
            .collect();
        let b = idx[argmax(&da)];
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (pos, &i) in idx.iter().enumerate() {
            if da[pos] <= self.metric.distance(&self.points[b], &self.points[i]) {
                left.push(i);
            } else {
                right.push(i);
            }
        }
        if left.is_empty() || right.is_empty() {
            let mut by: Vec<(f64, usize)> = idx.iter().zip(&da).map(|(&i, &d)| (d, i)).collect();
            by.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let half = by.len() / 2;
            left = by[..half].iter().map(|&(_, i)| i).collect();
            right = by[half..].iter().map(|&(_, i)| i).collect();
        }
        let mid = start + left.len();
        self.order[start..mid].copy_from_slice(&left);
        self.order[mid..end].copy_from_slice(&right);
        let l = self.build_node(start, mid);
        let r = self.build_node(mid, end);
        self.nodes[id].kind = NodeKind::Internal { left: l, right: r };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[M::Point] {
        &self.points
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf { .. }))
            .count()
    }

    pub fn root_radius(&self) -> f64 {
        self.nodes[0].radius
    }

    /// Checks that every node's radius covers its subtree and that the
    /// leaves partition the index set. Returns the first violation found.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut seen = vec![false; self.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            let (start, end) = self.span(id);
            for &i in &self.order[start..end] {
                let d = self.metric.distance(&node.centroid, &self.points[i]);
                if d > node.radius {
                    return Err(format!("node {id}: point {i} at {d} outside radius {}", node.radius));
                }
            }
            if let NodeKind::Leaf { start, end } = node.kind {
                for &i in &self.order[start..end] {
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(format!("point {i} in two leaves"));
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(format!("point {i} in no leaf")),
            None => Ok(()),
        }
    }

    /// Indices of the points below node `id`.
    pub fn node_members(&self, id: usize) -> &[usize] {
        let (start, end) = self.span(id);
        &self.order[start..end]
    }

    fn span(&self, id: usize) -> (usize, usize) {
        match self.nodes[id].kind {
            NodeKind::Leaf { start, end } => (start, end),
            NodeKind::Internal { left, right } => (self.span(left).0, self.span(right).1),
        }
    }

    /// Exact `k` nearest neighbors of `q`, ascending by distance, ties to
    /// the lower index.
    pub fn query_knn(&self, q: &M::Point, k: usize) -> Result<(Vec<Neighbor>, QueryStats)> {
        self.query_knn_observed(q, k, &mut |_, _, _, _| {})
    }

    /// As [`query_knn`](Self::query_knn), calling `on_prune(node, d(q,
    /// centroid), radius, kth)` whenever a subtree is skipped.
    pub fn query_knn_observed(
        &self,
        q: &M::Point,
        k: usize,
        on_prune: &mut dyn FnMut(usize, f64, f64, f64),
    ) -> Result<(Vec<Neighbor>, QueryStats)> {
        check_k(k, self.len())?;
        let started = Instant::now();
        let mut stats = QueryStats::default();
        let mut best = Vec::with_capacity(k + 1);
        // The root is never pruned, so its centroid distance is not needed.
        self.search(0, 0.0, q, k, &mut best, &mut stats, on_prune);
        stats.wall_time = started.elapsed();
        Ok((best, stats))
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        id: usize,
        dq: f64,
        q: &M::Point,
        k: usize,
        best: &mut Vec<Neighbor>,
        stats: &mut QueryStats,
        on_prune: &mut dyn FnMut(usize, f64, f64, f64),
    ) {
        let node = &self.nodes[id];
        if best.len() == k {
            let kth = best[k - 1].1;
            if prunable(dq, node.radius, kth) {
                on_prune(id, dq, node.radius, kth);
                return;
            }
        }
        stats.nodes_visited += 1;
        match node.kind {
            NodeKind::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = self.metric.distance(q, &self.points[i]);
                    stats.distance_evaluations += 1;
                    offer(best, k, (i, d));
                }
            }
            NodeKind::Internal { left, right } => {
                let dl = self.metric.distance(q, &self.nodes[left].centroid);
                let dr = self.metric.distance(q, &self.nodes[right].centroid);
                stats.distance_evaluations += 2;
                let (first, second) = if dr < dl {
                    ((right, dr), (left, dl))
                } else {
                    ((left, dl), (right, dr))
                };
                self.search(first.0, first.1, q, k, best, stats, on_prune);
                self.search(second.0, second.1, q, k, best, stats, on_prune);
            }
        }
    }
}

/// Skip a node only when even rounding error cannot bring a member within
/// the current k-th distance. Equal distances are never pruned, so index
/// tie-breaking matches a linear scan.
fn prunable(dq: f64, radius: f64, kth: f64) -> bool {
    dq - radius - kth > 1e-9 * (dq + radius + kth)
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

fn before(a: Neighbor, b: Neighbor) -> bool {
    a.1 < b.1 || (a.1 == b.1 && a.0 < b.0)
}

/// Inserts `cand` into the sorted list `best`, keeping at most `k`.
pub(crate) fn offer(best: &mut Vec<Neighbor>, k: usize, cand: Neighbor) {
    if best.len() == k && !before(cand, best[k - 1]) {
        return;
    }
    let pos = best.partition_point(|&b| before(b, cand));
    best.insert(pos, cand);
    best.truncate(k);
}

/// Linear scan: every point is a candidate.
pub fn brute_knn<M: Metric>(
    points: &[M::Point],
    q: &M::Point,
    k: usize,
    metric: &M,
) -> Result<(Vec<Neighbor>, QueryStats)> {
    check_k(k, points.len())?;
    let started = Instant::now();
    let mut best = Vec::with_capacity(k + 1);
    for (i, p) in points.iter().enumerate() {
        offer(&mut best, k, (i, metric.distance(q, p)));
    }
    let stats = QueryStats {
        distance_evaluations: points.len() as u64,
        nodes_visited: 0,
        wall_time: started.elapsed(),
    };
    Ok((best, stats))
}
