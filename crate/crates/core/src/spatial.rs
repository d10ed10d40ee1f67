//! Exact k-nearest-neighbor search.
//!
//! [`NeighborIndex`] is a bucketed kd-tree over point indices. Queries are
//! exact: candidates are ordered by `(squared distance, point index)`, so the
//! result matches a sorted linear scan bit for bit, ties included. The query
//! point itself is always excluded.
//!
//! [`NeighborGraph`] caches the k-NN lists of every point once, so feature
//! estimation and region growth read the same relation without re-querying.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::ingest::PointCloud;

const LEAF_SIZE: usize = 16;

/// One k-NN result entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Immutable kd-tree over the points of one cloud.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    points: Vec<Point3>,
    /// Point indices, permuted so every leaf owns a contiguous range.
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl NeighborIndex {
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        Self::from_points(&cloud.points)
    }

    pub fn from_points(points: &[Point3]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "{} points exceeds the index capacity",
                points.len()
            )));
        }
        let mut index = NeighborIndex {
            points: points.to_vec(),
            order: (0..points.len() as u32).collect(),
            nodes: Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1),
        };
        index.build_node(0, points.len());
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a as usize][axis].total_cmp(&points[b as usize][axis])
        });
        let value = points[self.order[mid] as usize][axis];
        // Placeholder, patched once the children exist.
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            let p = self.points[i as usize];
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0)
    }

    /// The `min(k, N-1)` nearest neighbors of point `query`, excluding the
    /// point itself, ascending by distance with ties broken by index.
    pub fn knn(&self, query: usize, k: usize) -> Result<Vec<Neighbor>> {
        let mut out = Vec::with_capacity(k.min(self.len()));
        self.knn_into(query, k, &mut out)?;
        Ok(out)
    }

    /// Like [`knn`](Self::knn), reusing `out`'s allocation.
    pub fn knn_into(&self, query: usize, k: usize, out: &mut Vec<Neighbor>) -> Result<()> {
        if query >= self.len() {
            return Err(Error::InvalidIndex {
                index: query,
                len: self.len(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidK {
                k,
                reason: "k must be at least 1".into(),
            });
        }
        let k = k.min(self.len() - 1);
        out.clear();
        if k == 0 {
            return Ok(());
        }
        let mut best = Candidates::new(k);
        self.search(query, &mut best);
        out.extend(best.items.iter().map(|&(d2, i)| Neighbor {
            index: i as usize,
            distance: d2.sqrt(),
        }));
        Ok(())
    }

    fn search(&self, query: usize, best: &mut Candidates) {
        let q = self.points[query];
        let mut stack: Vec<usize> = Vec::with_capacity(64);
        // Each entry carries the squared distance to its splitting plane.
        let mut bounds: Vec<f64> = Vec::with_capacity(64);
        stack.push(0);
        bounds.push(0.0);
        while let Some(node) = stack.pop() {
            let bound = bounds.pop().unwrap_or(0.0);
            if bound > best.worst() {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &i in &self.order[start..end] {
                        if i as usize == query {
                            continue;
                        }
                        let d2 = q.distance_squared(self.points[i as usize]);
                        best.offer(d2, i);
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = q[axis] - value;
                    let (near, far) = if diff <= 0.0 {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    // Far child pushed first so the near child is visited first.
                    stack.push(far);
                    bounds.push(diff * diff);
                    stack.push(near);
                    bounds.push(0.0);
                }
            }
        }
    }
}

/// Bounded, sorted candidate list keyed by `(d2, index)`.
struct Candidates {
    k: usize,
    items: Vec<(f64, u32)>,
}

impl Candidates {
    fn new(k: usize) -> Self {
        Candidates {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    fn offer(&mut self, d2: f64, index: u32) {
        let key = (d2, index);
        if self.items.len() == self.k {
            let last = self.items[self.k - 1];
            if !less(key, last) {
                return;
            }
            self.items.pop();
        }
        let pos = self.items.partition_point(|&e| less(e, key));
        self.items.insert(pos, key);
    }
}

fn less(a: (f64, u32), b: (f64, u32)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Source of the neighbor relation used during region growth.
pub trait Neighborhoods: Sync {
    fn point_count(&self) -> usize;

    /// Appends the k nearest neighbors of `query` (ascending distance,
    /// excluding the query) to `out` after clearing it.
    fn neighbors_into(&self, query: usize, k: usize, out: &mut Vec<usize>) -> Result<()>;
}

impl Neighborhoods for NeighborIndex {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn neighbors_into(&self, query: usize, k: usize, out: &mut Vec<usize>) -> Result<()> {
        let mut tmp = Vec::with_capacity(k);
        self.knn_into(query, k, &mut tmp)?;
        out.clear();
        out.extend(tmp.iter().map(|n| n.index));
        Ok(())
    }
}

/// Precomputed k-NN lists for every point, stored flat.
#[derive(Clone, Debug)]
pub struct NeighborGraph {
    k: usize,
    n: usize,
    neighbors: Vec<u32>,
}

impl NeighborGraph {
    /// Queries every point in parallel; output is independent of thread count.
    pub fn build(index: &NeighborIndex, k: usize) -> Result<Self> {
        if k == 0 || k > index.len().saturating_sub(1) {
            return Err(Error::InvalidK {
                k,
                reason: format!("need 1 <= k <= N-1 = {}", index.len().saturating_sub(1)),
            });
        }
        let n = index.len();
        let mut neighbors = vec![0u32; n * k];
        neighbors.par_chunks_mut(k).enumerate().try_for_each_init(
            Vec::new,
            |buf, (i, row)| -> Result<()> {
                index.knn_into(i, k, buf)?;
                for (slot, nb) in row.iter_mut().zip(buf.iter()) {
                    *slot = nb.index as u32;
                }
                Ok(())
            },
        )?;
        Ok(NeighborGraph { k, n, neighbors })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The cached neighbors of `i`, nearest first.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }
}

impl Neighborhoods for NeighborGraph {
    fn point_count(&self) -> usize {
        self.n
    }

    fn neighbors_into(&self, query: usize, k: usize, out: &mut Vec<usize>) -> Result<()> {
        if query >= self.n {
            return Err(Error::InvalidIndex {
                index: query,
                len: self.n,
            });
        }
        if k == 0 || k > self.k {
            return Err(Error::InvalidK {
                k,
                reason: format!("graph was built with k = {}", self.k),
            });
        }
        out.clear();
        // A k-NN list's prefix is the k'-NN list for any k' <= k.
        out.extend(self.neighbors(query)[..k].iter().map(|&i| i as usize));
        Ok(())
    }
}
