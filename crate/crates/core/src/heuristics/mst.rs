//! Euclidean minimum spanning trees.
//!
//! Small inputs use Prim's O(n^2) scan. Larger inputs restrict Kruskal to
//! the Delaunay edges, which always contain a Euclidean MST, giving
//! O(n log n). Coincident points are merged before triangulating and then
//! attached to their representative by zero-length edges.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::model::Point;

/// Inputs up to this size use the quadratic Prim scan.
pub const PRIM_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Edges of a minimum spanning tree over `nodes` (n - 1 edges for n nodes).
pub fn euclidean_mst(nodes: &[Point]) -> Vec<MstEdge> {
    if nodes.len() <= PRIM_THRESHOLD {
        prim(nodes)
    } else {
        delaunay_kruskal(nodes).unwrap_or_else(|| prim(nodes))
    }
}

pub fn mst_weight(nodes: &[Point]) -> f64 {
    euclidean_mst(nodes).iter().fold(0.0, |acc, e| acc + e.length)
}

pub(crate) fn prim(nodes: &[Point]) -> Vec<MstEdge> {
    let n = nodes.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    for v in 1..n {
        best[v] = nodes[0].dist(nodes[v]);
    }
    for _ in 1..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (pick == usize::MAX || best[v] < best[pick]) {
                pick = v;
            }
        }
        in_tree[pick] = true;
        edges.push(MstEdge {
            a: parent[pick],
            b: pick,
            length: best[pick],
        });
        for v in 0..n {
            if !in_tree[v] {
                let d = nodes[pick].dist(nodes[v]);
                if d < best[v] {
                    best[v] = d;
                    parent[v] = pick;
                }
            }
        }
    }
    edges
}

struct Site {
    pos: Point2<f64>,
    id: usize,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

fn delaunay_kruskal(nodes: &[Point]) -> Option<Vec<MstEdge>> {
    let mut edges = Vec::with_capacity(3 * nodes.len());

    // Merge coincident points; the triangulation keeps one of each.
    let mut rep: HashMap<(u64, u64), usize> = HashMap::with_capacity(nodes.len());
    let mut sites = Vec::with_capacity(nodes.len());
    for (i, p) in nodes.iter().enumerate() {
        // Normalize -0.0 so it coincides with 0.0.
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        match rep.get(&key) {
            Some(&r) => edges.push(MstEdge { a: r, b: i, length: 0.0 }),
            None => {
                rep.insert(key, i);
                sites.push(Site {
                    pos: Point2::new(p.x, p.y),
                    id: i,
                });
            }
        }
    }

    let tri: DelaunayTriangulation<Site> = DelaunayTriangulation::bulk_load(sites).ok()?;
    for e in tri.undirected_edges() {
        let [u, v] = e.vertices();
        let (a, b) = (u.data().id, v.data().id);
        edges.push(MstEdge {
            a: a.min(b),
            b: a.max(b),
            length: nodes[a].dist(nodes[b]),
        });
    }
    edges.sort_by(|x, y| {
        x.length
            .total_cmp(&y.length)
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });

    let mut uf = UnionFind::<usize>::new(nodes.len());
    let mut tree = Vec::with_capacity(nodes.len().saturating_sub(1));
    for e in edges {
        if uf.union(e.a, e.b) {
            tree.push(e);
            if tree.len() + 1 == nodes.len() {
                break;
            }
        }
    }
    // A triangulation that dropped vertices would leave the tree short.
    (tree.len() + 1 == nodes.len()).then_some(tree)
}
