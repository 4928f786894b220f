//! Constant-factor machinery: a spanning-tree TSP tour, iterated tour
//! partitioning, and their composition, which is a (3 - 2/k)-approximation
//! of the optimal k-tour cover.

pub mod mst;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::model::{path_cost, radial_cost, Bounds, Instance, Point, Solution, Tour};

pub use mst::{euclidean_mst, mst_weight, MstEdge};

/// A closed tour through the depot and every point of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspTour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl TspTour {
    pub fn from_order(instance: &Instance, order: Vec<usize>) -> Self {
        let length = path_cost(instance.origin(), order.iter().map(|&i| instance.point(i)));
        TspTour { order, length }
    }
}

/// Depth-first preorder walk of the Euclidean MST over the depot and all
/// points, rooted at the depot and shortcut into a tour. Children are
/// visited by increasing angle from their parent, ties by index.
pub fn mst_tsp_tour(instance: &Instance) -> TspTour {
    let n = instance.len();
    if n == 0 {
        return TspTour {
            order: Vec::new(),
            length: 0.0,
        };
    }
    // node 0 is the depot, node i + 1 is point i
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(instance.origin());
    nodes.extend_from_slice(instance.points());

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for e in euclidean_mst(&nodes) {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n + 1];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(u) = stack.pop() {
        if u != 0 {
            order.push(u - 1);
        }
        let mut children: Vec<(f64, usize)> = adj[u]
            .iter()
            .filter(|&&v| !visited[v])
            .map(|&v| (angle(nodes[v] - nodes[u]), v))
            .collect();
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, v) in children.iter().rev() {
            visited[v] = true;
            stack.push(v);
        }
    }
    TspTour::from_order(instance, order)
}

/// Polar angle in [0, 2pi).
pub(crate) fn angle(v: Point) -> f64 {
    let a = v.y.atan2(v.x);
    let a = if a < 0.0 { a + std::f64::consts::TAU } else { a };
    if a >= std::f64::consts::TAU {
        0.0
    } else {
        a
    }
}

static ITP_CHECKS: AtomicU64 = AtomicU64::new(0);
static ITP_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide tally of the runtime check that every [`itp`] result obeys
/// `cost <= (1 - 1/k)|U| + rad(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItpStats {
    pub checks: u64,
    pub violations: u64,
}

pub fn itp_stats() -> ItpStats {
    ItpStats {
        checks: ITP_CHECKS.load(Ordering::Relaxed),
        violations: ITP_VIOLATIONS.load(Ordering::Relaxed),
    }
}

/// Upper bound on the ITP result for a tour of length `tour_length`.
pub fn itp_bound(instance: &Instance, tour_length: f64) -> f64 {
    let k = instance.k() as f64;
    (1.0 - 1.0 / k) * tour_length + radial_cost(instance)
}

/// Slack allowed in the runtime bound check: 1e-9 absolute plus a
/// relative term that only matters for very long tours.
pub fn itp_slack(bound: f64) -> f64 {
    1e-9 + 1e-12 * bound.abs()
}

/// Iterated tour partitioning.
///
/// For each offset `o` in `0..k` the tour order is cut into a leading run of
/// `o` points (a full run of `k` when `o == 0`) followed by runs of `k`, the
/// last possibly shorter; each run is closed through the depot. The
/// cheapest offset wins, ties going to the lowest offset.
///
/// Offset `o` cuts exactly the interior edges at positions `p` with
/// `(p + 1) % k == o`, so its cost is `|U|` plus the sum over those edges of
/// `r(left) + r(right) - d(left, right)`. All k costs are therefore
/// accumulated in one pass.
///
/// # Panics
/// If `tsp_tour.order` is not a permutation of the instance's points.
pub fn itp(instance: &Instance, tsp_tour: &TspTour) -> Solution {
    let n = instance.len();
    let order = &tsp_tour.order;
    assert_eq!(order.len(), n, "tour must visit every point once");
    let mut seen = vec![false; n];
    for &i in order {
        assert!(i < n && !seen[i], "tour must visit every point once");
        seen[i] = true;
    }
    if n == 0 {
        return Solution::empty();
    }

    let k = instance.k();
    let tour_length = path_cost(instance.origin(), order.iter().map(|&i| instance.point(i)));
    let mut delta = vec![0.0f64; k];
    for p in 0..n - 1 {
        let (a, b) = (order[p], order[p + 1]);
        delta[(p + 1) % k] +=
            instance.radius(a) + instance.radius(b) - instance.point(a).dist(instance.point(b));
    }
    let mut best = 0;
    for o in 1..k {
        if delta[o] < delta[best] {
            best = o;
        }
    }

    let first = if best == 0 { k } else { best };
    let mut tours = Vec::with_capacity(n / k + 2);
    tours.push(Tour::new(order[..first.min(n)].to_vec()));
    let mut start = first;
    while start < n {
        let end = (start + k).min(n);
        tours.push(Tour::new(order[start..end].to_vec()));
        start = end;
    }
    let solution = Solution::new(instance, tours).expect("tour indices checked above");

    let bound = itp_bound(instance, tour_length);
    ITP_CHECKS.fetch_add(1, Ordering::Relaxed);
    if solution.cost > bound + itp_slack(bound) {
        ITP_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
        debug_assert!(
            false,
            "ITP cost {} exceeds (1 - 1/k)|U| + rad(P) = {}",
            solution.cost, bound
        );
    }
    solution
}

/// ITP applied to the spanning-tree tour; O(n log n) for fixed k.
pub fn cover_heuristic(instance: &Instance) -> Solution {
    itp(instance, &mst_tsp_tour(instance))
}

/// Cheap bounds on the optimum.
///
/// The lower bound is the largest of rad(P), 2L (some tour reaches the
/// farthest point) and the MST weight over the depot and points (the union
/// of any cover is a connected spanning multigraph). The upper bound is the
/// heuristic cover.
pub fn bounds(instance: &Instance) -> Bounds {
    let radial = radial_cost(instance);
    let tour = mst_tsp_tour(instance);
    let upper = itp(instance, &tour).cost;
    Bounds {
        radial,
        tsp_upper: tour.length,
        opt_lower: lower_bound(instance),
        opt_upper: upper,
    }
}

pub fn lower_bound(instance: &Instance) -> f64 {
    let mut nodes = Vec::with_capacity(instance.len() + 1);
    nodes.push(instance.origin());
    nodes.extend_from_slice(instance.points());
    radial_cost(instance)
        .max(2.0 * instance.max_radius())
        .max(mst_weight(&nodes))
}
