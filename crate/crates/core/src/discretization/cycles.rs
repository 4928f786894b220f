//! Removal of location cycles among nontrivial tours.
//!
//! Tours `t_1..t_m` form a cycle when there are locations `l_1..l_m` with
//! each `t_i` visiting `l_i` and `l_{i+1}` (indices mod m). Shifting
//! `min_i v(t_i, l_i)` copies from `l_i` to `l_{i+1}` in every `t_i` keeps
//! each tour's size, never lengthens a tour (copies of one location are
//! coincident) and drops at least one location from some tour.

use std::collections::{BTreeMap, VecDeque};

use petgraph::unionfind::UnionFind;

use super::grid::Location;
use super::snap::LocatedInstance;
use crate::error::{KtcError, Result};
use crate::model::{validate, Solution, Tour};

/// A cycle of distinct tours meeting at distinct locations: `tours[i]`
/// visits `locations[i]` and `locations[(i + 1) % m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationCycle {
    pub tours: Vec<usize>,
    pub locations: Vec<Location>,
}

fn visits(located: &LocatedInstance, tour: &Tour) -> BTreeMap<Location, usize> {
    let mut m = BTreeMap::new();
    for &c in tour.points() {
        *m.entry(located.locations[c]).or_insert(0) += 1;
    }
    m
}

/// Sum over nontrivial tours of the number of distinct locations visited.
pub fn nontrivial_location_potential(located: &LocatedInstance, solution: &Solution) -> usize {
    solution
        .tours
        .iter()
        .map(|t| visits(located, t).len())
        .filter(|&c| c >= 2)
        .sum()
}

/// Finds a cycle in the incidence graph between nontrivial tours and the
/// locations they visit. The first edge (in tour, location order) that
/// closes a cycle is completed by a shortest path avoiding it.
pub fn find_location_cycle(located: &LocatedInstance, solution: &Solution) -> Option<LocationCycle> {
    let visit_maps: Vec<_> = solution.tours.iter().map(|t| visits(located, t)).collect();
    let mut loc_ids: BTreeMap<Location, usize> = BTreeMap::new();
    let mut edges: Vec<(usize, Location)> = Vec::new();
    for (t, m) in visit_maps.iter().enumerate() {
        if m.len() < 2 {
            continue;
        }
        for &loc in m.keys() {
            let next = loc_ids.len();
            loc_ids.entry(loc).or_insert(next);
            edges.push((t, loc));
        }
    }
    if edges.is_empty() {
        return None;
    }
    let tour_count = solution.tours.len();
    let node_of_loc = |loc| tour_count + loc_ids[&loc];
    let node_count = tour_count + loc_ids.len();

    let mut uf = UnionFind::<usize>::new(node_count);
    let mut closing = None;
    for &(t, loc) in &edges {
        if !uf.union(t, node_of_loc(loc)) {
            closing = Some((t, loc));
            break;
        }
    }
    let (t0, l0) = closing?;

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for &(t, loc) in &edges {
        if (t, loc) == (t0, l0) {
            continue;
        }
        let u = node_of_loc(loc);
        adj[t].push(u);
        adj[u].push(t);
    }
    // BFS from t0 to l0
    let target = node_of_loc(l0);
    let mut prev = vec![usize::MAX; node_count];
    let mut queue = VecDeque::from([t0]);
    prev[t0] = t0;
    while let Some(u) = queue.pop_front() {
        if u == target {
            break;
        }
        for &v in &adj[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    if prev[target] == usize::MAX {
        return None;
    }
    // path t0 = x0, L1, t1, L2, ..., t_{m-1}, target
    let mut path = vec![target];
    let mut cur = target;
    while cur != t0 {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();

    let loc_by_node: BTreeMap<usize, Location> =
        loc_ids.iter().map(|(&loc, &id)| (tour_count + id, loc)).collect();
    let tours: Vec<usize> = path.iter().step_by(2).copied().collect();
    // l_1 is the closing location, l_{i+1} sits between t_i and t_{i+1}
    let mut locations = vec![l0];
    locations.extend(path.iter().skip(1).step_by(2).take(tours.len() - 1).map(|n| loc_by_node[n]));
    Some(LocationCycle { tours, locations })
}

/// Repeatedly removes location cycles until the incidence graph between
/// nontrivial tours and locations is a forest. Tour sizes are preserved and
/// the cost does not increase.
pub fn eliminate_location_cycles(located: &LocatedInstance, solution: &Solution) -> Result<Solution> {
    validate(&located.instance, solution).into_result()?;
    let mut tours = solution.tours.clone();
    let mut potential = nontrivial_location_potential(located, solution);
    loop {
        let current = Solution {
            tours: tours.clone(),
            cost: 0.0,
        };
        let Some(cycle) = find_location_cycle(located, &current) else {
            break;
        };
        shift_along(located, &mut tours, &cycle);
        let next = nontrivial_location_potential(
            located,
            &Solution {
                tours: tours.clone(),
                cost: 0.0,
            },
        );
        if next >= potential {
            return Err(KtcError::Invariant(format!(
                "cycle removal did not decrease the location potential ({potential} -> {next})"
            )));
        }
        potential = next;
    }
    let out = Solution::new(&located.instance, tours)?;
    if out.cost > solution.cost + 1e-9 * solution.cost.max(1.0) {
        return Err(KtcError::Invariant(format!(
            "cycle removal increased cost from {} to {}",
            solution.cost, out.cost
        )));
    }
    Ok(out)
}

fn shift_along(located: &LocatedInstance, tours: &mut [Tour], cycle: &LocationCycle) {
    let m = cycle.tours.len();
    let count = |t: &Tour, loc| t.points().iter().filter(|&&c| located.locations[c] == loc).count();
    let min = (0..m)
        .map(|i| count(&tours[cycle.tours[i]], cycle.locations[i]))
        .min()
        .expect("cycle has tours");

    // take the last `min` copies of l_i out of t_i
    let mut moving: Vec<Vec<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let loc = cycle.locations[i];
        let tour = &mut tours[cycle.tours[i]].0;
        let mut taken = Vec::with_capacity(min);
        let mut idx = tour.len();
        while taken.len() < min {
            idx -= 1;
            if located.locations[tour[idx]] == loc {
                taken.push(tour.remove(idx));
            }
        }
        taken.reverse();
        moving.push(taken);
    }
    // t_i receives the copies of l_{i+1} released by t_{i+1}, next to its
    // own first copy of l_{i+1}
    for i in 0..m {
        let loc = cycle.locations[(i + 1) % m];
        let incoming = std::mem::take(&mut moving[(i + 1) % m]);
        let tour = &mut tours[cycle.tours[i]].0;
        let at = tour
            .iter()
            .position(|&c| located.locations[c] == loc)
            .expect("tour keeps its copies of the next location");
        tour.splice(at + 1..at + 1, incoming);
    }
    debug_assert!(tours.iter().all(|t| !t.is_empty()));
}
