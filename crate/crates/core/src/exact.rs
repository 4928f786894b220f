//! Exact oracles for desk-scale instances.
//!
//! [`held_karp_tsp`] and [`exact_ktc`] share one Held–Karp table over all
//! subsets of points (up to the group size that is needed). [`naive_ktc`]
//! is an independent check: it enumerates set partitions and block orders
//! directly and never touches the table.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{KtcError, Result};
use crate::heuristics::TspTour;
use crate::model::{path_cost, Instance, Point, Solution, Tour};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_points_dp: usize,
    pub max_points_naive: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_points_dp: 14,
            max_points_naive: 8,
        }
    }
}

const NO_PARENT: u8 = u8::MAX;

/// Held–Karp table: `path[mask * n + last]` is the shortest path leaving the
/// depot, visiting exactly `mask` and ending at `last`.
struct SubsetPaths {
    n: usize,
    to_origin: Vec<f64>,
    path: Vec<f64>,
    parent: Vec<u8>,
}

impl SubsetPaths {
    fn build(instance: &Instance, max_size: usize) -> Self {
        let n = instance.len();
        let pts = instance.points();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = pts[i].dist(pts[j]);
            }
        }
        let to_origin: Vec<f64> = (0..n).map(|i| instance.radius(i)).collect();
        let size = 1usize << n;
        let mut path = vec![f64::INFINITY; size * n.max(1)];
        let mut parent = vec![NO_PARENT; size * n.max(1)];
        for i in 0..n {
            path[(1 << i) * n + i] = to_origin[i];
        }
        for mask in 1..size {
            let pc = mask.count_ones() as usize;
            if pc < 2 || pc > max_size {
                continue;
            }
            for last in 0..n {
                if mask & (1 << last) == 0 {
                    continue;
                }
                let prev_mask = mask ^ (1 << last);
                let mut best = f64::INFINITY;
                let mut arg = NO_PARENT;
                let mut rest = prev_mask;
                while rest != 0 {
                    let prev = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let c = path[prev_mask * n + prev] + dist[prev * n + last];
                    if c < best {
                        best = c;
                        arg = prev as u8;
                    }
                }
                path[mask * n + last] = best;
                parent[mask * n + last] = arg;
            }
        }
        SubsetPaths {
            n,
            to_origin,
            path,
            parent,
        }
    }

    /// Shortest closed tour through the depot and `mask`, with its last point.
    fn closed(&self, mask: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut rest = mask;
        while rest != 0 {
            let last = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let c = self.path[mask * self.n + last] + self.to_origin[last];
            if c < best.0 {
                best = (c, last);
            }
        }
        best
    }

    fn order(&self, mask: usize) -> Vec<usize> {
        let (_, mut last) = self.closed(mask);
        let mut mask = mask;
        let mut rev = Vec::with_capacity(mask.count_ones() as usize);
        while mask != 0 {
            rev.push(last);
            let p = self.parent[mask * self.n + last];
            mask ^= 1 << last;
            if p == NO_PARENT {
                break;
            }
            last = p as usize;
        }
        debug_assert_eq!(mask, 0);
        rev.reverse();
        rev
    }
}

fn check_limit(instance: &Instance, limit: usize) -> Result<()> {
    if instance.len() > limit {
        Err(KtcError::TooLarge {
            points: instance.len(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// Minimum closed tour through the depot and all points.
pub fn held_karp_tsp(instance: &Instance, limits: &OracleLimits) -> Result<TspTour> {
    check_limit(instance, limits.max_points_dp)?;
    let n = instance.len();
    if n == 0 {
        return Ok(TspTour {
            order: Vec::new(),
            length: 0.0,
        });
    }
    let table = SubsetPaths::build(instance, n);
    let full = (1usize << n) - 1;
    let (length, _) = table.closed(full);
    Ok(TspTour {
        order: table.order(full),
        length,
    })
}

/// Optimal k-tour cover by dynamic programming over subsets:
/// `best[S] = min over G subset of S, |G| <= k, of tour(G) + best[S \ G]`.
/// `G` always contains the lowest point of `S`, which loses no optimum.
pub fn exact_ktc(instance: &Instance, limits: &OracleLimits) -> Result<Solution> {
    check_limit(instance, limits.max_points_dp)?;
    let n = instance.len();
    if n == 0 {
        return Ok(Solution::empty());
    }
    let k = instance.k().min(n);
    let table = SubsetPaths::build(instance, k);
    let size = 1usize << n;

    let mut group = vec![f64::INFINITY; size];
    for (mask, g) in group.iter_mut().enumerate().skip(1) {
        if mask.count_ones() as usize <= k {
            *g = table.closed(mask).0;
        }
    }

    let mut best = vec![f64::INFINITY; size];
    let mut choice = vec![0usize; size];
    best[0] = 0.0;
    for s in 1..size {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        // enumerate submasks of `rest`, each joined with `low`
        let mut sub = rest;
        loop {
            let g = sub | low;
            if g.count_ones() as usize <= k {
                let c = group[g] + best[s ^ g];
                if c < best[s] {
                    best[s] = c;
                    choice[s] = g;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut tours = Vec::new();
    let mut s = size - 1;
    while s != 0 {
        let g = choice[s];
        tours.push(Tour::new(table.order(g)));
        s ^= g;
    }
    Solution::new(instance, tours)
}

/// Re-sequences one tour optimally (Held–Karp on its points). Tours longer
/// than the DP limit are returned unchanged.
pub fn optimal_tour_order(instance: &Instance, tour: &Tour, limits: &OracleLimits) -> Tour {
    if tour.len() <= 2 || tour.len() > limits.max_points_dp {
        return tour.clone();
    }
    let sub = instance.subset(tour.points());
    match held_karp_tsp(&sub, limits) {
        Ok(t) => Tour::new(t.order.iter().map(|&j| tour.points()[j]).collect()),
        Err(_) => tour.clone(),
    }
}

/// Optimum by brute force: every partition into blocks of at most k points,
/// every order within each block.
pub fn naive_ktc(instance: &Instance, limits: &OracleLimits) -> Result<f64> {
    check_limit(instance, limits.max_points_naive)?;
    let n = instance.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut search = NaiveSearch {
        origin: instance.origin(),
        points: instance.points(),
        k: instance.k(),
        block_cost: HashMap::new(),
        blocks: Vec::new(),
        best: f64::INFINITY,
    };
    search.assign(0);
    Ok(search.best)
}

struct NaiveSearch<'a> {
    origin: Point,
    points: &'a [Point],
    k: usize,
    block_cost: HashMap<Vec<usize>, f64>,
    blocks: Vec<Vec<usize>>,
    best: f64,
}

impl NaiveSearch<'_> {
    /// Restricted-growth enumeration: point `i` joins an existing block or
    /// opens a new one.
    fn assign(&mut self, i: usize) {
        if i == self.points.len() {
            let blocks = self.blocks.clone();
            let total: f64 = blocks.iter().map(|b| self.cost_of(b)).sum();
            if total < self.best {
                self.best = total;
            }
            return;
        }
        for b in 0..self.blocks.len() {
            if self.blocks[b].len() < self.k {
                self.blocks[b].push(i);
                self.assign(i + 1);
                self.blocks[b].pop();
            }
        }
        self.blocks.push(vec![i]);
        self.assign(i + 1);
        self.blocks.pop();
    }

    fn cost_of(&mut self, block: &[usize]) -> f64 {
        if let Some(&c) = self.block_cost.get(block) {
            return c;
        }
        let mut perm = block.to_vec();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, &mut |order| {
            let c = path_cost(self.origin, order.iter().map(|&i| self.points[i]));
            if c < best {
                best = c;
            }
        });
        self.block_cost.insert(block.to_vec(), best);
        best
    }
}

fn permute(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}
