//! Grouping of grid circles into rings, the choice of which rings to mark,
//! and the independent segments left between marked rings.

mod merge;
mod segments;
mod transform;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{LocationGrid, SnappedInstance};
use crate::heuristics::cover_heuristic;
use crate::model::{Instance, Solution, Tour};

pub use merge::merge;
pub use segments::{extract_segments, SegmentProblem, Segments};
pub use transform::{is_ring_respecting, ring_respecting_transform};

/// Consecutive circles grouped into rings of `width` circles each; the last
/// ring may be narrower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingLayout {
    pub width: usize,
    pub ring_count: usize,
    pub circle_count: usize,
}

impl RingLayout {
    pub fn ring_of_circle(&self, circle: usize) -> usize {
        circle / self.width
    }

    pub fn circles_of_ring(&self, ring: usize) -> Range<usize> {
        let start = ring * self.width;
        start..((ring + 1) * self.width).min(self.circle_count)
    }
}

/// Ring width `ceil(log_{1+eps/k}(6 / eps))`, so a full ring's outer radius
/// is at least `6 / eps` times its inner radius.
pub fn ring_width(epsilon: f64, k: usize) -> usize {
    let growth = 1.0 + epsilon / k as f64;
    ((6.0 / epsilon).ln() / growth.ln()).ceil().max(1.0) as usize
}

/// Marking period `ceil(24 / eps)`.
pub fn marking_period(epsilon: f64) -> usize {
    (24.0 / epsilon).ceil() as usize
}

pub fn build_rings(grid: &LocationGrid, epsilon: f64) -> RingLayout {
    let width = ring_width(epsilon, grid.k);
    RingLayout {
        width,
        ring_count: grid.circle_count.div_ceil(width),
        circle_count: grid.circle_count,
    }
}

/// Rings `j` with `j = residue (mod period)` are marked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPartition {
    pub layout: RingLayout,
    pub period: usize,
    /// In `1..=period`.
    pub residue: usize,
    pub marked: BTreeSet<usize>,
}

impl RingPartition {
    pub fn new(layout: RingLayout, period: usize, residue: usize) -> Self {
        let marked = (0..layout.ring_count)
            .filter(|j| j % period == residue % period)
            .collect();
        RingPartition {
            layout,
            period,
            residue,
            marked,
        }
    }

    pub fn is_marked(&self, ring: usize) -> bool {
        self.marked.contains(&ring)
    }

    pub fn is_marked_circle(&self, circle: usize) -> bool {
        self.is_marked(self.layout.ring_of_circle(circle))
    }
}

/// The chosen marking with a cover of the points in marked rings.
#[derive(Debug, Clone, PartialEq)]
pub struct Marking {
    pub partition: RingPartition,
    /// Tours over original point indices.
    pub cover: Solution,
    /// Points lying in marked rings.
    pub marked_points: Vec<usize>,
}

/// Tries every residue in `1..=a`: the points of the marked rings are
/// covered with the heuristic (on their original coordinates) and the
/// cheapest residue wins, ties going to the lowest.
pub fn select_marking(
    instance: &Instance,
    snapped: &SnappedInstance,
    layout: RingLayout,
    epsilon: f64,
) -> Marking {
    let period = marking_period(epsilon);
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&i, &loc) in &snapped.assignment {
        let class = layout.ring_of_circle(loc.circle) % period;
        by_class.entry(class).or_default().push(i);
    }
    let covers: BTreeMap<usize, Solution> = by_class
        .par_iter()
        .map(|(&class, ids)| (class, cover_of(instance, ids)))
        .collect();

    let cost_of = |b: usize| covers.get(&(b % period)).map_or(0.0, |s| s.cost);
    let mut best = 1;
    for b in 2..=period {
        if cost_of(b) < cost_of(best) {
            best = b;
        }
    }
    let class = best % period;
    Marking {
        partition: RingPartition::new(layout, period, best),
        cover: covers.get(&class).cloned().unwrap_or_else(Solution::empty),
        marked_points: by_class.get(&class).cloned().unwrap_or_default(),
    }
}

/// Heuristic cover of `ids`, re-indexed to the original instance.
fn cover_of(instance: &Instance, ids: &[usize]) -> Solution {
    let local = cover_heuristic(&instance.subset(ids));
    Solution {
        tours: local
            .tours
            .iter()
            .map(|t| Tour::new(t.points().iter().map(|&j| ids[j]).collect()))
            .collect(),
        cost: local.cost,
    }
}
