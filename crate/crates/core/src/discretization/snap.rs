use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{check_epsilon, Location, LocationGrid};
use crate::error::{KtcError, Result};
use crate::heuristics::angle;
use crate::model::{validate, Instance, Point, Solution, Tour, Violation};

/// Points too close to the depot to matter, each served by its own 1-tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripOutcome {
    /// Indices of the remaining points, increasing.
    pub kept: Vec<usize>,
    /// `(index, 2 r(p))` for every removed point.
    pub stripped: Vec<(usize, f64)>,
    /// L eps / n; points at or inside this radius are removed.
    pub threshold: f64,
    pub max_radius: f64,
    pub stripped_cost: f64,
    /// 2 L eps, which is at most eps * opt.
    pub cost_bound: f64,
}

impl StripOutcome {
    pub fn tours(&self) -> Vec<Tour> {
        self.stripped.iter().map(|&(i, _)| Tour::new(vec![i])).collect()
    }
}

pub fn strip_close_points(instance: &Instance, epsilon: f64) -> Result<StripOutcome> {
    check_epsilon(epsilon)?;
    let n = instance.len();
    let max_radius = instance.max_radius();
    let threshold = if n == 0 {
        0.0
    } else {
        max_radius * epsilon / n as f64
    };
    let mut kept = Vec::with_capacity(n);
    let mut stripped = Vec::new();
    for i in 0..n {
        let r = instance.radius(i);
        if r <= threshold {
            stripped.push((i, 2.0 * r));
        } else {
            kept.push(i);
        }
    }
    let stripped_cost = stripped.iter().fold(0.0, |acc, &(_, c)| acc + c);
    Ok(StripOutcome {
        kept,
        stripped,
        threshold,
        max_radius,
        stripped_cost,
        cost_bound: 2.0 * max_radius * epsilon,
    })
}

/// Points moved to their nearest locations.
///
/// `assignment` maps each snapped point (by its index in the original
/// instance) to a location; `counts` is the resulting multiplicity of every
/// occupied location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnappedInstance {
    pub grid: LocationGrid,
    pub counts: BTreeMap<Location, usize>,
    pub assignment: BTreeMap<usize, Location>,
    pub stripped: Vec<(usize, f64)>,
}

impl SnappedInstance {
    pub fn from_assignment(
        grid: LocationGrid,
        assignment: BTreeMap<usize, Location>,
        stripped: Vec<(usize, f64)>,
    ) -> Self {
        let mut counts = BTreeMap::new();
        for loc in assignment.values() {
            *counts.entry(*loc).or_insert(0) += 1;
        }
        SnappedInstance {
            grid,
            counts,
            assignment,
            stripped,
        }
    }

    pub fn point_count(&self) -> usize {
        self.assignment.len()
    }

    /// Original point indices at each occupied location, increasing.
    pub fn members(&self) -> BTreeMap<Location, Vec<usize>> {
        let mut m: BTreeMap<Location, Vec<usize>> = BTreeMap::new();
        for (&i, &loc) in &self.assignment {
            m.entry(loc).or_default().push(i);
        }
        m
    }

    /// Keeps only the points whose location satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(Location) -> bool) -> SnappedInstance {
        let assignment = self
            .assignment
            .iter()
            .filter(|(_, &loc)| keep(loc))
            .map(|(&i, &loc)| (i, loc))
            .collect();
        SnappedInstance::from_assignment(self.grid.clone(), assignment, Vec::new())
    }

    /// Distance a point moved when snapped.
    pub fn displacement(&self, instance: &Instance, index: usize) -> Option<f64> {
        self.assignment
            .get(&index)
            .map(|&loc| self.grid.position(loc).dist(instance.point(index)))
    }

    /// One point per snapped point, placed at its location, grouped by
    /// location. Copy `j` stands for original point `originals[j]`.
    pub fn materialize(&self, k: usize) -> LocatedInstance {
        let mut points = Vec::with_capacity(self.point_count());
        let mut locations = Vec::with_capacity(self.point_count());
        let mut originals = Vec::with_capacity(self.point_count());
        for (loc, ids) in self.members() {
            let pos = self.grid.position(loc);
            for i in ids {
                points.push(pos);
                locations.push(loc);
                originals.push(i);
            }
        }
        let instance = Instance::new(self.grid.origin, points, k)
            .expect("grid positions are finite and k was validated");
        LocatedInstance {
            instance,
            locations,
            originals,
        }
    }
}

/// A snapped multiset laid out as an ordinary instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedInstance {
    pub instance: Instance,
    pub locations: Vec<Location>,
    pub originals: Vec<usize>,
}

impl LocatedInstance {
    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }
}

/// Snaps every point of `instance`.
pub fn snap(instance: &Instance, grid: &LocationGrid) -> Result<SnappedInstance> {
    let ids: Vec<usize> = (0..instance.len()).collect();
    snap_points(instance, grid, &ids)
}

/// Snaps the points `ids` of `instance`; each must lie in the grid annulus.
pub fn snap_points(
    instance: &Instance,
    grid: &LocationGrid,
    ids: &[usize],
) -> Result<SnappedInstance> {
    let pairs: Vec<(usize, Location)> = ids
        .par_iter()
        .map(|&i| {
            let p = instance.point(i);
            let r = p.dist(grid.origin);
            let outer = grid.outer_radius();
            if r < grid.inner_radius * (1.0 - 1e-9) || r > outer * (1.0 + 1e-9) {
                return Err(KtcError::OutsideAnnulus {
                    index: i,
                    radius: r,
                    inner: grid.inner_radius,
                    outer,
                });
            }
            Ok((i, nearest_location(grid, p)))
        })
        .collect::<Result<_>>()?;
    Ok(SnappedInstance::from_assignment(
        grid.clone(),
        pairs.into_iter().collect(),
        Vec::new(),
    ))
}

/// Nearest of the four locations bracketing `p` (the two circles around
/// r(p) by the two rays around its angle). Near-ties go to the lower circle,
/// then the lower ray index.
pub fn nearest_location(grid: &LocationGrid, p: Point) -> Location {
    let v = p - grid.origin;
    let r = v.norm();
    let last = grid.circle_count - 1;
    let c0 = if r <= grid.inner_radius {
        0
    } else {
        (((r / grid.inner_radius).ln() / grid.growth.ln()).floor() as usize).min(last)
    };
    let c1 = (c0 + 1).min(last);

    let s = grid.ray_count;
    let theta = angle(v);
    let r0 = ((theta / (TAU / s as f64)).floor() as usize) % s;
    let r1 = (r0 + 1) % s;

    let tol = 1e-12 * r.max(grid.inner_radius);
    let mut best: Option<(f64, Location)> = None;
    for circle in [c0, c1] {
        for ray in [r0, r1] {
            let loc = Location::new(circle, ray);
            let d = grid.position(loc).dist(p);
            best = match best {
                None => Some((d, loc)),
                Some((bd, bl)) => {
                    if d < bd - tol || ((d - bd).abs() <= tol && loc < bl) {
                        Some((d, loc))
                    } else {
                        Some((bd, bl))
                    }
                }
            };
        }
    }
    best.expect("four candidates").1
}

/// Replaces every copy in a solution over the materialized instance by the
/// original point it stands for. Costs are recomputed on `instance`.
pub fn lift_solution(
    instance: &Instance,
    located: &LocatedInstance,
    solution: &Solution,
) -> Result<Solution> {
    let report = validate(&located.instance, solution);
    for v in &report.violations {
        match *v {
            Violation::Missing { index } => {
                return Err(KtcError::MultiplicityMismatch {
                    copy: index,
                    detail: "copy not covered".into(),
                })
            }
            Violation::Duplicate { index, occurrences } => {
                return Err(KtcError::MultiplicityMismatch {
                    copy: index,
                    detail: format!("copy covered {occurrences} times"),
                })
            }
            _ => {}
        }
    }
    report.into_result()?;
    let tours = solution
        .tours
        .iter()
        .map(|t| Tour::new(t.points().iter().map(|&c| located.originals[c]).collect()))
        .collect();
    Solution::new(instance, tours)
}
