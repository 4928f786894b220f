//! Instances, tours, solutions and their costs.
//!
//! A tour is stored as the ordered list of point indices it visits; the
//! origin is implicit at both ends. Point identity is the index into
//! [`Instance::points`], so two points with equal coordinates are still
//! distinct customers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KtcError, Result};

/// Relative tolerance used when comparing a cached cost with a recomputed one.
pub const COST_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn translate(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// A depot, a list of customer points and the tour capacity `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    origin: Point,
    points: Vec<Point>,
    k: usize,
}

impl Instance {
    pub fn new(origin: Point, points: Vec<Point>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(KtcError::InvalidCapacity);
        }
        if !origin.is_finite() {
            return Err(KtcError::NonFiniteCoordinate { index: usize::MAX });
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(KtcError::NonFiniteCoordinate { index });
        }
        Ok(Instance { origin, points, k })
    }

    /// Instance with the depot at (0, 0).
    pub fn at_origin(points: Vec<Point>, k: usize) -> Result<Self> {
        Self::new(Point::ORIGIN, points, k)
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Point {
        self.points[index]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.origin, self.points.clone(), k)
    }

    /// Distance r(p) from point `index` to the origin.
    pub fn radius(&self, index: usize) -> f64 {
        self.points[index].dist(self.origin)
    }

    /// L, the largest distance from a point to the origin (0 when empty).
    pub fn max_radius(&self) -> f64 {
        (0..self.len()).map(|i| self.radius(i)).fold(0.0, f64::max)
    }

    /// The sub-instance on `ids`, in the given order. Point `j` of the result
    /// is point `ids[j]` of `self`.
    pub fn subset(&self, ids: &[usize]) -> Instance {
        Instance {
            origin: self.origin,
            points: ids.iter().map(|&i| self.points[i]).collect(),
            k: self.k,
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Instance {
        Instance {
            origin: self.origin.translate(dx, dy),
            points: self.points.iter().map(|p| p.translate(dx, dy)).collect(),
            k: self.k,
        }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(KtcError::InvalidIndex {
                index,
                len: self.len(),
            })
        }
    }
}

/// An ordered list of point indices; the depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tour(pub Vec<usize>);

impl Tour {
    pub fn new(points: Vec<usize>) -> Self {
        Tour(points)
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Tour {
        Tour(self.0.iter().rev().copied().collect())
    }
}

impl From<Vec<usize>> for Tour {
    fn from(v: Vec<usize>) -> Self {
        Tour(v)
    }
}

/// Length of the closed tour O -> p1 -> ... -> pm -> O.
pub fn tour_cost(instance: &Instance, tour: &Tour) -> Result<f64> {
    for &i in tour.points() {
        instance.check_index(i)?;
    }
    Ok(path_cost(instance.origin(), tour.points().iter().map(|&i| instance.point(i))))
}

/// Closed-walk length from `origin` through `pts` and back.
pub(crate) fn path_cost(origin: Point, pts: impl IntoIterator<Item = Point>) -> f64 {
    let mut prev = origin;
    let mut total = 0.0;
    for p in pts {
        total += prev.dist(p);
        prev = p;
    }
    total + prev.dist(origin)
}

/// A set of tours with their cached total length.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Tour>,
    pub cost: f64,
}

impl Solution {
    /// Builds a solution and caches its cost. Fails only on invalid indices;
    /// use [`validate`] for the feasibility check.
    pub fn new(instance: &Instance, tours: Vec<Tour>) -> Result<Self> {
        let cost = tours
            .iter()
            .try_fold(0.0, |acc, t| Ok::<_, KtcError>(acc + tour_cost(instance, t)?))?;
        Ok(Solution { tours, cost })
    }

    pub fn empty() -> Self {
        Solution::default()
    }

    pub fn num_points(&self) -> usize {
        self.tours.iter().map(Tour::len).sum()
    }
}

pub fn solution_cost(instance: &Instance, solution: &Solution) -> Result<f64> {
    solution
        .tours
        .iter()
        .try_fold(0.0, |acc, t| Ok(acc + tour_cost(instance, t)?))
}

/// rad(P) = (2/k) * sum of r(p), a lower bound on the optimum.
pub fn radial_cost(instance: &Instance) -> f64 {
    let sum = (0..instance.len()).fold(0.0, |acc, i| acc + instance.radius(i));
    2.0 * sum / instance.k() as f64
}

/// Lower and upper bounds on the optimum of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// rad(P).
    pub radial: f64,
    /// Length of the spanning-tree TSP tour through the depot and all points.
    pub tsp_upper: f64,
    pub opt_lower: f64,
    pub opt_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    InvalidIndex { tour: usize, index: usize },
    EmptyTour { tour: usize },
    Duplicate { index: usize, occurrences: usize },
    Missing { index: usize },
    Capacity { tour: usize, size: usize, k: usize },
    CostMismatch { cached: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidIndex { tour, index } => {
                write!(f, "tour {tour} references invalid point {index}")
            }
            Violation::EmptyTour { tour } => write!(f, "tour {tour} is empty"),
            Violation::Duplicate { index, occurrences } => {
                write!(f, "point {index} is visited {occurrences} times")
            }
            Violation::Missing { index } => write!(f, "point {index} is not covered"),
            Violation::Capacity { tour, size, k } => {
                write!(f, "tour {tour} visits {size} points, capacity is {k}")
            }
            Violation::CostMismatch { cached, recomputed } => {
                write!(f, "cached cost {cached} differs from recomputed {recomputed}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(KtcError::Infeasible(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "feasible");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks that `solution` partitions the instance's points into tours of at
/// most k points and that its cached cost is current. Never fails; an empty
/// report means feasible.
pub fn validate(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut any_invalid = false;

    for (t, tour) in solution.tours.iter().enumerate() {
        if tour.is_empty() {
            violations.push(Violation::EmptyTour { tour: t });
        }
        if tour.len() > instance.k() {
            violations.push(Violation::Capacity {
                tour: t,
                size: tour.len(),
                k: instance.k(),
            });
        }
        for &i in tour.points() {
            if i >= instance.len() {
                violations.push(Violation::InvalidIndex { tour: t, index: i });
                any_invalid = true;
            } else {
                *seen.entry(i).or_default() += 1;
            }
        }
    }
    for (&index, &occurrences) in &seen {
        if occurrences > 1 {
            violations.push(Violation::Duplicate { index, occurrences });
        }
    }
    for index in 0..instance.len() {
        if !seen.contains_key(&index) {
            violations.push(Violation::Missing { index });
        }
    }
    if !any_invalid {
        let recomputed = solution_cost(instance, solution).unwrap_or(f64::NAN);
        if !costs_agree(solution.cost, recomputed) {
            violations.push(Violation::CostMismatch {
                cached: solution.cost,
                recomputed,
            });
        }
    }
    ValidationReport { violations }
}

pub(crate) fn costs_agree(cached: f64, recomputed: f64) -> bool {
    (cached - recomputed).abs() <= COST_RTOL * recomputed.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(points: &[(f64, f64)], k: usize) -> Instance {
        Instance::at_origin(points.iter().map(|&(x, y)| Point::new(x, y)).collect(), k).unwrap()
    }

    #[test]
    fn tour_cost_examples() {
        let i = inst(&[(3.0, 4.0)], 1);
        assert_eq!(tour_cost(&i, &Tour::new(vec![0])).unwrap(), 10.0);

        let i = inst(&[(1.0, 0.0), (2.0, 0.0)], 2);
        assert_eq!(tour_cost(&i, &Tour::new(vec![0, 1])).unwrap(), 4.0);

        let i = inst(&[(1.0, 0.0), (0.0, 1.0)], 2);
        let c = tour_cost(&i, &Tour::new(vec![0, 1])).unwrap();
        assert!((c - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn tour_cost_rejects_bad_index() {
        let i = inst(&[(1.0, 0.0)], 1);
        let err = tour_cost(&i, &Tour::new(vec![3])).unwrap_err();
        assert!(matches!(err, KtcError::InvalidIndex { index: 3, len: 1 }));
    }

    #[test]
    fn solution_cost_examples() {
        let empty = inst(&[], 1);
        assert_eq!(solution_cost(&empty, &Solution::empty()).unwrap(), 0.0);

        let i = inst(&[(1.0, 0.0), (0.0, 2.0)], 1);
        let s = Solution::new(&i, vec![Tour::new(vec![0]), Tour::new(vec![1])]).unwrap();
        assert_eq!(s.cost, 6.0);
        assert_eq!(solution_cost(&i, &s).unwrap(), 6.0);
    }

    #[test]
    fn radial_cost_examples() {
        assert_eq!(radial_cost(&inst(&[(3.0, 4.0)], 2)), 5.0);
        assert_eq!(radial_cost(&inst(&[(0.0, 1.0), (1.0, 0.0)], 1)), 4.0);
        assert!((radial_cost(&inst(&[(3.0, 4.0), (6.0, 8.0)], 5)) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn validate_reports_each_violation_kind() {
        let i = inst(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], 2);

        let ok = Solution::new(&i, vec![Tour::new(vec![0, 1]), Tour::new(vec![2])]).unwrap();
        assert!(validate(&i, &ok).is_feasible());

        let over = Solution::new(&i, vec![Tour::new(vec![0, 1, 2])]).unwrap();
        let r = validate(&i, &over);
        assert_eq!(r.violations, vec![Violation::Capacity { tour: 0, size: 3, k: 2 }]);

        let dup = Solution::new(
            &i,
            vec![Tour::new(vec![0, 1]), Tour::new(vec![1, 2])],
        )
        .unwrap();
        let r = validate(&i, &dup);
        assert_eq!(r.violations, vec![Violation::Duplicate { index: 1, occurrences: 2 }]);

        let missing = Solution::new(&i, vec![Tour::new(vec![0, 1])]).unwrap();
        assert_eq!(validate(&i, &missing).violations, vec![Violation::Missing { index: 2 }]);

        let mut stale = ok.clone();
        stale.cost += 1.0;
        assert!(matches!(
            validate(&i, &stale).violations.as_slice(),
            [Violation::CostMismatch { .. }]
        ));

        let bad = Solution {
            tours: vec![Tour::new(vec![0, 1]), Tour::new(vec![2, 9])],
            cost: 0.0,
        };
        let r = validate(&i, &bad);
        assert!(r.violations.contains(&Violation::InvalidIndex { tour: 1, index: 9 }));
    }

    #[test]
    fn points_at_origin_are_legal() {
        let i = inst(&[(0.0, 0.0)], 1);
        let s = Solution::new(&i, vec![Tour::new(vec![0])]).unwrap();
        assert_eq!(s.cost, 0.0);
        assert!(validate(&i, &s).is_feasible());
    }

    #[test]
    fn rejects_zero_capacity_and_nan() {
        assert!(Instance::at_origin(vec![], 0).is_err());
        assert!(Instance::at_origin(vec![Point::new(f64::NAN, 0.0)], 1).is_err());
    }
}
