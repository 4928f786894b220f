//! Splitting tours so that none visits points on both sides of a marked
//! ring.
//!
//! Each tour is handled as a closed curve through the depot. Marked rings
//! are processed from the outside in. For a ring whose inner circle has
//! radius `c`, every maximal piece of the curve outside that circle which
//! reaches an unmarked point beyond the ring becomes its own curve, closed
//! by two radial segments to the depot. The remaining curve bridges the gap
//! along the shorter arc of the circle. Finally each curve is shortcut to
//! its unmarked points.
//!
//! A split piece runs from radius `c` out past `c * 6 / eps` and back, so
//! it contains at least `2 c (6 / eps - 1)` of the original curve inside the
//! ring, while the split adds at most `(2 + pi) c`. Pieces charged at
//! different rings lie in disjoint annuli, which bounds the total growth by
//! a factor `1 + (2 + pi) eps / (2 (6 - eps))`, below `1 + eps / 2`.

use super::RingPartition;
use crate::discretization::{LocatedInstance, LocationGrid};
use crate::error::{KtcError, Result};
use crate::model::{validate, Point, Solution, Tour};

#[derive(Debug, Clone, Copy)]
enum Node {
    Origin,
    Copy(usize),
    Cut(Point),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    Line,
    Arc,
}

/// `(node, edge to the next node)`, cyclic, starting at the depot.
type Curve = Vec<(Node, Edge)>;

/// One element of a curve after crossings have been inserted, with whether
/// the edge to the next element lies outside the circle.
#[derive(Debug, Clone, Copy)]
struct Step {
    node: Node,
    edge: Edge,
    outside: bool,
}

struct Level<'a> {
    located: &'a LocatedInstance,
    partition: &'a RingPartition,
    origin: Point,
    /// First circle of the ring.
    lo: usize,
    /// First circle past the ring.
    hi: usize,
    radius: f64,
}

impl Level<'_> {
    fn position(&self, node: Node) -> Point {
        match node {
            Node::Origin => self.origin,
            Node::Copy(i) => self.located.instance.point(i),
            Node::Cut(p) => p,
        }
    }

    fn is_outside(&self, node: Node) -> bool {
        match node {
            Node::Origin => false,
            Node::Copy(i) => self.located.locations[i].circle >= self.lo,
            Node::Cut(_) => true,
        }
    }

    fn unmarked_circle(&self, node: Node) -> Option<usize> {
        match node {
            Node::Copy(i) => {
                let circle = self.located.locations[i].circle;
                (!self.partition.is_marked_circle(circle)).then_some(circle)
            }
            _ => None,
        }
    }

    fn separates(&self, curve: &Curve) -> bool {
        let circles = || curve.iter().filter_map(|&(n, _)| self.unmarked_circle(n));
        circles().any(|c| c < self.lo) && circles().any(|c| c >= self.hi)
    }

    fn reaches_beyond(&self, steps: &[Step]) -> bool {
        steps
            .iter()
            .any(|s| self.unmarked_circle(s.node).is_some_and(|c| c >= self.hi))
    }

    /// Parameters in (0, 1) along `a -> b` where the segment meets the
    /// circle, as (smaller, larger) roots, or `None` without a proper
    /// intersection.
    fn roots(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let pa = a - self.origin;
        let d = b - a;
        let qa = d.x * d.x + d.y * d.y;
        if qa == 0.0 {
            return None;
        }
        let qb = 2.0 * (pa.x * d.x + pa.y * d.y);
        let qc = pa.x * pa.x + pa.y * pa.y - self.radius * self.radius;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        Some(((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)))
    }

    fn cut(a: Point, b: Point, t: f64) -> Node {
        let t = t.clamp(0.0, 1.0);
        Node::Cut(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    }

    /// Inserts the crossings of the curve with the circle.
    fn steps(&self, curve: &Curve) -> Vec<Step> {
        let mut out = Vec::with_capacity(curve.len() + 4);
        for (i, &(node, edge)) in curve.iter().enumerate() {
            let next = curve[(i + 1) % curve.len()].0;
            let (a_out, b_out) = (self.is_outside(node), self.is_outside(next));
            if edge == Edge::Arc {
                out.push(Step { node, edge, outside: true });
                continue;
            }
            let (a, b) = (self.position(node), self.position(next));
            let step = |node, outside| Step { node, edge: Edge::Line, outside };
            match (a_out, b_out) {
                (false, false) => out.push(step(node, false)),
                (false, true) => {
                    let t = self.roots(a, b).map_or(1.0, |r| r.1);
                    out.push(step(node, false));
                    out.push(step(Self::cut(a, b, t), true));
                }
                (true, false) => {
                    let t = self.roots(a, b).map_or(0.0, |r| r.0);
                    out.push(step(node, true));
                    out.push(step(Self::cut(a, b, t), false));
                }
                (true, true) => match self.roots(a, b) {
                    Some((t1, t2)) if t1 > 0.0 && t2 < 1.0 && t1 < t2 => {
                        out.push(step(node, true));
                        out.push(step(Self::cut(a, b, t1), false));
                        out.push(step(Self::cut(a, b, t2), true));
                    }
                    _ => out.push(step(node, true)),
                },
            }
        }
        out
    }

    /// Splits `curve` at this ring; curves that do not straddle it are
    /// returned as they are.
    fn split(&self, curve: Curve) -> Vec<Curve> {
        if !self.separates(&curve) {
            return vec![curve];
        }
        let steps = self.steps(&curve);
        let mut inner: Curve = Vec::with_capacity(curve.len());
        let mut outer: Vec<Curve> = Vec::new();
        let mut i = 0;
        while i < steps.len() {
            if !steps[i].outside {
                inner.push((steps[i].node, steps[i].edge));
                i += 1;
                continue;
            }
            let start = i;
            while steps[i].outside {
                i += 1;
            }
            // steps[start..=i] is a maximal outside piece from cut to cut
            let piece = &steps[start..=i];
            if self.reaches_beyond(piece) {
                let mut split: Curve = vec![(Node::Origin, Edge::Line)];
                split.extend(piece[..piece.len() - 1].iter().map(|s| (s.node, s.edge)));
                split.push((piece[piece.len() - 1].node, Edge::Line));
                outer.push(split);
                inner.push((piece[0].node, Edge::Arc));
            } else {
                inner.extend(piece[..piece.len() - 1].iter().map(|s| (s.node, s.edge)));
            }
            inner.push((steps[i].node, steps[i].edge));
            i += 1;
        }
        let mut curves = vec![inner];
        curves.extend(outer);
        curves
    }
}

/// True when no marked ring has points of `tour` both strictly inside and
/// strictly outside it.
pub fn is_ring_respecting(located: &LocatedInstance, partition: &RingPartition, tour: &Tour) -> bool {
    partition.marked.iter().all(|&ring| {
        let circles = partition.layout.circles_of_ring(ring);
        let at = |i: usize| located.locations[i].circle;
        let inside = tour.points().iter().any(|&i| at(i) < circles.start);
        let beyond = tour.points().iter().any(|&i| at(i) >= circles.end);
        !(inside && beyond)
    })
}

/// Rewrites a feasible solution on a located instance into one that covers
/// exactly the copies outside marked rings, with no tour straddling a marked
/// ring and cost at most `(1 + eps / 2)` times the input.
pub fn ring_respecting_transform(
    located: &LocatedInstance,
    grid: &LocationGrid,
    solution: &Solution,
    partition: &RingPartition,
    epsilon: f64,
) -> Result<Solution> {
    validate(&located.instance, solution).into_result()?;
    let mut curves: Vec<Curve> = solution
        .tours
        .iter()
        .map(|t| {
            let mut c = vec![(Node::Origin, Edge::Line)];
            c.extend(t.points().iter().map(|&i| (Node::Copy(i), Edge::Line)));
            c
        })
        .collect();

    for &ring in partition.marked.iter().rev() {
        let circles = partition.layout.circles_of_ring(ring);
        let level = Level {
            located,
            partition,
            origin: grid.origin,
            lo: circles.start,
            hi: circles.end,
            radius: grid.radius(circles.start),
        };
        curves = curves.into_iter().flat_map(|c| level.split(c)).collect();
    }

    let tours: Vec<Tour> = curves
        .iter()
        .map(|c| {
            Tour::new(
                c.iter()
                    .filter_map(|&(n, _)| match n {
                        Node::Copy(i)
                            if !partition.is_marked_circle(located.locations[i].circle) =>
                        {
                            Some(i)
                        }
                        _ => None,
                    })
                    .collect(),
            )
        })
        .filter(|t| !t.is_empty())
        .collect();
    let out = Solution::new(&located.instance, tours)?;

    let limit = (1.0 + epsilon / 2.0) * solution.cost;
    if out.cost > limit + 1e-9 * limit.max(1.0) {
        return Err(KtcError::Invariant(format!(
            "ring transform cost {} exceeds (1 + eps/2) x {}",
            out.cost, solution.cost
        )));
    }
    if let Some(t) = out
        .tours
        .iter()
        .find(|t| !is_ring_respecting(located, partition, t))
    {
        return Err(KtcError::Invariant(format!(
            "ring transform left a straddling tour {:?}",
            t.points()
        )));
    }
    Ok(out)
}

/// Length of the shorter arc between two points on a circle about `origin`.
#[cfg(test)]
fn arc_length(origin: Point, radius: f64, a: Point, b: Point) -> f64 {
    use std::f64::consts::PI;
    let ta = (a.y - origin.y).atan2(a.x - origin.x);
    let tb = (b.y - origin.y).atan2(b.x - origin.x);
    let d = (ta - tb).abs() % (2.0 * PI);
    radius * d.min(2.0 * PI - d)
}
