use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{KtcError, Result};
use crate::model::Point;

/// Rejects epsilon outside (0, 1/2].
pub fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 0.5 {
        Ok(())
    } else {
        Err(KtcError::InvalidEpsilon(epsilon))
    }
}

/// A location: the intersection of circle `circle` and ray `ray`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Location {
    pub circle: usize,
    pub ray: usize,
}

impl Location {
    pub const fn new(circle: usize, ray: usize) -> Self {
        Location { circle, ray }
    }
}

/// Concentric circles with radii `inner * growth^i` and `s` equally spaced
/// rays, all centred on the depot.
///
/// With outer radius L, n points, capacity k and accuracy eps:
/// `inner = L eps / n`, `growth = 1 + eps / k`,
/// `circle_count = ceil(log_growth(n / eps)) + 1` and `s = ceil(2 pi k / eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationGrid {
    pub origin: Point,
    pub inner_radius: f64,
    pub growth: f64,
    pub circle_count: usize,
    pub ray_count: usize,
    /// L, the largest point-to-depot distance.
    pub max_radius: f64,
    pub epsilon: f64,
    pub k: usize,
    /// Point count used in the formulas.
    pub n: usize,
    radii: Vec<f64>,
}

/// Grid centred at (0, 0).
pub fn build_grid(max_radius: f64, n: usize, k: usize, epsilon: f64) -> Result<LocationGrid> {
    LocationGrid::new(Point::ORIGIN, max_radius, n, k, epsilon)
}

impl LocationGrid {
    pub fn new(origin: Point, max_radius: f64, n: usize, k: usize, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(max_radius > 0.0) || !max_radius.is_finite() {
            return Err(KtcError::NonPositiveRadius(max_radius));
        }
        if k == 0 {
            return Err(KtcError::InvalidCapacity);
        }
        let n = n.max(1);
        let inner_radius = max_radius * epsilon / n as f64;
        let growth = 1.0 + epsilon / k as f64;
        let last = ((n as f64 / epsilon).ln() / growth.ln()).ceil() as usize;
        let circle_count = last + 1;
        let ray_count = (TAU * k as f64 / epsilon).ceil() as usize;
        let radii = (0..circle_count)
            .map(|i| inner_radius * growth.powi(i as i32))
            .collect();
        Ok(LocationGrid {
            origin,
            inner_radius,
            growth,
            circle_count,
            ray_count,
            max_radius,
            epsilon,
            k,
            n,
            radii,
        })
    }

    /// T, the number of locations.
    pub fn location_count(&self) -> usize {
        self.circle_count * self.ray_count
    }

    pub fn radius(&self, circle: usize) -> f64 {
        self.radii[circle]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn outer_radius(&self) -> f64 {
        self.radii[self.circle_count - 1]
    }

    pub fn ray_angle(&self, ray: usize) -> f64 {
        TAU * ray as f64 / self.ray_count as f64
    }

    /// Position of a location in the plane.
    pub fn position(&self, loc: Location) -> Point {
        let r = self.radius(loc.circle);
        let a = self.ray_angle(loc.ray);
        Point::new(self.origin.x + r * a.cos(), self.origin.y + r * a.sin())
    }

    /// Distance of a location from the depot.
    pub fn location_radius(&self, loc: Location) -> f64 {
        self.radius(loc.circle)
    }
}
