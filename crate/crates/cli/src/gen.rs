//! Seeded random instances around a depot at the origin.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use ktc_core::{Instance, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointDistribution {
    /// Uniform in the unit disk.
    UniformDisk,
    /// Gaussian blobs (sigma 0.05) around centres uniform in the unit disk.
    Clustered,
    /// Uniform in the annulus between radii 0.5 and 1.
    Annulus,
}

impl PointDistribution {
    pub fn name(self) -> &'static str {
        match self {
            PointDistribution::UniformDisk => "uniform-disk",
            PointDistribution::Clustered => "clustered",
            PointDistribution::Annulus => "annulus",
        }
    }
}

impl fmt::Display for PointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PointDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| {
            format!("unknown distribution '{s}', expected uniform-disk, clustered or annulus")
        })
    }
}

fn in_annulus(rng: &mut ChaCha8Rng, inner: f64) -> Point {
    let u: f64 = rng.random();
    let r = (inner * inner + u * (1.0 - inner * inner)).sqrt();
    let a = rng.random::<f64>() * TAU;
    Point::new(r * a.cos(), r * a.sin())
}

pub fn generate_points(n: usize, seed: u64, dist: PointDistribution) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        PointDistribution::UniformDisk => (0..n).map(|_| in_annulus(&mut rng, 0.0)).collect(),
        PointDistribution::Annulus => (0..n).map(|_| in_annulus(&mut rng, 0.5)).collect(),
        PointDistribution::Clustered => {
            let clusters = ((n as f64).sqrt() / 2.0).ceil().max(1.0) as usize;
            let centres: Vec<Point> = (0..clusters).map(|_| in_annulus(&mut rng, 0.0)).collect();
            let spread = Normal::new(0.0, 0.05).expect("positive sigma");
            (0..n)
                .map(|_| {
                    let c = centres[rng.random_range(0..clusters)];
                    Point::new(c.x + spread.sample(&mut rng), c.y + spread.sample(&mut rng))
                })
                .collect()
        }
    }
}

pub fn generate(n: usize, k: usize, seed: u64, dist: PointDistribution) -> ktc_core::Result<Instance> {
    Instance::at_origin(generate_points(n, seed, dist), k)
}

/// Comment line recorded in generated files.
pub fn describe(n: usize, k: usize, seed: u64, dist: PointDistribution) -> String {
    format!("generated by ktc gen: dist={dist} n={n} k={k} seed={seed} rng=ChaCha8 (rand_chacha 0.9)")
}
