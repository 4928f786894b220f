#![allow(dead_code)]

use std::f64::consts::TAU;

use ktc_core::{Instance, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub enum Dist {
    Disk,
    Clustered,
    Annulus,
}

pub const DISTS: [Dist; 3] = [Dist::Disk, Dist::Clustered, Dist::Annulus];

pub fn points(n: usize, dist: Dist, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Dist::Disk => (0..n)
            .map(|_| {
                let r = rng.random::<f64>().sqrt();
                polar(&mut rng, r)
            })
            .collect(),
        Dist::Annulus => (0..n)
            .map(|_| {
                let r = 0.5 + 0.5 * rng.random::<f64>();
                polar(&mut rng, r)
            })
            .collect(),
        Dist::Clustered => {
            let centers: Vec<Point> = (0..3)
                .map(|_| {
                    let r = 0.2 + 0.8 * rng.random::<f64>();
                    polar(&mut rng, r)
                })
                .collect();
            (0..n)
                .map(|i| {
                    let c = centers[i % centers.len()];
                    let r = 0.1 * rng.random::<f64>();
                    c + polar(&mut rng, r)
                })
                .collect()
        }
    }
}

fn polar(rng: &mut ChaCha8Rng, r: f64) -> Point {
    let a = rng.random::<f64>() * TAU;
    Point::new(r * a.cos(), r * a.sin())
}

pub fn instance(n: usize, k: usize, dist: Dist, seed: u64) -> Instance {
    Instance::at_origin(points(n, dist, seed), k).unwrap()
}
