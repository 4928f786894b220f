use std::collections::BTreeMap;

use super::snap::SnappedInstance;
use crate::heuristics::angle;
use crate::model::{Instance, Tour};

/// Caps every location at `location_count * k` points.
///
/// A location holding `c > T k` points gives up `k * ceil((c - T k) / k)` of
/// them to trivial k-tours; the points that moved farthest when snapped go
/// first. Each trivial tour visits its points by angle around the location.
/// Returns the reduced instance and the trivial tours (original indices).
pub fn cap_locations(
    instance: &Instance,
    snapped: &SnappedInstance,
    location_count: usize,
) -> (SnappedInstance, Vec<Tour>) {
    let k = snapped.grid.k;
    let cap = location_count.saturating_mul(k);
    let mut assignment = BTreeMap::new();
    let mut tours = Vec::new();

    for (loc, mut ids) in snapped.members() {
        let count = ids.len();
        if count > cap {
            let trivial = (count - cap).div_ceil(k);
            let center = snapped.grid.position(loc);
            ids.sort_by(|&a, &b| {
                let da = instance.point(a).dist(center);
                let db = instance.point(b).dist(center);
                db.total_cmp(&da).then(a.cmp(&b))
            });
            let removed: Vec<usize> = ids.drain(..trivial * k).collect();
            for chunk in removed.chunks(k) {
                let mut chunk = chunk.to_vec();
                chunk.sort_by(|&a, &b| {
                    angle(instance.point(a) - center)
                        .total_cmp(&angle(instance.point(b) - center))
                        .then(a.cmp(&b))
                });
                tours.push(Tour::new(chunk));
            }
        }
        for i in ids {
            assignment.insert(i, loc);
        }
    }
    let reduced = SnappedInstance::from_assignment(
        snapped.grid.clone(),
        assignment,
        snapped.stripped.clone(),
    );
    (reduced, tours)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, snap, Location};
    use crate::model::Point;

    fn crowd(count: usize, k: usize) -> (Instance, SnappedInstance) {
        let g = build_grid(4.0, 100, k, 0.25).unwrap();
        let p = g.position(Location::new(30, 7));
        let pts = (0..count)
            .map(|i| p + Point::new(1e-6 * i as f64, 0.0))
            .collect();
        let inst = Instance::at_origin(pts, k).unwrap();
        let s = snap(&inst, &g).unwrap();
        (inst, s)
    }

    #[test]
    fn over_cap_location_emits_trivial_tours() {
        // c = 25, T k = 9, k = 3: ceil(16 / 3) = 6 trivial tours
        let (inst, s) = crowd(25, 3);
        assert_eq!(s.counts.len(), 1);
        let (reduced, tours) = cap_locations(&inst, &s, 3);
        assert_eq!(tours.len(), 6);
        assert!(tours.iter().all(|t| t.len() == 3));
        assert_eq!(reduced.point_count(), 7);
    }

    #[test]
    fn farthest_points_leave_first() {
        let (inst, s) = crowd(10, 3);
        let (_, tours) = cap_locations(&inst, &s, 2);
        // c = 10, T k = 6: two tours with the six largest offsets
        assert_eq!(tours.len(), 2);
        let mut gone: Vec<usize> = tours.iter().flat_map(|t| t.points().to_vec()).collect();
        gone.sort();
        assert_eq!(gone, vec![4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn under_cap_location_is_untouched() {
        let (inst, s) = crowd(5, 3);
        let (reduced, tours) = cap_locations(&inst, &s, 4);
        assert!(tours.is_empty());
        assert_eq!(reduced.point_count(), 5);
    }

    #[test]
    fn retained_never_exceeds_cap() {
        for count in 1..40 {
            let (inst, s) = crowd(count, 3);
            for t in 1..5 {
                let (reduced, tours) = cap_locations(&inst, &s, t);
                assert!(reduced.counts.values().all(|&c| c <= t * 3));
                assert_eq!(reduced.point_count() + 3 * tours.len(), count);
                assert!(tours.iter().all(|tr| tr.len() == 3));
            }
        }
    }
}
