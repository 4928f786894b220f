use std::ops::Range;

use super::RingPartition;
use crate::discretization::{cap_locations, SnappedInstance};
use crate::model::{Instance, Tour};

/// The points of one maximal run of unmarked rings, capped with the run's
/// own location count. Point indices refer to the original instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProblem {
    pub index: usize,
    pub rings: Range<usize>,
    pub circles: Range<usize>,
    pub location_count: usize,
    pub snapped: SnappedInstance,
    /// Trivial k-tours removed by the cap.
    pub capped_tours: Vec<Tour>,
}

impl SegmentProblem {
    pub fn point_count(&self) -> usize {
        self.snapped.point_count()
    }

    pub fn capped_point_count(&self) -> usize {
        self.capped_tours.iter().map(Tour::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segments {
    /// Non-empty segments, innermost first.
    pub segments: Vec<SegmentProblem>,
    /// Number of maximal unmarked runs, empty ones included.
    pub run_count: usize,
}

/// Splits the unmarked points into segments between marked rings.
pub fn extract_segments(
    instance: &Instance,
    snapped: &SnappedInstance,
    partition: &RingPartition,
) -> Segments {
    let layout = &partition.layout;
    let mut runs: Vec<Range<usize>> = Vec::new();
    let mut start = None;
    for ring in 0..=layout.ring_count {
        let open = ring < layout.ring_count && !partition.is_marked(ring);
        match (open, start) {
            (true, None) => start = Some(ring),
            (false, Some(s)) => {
                runs.push(s..ring);
                start = None;
            }
            _ => {}
        }
    }

    let rays = snapped.grid.ray_count;
    let mut segments = Vec::new();
    for rings in &runs {
        let circles = layout.circles_of_ring(rings.start).start
            ..layout.circles_of_ring(rings.end - 1).end;
        let part = snapped.restrict(|loc| circles.contains(&loc.circle));
        if part.point_count() == 0 {
            continue;
        }
        let location_count = circles.len() * rays;
        let (capped, capped_tours) = cap_locations(instance, &part, location_count);
        segments.push(SegmentProblem {
            index: segments.len(),
            rings: rings.clone(),
            circles,
            location_count,
            snapped: capped,
            capped_tours,
        });
    }
    Segments {
        segments,
        run_count: runs.len(),
    }
}
