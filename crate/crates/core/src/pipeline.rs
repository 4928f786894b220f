//! End-to-end solving: strip, snap, mark rings, cap and solve the segments,
//! then lift and merge the parts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{
    cap_locations, check_epsilon, eliminate_location_cycles, lift_solution, snap_points,
    strip_close_points, LocationGrid, SnappedInstance, StripOutcome,
};
use crate::error::{KtcError, Result, StageExt};
use crate::exact::{exact_ktc, optimal_tour_order, OracleLimits};
use crate::heuristics::{cover_heuristic, lower_bound};
use crate::model::{radial_cost, Instance, Solution, Tour};
use crate::rings::{
    build_rings, extract_segments, merge, select_marking, Marking, RingLayout, SegmentProblem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSolverChoice {
    pub kind: BaseKind,
    pub limits: OracleLimits,
}

impl BaseSolverChoice {
    pub fn exact() -> Self {
        BaseSolverChoice {
            kind: BaseKind::Exact,
            limits: OracleLimits::default(),
        }
    }

    pub fn heuristic() -> Self {
        BaseSolverChoice {
            kind: BaseKind::Heuristic,
            limits: OracleLimits::default(),
        }
    }
}

/// `Refined` marks rings and caps each segment with its own location count;
/// `Global` caps once with the full grid and keeps everything in one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    Refined,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub base: BaseSolverChoice,
    pub mode: ReductionMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 0.25,
            base: BaseSolverChoice::heuristic(),
            mode: ReductionMode::Refined,
        }
    }
}

/// Quantities recorded while reducing, with the cost bound of each stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub max_radius: f64,
    pub radial_cost: f64,
    pub strip_threshold: f64,
    pub stripped_points: usize,
    pub stripped_cost: f64,
    pub strip_cost_bound: f64,
    /// eps * rad of the snapped points; snapping changes any cover by at
    /// most this much.
    pub snap_cost_bound: f64,
    pub location_count: usize,
    pub circle_count: usize,
    pub ray_count: usize,
    pub ring_width: usize,
    pub ring_count: usize,
    pub period: usize,
    pub residue: usize,
    pub marked_rings: Vec<usize>,
    pub marked_points: usize,
    pub marked_cover_cost: f64,
    pub run_count: usize,
    pub segment_count: usize,
    pub capped_points: usize,
    pub capped_cost: f64,
    pub segment_points: Vec<usize>,
    /// T^2 k, the bound on the total segment size.
    pub segment_point_bound: f64,
}

/// Everything left after reduction: tours fixed up front and independent
/// segments still to be solved.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub strip: StripOutcome,
    pub grid: Option<LocationGrid>,
    pub layout: Option<RingLayout>,
    pub marking: Option<Marking>,
    pub segments: Vec<SegmentProblem>,
    pub provenance: Provenance,
}

impl ReductionResult {
    /// Stripped 1-tours, the marked-ring cover and every capped tour.
    pub fn mandatory_tours(&self) -> Vec<Tour> {
        let mut tours = self.strip.tours();
        if let Some(m) = &self.marking {
            tours.extend(m.cover.tours.iter().cloned());
        }
        for s in &self.segments {
            tours.extend(s.capped_tours.iter().cloned());
        }
        tours
    }

    pub fn segment_point_total(&self) -> usize {
        self.segments.iter().map(SegmentProblem::point_count).sum()
    }
}

struct Snapped {
    strip: StripOutcome,
    grid: Option<LocationGrid>,
    snapped: Option<SnappedInstance>,
}

fn strip_and_snap(instance: &Instance, epsilon: f64) -> Result<Snapped> {
    check_epsilon(epsilon)?;
    let strip = strip_close_points(instance, epsilon).stage("strip")?;
    if strip.kept.is_empty() {
        return Ok(Snapped {
            strip,
            grid: None,
            snapped: None,
        });
    }
    let grid = LocationGrid::new(
        instance.origin(),
        strip.max_radius,
        instance.len(),
        instance.k(),
        epsilon,
    )
    .stage("grid")?;
    let mut snapped = snap_points(instance, &grid, &strip.kept).stage("snap")?;
    snapped.stripped = strip.stripped.clone();
    Ok(Snapped {
        strip,
        grid: Some(grid),
        snapped: Some(snapped),
    })
}

fn base_provenance(instance: &Instance, epsilon: f64, s: &Snapped, mode: ReductionMode) -> Provenance {
    let kept_radial: f64 = s.strip.kept.iter().fold(0.0, |acc, &i| acc + instance.radius(i)) * 2.0
        / instance.k() as f64;
    let mut p = Provenance {
        mode: match mode {
            ReductionMode::Refined => "refined",
            ReductionMode::Global => "global",
        }
        .into(),
        n: instance.len(),
        k: instance.k(),
        epsilon,
        max_radius: s.strip.max_radius,
        radial_cost: radial_cost(instance),
        strip_threshold: s.strip.threshold,
        stripped_points: s.strip.stripped.len(),
        stripped_cost: s.strip.stripped_cost,
        strip_cost_bound: s.strip.cost_bound,
        snap_cost_bound: epsilon * kept_radial,
        ..Provenance::default()
    };
    if let Some(g) = &s.grid {
        p.location_count = g.location_count();
        p.circle_count = g.circle_count;
        p.ray_count = g.ray_count;
        let t = g.location_count() as f64;
        p.segment_point_bound = t * t * g.k as f64;
    }
    p
}

fn finish_provenance(p: &mut Provenance, segments: &[SegmentProblem]) {
    p.segment_count = segments.len();
    p.segment_points = segments.iter().map(SegmentProblem::point_count).collect();
    p.capped_points = segments.iter().map(SegmentProblem::capped_point_count).sum();
}

/// Strips, snaps, marks rings and extracts the capped segments.
pub fn reduce(instance: &Instance, epsilon: f64) -> Result<ReductionResult> {
    let s = strip_and_snap(instance, epsilon)?;
    let mut provenance = base_provenance(instance, epsilon, &s, ReductionMode::Refined);
    let (Some(grid), Some(snapped)) = (&s.grid, &s.snapped) else {
        return Ok(ReductionResult {
            strip: s.strip,
            grid: None,
            layout: None,
            marking: None,
            segments: Vec::new(),
            provenance,
        });
    };

    let layout = build_rings(grid, epsilon);
    let marking = select_marking(instance, snapped, layout, epsilon);
    let split = extract_segments(instance, snapped, &marking.partition);

    provenance.ring_width = layout.width;
    provenance.ring_count = layout.ring_count;
    provenance.period = marking.partition.period;
    provenance.residue = marking.partition.residue;
    provenance.marked_rings = marking.partition.marked.iter().copied().collect();
    provenance.marked_points = marking.marked_points.len();
    provenance.marked_cover_cost = marking.cover.cost;
    provenance.run_count = split.run_count;
    finish_provenance(&mut provenance, &split.segments);
    provenance.capped_cost = capped_cost(instance, &split.segments)?;

    Ok(ReductionResult {
        strip: s.strip,
        grid: Some(grid.clone()),
        layout: Some(layout),
        marking: Some(marking),
        segments: split.segments,
        provenance,
    })
}

/// Strips, snaps and caps with the full location count; no rings are
/// marked and all remaining points form one segment.
pub fn reduce_global(instance: &Instance, epsilon: f64) -> Result<ReductionResult> {
    let s = strip_and_snap(instance, epsilon)?;
    let mut provenance = base_provenance(instance, epsilon, &s, ReductionMode::Global);
    let mut segments = Vec::new();
    if let (Some(grid), Some(snapped)) = (&s.grid, &s.snapped) {
        let (capped, capped_tours) = cap_locations(instance, snapped, grid.location_count());
        segments.push(SegmentProblem {
            index: 0,
            rings: 0..1,
            circles: 0..grid.circle_count,
            location_count: grid.location_count(),
            snapped: capped,
            capped_tours,
        });
        provenance.run_count = 1;
    }
    finish_provenance(&mut provenance, &segments);
    provenance.capped_cost = capped_cost(instance, &segments)?;
    Ok(ReductionResult {
        strip: s.strip,
        grid: s.grid,
        layout: None,
        marking: None,
        segments,
        provenance,
    })
}

fn capped_cost(instance: &Instance, segments: &[SegmentProblem]) -> Result<f64> {
    let tours: Vec<Tour> = segments
        .iter()
        .flat_map(|s| s.capped_tours.iter().cloned())
        .collect();
    Ok(Solution::new(instance, tours)?.cost)
}

/// Solves one segment and lifts the result to original point indices.
pub fn solve_segment(
    instance: &Instance,
    segment: &SegmentProblem,
    base: &BaseSolverChoice,
) -> Result<Solution> {
    let located = segment.snapped.materialize(instance.k());
    match base.kind {
        BaseKind::Exact => {
            if located.len() > base.limits.max_points_dp {
                return Err(KtcError::SegmentTooLarge {
                    segment: segment.index,
                    points: located.len(),
                    limit: base.limits.max_points_dp,
                });
            }
            let on_grid = exact_ktc(&located.instance, &base.limits)?;
            let on_grid = eliminate_location_cycles(&located, &on_grid)?;
            let lifted = lift_solution(instance, &located, &on_grid)?;
            let polished = lifted
                .tours
                .iter()
                .map(|t| optimal_tour_order(instance, t, &base.limits))
                .collect();
            Solution::new(instance, polished)
        }
        BaseKind::Heuristic => {
            let on_grid = cover_heuristic(&located.instance);
            lift_solution(instance, &located, &on_grid)
        }
    }
}

/// Result of a reduced solve with the data behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Solution,
    pub provenance: Provenance,
    /// Base solver used for each segment, in segment order.
    pub segment_bases: Vec<BaseKind>,
    pub lower_bound: f64,
}

pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<Solution> {
    solve_with_report(instance, options).map(|r| r.solution)
}

/// Reduces, solves the segments in parallel and merges in segment order.
pub fn solve_with_report(instance: &Instance, options: &SolveOptions) -> Result<SolveReport> {
    check_epsilon(options.epsilon)?;
    if instance.is_empty() {
        return Ok(SolveReport {
            solution: Solution::empty(),
            provenance: Provenance {
                n: 0,
                k: instance.k(),
                epsilon: options.epsilon,
                ..Provenance::default()
            },
            segment_bases: Vec::new(),
            lower_bound: 0.0,
        });
    }
    let reduction = match options.mode {
        ReductionMode::Refined => reduce(instance, options.epsilon),
        ReductionMode::Global => reduce_global(instance, options.epsilon),
    }
    .stage("reduce")?;

    let parts: Vec<Solution> = reduction
        .segments
        .par_iter()
        .map(|s| solve_segment(instance, s, &options.base))
        .collect::<Result<_>>()
        .stage("segment")?;

    let mandatory = reduction.mandatory_tours();
    let solution = merge(
        instance,
        std::iter::once(mandatory.as_slice()).chain(parts.iter().map(|s| s.tours.as_slice())),
    )
    .stage("merge")?;

    Ok(SolveReport {
        solution,
        segment_bases: vec![options.base.kind; reduction.segments.len()],
        provenance: reduction.provenance,
        lower_bound: lower_bound(instance),
    })
}

/// Solves the raw instance without reduction.
pub fn solve_direct(instance: &Instance, strategy: BaseKind, limits: &OracleLimits) -> Result<Solution> {
    match strategy {
        BaseKind::Exact => exact_ktc(instance, limits),
        BaseKind::Heuristic => Ok(cover_heuristic(instance)),
    }
}
