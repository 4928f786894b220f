use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = KtcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KtcError {
    #[error("point index {index} out of range for instance with {len} points")]
    InvalidIndex { index: usize, len: usize },

    #[error("capacity k must be at least 1")]
    InvalidCapacity,

    #[error("coordinate of point {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    #[error("epsilon must lie in (0, 1/2], got {0}")]
    InvalidEpsilon(f64),

    #[error("grid needs a positive outer radius, got {0}")]
    NonPositiveRadius(f64),

    #[error(
        "point {index} at distance {radius} lies outside the grid annulus [{inner}, {outer}]; \
         strip close points before snapping"
    )]
    OutsideAnnulus {
        index: usize,
        radius: f64,
        inner: f64,
        outer: f64,
    },

    #[error("instance has {points} points, exact oracle limit is {limit}")]
    TooLarge { points: usize, limit: usize },

    #[error(
        "segment {segment} has {points} points, exact base limit is {limit}; \
         use the heuristic base for instances of this size"
    )]
    SegmentTooLarge {
        segment: usize,
        points: usize,
        limit: usize,
    },

    #[error("solution is infeasible: {0}")]
    Infeasible(ValidationReport),

    #[error("location multiplicity mismatch at copy {copy}: {detail}")]
    MultiplicityMismatch { copy: usize, detail: String },

    #[error("point {index} is covered by more than one part")]
    OverlappingCoverage { index: usize },

    #[error("point {index} is not covered by any part")]
    UncoveredPoint { index: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<KtcError>,
    },
}

impl KtcError {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        KtcError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &KtcError {
        match self {
            KtcError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the error is a refusal by a size-limited solver rather
    /// than a defect in the input or the solver.
    pub fn is_capability_refusal(&self) -> bool {
        matches!(
            self.root(),
            KtcError::TooLarge { .. } | KtcError::SegmentTooLarge { .. }
        )
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
