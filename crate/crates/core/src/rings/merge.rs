use crate::error::{KtcError, Result};
use crate::model::{validate, Instance, Solution, Tour};

/// Concatenates tours from independent parts into one solution over
/// `instance`. Every point must be covered by exactly one part.
pub fn merge<'a>(
    instance: &Instance,
    parts: impl IntoIterator<Item = &'a [Tour]>,
) -> Result<Solution> {
    let n = instance.len();
    let mut seen = vec![false; n];
    let mut tours = Vec::new();
    for part in parts {
        for tour in part {
            if tour.is_empty() {
                continue;
            }
            for &i in tour.points() {
                if i >= n {
                    return Err(KtcError::InvalidIndex { index: i, len: n });
                }
                if seen[i] {
                    return Err(KtcError::OverlappingCoverage { index: i });
                }
                seen[i] = true;
            }
            tours.push(tour.clone());
        }
    }
    if let Some(index) = seen.iter().position(|&s| !s) {
        return Err(KtcError::UncoveredPoint { index });
    }
    let solution = Solution::new(instance, tours)?;
    validate(instance, &solution).into_result()?;
    Ok(solution)
}
