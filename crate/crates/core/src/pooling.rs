//! Pooling per-segment intentional predicates into a demonstration goal.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{achieving_operator, DomainError, Goal, Predicate, SceneConfig, StateSet};
use crate::segmentation::Segment;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolError {
    #[error("predicate {0} is not goal-eligible")]
    NotGoalEligible(Predicate),
    #[error("segment index {0} out of range")]
    BadSegment(usize),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Drops a predicate from segment `i` when it is a precondition of the
/// operator achieving an intentional predicate of a strictly later segment
/// and it no longer holds at the end.
///
/// One pass over the input: every intentional predicate contributes its
/// operator's preconditions, whether or not it is itself pruned.
pub fn pool(
    intentional: &[(usize, Predicate)],
    segments: &[Segment],
    final_state: &StateSet,
    scene: &SceneConfig,
) -> Result<Goal, PoolError> {
    let mut preconditions: Vec<(usize, StateSet)> = Vec::with_capacity(intentional.len());
    for (i, p) in intentional {
        if !scene.is_goal_eligible(p) {
            return Err(PoolError::NotGoalEligible(p.clone()));
        }
        let seg = segments.get(*i).ok_or(PoolError::BadSegment(*i))?;
        let pre = achieving_operator(p, &seg.events, &seg.end_state, scene)
            .map(|op| op.preconditions)
            .unwrap_or_default();
        preconditions.push((*i, pre));
    }
    let kept: BTreeSet<Predicate> = intentional
        .iter()
        .filter(|(i, p)| {
            let enables_later = preconditions.iter().any(|(j, pre)| j > i && pre.contains(p));
            !(enables_later && !final_state.contains(p))
        })
        .map(|(_, p)| p.clone())
        .collect();
    Ok(Goal::new(kept)?)
}
