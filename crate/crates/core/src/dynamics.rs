//! Better-response dynamics: a cheap heuristic for finding stable partitions
//! of instances too large for the exact solvers.

use crate::game::{best_response, first_response, AshgInstance, DeviationTarget, Partition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Move the lowest unstable vertex to its best target.
    #[default]
    BestImprovement,
    /// Move the lowest unstable vertex to its first improving target.
    FirstImprovement,
}

/// Runs deterministic dynamics from the all-singletons partition. Each step
/// moves the lowest-numbered vertex that has an improving deviation; ties
/// between targets go to the lowest coalition id.
///
/// Returns the partition once it is Nash stable, or `None` if `max_steps`
/// moves did not reach one (the dynamics may cycle).
pub fn better_response_dynamics(instance: &AshgInstance, max_steps: usize, schedule: Schedule) -> Option<Partition> {
    let n = instance.n();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut steps = 0;
    loop {
        let respond = match schedule {
            Schedule::BestImprovement => best_response,
            Schedule::FirstImprovement => first_response,
        };
        let Some(mv) = (0..n).find_map(|v| respond(instance, &labels, v)) else {
            return Some(Partition::from_labels(&labels));
        };
        if steps == max_steps {
            return None;
        }
        steps += 1;
        labels[mv.vertex] = match mv.target {
            DeviationTarget::Class(c) => c,
            DeviationTarget::Singleton => n,
        };
        labels = Partition::from_labels(&labels).labels().to_vec();
    }
}
