use super::{chain_times, Allocation, AllocationProblem, TaskingError, TravelTimeGraph, Visit, VisitKind};

/// Earliest-deadline-first insertion: each free task is appended to the robot
/// whose resulting completion time is smallest (ties to the lower id). Tasks
/// that no robot can finish in time are reported unassigned. Bound tasks stay
/// with their robot, deadlines notwithstanding.
pub fn solve_greedy(problem: &AllocationProblem, g: &TravelTimeGraph) -> Result<Allocation, TaskingError> {
    problem.validate(g)?;
    let mut robots = problem.robots.clone();
    robots.sort_by_key(|r| r.id);

    let mut seqs: Vec<Vec<Visit>> = robots
        .iter()
        .map(|r| {
            let mut m = problem.mandatory_visits(r);
            // Pinned pickup first, then drop-offs by deadline.
            let split = usize::from(r.committed.is_some());
            m[split..].sort_by(|a, b| {
                let da = problem.task(a.task).unwrap().deadline;
                let db = problem.task(b.task).unwrap().deadline;
                da.total_cmp(&db).then(a.cmp(b))
            });
            m
        })
        .collect();

    let mut free = problem.free_tasks();
    free.sort_by(|a, b| a.deadline.total_cmp(&b.deadline).then(a.id.cmp(&b.id)));
    let mut unassigned = Vec::new();
    for t in free {
        let mut choice: Option<(f64, usize)> = None;
        for (i, r) in robots.iter().enumerate() {
            let mut seq = seqs[i].clone();
            seq.push(Visit { location: t.start, task: t.id, kind: VisitKind::Pickup });
            seq.push(Visit { location: t.end, task: t.id, kind: VisitKind::Dropoff });
            let done = *chain_times(r, &seq, g)?.last().unwrap();
            if done <= t.deadline && choice.map_or(true, |(c, _)| done < c) {
                choice = Some((done, i));
            }
        }
        match choice {
            Some((_, i)) => {
                seqs[i].push(Visit { location: t.start, task: t.id, kind: VisitKind::Pickup });
                seqs[i].push(Visit { location: t.end, task: t.id, kind: VisitKind::Dropoff });
            }
            None => unassigned.push(t.id),
        }
    }

    let mut alloc = Allocation { unassigned, ..Allocation::default() };
    for (r, seq) in robots.iter().zip(seqs) {
        alloc.predicted_times.insert(r.id, chain_times(r, &seq, g)?);
        alloc.sequences.insert(r.id, seq);
    }
    Ok(alloc)
}
