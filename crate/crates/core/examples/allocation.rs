//! Exact and greedy task allocation on the same deadline-constrained instance.
use mrta_sim::ids::{RobotId, TaskId};
use mrta_sim::tasking::{solve_exact, solve_greedy, AllocationProblem, SolverRobot, Task, TravelTimeGraph};

fn main() {
    let g = TravelTimeGraph::new(
        vec![0, 1, 2, 3],
        vec![
            vec![0.0, 10.0, 20.0, 15.0],
            vec![10.0, 0.0, 12.0, 18.0],
            vec![20.0, 12.0, 0.0, 8.0],
            vec![15.0, 18.0, 8.0, 0.0],
        ],
    )
    .unwrap();
    let task = |id, start, end, deadline| Task { id: TaskId(id), start, end, deadline, arrival: 0.0 };
    let problem = AllocationProblem {
        robots: vec![SolverRobot::idle(RobotId(0), 0, 0.0), SolverRobot::idle(RobotId(1), 2, 0.0)],
        tasks: vec![task(0, 1, 3, 60.0), task(1, 2, 0, 45.0), task(2, 3, 1, 70.0)],
        now: 0.0,
    };

    for (name, alloc) in [("exact", solve_exact(&problem, &g)), ("greedy", solve_greedy(&problem, &g))] {
        let alloc = alloc.unwrap();
        println!("{name}: makespan {:.1}, unassigned {:?}", alloc.makespan(problem.now), alloc.unassigned);
        for (robot, seq) in &alloc.sequences {
            let times = &alloc.predicted_times[robot];
            let steps: Vec<String> =
                seq.iter().zip(times).map(|(v, t)| format!("{:?} {} @{}={t:.0}", v.kind, v.task, v.location)).collect();
            println!("  {robot}: {}", steps.join(", "));
        }
    }
}
