//! A minimal worker pool for suite runs.
//!
//! Tasks execute concurrently up to the jobs cap, results land in
//! their original slots, so downstream report assembly sees the same
//! order no matter how the threads interleave.

use std::sync::Mutex;

type Task<'a, T> = Box<dyn FnOnce() -> T + Send + 'a>;

/// Run every task, at most `jobs` at a time, preserving task order in
/// the returned vector.
pub fn run_parallel<'a, T: Send>(jobs: usize, tasks: Vec<Task<'a, T>>) -> Vec<T> {
    let n = tasks.len();
    if n == 0 {
        return Vec::new();
    }
    let queue: Mutex<Vec<(usize, Task<'a, T>)>> =
        Mutex::new(tasks.into_iter().enumerate().rev().collect());
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let workers = jobs.max(1).min(n);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = queue.lock().expect("task queue poisoned").pop();
                match job {
                    Some((index, task)) => {
                        let result = task();
                        *slots[index].lock().expect("result slot poisoned") = Some(result);
                    }
                    None => break,
                }
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("result slot poisoned")
                .expect("worker completed without storing a result")
        })
        .collect()
}
