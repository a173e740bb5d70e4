//! Minimal deterministic work splitting. Results are merged in input
//! order, so the output never depends on the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

static THREAD_CAP: AtomicUsize = AtomicUsize::new(1);

/// Caps the number of worker threads used by internally parallel passes.
pub fn set_thread_cap(n: usize) {
    THREAD_CAP.store(n.max(1), Ordering::Relaxed);
}

pub fn thread_cap() -> usize {
    THREAD_CAP.load(Ordering::Relaxed)
}

/// Applies `f` to every item, possibly on several threads, preserving
/// input order in the output.
pub fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = thread_cap().min(items.len().max(1));
    if threads <= 1 {
        return items.into_iter().map(f).collect();
    }
    let mut indexed: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let mut out: Vec<Option<R>> = std::iter::repeat_with(|| None)
        .take(indexed.len())
        .collect();
    let chunk = indexed.len().div_ceil(threads);
    let mut slots: Vec<&mut [Option<R>]> = Vec::new();
    let mut rest: &mut [Option<R>] = &mut out;
    let mut work: Vec<Vec<(usize, T)>> = Vec::new();
    while !indexed.is_empty() {
        let take = chunk.min(indexed.len());
        work.push(indexed.drain(..take).collect());
        let (head, tail) = rest.split_at_mut(take);
        slots.push(head);
        rest = tail;
    }
    std::thread::scope(|scope| {
        for (batch, slot) in work.into_iter().zip(slots) {
            let f = &f;
            scope.spawn(move || {
                for ((_, item), cell) in batch.into_iter().zip(slot.iter_mut()) {
                    *cell = Some(f(item));
                }
            });
        }
    });
    out.into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}
