//! Deterministic work splitting for the enumeration loops.
//!
//! Index ranges are cut into a fixed number of chunks; chunk results are
//! merged in chunk order, so the outcome is bit-identical no matter how many
//! worker threads actually run. `CLUSTERFORGE_THREADS` caps the worker count,
//! and [`set_max_threads`] (used by the CLI's `--deterministic` flag) pins it
//! programmatically.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

static MAX_THREADS: AtomicUsize = AtomicUsize::new(0);

/// Pin the number of worker threads (0 restores the default behaviour:
/// available parallelism capped by the `CLUSTERFORGE_THREADS` env var).
/// Results do not depend on the thread count either way.
pub fn set_max_threads(n: usize) {
    MAX_THREADS.store(n, Ordering::Relaxed);
}

fn worker_count() -> usize {
    let pinned = MAX_THREADS.load(Ordering::Relaxed);
    if pinned > 0 {
        return pinned;
    }
    let avail = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(8);
    match std::env::var("CLUSTERFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(cap) if cap >= 1 => avail.min(cap),
        _ => avail,
    }
}

/// Number of chunks a range of `total` items is cut into. Fixed by the range
/// size alone so that floating-point merges never move with the thread count.
fn chunk_count(total: u64) -> u64 {
    if total < 4096 {
        1
    } else {
        64
    }
}

/// Evaluate `eval` over `[0, total)` split into fixed chunks and return the
/// per-chunk results in chunk order.
pub fn chunked<R, F>(total: u64, eval: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<u64>) -> R + Sync,
{
    let chunks = chunk_count(total);
    let bounds = |i: u64| -> std::ops::Range<u64> {
        let lo = total / chunks * i + (total % chunks).min(i);
        let hi = total / chunks * (i + 1) + (total % chunks).min(i + 1);
        lo..hi
    };
    let workers = worker_count().min(chunks as usize);
    if workers <= 1 {
        return (0..chunks).map(|i| eval(bounds(i))).collect();
    }
    let next = AtomicU64::new(0);
    let slots: Vec<Mutex<Option<R>>> = (0..chunks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= chunks {
                    break;
                }
                let r = eval(bounds(i));
                *slots[i as usize].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("chunk evaluated"))
        .collect()
}
