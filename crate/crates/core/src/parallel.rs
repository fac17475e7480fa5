//! Deterministic fork-join helpers.
//!
//! Work is split into contiguous chunks, one per worker. Results come back
//! in input order, so the reduction order depends only on the worker count.

use std::thread;

/// Number of worker threads used by the parallel kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub fn new(count: usize) -> Self {
        Workers(count.max(1))
    }

    pub fn single() -> Self {
        Workers(1)
    }

    pub fn count(self) -> usize {
        self.0
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::single()
    }
}

/// Contiguous partition of `0..len` into at most `parts` ranges.
pub fn chunk_ranges(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.max(1).min(len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let size = base + usize::from(p < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Runs `f` over each chunk of `0..len` and returns the chunk results in
/// chunk order.
pub fn map_chunks<R, F>(workers: Workers, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync,
{
    let ranges = chunk_ranges(len, workers.count());
    if ranges.len() == 1 {
        return vec![f(ranges[0].clone())];
    }
    thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| {
                let f = &f;
                scope.spawn(move || f(range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, R, F>(workers: Workers, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    map_chunks(workers, items.len(), |range| {
        items[range].iter().map(&f).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_input() {
        for len in 0..20 {
            for parts in 1..6 {
                let ranges = chunk_ranges(len, parts);
                let total: usize = ranges.iter().map(|r| r.len()).sum();
                assert_eq!(total, len);
                for w in ranges.windows(2) {
                    assert_eq!(w[0].end, w[1].start);
                }
            }
        }
    }

    #[test]
    fn par_map_keeps_order() {
        let items: Vec<u64> = (0..37).collect();
        let out = par_map(Workers::new(4), &items, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }
}
