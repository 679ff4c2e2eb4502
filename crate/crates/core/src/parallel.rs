//! Index-ordered parallel evaluation.
//!
//! Shard `i` of `shards` evaluates the indices `i, i + shards, ...`; results
//! are merged back in index order, so any reduction done afterwards sees the
//! same sequence whatever the shard count.

use rayon::prelude::*;

pub fn run_indexed<T, F>(count: u64, shards: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    run_range(0, count, shards, f)
}

pub fn run_range<T, F>(start: u64, end: u64, shards: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let shards = shards.max(1) as u64;
    let parts: Vec<Vec<T>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::new();
            let mut i = start + s;
            while i < end {
                out.push(f(i));
                i += shards;
            }
            out
        })
        .collect();
    let mut iters: Vec<_> = parts.into_iter().map(Vec::into_iter).collect();
    let mut merged = Vec::with_capacity((end - start) as usize);
    for i in 0..(end - start) {
        merged.push(iters[(i % shards) as usize].next().expect("every index is evaluated"));
    }
    merged
}

/// Evaluates indices `0, 1, ...` in batches until `target` of them return
/// `Some`. Returns the accepted values in index order and the number of
/// indices consumed.
pub fn run_until<T, F>(target: usize, shards: usize, batch: u64, f: F) -> (Vec<T>, u64)
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    let mut accepted = Vec::with_capacity(target);
    let mut next = 0u64;
    while accepted.len() < target {
        let results = run_range(next, next + batch, shards, &f);
        for (i, r) in results.into_iter().enumerate() {
            if let Some(v) = r {
                accepted.push(v);
                if accepted.len() == target {
                    return (accepted, next + i as u64 + 1);
                }
            }
        }
        next += batch;
    }
    (accepted, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_shards() {
        let a = run_indexed(1000, 1, |i| i * i);
        for shards in [2, 3, 7, 64] {
            assert_eq!(run_indexed(1000, shards, |i| i * i), a);
        }
    }

    #[test]
    fn until_counts_consumed_indices() {
        let (v, used) = run_until(10, 4, 16, |i| (i % 3 == 0).then_some(i));
        assert_eq!(v, vec![0, 3, 6, 9, 12, 15, 18, 21, 24, 27]);
        assert_eq!(used, 28);
        let (w, _) = run_until(10, 1, 5, |i| (i % 3 == 0).then_some(i));
        assert_eq!(v, w);
    }
}
