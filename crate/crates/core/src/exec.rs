//! Order-preserving parallel map over independent work items.
//!
//! With the `parallel` feature and more than one worker the items run on a
//! dedicated rayon pool; otherwise they run in order on the calling thread.

/// Apply `f` to every item and return the results in input order.
pub fn map_indexed<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if workers > 1 && items.len() > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool");
            return pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect());
        }
    }
    let _ = workers;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Worker count to use when the caller asks for "all cores".
pub fn available_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let items: Vec<u64> = (0..200).collect();
        let seq = map_indexed(&items, 1, |i, &x| (i as u64) * 1000 + x * x);
        let par = map_indexed(&items, 4, |i, &x| (i as u64) * 1000 + x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 7000 + 49);
    }

    #[test]
    fn empty_input() {
        let items: Vec<u8> = Vec::new();
        assert!(map_indexed(&items, 3, |_, &x| x).is_empty());
    }
}
