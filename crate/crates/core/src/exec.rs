//! Execution strategy for grid-shaped workloads.
//!
//! Grid scans evaluate independent points, so they can be spread over a
//! rayon pool. With the `rayon` feature disabled only the sequential
//! strategy exists. Results come back in index order either way.

/// Defaults to the parallel strategy when it is compiled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[cfg_attr(not(feature = "rayon"), default)]
    Sequential,
    #[cfg(feature = "rayon")]
    #[cfg_attr(feature = "rayon", default)]
    Parallel,
}

impl Exec {
    /// Evaluates `f(0), …, f(n - 1)` and collects the results in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "rayon")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_in_order() {
        let seq = Exec::Sequential.map(1000, |i| (i as f64).sin());
        let def = Exec::default().map(1000, |i| (i as f64).sin());
        assert_eq!(seq, def);
    }
}
