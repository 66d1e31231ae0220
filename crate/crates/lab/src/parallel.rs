use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};
use stable_sde_core::Replicator;

/// Replicate execution on a rayon pool. Results come back in index order,
/// so output does not depend on the thread count.
pub struct RayonReplicator {
    pool: ThreadPool,
}

impl RayonReplicator {
    /// `threads = 0` lets rayon pick.
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        Ok(Self { pool: ThreadPoolBuilder::new().num_threads(threads).build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Replicator for RayonReplicator {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
