use rayon::prelude::*;

use cyclesmooth_core::Executor;

/// Evaluates sweep points on the rayon thread pool.
///
/// `threads == 0` uses the global pool; otherwise a dedicated pool of that
/// size is built for each call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon {
    pub threads: usize,
}

impl Executor for Rayon {
    fn map_ordered<J, R, F>(&self, jobs: &[J], f: F) -> Vec<R>
    where
        J: Sync,
        R: Send,
        F: Fn(&J) -> R + Sync + Send,
    {
        let run = || jobs.par_iter().map(&f).collect();
        if self.threads == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.threads).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {}-thread pool ({e}); using the global pool", self.threads);
                run()
            }
        }
    }
}
