//! Chunked Monte Carlo on a thread pool.
//!
//! Work items are numbered and every item draws from its own random
//! stream, so results are collected in item order and merged sequentially;
//! the outcome does not depend on the number of workers.

use photonsrc_core::spdc::monte_carlo::{chunk_count, chunk_trials, herald_chunk, hom_chunk, HeraldTally, HomTally};
use photonsrc_core::spdc::{SpdcSetup, SqueezedPairSource};
use photonsrc_core::Result;
use rayon::prelude::*;

/// `f(0), ..., f(count - 1)` evaluated on `workers` threads (all cores when
/// `None`), returned in index order.
pub fn map_indexed<T, F>(count: u64, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

/// Heralded-`g2` experiment over chunks `first_chunk ..`.
pub fn herald(
    src: &SqueezedPairSource,
    setup: &SpdcSetup,
    seed: u64,
    first_chunk: u64,
    trials: u64,
    workers: Option<usize>,
) -> HeraldTally {
    let parts = map_indexed(chunk_count(trials), workers, |c| {
        herald_chunk(src, setup, seed, first_chunk + c, chunk_trials(trials, c))
    });
    let mut total = HeraldTally::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Two-photon interference experiment over chunks `first_chunk ..`.
pub fn hom(
    src: &SqueezedPairSource,
    setup: &SpdcSetup,
    intrinsic_m: f64,
    seed: u64,
    first_chunk: u64,
    trials: u64,
    workers: Option<usize>,
) -> Result<HomTally> {
    let parts = map_indexed(chunk_count(trials), workers, |c| {
        hom_chunk(src, setup, intrinsic_m, seed, first_chunk + c, chunk_trials(trials, c))
    });
    let mut total = HomTally::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}
