//! Multi-threaded Monte Carlo. Each block of paths is simulated on some
//! worker and the block statistics are merged in block order, which gives
//! the same result as the single-threaded [`levyband_core::simulate`].

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use levyband_core::{
    ruin_transform_paths, simulate_paths, BandStrategy, PathStats, Penalty, Result, RiskModel, SimConfig,
    SimResult, BLOCK,
};

pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_blocks<F>(n_paths: u64, threads: usize, job: F) -> Result<SimResult>
where
    F: Fn(Range<u64>) -> Result<PathStats> + Sync,
{
    let n_blocks = n_paths.div_ceil(BLOCK);
    let next = AtomicU64::new(0);
    let mut done: Vec<(u64, Result<PathStats>)> = thread::scope(|s| {
        let workers: Vec<_> = (0..threads.max(1))
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n_blocks {
                            break out;
                        }
                        let start = i * BLOCK;
                        out.push((i, job(start..(start + BLOCK).min(n_paths))));
                    }
                })
            })
            .collect();
        workers.into_iter().flat_map(|w| w.join().expect("simulation worker panicked")).collect()
    });
    done.sort_by_key(|(i, _)| *i);
    let mut stats = PathStats::default();
    for (_, block) in done {
        stats.merge(&block?);
    }
    Ok(stats.finish())
}

pub fn simulate(
    model: &RiskModel,
    strategy: &BandStrategy,
    penalty: &Penalty,
    cfg: &SimConfig,
    threads: usize,
) -> Result<SimResult> {
    run_blocks(cfg.n_paths, threads, |r| simulate_paths(model, strategy, penalty, cfg, r))
}

pub fn simulate_ruin_transform(model: &RiskModel, cfg: &SimConfig, threads: usize) -> Result<SimResult> {
    run_blocks(cfg.n_paths, threads, |r| ruin_transform_paths(model, cfg, r))
}
