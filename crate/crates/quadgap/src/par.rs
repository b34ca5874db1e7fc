//! Multi-threaded drivers. Every result is identical to the sequential
//! library routine for the same inputs, whatever the thread count.

use rayon::prelude::*;

use quadgap_core::norm_sieve::{GapRecord, GapSearch};
use quadgap_core::ideals::PrimeIdealRec;
use quadgap_core::randsel::{
    condition, greedy_second_stage, sample_survivors, sigma_of, weighted_second_stage, RandomStageConfig,
    SelectionState, SurvivalStats, WeightTables,
};
use quadgap_core::weights::{quadrature_chunk, IkJk, Moments, Quadrature, MIN_SAMPLES};
use quadgap_core::{Error, FieldDesc};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "QUADGAP_THREADS";

/// Centers handed to one task of the gap scan.
const CENTER_CHUNK: usize = 2048;

/// Worker count from `QUADGAP_THREADS`, or `None` for rayon's default.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// A pool sized by [`thread_cap`].
pub fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// `G_K(X)`, scanning center chunks in parallel. Ties go to the first center
/// in `(norm, a, b)` order, as in the sequential search.
pub fn gap_search(k: &FieldDesc, x: u64, max_x: u64) -> Result<GapRecord, Error> {
    if x > max_x {
        return Err(Error::Budget { what: "gap search X", limit: max_x, requested: x });
    }
    let mut reach = 64;
    loop {
        let search = GapSearch::new(k, x, reach);
        let centers = search.centers();
        let parts: Vec<_> = centers.par_chunks(CENTER_CHUNK).map(|c| search.scan(c)).collect();
        if parts.iter().any(|p| p.is_err()) {
            reach *= 4;
            continue;
        }
        let mut best: Option<(u64, usize)> = None;
        for (ci, part) in parts.into_iter().enumerate() {
            if let Ok(Some((r, i))) = part {
                if best.is_none_or(|(br, _)| r > br) {
                    best = Some((r, ci * CENTER_CHUNK + i));
                }
            }
        }
        let (r, i) = best.expect("at least the zero center");
        let (a, b) = centers[i];
        return Ok(GapRecord { x, center: k.elem(a, b), radius: r, scanned_centers: centers.len() as u64 });
    }
}

/// `I_k`, `J_k`, `M_k` with chunks run in parallel and merged in chunk order.
pub fn ik_jk(k: usize, samples: u64, seed: u64) -> Result<IkJk, Error> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter("quadrature needs at least 1e5 samples"));
    }
    let q = Quadrature::new(k, samples)?;
    let chunks: Vec<Moments> = (0..q.chunks()).into_par_iter().map(|c| quadrature_chunk(&q, seed, c)).collect();
    let mut m = Moments::default();
    for c in &chunks {
        m.merge(c);
    }
    IkJk::from_moments(k, &m)
}

/// Stage-one draws for trials `0..cfg.trials`, in trial order.
pub fn selections(cfg: &RandomStageConfig, trials: u32) -> (Vec<SelectionState>, usize) {
    let s = cfg.s_primes();
    let q = cfg.q_elements();
    let states = (0..trials as u64).into_par_iter().map(|t| sample_survivors(cfg, &s, &q, t)).collect();
    (states, q.len())
}

/// The survival experiment with trials spread over the pool.
pub fn survival_experiment(cfg: &RandomStageConfig) -> SurvivalStats {
    let s = cfg.s_primes();
    let q = cfg.q_elements();
    let counts =
        (0..cfg.trials as u64).into_par_iter().map(|t| sample_survivors(cfg, &s, &q, t).survivors.len()).collect();
    SurvivalStats::from_counts(sigma_of(cfg).value, q.len(), counts)
}

/// Greedy second-stage leftovers, one per stage-one state.
pub fn greedy_leftovers(p_primes: &[PrimeIdealRec], states: &[SelectionState]) -> Vec<usize> {
    states.par_iter().map(|s| greedy_second_stage(p_primes, &s.survivors).leftover).collect()
}

/// Accepted fraction of `P` and weighted second-stage leftovers per state;
/// state `t` draws from stream `t`.
pub fn weighted_runs(
    cfg: &RandomStageConfig,
    tables: &WeightTables,
    sigma: f64,
    states: &[SelectionState],
) -> Vec<(f64, usize)> {
    states
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let cond = condition(tables, &s.choices, sigma, cfg.tolerance);
            let n = cond.accepted.len().max(1) as f64;
            let frac = cond.accepted.iter().filter(|&&b| b).count() as f64 / n;
            (frac, weighted_second_stage(tables, &cond, &s.survivors, cfg.seed, t as u64).leftover)
        })
        .collect()
}
