//! Residue-class coverings of norm balls and the centers they produce.
//!
//! A plan picks one class `a_P mod P` for every prime ideal of norm at most
//! `x`. An element `z` is covered when `z = a_P (mod P)` for some `P`. If all
//! `z` with `N(z) < r` are covered, any `c` with `c = -a_P (mod P)` for all
//! `P` has every element of the ball `B(c, r)` divisible by a small prime.

mod certificate;
mod crt;

pub use certificate::{certify, extract_plan, GapCertificate, Witness};
pub use crt::{reconstruct_center, CenterMode, ReconstructedCenter};

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::ideals::{primes_up_to, PrimeIdealRec};
use crate::numeric::iterated_log;

/// Which stage of the construction fixed a residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    ZeroSmall,
    RandomS,
    ZeroMid,
    Matching,
    GreedyP,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::ZeroSmall => "zero_small",
            Phase::RandomS => "random_s",
            Phase::ZeroMid => "zero_mid",
            Phase::Matching => "matching",
            Phase::GreedyP => "greedy_p",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Trivial,
    Random,
    Greedy,
    Weighted,
    /// Residues read off an existing center.
    Extracted,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Trivial => "trivial",
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
            Strategy::Weighted => "weighted",
            Strategy::Extracted => "extracted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    /// `T_small = log x`, `z0 = sqrt x`.
    Desk,
    /// `T_small = log^20 x`, `z0 = x^(log_3 x / (5 log_2 x))`.
    Asymptotic,
}

/// Phase boundaries. Prime ideals are assigned by norm:
/// `(0, t_small]` zero, `(t_small, z0]` random S band, `(z0, x/4]` zero,
/// `(x/4, x/2]` matching, `(x/2, x]` the P band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverParams {
    pub mode: ThresholdMode,
    pub t_small: f64,
    pub z0: f64,
    pub matching_lo: f64,
    pub p_lo: f64,
}

impl CoverParams {
    pub fn desk(x: u64) -> Self {
        let xf = x as f64;
        Self::clamped(ThresholdMode::Desk, xf, libm::log(xf), libm::sqrt(xf))
    }

    pub fn asymptotic(x: u64) -> Self {
        let xf = x as f64;
        let z0 = match (iterated_log(xf, 2), iterated_log(xf, 3)) {
            (Some(l2), Some(l3)) if l2 > 0.0 => libm::pow(xf, l3 / (5.0 * l2)),
            _ => 1.0,
        };
        Self::clamped(ThresholdMode::Asymptotic, xf, libm::pow(libm::log(xf), 20.0), z0)
    }

    /// Custom thresholds; the bands are forced to be nested.
    pub fn custom(x: u64, t_small: f64, z0: f64) -> Self {
        Self::clamped(ThresholdMode::Desk, x as f64, t_small, z0)
    }

    fn clamped(mode: ThresholdMode, x: f64, t_small: f64, z0: f64) -> Self {
        let quarter = x / 4.0;
        let t_small = t_small.min(quarter);
        let z0 = z0.max(t_small).min(quarter);
        CoverParams { mode, t_small, z0, matching_lo: quarter, p_lo: x / 2.0 }
    }

    pub fn phase_of(&self, norm: u64) -> Phase {
        let n = norm as f64;
        if n <= self.t_small {
            Phase::ZeroSmall
        } else if n <= self.z0 {
            Phase::RandomS
        } else if n <= self.matching_lo {
            Phase::ZeroMid
        } else if n <= self.p_lo {
            Phase::Matching
        } else {
            Phase::GreedyP
        }
    }
}

/// `floor(c x (log x / log_2 x) log_3 x)`, or `None` where undefined or not above `x`.
pub fn ydef(x: u64, c: f64) -> Option<u64> {
    let xf = x as f64;
    let l1 = iterated_log(xf, 1)?;
    let l2 = iterated_log(xf, 2)?;
    let l3 = iterated_log(xf, 3)?;
    if l2 <= 0.0 || l3 <= 0.0 {
        return None;
    }
    let y = libm::floor(c * xf * (l1 / l2) * l3);
    (y > xf).then_some(y as u64)
}

/// `ydef(x, c)` when it exceeds `x`, otherwise `2x`.
pub fn default_y(x: u64, c: f64) -> u64 {
    ydef(x, c).unwrap_or(2 * x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub prime: PrimeIdealRec,
    pub residue: u64,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverPlan {
    pub field: FieldDesc,
    pub x: u64,
    pub y: u64,
    pub strategy: Strategy,
    pub seed: u64,
    pub params: CoverParams,
    /// One entry per prime ideal of norm `<= x`, sorted by `(norm, p, root)`.
    pub entries: Vec<PlanEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoverError {
    /// The matching band ran out of primes; the plan holds every choice made
    /// and `leftovers` the elements of norm `<= y` still uncovered.
    Incomplete { plan: Box<CoverPlan>, leftovers: Vec<QuadInt> },
    Core(Error),
}

impl From<Error> for CoverError {
    fn from(e: Error) -> Self {
        CoverError::Core(e)
    }
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverError::Incomplete { leftovers, .. } => {
                write!(f, "covering incomplete: {} elements left uncovered", leftovers.len())
            }
            CoverError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CoverError {
    /// The partial plan carried by an incomplete covering.
    pub fn into_plan(self) -> Result<CoverPlan, Error> {
        match self {
            CoverError::Incomplete { plan, .. } => Ok(*plan),
            CoverError::Core(e) => Err(e),
        }
    }
}

/// Target elements: all `z` with `N(z) <= y`, sorted by `(norm, a, b)`, with norms.
fn targets(k: &FieldDesc, y: u64) -> Vec<(i64, i64, u64)> {
    k.sorted_points(-1, y as i128)
        .into_iter()
        .map(|(a, b)| (a, b, k.norm_small(a, b) as u64))
        .collect()
}

/// Residue-stream sources for the random phases.
const STREAM_S: u64 = 1;
const STREAM_P: u64 = 2;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Tracks, for every target, how many entries currently cover it.
struct Coverage<'a> {
    targets: &'a [(i64, i64, u64)],
    count: Vec<u32>,
}

impl<'a> Coverage<'a> {
    fn new(targets: &'a [(i64, i64, u64)]) -> Self {
        Coverage { targets, count: vec![0; targets.len()] }
    }

    fn apply(&mut self, pr: &PrimeIdealRec, residue: u64, add: bool) {
        for (i, &(a, b, _)) in self.targets.iter().enumerate() {
            if pr.residue_small(a, b) == residue {
                if add {
                    self.count[i] += 1;
                } else {
                    self.count[i] -= 1;
                }
            }
        }
    }

    fn first_uncovered(&self) -> Option<usize> {
        self.count.iter().position(|&c| c == 0)
    }
}

/// Picks the residue for `pr` that maximizes `(radius, elements of the
/// smallest uncovered norm taken, weighted coverage)` given every other
/// entry; ties go to the smallest residue.
fn best_residue(cov: &Coverage, pr: &PrimeIdealRec, y: u64) -> u64 {
    let mut gain = vec![0u64; pr.norm as usize];
    let mut lowest = vec![0u32; pr.norm as usize];
    let mut first: Option<u64> = None;
    let mut first_norm = y + 1;
    let mut second_norm = y + 1;
    for (i, &(a, b, n)) in cov.targets.iter().enumerate() {
        if cov.count[i] > 0 {
            continue;
        }
        let r = pr.residue_small(a, b);
        gain[r as usize] += y + 1 - n;
        if n == first_norm {
            lowest[r as usize] += 1;
        }
        match first {
            None => {
                first = Some(r);
                first_norm = n;
                lowest[r as usize] += 1;
            }
            Some(f) if f != r && second_norm == y + 1 => second_norm = n,
            _ => {}
        }
    }
    let radius = |r: u64| if first == Some(r) { second_norm } else { first_norm };
    let score = |r: u64| (radius(r), lowest[r as usize], gain[r as usize]);
    let mut best = 0u64;
    for r in 1..pr.norm {
        if score(r) > score(best) {
            best = r;
        }
    }
    best
}

/// Builds a plan with the default desk thresholds.
pub fn build_plan(k: &FieldDesc, x: u64, y: u64, strategy: Strategy, seed: u64) -> Result<CoverPlan, CoverError> {
    build_plan_with(k, x, y, strategy, seed, CoverParams::desk(x))
}

pub fn build_plan_with(
    k: &FieldDesc,
    x: u64,
    y: u64,
    strategy: Strategy,
    seed: u64,
    params: CoverParams,
) -> Result<CoverPlan, CoverError> {
    if x < 10 {
        return Err(Error::InvalidParameter("covering needs x >= 10").into());
    }
    if y < x {
        return Err(Error::InvalidParameter("covering needs y >= x").into());
    }
    if strategy == Strategy::Extracted {
        return Err(Error::InvalidParameter("extracted plans come from extract_plan").into());
    }
    let entries = primes_up_to(k, x)
        .into_iter()
        .map(|prime| {
            let phase = params.phase_of(prime.norm);
            PlanEntry { prime, residue: 0, phase }
        })
        .collect();
    let plan = CoverPlan { field: *k, x, y, strategy, seed, params, entries };
    complete_plan(plan, 0)
}

/// Fills in every entry from index `fixed` on, keeping earlier residues.
fn complete_plan(mut plan: CoverPlan, fixed: usize) -> Result<CoverPlan, CoverError> {
    let tg = targets(&plan.field, plan.y);
    let free = |e: &PlanEntry| matches!(e.phase, Phase::RandomS | Phase::GreedyP);
    match plan.strategy {
        Strategy::Trivial | Strategy::Extracted => return Ok(plan),
        Strategy::Random => {
            let mut rs = rng_for(plan.seed, STREAM_S);
            let mut rp = rng_for(plan.seed, STREAM_P);
            for e in plan.entries[fixed..].iter_mut().filter(|e| free(e)) {
                let rng = if e.phase == Phase::RandomS { &mut rs } else { &mut rp };
                e.residue = rng.random_range(0..e.prime.norm);
            }
        }
        Strategy::Weighted => {
            let mut rs = rng_for(plan.seed, STREAM_S);
            for e in plan.entries[fixed..].iter_mut().filter(|e| e.phase == Phase::RandomS) {
                e.residue = rs.random_range(0..e.prime.norm);
            }
            let picks = crate::randsel::weighted_p_residues(&plan, fixed)?;
            for (i, r) in picks {
                plan.entries[i].residue = r;
            }
        }
        Strategy::Greedy => {
            // Matching primes join the ascent: with the radius ranked first,
            // each one takes the class of the smallest element left uncovered.
            let mut cov = Coverage::new(&tg);
            for e in &plan.entries {
                cov.apply(&e.prime, e.residue, true);
            }
            let movable = |e: &PlanEntry| free(e) || e.phase == Phase::Matching;
            for _sweep in 0..3 {
                let mut changed = false;
                for i in fixed..plan.entries.len() {
                    if !movable(&plan.entries[i]) {
                        continue;
                    }
                    let (pr, old) = (plan.entries[i].prime.clone(), plan.entries[i].residue);
                    cov.apply(&pr, old, false);
                    let new = best_residue(&cov, &pr, plan.y);
                    cov.apply(&pr, new, true);
                    if new != old {
                        plan.entries[i].residue = new;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            return finish(plan, &tg, &cov.count);
        }
    }
    matching_step(plan, fixed, &tg)
}

/// Assigns each unused matching-band prime to the smallest uncovered element.
fn matching_step(mut plan: CoverPlan, fixed: usize, tg: &[(i64, i64, u64)]) -> Result<CoverPlan, CoverError> {
    let mut cov = Coverage::new(tg);
    for (i, e) in plan.entries.iter().enumerate() {
        if e.phase != Phase::Matching || i < fixed {
            cov.apply(&e.prime, e.residue, true);
        }
    }
    for i in fixed..plan.entries.len() {
        if plan.entries[i].phase != Phase::Matching {
            continue;
        }
        let residue = match cov.first_uncovered() {
            Some(j) => plan.entries[i].prime.residue_small(tg[j].0, tg[j].1),
            None => 0,
        };
        plan.entries[i].residue = residue;
        cov.apply(&plan.entries[i].prime.clone(), residue, true);
    }
    finish(plan, tg, &cov.count)
}

fn finish(plan: CoverPlan, tg: &[(i64, i64, u64)], count: &[u32]) -> Result<CoverPlan, CoverError> {
    let leftovers: Vec<QuadInt> = tg
        .iter()
        .zip(count)
        .filter(|(_, &c)| c == 0)
        .map(|(&(a, b, _), _)| plan.field.elem(a, b))
        .collect();
    if leftovers.is_empty() {
        Ok(plan)
    } else {
        Err(CoverError::Incomplete { plan: Box::new(plan), leftovers })
    }
}

/// Rebuilds the plan at a larger `x`, keeping every residue already chosen
/// so that the covered radius cannot shrink.
pub fn extend_plan(plan: &CoverPlan, new_x: u64, new_y: u64) -> Result<CoverPlan, CoverError> {
    if new_x < plan.x || new_y < plan.y {
        return Err(Error::InvalidParameter("extend_plan needs a larger x and y").into());
    }
    let params = match plan.params.mode {
        ThresholdMode::Desk => CoverParams::desk(new_x),
        ThresholdMode::Asymptotic => CoverParams::asymptotic(new_x),
    };
    let old: alloc::collections::BTreeMap<_, _> =
        plan.entries.iter().map(|e| (e.prime.key(), (e.residue, e.phase))).collect();
    let mut kept = Vec::new();
    let mut fresh = Vec::new();
    for prime in primes_up_to(&plan.field, new_x) {
        match old.get(&prime.key()) {
            Some(&(residue, phase)) => kept.push(PlanEntry { prime, residue, phase }),
            None => {
                let phase = params.phase_of(prime.norm);
                fresh.push(PlanEntry { prime, residue: 0, phase });
            }
        }
    }
    let fixed = kept.len();
    kept.extend(fresh);
    let next = CoverPlan { x: new_x, y: new_y, params, entries: kept, ..plan.clone() };
    let mut done = complete_plan(next, fixed);
    let sort = |p: &mut CoverPlan| p.entries.sort_by_key(|e| (e.prime.norm, e.prime.p, e.prime.root));
    match &mut done {
        Ok(p) => sort(p),
        Err(CoverError::Incomplete { plan, .. }) => sort(plan),
        Err(_) => {}
    }
    done
}

impl CoverPlan {
    pub fn covers_small(&self, a: i64, b: i64) -> bool {
        self.entries.iter().any(|e| e.prime.residue_small(a, b) == e.residue)
    }

    pub fn covers(&self, z: &QuadInt) -> bool {
        self.entries.iter().any(|e| e.prime.residue(z) == e.residue)
    }

    /// Smallest norm of an uncovered element with norm `<= limit`, or `limit + 1`.
    pub fn covered_radius_upto(&self, limit: u64) -> u64 {
        if !self.covers_small(0, 0) {
            return 0;
        }
        for (a, b) in self.field.enumerate_norm_range(0, limit, 1 << 16).map(|z| z.small().unwrap()) {
            if !self.covers_small(a, b) {
                return self.field.norm_small(a, b) as u64;
            }
        }
        limit + 1
    }

    /// Largest `r` such that every `z` with `N(z) < r` is covered, capped at `y + 1`.
    pub fn covered_radius(&self) -> u64 {
        self.covered_radius_upto(self.y)
    }

    pub fn covered_count(&self) -> usize {
        targets(&self.field, self.y).iter().filter(|&&(a, b, _)| self.covers_small(a, b)).count()
    }

    pub fn residue_of(&self, key: crate::ideals::PrimeKey) -> Option<u64> {
        self.entries.iter().find(|e| e.prime.key() == key).map(|e| e.residue)
    }
}

/// Elements with `lo < N(z) <= hi` that no entry covers, in `(norm, a, b)` order.
/// Pass `lo = -1` to include zero.
pub fn plan_coverage(plan: &CoverPlan, lo: i128, hi: i128) -> Vec<QuadInt> {
    plan.field
        .sorted_points(lo, hi)
        .into_iter()
        .filter(|&(a, b)| !plan.covers_small(a, b))
        .map(|(a, b)| plan.field.elem(a, b))
        .collect()
}

/// Elements with `N(z) <= y` left uncovered when only the two zero phases act.
pub fn zero_phase_survivors(k: &FieldDesc, x: u64, y: u64, params: &CoverParams) -> Vec<QuadInt> {
    let zeros: Vec<PrimeIdealRec> = primes_up_to(k, x)
        .into_iter()
        .filter(|p| matches!(params.phase_of(p.norm), Phase::ZeroSmall | Phase::ZeroMid))
        .collect();
    k.sorted_points(-1, y as i128)
        .into_iter()
        .filter(|&(a, b)| zeros.iter().all(|p| !p.divides_small(a, b)))
        .map(|(a, b)| k.elem(a, b))
        .collect()
}
