//! Two-stage random selection.
//!
//! Stage one gives every prime ideal `s` of the S band a uniform residue
//! `a_s`; the elements avoiding all of them form `S(a)`. Stage two picks one
//! element `n_p` per prime `p` of the P band, drawn from the sieve weight
//! `w*(p, n)` conditioned on the shifted tuple `n + h_i p` surviving stage one.
//! The targets are the prime elements `Q` with `x < N(q) <= y`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::covering::{default_y, rng_for, CoverParams, CoverPlan, Phase};
use crate::error::Error;
use crate::field::FieldDesc;
use crate::ideals::{primes_in_norm_range, PrimeIdealRec};
use crate::norm_sieve::for_each_prime_element;
use crate::numeric::{iterated_log, Neumaier};
use crate::weights::{admissible, TupleConfig, WeightContext, WeightParams};

pub type Elem = (i64, i64);
/// A prime ideal and the residue class picked for it.
pub type Choice = (PrimeIdealRec, u64);

/// The `c` in `y = c x (log x / log_2 x) log_3 x` used at desk scale.
pub const DESK_Y_C: f64 = 2.0;
pub const DEFAULT_TOLERANCE: f64 = 0.1;
pub const DEFAULT_TRIALS: u32 = 200;
/// Largest `|window| * |P|` the weight tables will evaluate.
pub const MAX_WEIGHT_EVALS: u64 = 50_000_000;

/// RNG stream for the weighted second stage; trials use their own index.
const STREAM_SECOND: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomStageConfig {
    pub field: FieldDesc,
    pub x: u64,
    /// `Q` is the prime elements with `x < N <= y`.
    pub y: u64,
    /// `lo < N(s) <= hi`.
    pub s_band: (u64, u64),
    pub p_band: (u64, u64),
    pub offsets: Vec<Elem>,
    pub weight_z: u64,
    pub weight_r: u64,
    /// The density of `n~_p` lives on `N(n + shift) <= y`.
    pub shift: Elem,
    /// `p` is kept when `|X_p - sigma^k| <= tolerance sigma^k`.
    pub tolerance: f64,
    pub seed: u64,
    pub trials: u32,
}

impl RandomStageConfig {
    /// Bands from the desk covering thresholds, two offsets, and the smallest
    /// sieve parameters the field allows.
    pub fn desk(field: &FieldDesc, x: u64) -> Result<Self, Error> {
        let params = CoverParams::desk(x);
        Self::from_params(field, x, default_y(x, DESK_Y_C), &params, 2)
    }

    fn from_params(field: &FieldDesc, x: u64, y: u64, params: &CoverParams, k: usize) -> Result<Self, Error> {
        let ramified = crate::primes::factor_u64(field.disc.unsigned_abs()).last().map_or(1, |&(p, _)| p);
        let weight_z = (ramified + 1).max(3);
        let cfg = RandomStageConfig {
            field: *field,
            x,
            y,
            s_band: ((params.t_small as u64).max(1), (params.z0 as u64).max(1)),
            p_band: (params.p_lo as u64, x),
            offsets: default_offsets(field, k, weight_z)?,
            weight_z,
            weight_r: 6 * weight_z,
            shift: (0, 0),
            tolerance: DEFAULT_TOLERANCE,
            seed: 0,
            trials: DEFAULT_TRIALS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let (s, p) = (self.s_band, self.p_band);
        if self.x < 2 || self.y < self.x {
            return Err(Error::InvalidParameter("need x >= 2 and y >= x"));
        }
        if s.0 < 1 || s.0 > s.1 || p.0 < 1 || p.0 > p.1 || s.1 > self.x || p.1 > self.x {
            return Err(Error::InvalidParameter("bands must lie in (1, x]"));
        }
        if s.1 > p.0 && p.1 > s.0 {
            return Err(Error::InvalidParameter("S and P bands overlap"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive"));
        }
        TupleConfig::from_offsets(&self.field, &self.offsets)?;
        WeightParams::desk(&self.field, self.y, self.weight_z, self.weight_r)?;
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn s_primes(&self) -> Vec<PrimeIdealRec> {
        primes_in_norm_range(&self.field, self.s_band.0, self.s_band.1)
    }

    pub fn p_primes(&self) -> Vec<PrimeIdealRec> {
        primes_in_norm_range(&self.field, self.p_band.0, self.p_band.1)
    }

    /// The prime elements of `Q`, sorted.
    pub fn q_elements(&self) -> Vec<Elem> {
        let mut q = Vec::new();
        for_each_prime_element(&self.field, self.x, self.y, |a, b| q.push((a, b)));
        q.sort_unstable();
        q
    }
}

/// The first `k` offsets in norm order, starting from 0, that keep the tuple
/// admissible up to `z`.
pub fn default_offsets(k: &FieldDesc, count: usize, z: u64) -> Result<Vec<Elem>, Error> {
    let bound = 2 * (count as i128) * (count as i128);
    let mut picked: Vec<Elem> = Vec::new();
    for h in k.sorted_points(-1, bound) {
        if picked.len() == count {
            break;
        }
        picked.push(h);
        let cfg = TupleConfig::from_offsets(k, &picked)?;
        if !admissible(&cfg, z) {
            picked.pop();
        }
    }
    if picked.len() < count {
        return Err(Error::InvalidParameter("no admissible offsets of norm <= 2k^2"));
    }
    Ok(picked)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sigma {
    /// `prod (1 - 1/N(s))` over the S band; 1 when the band is empty.
    pub value: f64,
    pub primes: usize,
    /// `100 (log_2 x)^2 / (log x log_3 x)`, where defined.
    pub asymptotic: Option<f64>,
}

pub fn sigma_of(cfg: &RandomStageConfig) -> Sigma {
    let primes = cfg.s_primes();
    let value = primes.iter().map(|p| 1.0 - 1.0 / p.norm as f64).product();
    Sigma { value, primes: primes.len(), asymptotic: sigma_asymptotic(cfg.x as f64) }
}

pub fn sigma_asymptotic(x: f64) -> Option<f64> {
    let l1 = iterated_log(x, 1)?;
    let l2 = iterated_log(x, 2)?;
    let l3 = iterated_log(x, 3)?;
    (l3 > 0.0).then(|| 100.0 * l2 * l2 / (l1 * l3))
}

/// Whether `n` avoids every chosen class, i.e. lies in `S(a)`.
pub fn survives(choices: &[Choice], n: Elem) -> bool {
    choices.iter().all(|(p, a)| p.residue_small(n.0, n.1) != *a)
}

pub fn survivors_of(q: &[Elem], choices: &[Choice]) -> Vec<Elem> {
    q.iter().copied().filter(|&n| survives(choices, n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionState {
    pub choices: Vec<Choice>,
    pub q_count: usize,
    /// `Q` intersected with `S(a)`, sorted.
    pub survivors: Vec<Elem>,
}

/// Stage one for trial `trial`: one uniform residue per S prime from stream `trial`.
pub fn sample_survivors(cfg: &RandomStageConfig, s_primes: &[PrimeIdealRec], q: &[Elem], trial: u64) -> SelectionState {
    let mut rng = rng_for(cfg.seed, trial);
    let choices: Vec<Choice> = s_primes.iter().map(|p| (p.clone(), rng.random_range(0..p.norm))).collect();
    let survivors = survivors_of(q, &choices);
    SelectionState { choices, q_count: q.len(), survivors }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalStats {
    pub sigma: f64,
    pub q_count: usize,
    pub counts: Vec<usize>,
    /// Mean of `|Q cap S(a)| / (sigma |Q|)` over the trials.
    pub mean_ratio: f64,
    /// Sample standard deviation of that ratio.
    pub spread: f64,
}

impl SurvivalStats {
    pub fn from_counts(sigma: f64, q_count: usize, counts: Vec<usize>) -> Self {
        let expect = sigma * q_count as f64;
        let ratios: Vec<f64> = counts.iter().map(|&c| if expect > 0.0 { c as f64 / expect } else { 0.0 }).collect();
        let n = ratios.len() as f64;
        let mean_ratio = ratios.iter().sum::<f64>() / n.max(1.0);
        let var = ratios.iter().map(|r| (r - mean_ratio) * (r - mean_ratio)).sum::<f64>() / (n - 1.0).max(1.0);
        SurvivalStats { sigma, q_count, counts, mean_ratio, spread: libm::sqrt(var) }
    }
}

/// Runs `cfg.trials` independent stage-one draws.
pub fn survival_experiment(cfg: &RandomStageConfig) -> SurvivalStats {
    let s = cfg.s_primes();
    let q = cfg.q_elements();
    let counts = (0..cfg.trials as u64).map(|t| sample_survivors(cfg, &s, &q, t).survivors.len()).collect();
    SurvivalStats::from_counts(sigma_of(cfg).value, q.len(), counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exclusion {
    /// No generator, so `n + h_i p` is undefined.
    NotPrincipal,
    /// `w*(p, .)` vanishes on the whole window.
    ZeroWeight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeDensity {
    /// Index into the prime list the tables were built from.
    pub source: usize,
    pub prime: PrimeIdealRec,
    pub generator: Elem,
    /// `h_i p` for each offset.
    pub shifts: Vec<Elem>,
    /// `(n, P(n~_p = n))` over `n` of positive weight, sorted by `n`.
    pub density: Vec<(Elem, f64)>,
    pub total_weight: f64,
}

impl PrimeDensity {
    /// Total probability, summed with compensation.
    pub fn mass(&self) -> f64 {
        let mut acc = Neumaier::new();
        for &(_, v) in &self.density {
            acc.add(v);
        }
        acc.value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightTables {
    pub offsets: Vec<Elem>,
    pub window_len: usize,
    pub primes: Vec<PrimeDensity>,
    pub excluded: Vec<(PrimeIdealRec, Exclusion)>,
}

fn add(a: Elem, b: Elem) -> Option<Elem> {
    Some((a.0.checked_add(b.0)?, a.1.checked_add(b.1)?))
}

fn sub(a: Elem, b: Elem) -> Option<Elem> {
    Some((a.0.checked_sub(b.0)?, a.1.checked_sub(b.1)?))
}

/// The densities of `n~_p` for each prime in `primes`, by direct summation of
/// `w*(p, n) = w(n)` for the forms `n + h_i p` over the window.
pub fn weight_tables(cfg: &RandomStageConfig, primes: &[PrimeIdealRec]) -> Result<WeightTables, Error> {
    let k = &cfg.field;
    let base = TupleConfig::from_offsets(k, &cfg.offsets)?;
    let params = WeightParams::desk(k, cfg.y, cfg.weight_z, cfg.weight_r)?;
    let ctx = WeightContext::new(base, params)?;
    let mut window: Vec<Elem> = k
        .points_in_norm_range(-1, cfg.y as i128)
        .into_iter()
        .map(|m| sub(m, cfg.shift).ok_or(Error::InvalidParameter("window shift overflows")))
        .collect::<Result<_, _>>()?;
    window.sort_unstable();
    let evals = window.len() as u64 * primes.len() as u64;
    if evals > MAX_WEIGHT_EVALS {
        return Err(Error::Budget { what: "weight evaluations", limit: MAX_WEIGHT_EVALS, requested: evals });
    }
    let mut out = WeightTables { offsets: cfg.offsets.clone(), window_len: window.len(), primes: Vec::new(), excluded: Vec::new() };
    for (source, pr) in primes.iter().enumerate() {
        let Some(g) = pr.gen.as_ref().and_then(|g| g.small()) else {
            out.excluded.push((pr.clone(), Exclusion::NotPrincipal));
            continue;
        };
        let shifts: Vec<Elem> = cfg
            .offsets
            .iter()
            .map(|&h| {
                let (a, b) = k.mul_small(h, g);
                Some((i64::try_from(a).ok()?, i64::try_from(b).ok()?))
            })
            .collect::<Option<_>>()
            .ok_or(Error::InvalidParameter("h p overflows i64"))?;
        let forms = TupleConfig::from_forms(k, shifts.iter().map(|&s| ((1, 0), s)).collect())?;
        let e_mask = ctx.mask_of(&forms.exceptional());
        let mut weights = Vec::new();
        let mut total = Neumaier::new();
        for &n in &window {
            let values: Vec<Elem> = shifts
                .iter()
                .map(|&s| add(n, s))
                .collect::<Option<_>>()
                .ok_or(Error::InvalidParameter("form value overflows i64"))?;
            let w = ctx.w_values(&values, e_mask)?;
            if w > 0.0 {
                weights.push((n, w));
                total.add(w);
            }
        }
        let total = total.value();
        if total <= 0.0 {
            out.excluded.push((pr.clone(), Exclusion::ZeroWeight));
            continue;
        }
        let density = weights.into_iter().map(|(n, w)| (n, w / total)).collect();
        out.primes.push(PrimeDensity { source, prime: pr.clone(), generator: g, shifts, density, total_weight: total });
    }
    Ok(out)
}

/// `X_p`, membership in `P(a)`, and `Z_p` for one stage-one outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditioned {
    pub sigma: f64,
    pub k: usize,
    /// Indexed like `WeightTables::primes`.
    pub x_p: Vec<f64>,
    pub accepted: Vec<bool>,
    /// Nonzero `Z_p(n)` for accepted primes, sorted by `n`; empty otherwise.
    pub z_p: Vec<Vec<(Elem, f64)>>,
}

pub fn condition(tables: &WeightTables, choices: &[Choice], sigma: f64, tolerance: f64) -> Conditioned {
    let k = tables.offsets.len();
    let sigma_k = libm::pow(sigma, k as f64);
    let mut out = Conditioned { sigma, k, x_p: Vec::new(), accepted: Vec::new(), z_p: Vec::new() };
    for pd in &tables.primes {
        let kept: Vec<(Elem, f64)> = pd
            .density
            .iter()
            .copied()
            .filter(|&(n, _)| pd.shifts.iter().all(|&s| add(n, s).is_some_and(|m| survives(choices, m))))
            .collect();
        let mut x = Neumaier::new();
        for &(_, v) in &kept {
            x.add(v);
        }
        let x = x.value();
        let ok = libm::fabs(x - sigma_k) <= tolerance * sigma_k && x > 0.0;
        out.x_p.push(x);
        out.accepted.push(ok);
        out.z_p.push(if ok { kept } else { Vec::new() });
    }
    out
}

/// Draws `n_p` from `Z_p / X_p`, or returns 0 for a prime outside `P(a)`.
pub fn sample_n_p(cond: &Conditioned, idx: usize, rng: &mut ChaCha20Rng) -> Elem {
    if !cond.accepted[idx] {
        return (0, 0);
    }
    let z = &cond.z_p[idx];
    let target = rng.random::<f64>() * cond.x_p[idx];
    let mut acc = 0.0;
    for &(n, v) in z {
        acc += v;
        if target < acc {
            return n;
        }
    }
    z.last().map_or((0, 0), |&(n, _)| n)
}

/// `{n_p + h_i p} cap Q cap S(a)`, given the sorted survivors `Q cap S(a)`.
pub fn e_p(pd: &PrimeDensity, n_p: Elem, survivors: &[Elem]) -> Vec<Elem> {
    let mut out: Vec<Elem> = pd
        .shifts
        .iter()
        .filter_map(|&s| add(n_p, s))
        .filter(|m| survivors.binary_search(m).is_ok())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `F(q; a) = sigma^-k sum_i sum_p Z_p(q - h_i p)`, looking each term up.
pub fn f_lookup(tables: &WeightTables, cond: &Conditioned, q: Elem) -> f64 {
    let mut total = 0.0;
    for (pd, z) in tables.primes.iter().zip(&cond.z_p) {
        for &s in &pd.shifts {
            if let Some(n) = sub(q, s) {
                if let Ok(j) = z.binary_search_by(|e| e.0.cmp(&n)) {
                    total += z[j].1;
                }
            }
        }
    }
    total / libm::pow(cond.sigma, cond.k as f64)
}

/// `F(q; a)` for every `q` in `qs` (sorted), by pushing each `Z_p(n)` to the
/// `q = n + h_i p` it reaches.
pub fn f_scatter(tables: &WeightTables, cond: &Conditioned, qs: &[Elem]) -> Vec<f64> {
    let mut acc = alloc::vec![0.0; qs.len()];
    for (pd, z) in tables.primes.iter().zip(&cond.z_p) {
        for &(n, v) in z {
            for &s in &pd.shifts {
                if let Some(j) = add(n, s).and_then(|q| qs.binary_search(&q).ok()) {
                    acc[j] += v;
                }
            }
        }
    }
    let norm = libm::pow(cond.sigma, cond.k as f64);
    acc.into_iter().map(|v| v / norm).collect()
}

/// Largest number of primes `p` for which some single draw of `n_p` puts two
/// given distinct survivors into `e_p`.
pub fn max_codegree(tables: &WeightTables, cond: &Conditioned, survivors: &[Elem]) -> u32 {
    let mut pairs: BTreeMap<(Elem, Elem), u32> = BTreeMap::new();
    for (pd, z) in tables.primes.iter().zip(&cond.z_p) {
        let mut mine: Vec<(Elem, Elem)> = Vec::new();
        for &(n, _) in z {
            let e = e_p(pd, n, survivors);
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    mine.push((e[i], e[j]));
                }
            }
        }
        mine.sort_unstable();
        mine.dedup();
        for pair in mine {
            *pairs.entry(pair).or_insert(0) += 1;
        }
    }
    pairs.values().copied().max().unwrap_or(0)
}

/// Largest number of primes in `p_primes` dividing `q1 - q2`, over distinct
/// pairs of `survivors`. Elements sharing a class mod `p` are exactly the
/// pairs whose difference `p` divides.
pub fn max_difference_codegree(p_primes: &[PrimeIdealRec], survivors: &[Elem]) -> u32 {
    let mut pairs: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for p in p_primes {
        let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, &(a, b)) in survivors.iter().enumerate() {
            classes.entry(p.residue_small(a, b)).or_default().push(i);
        }
        for members in classes.values() {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    *pairs.entry((i, j)).or_insert(0) += 1;
                }
            }
        }
    }
    pairs.values().copied().max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondStage {
    /// Each P prime takes the class holding the most remaining survivors.
    Greedy,
    /// Each P prime takes the class of `n_p` drawn from the conditioned weights.
    Weighted,
}

impl SecondStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            SecondStage::Greedy => "greedy",
            SecondStage::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondStageResult {
    pub choices: Vec<Choice>,
    /// Survivors in no chosen class.
    pub leftover: usize,
}

fn remove_class(remaining: &mut Vec<Elem>, p: &PrimeIdealRec, r: u64) {
    remaining.retain(|&(a, b)| p.residue_small(a, b) != r);
}

/// Class holding the most residues, smallest class on ties. Counts in a
/// table indexed by residue when the norm is small enough, else by sorting.
fn largest_class(residues: &[u64], norm: u64, counts: &mut Vec<u32>) -> u64 {
    const TABLE_MAX: u64 = 1 << 22;
    if norm <= TABLE_MAX {
        counts.clear();
        counts.resize(norm as usize, 0);
        let mut best = (0u32, 0u64);
        for &v in residues {
            let c = &mut counts[v as usize];
            *c += 1;
            if *c > best.0 || (*c == best.0 && v < best.1) {
                best = (*c, v);
            }
        }
        return best.1;
    }
    let mut sorted = residues.to_vec();
    sorted.sort_unstable();
    let (mut r, mut best) = (sorted[0], 0);
    for run in sorted.chunk_by(|x, y| x == y) {
        if run.len() > best {
            (r, best) = (run[0], run.len());
        }
    }
    r
}

/// Greedy max coverage over `p_primes`, in order; stops once nothing is left.
pub fn greedy_second_stage(p_primes: &[PrimeIdealRec], survivors: &[Elem]) -> SecondStageResult {
    let mut remaining = survivors.to_vec();
    let mut choices = Vec::new();
    let mut counts = Vec::new();
    for p in p_primes {
        if remaining.is_empty() {
            break;
        }
        let residues: Vec<u64> = remaining.iter().map(|&(a, b)| p.residue_small(a, b)).collect();
        let r = largest_class(&residues, p.norm, &mut counts);
        let mut keep = residues.iter().map(|&v| v != r);
        remaining.retain(|_| keep.next().unwrap());
        choices.push((p.clone(), r));
    }
    SecondStageResult { choices, leftover: remaining.len() }
}

/// Draws `n_p` for every prime in the tables from stream `stream` and sieves
/// out its class.
pub fn weighted_second_stage(
    tables: &WeightTables,
    cond: &Conditioned,
    survivors: &[Elem],
    seed: u64,
    stream: u64,
) -> SecondStageResult {
    let mut rng = rng_for(seed, STREAM_SECOND + stream);
    let mut remaining = survivors.to_vec();
    let mut choices = Vec::new();
    for (i, pd) in tables.primes.iter().enumerate() {
        let n = sample_n_p(cond, i, &mut rng);
        let r = pd.prime.residue_small(n.0, n.1);
        remove_class(&mut remaining, &pd.prime, r);
        choices.push((pd.prime.clone(), r));
    }
    SecondStageResult { choices, leftover: remaining.len() }
}

/// Residues for the P-band entries of a covering plan from index `fixed` on,
/// drawn from the weights conditioned on the plan's S-band residues.
pub fn weighted_p_residues(plan: &CoverPlan, fixed: usize) -> Result<Vec<(usize, u64)>, Error> {
    let cfg = RandomStageConfig::from_params(&plan.field, plan.x, plan.y, &plan.params, 2)?;
    let choices: Vec<Choice> = plan
        .entries
        .iter()
        .filter(|e| e.phase == Phase::RandomS)
        .map(|e| (e.prime.clone(), e.residue))
        .collect();
    let slots: Vec<usize> = (fixed..plan.entries.len()).filter(|&i| plan.entries[i].phase == Phase::GreedyP).collect();
    let primes: Vec<PrimeIdealRec> = slots.iter().map(|&i| plan.entries[i].prime.clone()).collect();
    let tables = weight_tables(&cfg, &primes)?;
    let sigma = choices.iter().map(|(p, _)| 1.0 - 1.0 / p.norm as f64).product();
    let cond = condition(&tables, &choices, sigma, cfg.tolerance);
    let mut rng = rng_for(plan.seed, STREAM_SECOND);
    Ok(tables
        .primes
        .iter()
        .enumerate()
        .map(|(i, pd)| {
            let n = sample_n_p(&cond, i, &mut rng);
            (slots[pd.source], pd.prime.residue_small(n.0, n.1))
        })
        .collect())
}
