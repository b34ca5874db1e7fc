//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use quadgap::dto::{elem_dto, CertificateDoc, PrimeIdealDto};
use quadgap::par;
use quadgap::verify::verify_certificate;
use quadgap_core::covering::{
    build_plan, certify, default_y, extract_plan, reconstruct_center, CenterMode, CoverError, CoverPlan, Strategy,
};
use quadgap_core::ideal::IdealRec;
use quadgap_core::ideals::{factor_ideal, pi_g, primes_up_to};
use quadgap_core::numeric::li;
use quadgap_core::randsel::{max_difference_codegree, sample_survivors, RandomStageConfig};
use quadgap_core::smooth::psi_k;
use quadgap_core::weights::{rho, rho_ideal, SieveTable, Support, TupleConfig};
use quadgap_core::FieldDesc;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(d: i64) -> FieldDesc {
    FieldDesc::new(d).unwrap()
}

// ---------------------------------------------------------------- Landau

fn landau() -> Outcome {
    let mut notes = Vec::new();
    for d in [-1, -2, -3] {
        let x = 1_000_000u64;
        let ratio = pi_g(&field(d), x) as f64 / li(x as f64);
        notes.push(format!("d={d}: {ratio:.5}"));
        ensure((ratio - 1.0).abs() <= 0.02, || format!("d={d}: pi/Li = {ratio}"))?;
    }
    Ok(notes.join(", "))
}

// ---------------------------------------------------------------- golden gaps

fn golden() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read(dir.join("../core/src/norm_sieve/oracle.rs")).map_err(|e| e.to_string())?;
    let hash: String = Sha256::digest(&src).iter().map(|b| format!("{b:02x}")).collect();
    let text = std::fs::read_to_string(dir.join("tests/golden/gaps_qi.json")).map_err(|e| e.to_string())?;
    let g: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(g["oracle_sha256"] == hash.as_str(), || "oracle source changed since the values were frozen".into())?;
    let k = field(-1);
    let mut radii = Vec::new();
    for rec in g["records"].as_array().unwrap() {
        let x = rec["x"].as_u64().unwrap();
        let found = par::gap_search(&k, x, u64::MAX).map_err(|e| e.to_string())?;
        let want = rec["radius"].as_u64().unwrap();
        let center = [rec["center"][0].as_i64().unwrap(), rec["center"][1].as_i64().unwrap()];
        let (a, b) = found.center.small().unwrap();
        ensure(found.radius == want && [a, b] == center, || {
            format!("X={x}: got radius {} at [{a}, {b}], stored {want} at {center:?}", found.radius)
        })?;
        radii.push((x, want));
    }
    ensure(radii.windows(2).all(|w| w[0].1 <= w[1].1), || format!("not monotone: {radii:?}"))?;
    Ok(radii.iter().map(|(x, r)| format!("G({x})={r}")).collect::<Vec<_>>().join(", "))
}

// ---------------------------------------------------------------- covering round trip

const GRID_X: [u64; 4] = [15, 20, 30, 40];
const SEEDS: u64 = 20;

/// The plan, or the partial plan when matching ran out of primes.
fn plan_for(k: &FieldDesc, x: u64, s: Strategy, seed: u64) -> Result<(CoverPlan, bool), String> {
    match build_plan(k, x, default_y(x, 1.0), s, seed) {
        Ok(p) => Ok((p, true)),
        Err(e @ CoverError::Incomplete { .. }) => Ok((e.into_plan().unwrap(), false)),
        Err(CoverError::Core(e)) => Err(e.to_string()),
    }
}

fn certificate_doc(k: &FieldDesc, plan: &CoverPlan) -> Result<(CertificateDoc, u64), String> {
    let r = plan.covered_radius();
    let rc = reconstruct_center(plan, r, CenterMode::Minimal).map_err(|e| e.to_string())?;
    let cert = certify(k, &rc.center, r, plan.x).map_err(|e| e.to_string())?;
    Ok((CertificateDoc::new(&cert, None, serde_json::Value::Null), r))
}

fn round_trip() -> Outcome {
    let k = field(-1);
    let (mut runs, mut partial) = (0, 0);
    for x in GRID_X {
        for s in [Strategy::Trivial, Strategy::Random, Strategy::Greedy] {
            for seed in 0..SEEDS {
                let (plan, complete) = plan_for(&k, x, s, seed)?;
                partial += !complete as u32;
                let (doc, r) = certificate_doc(&k, &plan)?;
                let tag = format!("x={x} {} seed={seed} r={r}", s.as_str());
                ensure(doc.verified, || format!("{tag}: certify failed"))?;
                let rep = verify_certificate(&doc);
                ensure(rep.ok(), || format!("{tag}: verifier rejected: {:?}", rep.problems))?;
                let center = quadgap::dto::elem_from_dto(&k, &doc.center);
                let back = extract_plan(&k, &center, r, x).map_err(|e| e.to_string())?;
                ensure(r == 0 || back.covered_radius_upto(r - 1) >= r, || format!("{tag}: extracted plan falls short"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs}/{runs} round trips ({partial} from partial plans)"))
}

// ---------------------------------------------------------------- tampering

fn tampering() -> Outcome {
    let k = field(-1);
    let mut bases = Vec::new();
    for x in GRID_X {
        for seed in 0..5 {
            let (plan, _) = plan_for(&k, x, Strategy::Greedy, seed)?;
            let (doc, _) = certificate_doc(&k, &plan)?;
            bases.push((doc, primes_up_to(&k, x)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0u32; 3];
    for i in 0..1000 {
        let (base, primes) = &bases[rng.random_range(0..bases.len())];
        let mut doc = base.clone();
        let kind = i % 3;
        match kind {
            0 => {
                // swap one witness for a prime ideal that does not divide
                let j = rng.random_range(0..doc.witnesses.len());
                let z = &quadgap::dto::elem_from_dto(&k, &doc.center) + &quadgap::dto::elem_from_dto(&k, &doc.witnesses[j].offset);
                let wrong: Vec<_> = primes.iter().filter(|p| !p.divides(&z)).collect();
                doc.witnesses[j].prime = PrimeIdealDto::from(wrong[rng.random_range(0..wrong.len())]);
            }
            1 => {
                let top = doc.witnesses.iter().map(|w| w.prime.norm).max().unwrap();
                doc.prime_bound_x = top - 1;
            }
            _ => {
                let c = &quadgap::dto::elem_from_dto(&k, &doc.center) + &k.elem(1, 0);
                doc.center = elem_dto(&c);
            }
        }
        ensure(!verify_certificate(&doc).ok(), || format!("tampering {i} (kind {kind}) accepted"))?;
        counts[kind as usize] += 1;
    }
    Ok(format!(
        "1000/1000 rejected (witness {}, shrink x {}, shift center {})",
        counts[0], counts[1], counts[2]
    ))
}

// ---------------------------------------------------------------- greedy vs trivial

fn greedy_dominates() -> Outcome {
    let k = field(-1);
    let (mut points, mut strict) = (0, 0);
    for x in GRID_X {
        let trivial = plan_for(&k, x, Strategy::Trivial, 0)?.0.covered_radius();
        for seed in 0..SEEDS {
            let greedy = plan_for(&k, x, Strategy::Greedy, seed)?.0.covered_radius();
            ensure(greedy >= trivial, || format!("x={x} seed={seed}: greedy {greedy} < trivial {trivial}"))?;
            points += 1;
            strict += (greedy > trivial) as u32;
        }
    }
    Ok(format!("greedy >= trivial on {points}/{points}; strict on {:.0}%", 100.0 * strict as f64 / points as f64))
}

// ---------------------------------------------------------------- Brun sieve conditions

fn brun() -> Outcome {
    let mut checked = 0u64;
    for (z, d) in [(5u64, 25u64), (7, 100), (11, 1000), (13, 10_000), (29, 10_000)] {
        let up = SieveTable::upper(z, d).map_err(|e| e.to_string())?;
        let lo = SieveTable::lower(z, d).map_err(|e| e.to_string())?;
        ensure(up.lambda(1) == 1 && lo.lambda(1) == 1, || "lambda_1 != 1".into())?;
        for m in 1..=10_000u64 {
            if !squarefree(m) {
                continue;
            }
            let coprime = (2..=z).all(|p| m % p != 0 || !is_small_prime(p));
            let target = coprime as i64;
            let (mut su, mut sl) = (0i64, 0i64);
            for e in (1..=m).filter(|e| m % e == 0) {
                su += up.lambda(e) as i64;
                sl += lo.lambda(e) as i64;
            }
            ensure(su >= target, || format!("upper fails at z={z} D={d} m={m}: {su}"))?;
            ensure(sl <= target, || format!("lower fails at z={z} D={d} m={m}: {sl}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (z, D, m) cases"))
}

fn squarefree(m: u64) -> bool {
    (2..).take_while(|f| f * f <= m).all(|f| m % (f * f) != 0)
}

fn is_small_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|f| f * f <= p).all(|f| p % f != 0)
}

// ---------------------------------------------------------------- I_k and M_k

fn ik_mk() -> Outcome {
    let mut notes = Vec::new();
    for k in [5usize, 10, 20] {
        let r = par::ik_jk(k, 1_000_000, 1).map_err(|e| e.to_string())?;
        let kf = k as f64;
        let bound = (kf * kf.ln()).powf(-kf);
        ensure(r.i_k + 3.0 * r.i_se <= bound, || format!("k={k}: I_k {} + 3se {} > {bound}", r.i_k, r.i_se))?;
        notes.push(format!("I_{k}/bound={:.3}", (r.i_k + 3.0 * r.i_se) / bound));
    }
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for k in 5..=40usize {
        let r = par::ik_jk(k, 200_000, 2).map_err(|e| e.to_string())?;
        let q = r.m_k / (k as f64).ln();
        c1 = c1.min(q);
        c2 = c2.max(q);
    }
    ensure(c2 / c1 <= 4.0, || format!("M_k/log k spans [{c1}, {c2}]"))?;
    notes.push(format!("M_k/log k in [{c1:.3}, {c2:.3}]"));
    Ok(notes.join(", "))
}

// ---------------------------------------------------------------- inversions

fn rationals(n: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| BigRational::new(BigInt::from(rng.random_range(-60i64..60)), BigInt::from(rng.random_range(1i64..25))))
        .collect()
}

fn inversions() -> Outcome {
    let mut sizes = Vec::new();
    for (d, k, z, r) in [(-1i64, 1usize, 3u64, 80u64), (-1, 2, 3, 45), (-2, 2, 3, 45), (-3, 3, 3, 25), (-7, 3, 3, 28)] {
        let sup = Support::new(&field(d), k, z, r, 500).map_err(|e| e.to_string())?;
        ensure(sup.len() <= 500, || "support too large".into())?;
        let lambda = rationals(sup.len(), 11);
        let xi = sup.xi_from_lambda(&lambda);
        ensure(sup.lambda_from_xi(&xi) == lambda, || format!("lambda round trip d={d} k={k}"))?;
        let xi2 = rationals(sup.len(), 12);
        ensure(sup.xi_from_lambda(&sup.lambda_from_xi(&xi2)) == xi2, || format!("xi round trip d={d} k={k}"))?;
        for m in 0..k {
            ensure(sup.zeta(m, &lambda) == sup.zeta_via_xi(m, &xi), || format!("zeta identity d={d} k={k} m={m}"))?;
        }
        sizes.push(sup.len());
    }
    Ok(format!("exact on supports of size {sizes:?}"))
}

// ---------------------------------------------------------------- rho

/// Squarefree ideals of norm at most `max_norm`, from every Hermite normal form.
fn squarefree_ideals(k: &FieldDesc, max_norm: u64) -> Vec<IdealRec> {
    let mut out = Vec::new();
    for a22 in 1..=max_norm as i64 {
        for m in 1.. {
            let a11 = a22 * m;
            if (a11 * a22) as u64 > max_norm {
                break;
            }
            for a21 in (0..a11).step_by(a22 as usize) {
                let id = IdealRec { d: k.d, a11, a21, a22 };
                if id.is_ideal(k) && factor_ideal(k, &id).unwrap().iter().all(|&(_, e)| e == 1) {
                    out.push(id);
                }
            }
        }
    }
    out
}

/// Roots of the product of the forms in a full residue system of `q`.
fn rho_scan(cfg: &TupleConfig, q: &IdealRec) -> u64 {
    let k = cfg.field();
    let mut count = 0;
    for u in 0..q.a11 {
        for v in 0..q.a22 {
            let n = k.elem(u, v);
            let prod = cfg
                .forms()
                .iter()
                .fold(k.one(), |acc, &(a, b)| &acc * &(&(&k.elem(a.0, a.1) * &n) + &k.elem(b.0, b.1)));
            count += q.contains(&prod) as u64;
        }
    }
    count
}

fn rho_checks() -> Outcome {
    let mut ideals_checked = 0;
    for (d, offsets) in [(-1i64, vec![(0, 0), (1, 0)]), (-2, vec![(0, 0), (1, 0), (0, 1)]), (-3, vec![(0, 0), (2, 0)])] {
        let k = field(d);
        let cfg = TupleConfig::from_offsets(&k, &offsets).map_err(|e| e.to_string())?;
        let kk = cfg.k() as u64;
        for p in primes_up_to(&k, 1000) {
            ensure(rho(&cfg, &p) <= kk, || format!("d={d}: rho({p}) > k"))?;
        }
        for q in squarefree_ideals(&k, 1000) {
            let fast = rho_ideal(&cfg, &q).map_err(|e| e.to_string())?;
            let slow = rho_scan(&cfg, &q);
            ensure(fast == slow, || format!("d={d} q={q}: product {fast}, scan {slow}"))?;
            ideals_checked += 1;
        }
    }
    Ok(format!("{ideals_checked} squarefree ideals, rho multiplicative and <= k"))
}

// ---------------------------------------------------------------- sigma concentration

fn sigma_concentration() -> Outcome {
    let mut cfg = RandomStageConfig::desk(&field(-1), 100_000).map_err(|e| e.to_string())?;
    cfg.trials = 200;
    cfg.seed = 2024;
    let stats = par::survival_experiment(&cfg);
    let m = stats.mean_ratio;
    ensure((0.95..=1.05).contains(&m), || format!("mean ratio {m}"))?;
    Ok(format!("mean {m:.4}, spread {:.4}, sigma {:.4}, |Q| {}", stats.spread, stats.sigma, stats.q_count))
}

// ---------------------------------------------------------------- codegree

fn codegree() -> Outcome {
    let cfg = RandomStageConfig::desk(&field(-1), 1000).map_err(|e| e.to_string())?;
    let p_primes = cfg.p_primes();
    let s = cfg.s_primes();
    let q = cfg.q_elements();
    let k = cfg.field;
    let mut pairs = 0u64;
    for trial in 0..5 {
        let surv = sample_survivors(&cfg, &s, &q, trial).survivors;
        ensure(max_difference_codegree(&p_primes, &surv) <= 1, || format!("trial {trial}: class codegree > 1"))?;
        for i in 0..surv.len() {
            for j in i + 1..surv.len() {
                let diff = k.elem(surv[i].0 - surv[j].0, surv[i].1 - surv[j].1);
                let n = p_primes.iter().filter(|p| p.divides(&diff)).count();
                ensure(n <= 1, || format!("trial {trial}: {n} primes divide {:?} - {:?}", surv[i], surv[j]))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} survivor pairs over 5 trials, |P| = {}", p_primes.len()))
}

// ---------------------------------------------------------------- smooth oracle

/// Largest count / envelope ratio accepted over the grid. Measured maximum is
/// 15.32 (d = -5, small y); the dropped log log u factor lands in here.
const SMOOTH_C: f64 = 16.0;

fn legendre_kind(disc: i64, p: u64) -> u8 {
    // 0 ramified, 1 split, 2 inert
    if p == 2 {
        return match disc.rem_euclid(8) {
            0 | 4 => 0,
            1 => 1,
            _ => 2,
        };
    }
    let a = disc.rem_euclid(p as i64) as u128;
    if a == 0 {
        return 0;
    }
    let (mut b, mut e, mut acc) = (a, (p - 1) / 2, 1u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        2
    }
}

/// Ideals of norm `< x` whose prime factors all have norm `< y`, by listing
/// every Hermite normal form and trial-dividing its norm.
fn smooth_oracle(k: &FieldDesc, x: u64, y: u64) -> u64 {
    let mut count = 0;
    for a22 in 1..x as i64 {
        for m in 1.. {
            let a11 = a22 * m;
            let n = (a11 * a22) as u64;
            if n >= x {
                break;
            }
            let mut rest = n;
            let mut smooth = true;
            let mut p = 2u64;
            while rest > 1 {
                if p * p > rest {
                    p = rest;
                }
                if rest % p == 0 {
                    let local = if legendre_kind(k.disc, p) == 2 { p * p } else { p };
                    smooth &= local < y;
                    while rest % p == 0 {
                        rest /= p;
                    }
                }
                p += 1;
            }
            if !smooth {
                continue;
            }
            for a21 in (0..a11).step_by(a22 as usize) {
                count += IdealRec { d: k.d, a11, a21, a22 }.is_ideal(k) as u64;
            }
        }
    }
    count
}

fn smooth() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for d in [-1i64, -5] {
        let k = field(d);
        for x in [1000u64, 2000, 5000, 10_000] {
            for u in [1.5f64, 2.0, 2.5, 3.0, 4.0] {
                let y = (x as f64).powf(1.0 / u).round() as u64;
                let fast = psi_k(&k, x, y).map_err(|e| e.to_string())?;
                let slow = smooth_oracle(&k, x, y);
                ensure(fast.count == slow, || format!("d={d} x={x} y={y}: {} vs oracle {slow}", fast.count))?;
                worst = worst.max(fast.ratio());
                points += 1;
            }
        }
    }
    ensure(worst <= SMOOTH_C, || format!("count/envelope reaches {worst} > C = {SMOOTH_C}"))?;
    Ok(format!("{points} grid points exact; max count/envelope {worst:.3} <= C = {SMOOTH_C}"))
}

// ---------------------------------------------------------------- driver

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("landau-prime-ideal-theorem", landau),
        ("golden-gap-values", golden),
        ("covering-round-trip", round_trip),
        ("certificate-soundness", tampering),
        ("greedy-dominates-trivial", greedy_dominates),
        ("brun-sieve-conditions", brun),
        ("ik-bound-and-mk-band", ik_mk),
        ("exact-inversions", inversions),
        ("rho-multiplicative", rho_checks),
        ("sigma-concentration", sigma_concentration),
        ("difference-codegree", codegree),
        ("smooth-oracle", smooth),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut results = BTreeMap::new();
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match &out {
            Ok(msg) => println!("PASS {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {msg}");
            }
        }
        results.insert(name, out.is_ok());
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
