//! Prime-free ball certificates.

use alloc::vec::Vec;

use super::{CoverParams, CoverPlan, PlanEntry, Strategy};
use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::ideals::{primes_up_to, PrimeIdealRec};
use crate::int::Int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub offset: QuadInt,
    pub prime: PrimeIdealRec,
}

/// Claims that every element of `B(center, radius)` is divisible by a prime
/// ideal of norm at most `x` while having norm above `x`, so none is prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    pub field: FieldDesc,
    pub center: QuadInt,
    pub radius: u64,
    pub prime_bound_x: u64,
    pub witnesses: Vec<Witness>,
    /// Offsets for which no witness was found, or whose shifted norm is too small.
    pub failures: Vec<QuadInt>,
    pub verified: bool,
}

/// Finds, for each offset `z` with `N(z) < radius`, the first prime ideal
/// (in norm order) of norm at most `x` dividing `center + z`.
pub fn certify(k: &FieldDesc, center: &QuadInt, radius: u64, x: u64) -> Result<GapCertificate, Error> {
    k.check(center)?;
    let primes = primes_up_to(k, x);
    let base: Vec<u64> = primes.iter().map(|p| p.residue(center)).collect();
    let x_int = Int::from(x);
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for (u, v) in k.sorted_points(-1, radius as i128 - 1) {
        let offset = k.elem(u, v);
        let hit = primes
            .iter()
            .zip(&base)
            .find(|(p, &c)| p.res_add(c, p.residue_small(u, v)) == 0)
            .map(|(p, _)| p.clone());
        let big_enough = (center + &offset).norm() > x_int;
        match hit {
            Some(prime) if big_enough => witnesses.push(Witness { offset, prime }),
            _ => failures.push(offset),
        }
    }
    let verified = failures.is_empty();
    Ok(GapCertificate {
        field: *k,
        center: center.clone(),
        radius,
        prime_bound_x: x,
        witnesses,
        failures,
        verified,
    })
}

/// The plan `a_P = -center (mod P)` for every prime ideal of norm at most `x`.
pub fn extract_plan(k: &FieldDesc, center: &QuadInt, radius: u64, x: u64) -> Result<CoverPlan, Error> {
    k.check(center)?;
    let params = CoverParams::desk(x.max(1));
    let neg = -center;
    let entries = primes_up_to(k, x)
        .into_iter()
        .map(|prime| {
            let residue = prime.residue(&neg);
            let phase = params.phase_of(prime.norm);
            PlanEntry { prime, residue, phase }
        })
        .collect();
    Ok(CoverPlan {
        field: *k,
        x,
        y: radius.saturating_sub(1).max(x),
        strategy: Strategy::Extracted,
        seed: 0,
        params,
        entries,
    })
}
