//! Chinese remaindering of a plan into a single center.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{CoverError, CoverPlan};
use crate::error::Error;
use crate::field::QuadInt;
use crate::ideals::SplitKind;
use crate::int::Int;
use crate::numeric::isqrt_u64;
use crate::primes::{inv_mod, mul_mod};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterMode {
    /// Smallest translate with `N(c + z) > x` on the whole ball.
    Minimal,
    /// Smallest translate with `N(c) >= 10 P(x)`, where `P(x)` is the product
    /// of the norms of all prime ideals of norm at most `x`; at most 100 steps.
    Fidelity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedCenter {
    pub center: QuadInt,
    /// Product of the rational primes below the plan's ideals.
    pub modulus: BigInt,
    /// Number of modulus steps added to the first coordinate.
    pub translate: u64,
}

/// Coordinate targets `(u, v) mod p` forcing `u + v w = -a_P (mod P)` for
/// every prime ideal above `p`.
fn local_target(entries: &[(&crate::ideals::PrimeIdealRec, u64)]) -> Result<(u64, u64), Error> {
    let (pr, a) = entries[0];
    let p = pr.p;
    let neg = |x: u64| (p - x % p) % p;
    match (pr.kind, entries.len()) {
        (SplitKind::Inert, 1) => {
            let (u, v) = (a % p, a / p);
            Ok((neg(u), neg(v)))
        }
        (SplitKind::Ramified, 1) | (SplitKind::Split, 1) => Ok((neg(a), 0)),
        (SplitKind::Split, 2) => {
            let (q, b) = entries[1];
            let (r1, r2) = (pr.root, q.root);
            // u + v r1 = -a, u + v r2 = -b
            let diff = (r1 + p - r2) % p;
            let inv = inv_mod(diff, p).ok_or(Error::InvalidParameter("coincident split roots"))?;
            let v = mul_mod((a % p + p - b % p) % p, inv, p);
            let v = neg(v);
            let u = (neg(a) + p - mul_mod(v, r1, p)) % p;
            Ok((u, v))
        }
        _ => Err(Error::InvalidParameter("unexpected prime ideals above one rational prime")),
    }
}

/// A center `c` with `c = -a_P (mod P)` for every entry, translated so that
/// every element of the ball `B(c, radius)` has norm above `x`.
pub fn reconstruct_center(plan: &CoverPlan, radius: u64, mode: CenterMode) -> Result<ReconstructedCenter, CoverError> {
    let mut by_p: BTreeMap<u64, Vec<(&crate::ideals::PrimeIdealRec, u64)>> = BTreeMap::new();
    for e in &plan.entries {
        by_p.entry(e.prime.p).or_default().push((&e.prime, e.residue));
    }
    let mut m = BigInt::one();
    let mut u = BigInt::zero();
    let mut v = BigInt::zero();
    for (p, list) in &by_p {
        let (tu, tv) = local_target(list)?;
        let pb = BigInt::from(*p);
        // lift (u, v) mod m to mod m p
        let inv = inv_mod((&m % &pb).try_into().unwrap(), *p).expect("distinct primes are coprime");
        let lift = |cur: &BigInt, t: u64| -> BigInt {
            let cur_p: u64 = cur.mod_floor(&pb).try_into().unwrap();
            let k = mul_mod((t + p - cur_p) % p, inv, *p);
            cur + &m * BigInt::from(k)
        };
        u = lift(&u, tu);
        v = lift(&v, tv);
        m *= &pb;
    }
    let k = plan.field;
    let norm_of = |a: &BigInt, b: &BigInt| k.elem(Int::from_big(a.clone()), Int::from_big(b.clone())).norm().to_big();
    let threshold = match mode {
        CenterMode::Minimal => {
            let s = isqrt_u64(plan.x) + isqrt_u64(radius) + 2;
            BigInt::from(s) * BigInt::from(s)
        }
        CenterMode::Fidelity => {
            let p_x: BigInt = plan.entries.iter().map(|e| BigInt::from(e.prime.norm)).product();
            p_x * 10u32
        }
    };
    let mut n = 0u64;
    let mut a = u.clone();
    while norm_of(&a, &v) <= threshold {
        n += 1;
        a += &m;
        if mode == CenterMode::Fidelity && n > 100 {
            return Err(Error::Budget { what: "center translation steps", limit: 100, requested: n }.into());
        }
    }
    Ok(ReconstructedCenter {
        center: k.elem(Int::from_big(a), Int::from_big(v)),
        modulus: m,
        translate: n,
    })
}
