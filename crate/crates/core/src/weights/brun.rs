//! Brun's pure sieve: Moebius truncated at a fixed number of prime factors.

use alloc::vec::Vec;

use crate::error::Error;
use crate::primes::{factor_u64, primes_le};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SieveSide {
    Upper,
    Lower,
}

/// `lambda_d = mu(d)` for squarefree `d` with `P+(d) <= z` and `omega(d) <= level`,
/// zero elsewhere. For `m` with `omega_z(m) = w >= 1` prime factors up to `z`,
/// `sum_{d | m} lambda_d = (-1)^level C(w - 1, level)`, so an even level gives
/// an upper sieve and an odd level a lower one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveTable {
    pub side: SieveSide,
    pub z: u64,
    /// Support bound `D`; every supported `d` satisfies `d <= D`.
    pub d: u64,
    pub level: u32,
    primes: Vec<u64>,
}

impl SieveTable {
    /// Requires `2 <= z` and `z^2 <= D`.
    pub fn new(side: SieveSide, z: u64, d: u64) -> Result<Self, Error> {
        if z < 2 || z.checked_mul(z).is_none_or(|zz| zz > d) {
            return Err(Error::InvalidParameter("sieve needs 2 <= z <= sqrt(D)"));
        }
        let primes = primes_le(z);
        // Largest L such that any L primes up to z multiply to at most D.
        let mut max_level = 0u32;
        let mut prod: u128 = 1;
        for &p in primes.iter().rev() {
            prod *= p as u128;
            if prod > d as u128 {
                break;
            }
            max_level += 1;
        }
        let level = if max_level as usize >= primes.len() {
            max_level
        } else {
            match side {
                SieveSide::Upper => max_level & !1,
                SieveSide::Lower if max_level % 2 == 1 => max_level,
                SieveSide::Lower => max_level - 1,
            }
        };
        Ok(SieveTable { side, z, d, level, primes })
    }

    pub fn upper(z: u64, d: u64) -> Result<Self, Error> {
        Self::new(SieveSide::Upper, z, d)
    }

    pub fn lower(z: u64, d: u64) -> Result<Self, Error> {
        Self::new(SieveSide::Lower, z, d)
    }

    pub fn lambda(&self, n: u64) -> i8 {
        if n == 0 || n > self.d {
            return 0;
        }
        let f = factor_u64(n);
        if f.iter().any(|&(p, e)| e > 1 || p > self.z) || f.len() as u32 > self.level {
            return 0;
        }
        if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `sum_{d | m} lambda_d`, summed over the squarefree divisors of `m`.
    pub fn divisor_sum(&self, m: u64) -> i64 {
        let ps: Vec<u64> = factor_u64(m).into_iter().map(|(p, _)| p).collect();
        let mut total = 0i64;
        for mask in 0u32..(1 << ps.len()) {
            let d: u64 = (0..ps.len()).filter(|i| mask >> i & 1 == 1).map(|i| ps[i]).product();
            total += self.lambda(d) as i64;
        }
        total
    }

    /// Every `d` with `lambda_d != 0`, ascending; `None` beyond `limit` entries.
    pub fn support(&self, limit: usize) -> Option<Vec<(u64, i8)>> {
        let mut out = Vec::new();
        fn walk(t: &SieveTable, from: usize, d: u64, w: u32, out: &mut Vec<(u64, i8)>, limit: usize) -> bool {
            out.push((d, if w % 2 == 0 { 1 } else { -1 }));
            if out.len() > limit {
                return false;
            }
            if w == t.level {
                return true;
            }
            for i in from..t.primes.len() {
                let Some(next) = d.checked_mul(t.primes[i]).filter(|&n| n <= t.d) else { break };
                if !walk(t, i + 1, next, w + 1, out, limit) {
                    return false;
                }
            }
            true
        }
        if !walk(self, 0, 1, 0, &mut out, limit) {
            return None;
        }
        out.sort_unstable();
        Some(out)
    }
}
