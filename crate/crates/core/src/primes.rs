//! Rational primes: sieving, primality, square roots modulo p.

use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::isqrt_u64;

/// All primes `<= limit`.
pub fn primes_le(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_in(0, limit, |p| out.push(p));
    out
}

/// Calls `f` on every prime in `(lo, hi]` in increasing order, using a
/// segmented sieve of Eratosthenes over odd numbers.
pub fn for_each_prime_in(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi <= lo {
        return;
    }
    if lo < 2 && hi >= 2 {
        f(2);
    }
    let base = small_primes(isqrt_u64(hi));
    const SEG: u64 = 1 << 18; // odd numbers per segment
    // odd n = 2i + 1, i in [i_lo, i_hi]
    let first = (lo + 1).max(3);
    let i_lo = first / 2;
    let i_hi = if hi % 2 == 1 { hi / 2 } else { (hi - 1) / 2 };
    if i_hi < i_lo {
        return;
    }
    let mut flags = vec![true; SEG as usize];
    let mut start = i_lo;
    while start <= i_hi {
        let end = (start + SEG - 1).min(i_hi);
        let len = (end - start + 1) as usize;
        flags[..len].fill(true);
        for &p in base.iter().skip(1) {
            let pp = p * p;
            if pp > 2 * end + 1 {
                break;
            }
            // smallest odd multiple of p that is >= max(p^2, 2*start+1)
            let lo_n = (2 * start + 1).max(pp);
            let mut m = lo_n.div_ceil(p) * p;
            if m % 2 == 0 {
                m += p;
            }
            let mut j = (m / 2 - start) as usize;
            while j < len {
                flags[j] = false;
                j += p as usize;
            }
        }
        for (j, &is_p) in flags[..len].iter().enumerate() {
            let n = 2 * (start + j as u64) + 1;
            if is_p && n > 1 {
                f(n);
            }
        }
        start = end + 1;
    }
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(p, e)` pairs in increasing `p`.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kronecker symbol `(disc | p)` for a prime `p`.
pub fn kronecker(disc: i64, p: u64) -> i32 {
    if p == 2 {
        if disc % 2 == 0 {
            return 0;
        }
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = disc.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo the prime `p`, if one exists (Tonelli-Shanks).
///
/// The non-residue is the smallest one, so results are deterministic.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    if s == 1 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_le(20_000);
        let naive: Vec<u64> = (0..=20_000).filter(|&n| naive_prime(n)).collect();
        assert_eq!(ps, naive);
        assert_eq!(primes_le(1_000_000).len(), 78_498);
        let mut seg = Vec::new();
        for_each_prime_in(999_000, 1_001_000, |p| seg.push(p));
        let direct: Vec<u64> = (999_001..=1_001_000).filter(|&n| naive_prime(n)).collect();
        assert_eq!(seg, direct);
        assert!(primes_le(1).is_empty());
        assert_eq!(primes_le(2), [2]);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-3, 3), 0);
    }

    proptest! {
        #[test]
        fn miller_rabin_agrees(n in 0u64..2_000_000) {
            prop_assert_eq!(is_prime_u64(n), naive_prime(n));
        }

        #[test]
        fn tonelli_shanks_roots(idx in 1usize..2000, a in 0u64..1_000_000_000) {
            let ps = primes_le(20_000);
            let p = ps[idx % ps.len()];
            match sqrt_mod(a, p) {
                Some(r) => prop_assert_eq!(mul_mod(r, r, p), a % p),
                None => prop_assert!((0..p).all(|r| mul_mod(r, r, p) != a % p)),
            }
        }

        #[test]
        fn factorization_multiplies_back(n in 1u64..10_000_000) {
            let f = factor_u64(n);
            prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            prop_assert!(f.iter().all(|&(p, _)| naive_prime(p)));
        }
    }
}
