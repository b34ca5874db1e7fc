//! Standalone checker for gap certificates.
//!
//! Nothing here touches the library's field or ideal code: the minimal
//! polynomial, primality, splitting and divisibility are all recomputed from
//! `d` with plain big integers, so a bug in the construction cannot hide
//! itself by agreeing with the checker.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::dto::{CertificateDoc, BIGINT_ENCODING, CERTIFICATE_SCHEMA};

/// Balls larger than this are refused rather than enumerated.
pub const MAX_VERIFY_RADIUS: u64 = 50_000_000;

/// Reported problems are truncated to this many lines.
const MAX_PROBLEMS: usize = 32;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub problems: Vec<String>,
    /// Problems beyond the first `MAX_PROBLEMS`.
    pub suppressed: usize,
    pub checked_offsets: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.problems.len() < MAX_PROBLEMS {
            self.problems.push(msg);
        } else {
            self.suppressed += 1;
        }
    }
}

/// `w^2 - t w + n`: `t = 1, n = (1 - d)/4` when `d = 1 mod 4`, else `t = 0, n = -d`.
fn min_poly(d: i64) -> (i64, i64) {
    if d.rem_euclid(4) == 1 {
        (1, (1 - d) / 4)
    } else {
        (0, -d)
    }
}

fn discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

fn squarefree(n: u64) -> bool {
    let mut f = 2u64;
    while f * f <= n {
        if n % (f * f) == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = b as u128 % m128;
    let mut acc = 1u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// How `p` factors, from the discriminant alone.
fn expected_kind(disc: i64, p: u64) -> &'static str {
    if p == 2 {
        return match disc.rem_euclid(8) {
            0 | 4 => "ramified",
            1 => "split",
            _ => "inert",
        };
    }
    let a = disc.rem_euclid(p as i64) as u64;
    if a == 0 {
        "ramified"
    } else if pow_mod(a, (p - 1) / 2, p) == 1 {
        "split"
    } else {
        "inert"
    }
}

fn norm(t: i64, n: i64, a: &BigInt, b: &BigInt) -> BigInt {
    a * a + BigInt::from(t) * a * b + BigInt::from(n) * b * b
}

/// All `(u, v)` with `N(u + v w) < radius`, using `4N = (2u + t v)^2 + |disc| v^2`.
fn ball(d: i64, radius: u64) -> BTreeSet<(i64, i64)> {
    let (t, n) = min_poly(d);
    let disc = discriminant(d).unsigned_abs() as i128;
    let bound = 4 * radius as i128;
    let mut out = BTreeSet::new();
    let mut v: i128 = 0;
    while disc * v * v < bound {
        for sv in [v, -v] {
            let rest = bound - disc * sv * sv;
            // (2u + t v)^2 < rest
            let mut s = (rest as f64).sqrt() as i128 + 2;
            while s * s >= rest {
                s -= 1;
            }
            let lo = (-s - t as i128 * sv).div_euclid(2) - 1;
            let hi = (s - t as i128 * sv).div_euclid(2) + 1;
            for u in lo..=hi {
                let nn = u * u + t as i128 * u * sv + n as i128 * sv * sv;
                if nn < radius as i128 {
                    out.insert((u as i64, sv as i64));
                }
            }
            if v == 0 {
                break;
            }
        }
        v += 1;
    }
    out
}

/// Checks every claim of a certificate.
///
/// Passing means: the witness offsets are exactly the elements of norm below
/// the radius; each names a genuine prime ideal of norm at most `x` that
/// divides `center + offset`; and every `center + offset` has norm above `x`,
/// so it cannot be the prime element generating that ideal.
pub fn verify_certificate(doc: &CertificateDoc) -> VerifyReport {
    let mut rep = VerifyReport::default();
    if doc.schema != CERTIFICATE_SCHEMA {
        rep.fail(format!("unexpected schema {:?}", doc.schema));
    }
    if doc.bigint != BIGINT_ENCODING {
        rep.fail(format!("unexpected bigint encoding {:?}", doc.bigint));
    }
    let d = doc.d;
    if d >= 0 || !squarefree(d.unsigned_abs()) {
        rep.fail(format!("d = {d} is not a negative squarefree integer"));
        return rep;
    }
    if doc.radius == 0 {
        rep.fail("radius must be positive".into());
    }
    if doc.radius > MAX_VERIFY_RADIUS {
        rep.fail(format!("radius {} exceeds the verifier limit {MAX_VERIFY_RADIUS}", doc.radius));
        return rep;
    }
    if !doc.failures.is_empty() {
        rep.fail(format!("certificate lists {} failed offsets", doc.failures.len()));
    }
    if !doc.verified {
        rep.fail("certificate is not marked verified".into());
    }
    let (t, n) = min_poly(d);
    let disc = discriminant(d);
    let x = BigInt::from(doc.prime_bound_x);
    let (ca, cb) = (&doc.center[0].0, &doc.center[1].0);

    let expected = ball(d, doc.radius);
    let mut seen = BTreeSet::new();
    for (i, w) in doc.witnesses.iter().enumerate() {
        let off = (w.offset[0].0.to_i64(), w.offset[1].0.to_i64());
        let (Some(u), Some(v)) = off else {
            rep.fail(format!("witness {i}: offset out of range"));
            continue;
        };
        if !expected.contains(&(u, v)) {
            rep.fail(format!("witness {i}: offset [{u}, {v}] is outside the ball"));
        }
        if !seen.insert((u, v)) {
            rep.fail(format!("witness {i}: offset [{u}, {v}] repeated"));
        }
        let pr = &w.prime;
        let p = pr.p;
        if !is_prime(p) {
            rep.fail(format!("witness {i}: {p} is not prime"));
            continue;
        }
        let kind = expected_kind(disc, p);
        if pr.kind != kind {
            rep.fail(format!("witness {i}: {p} is {kind}, not {}", pr.kind));
            continue;
        }
        let want_norm = if kind == "inert" { p.checked_mul(p) } else { Some(p) };
        if want_norm != Some(pr.norm) {
            rep.fail(format!("witness {i}: wrong norm {} for {kind} {p}", pr.norm));
            continue;
        }
        if pr.norm > doc.prime_bound_x {
            rep.fail(format!("witness {i}: prime norm {} exceeds x = {}", pr.norm, doc.prime_bound_x));
        }
        let pb = BigInt::from(p);
        let a = ca + BigInt::from(u);
        let b = cb + BigInt::from(v);
        let divides = if kind == "inert" {
            (&a % &pb).is_zero() && (&b % &pb).is_zero()
        } else {
            let r = BigInt::from(pr.root);
            let on_poly = (&r * &r - BigInt::from(t) * &r + BigInt::from(n)) % &pb;
            if pr.root >= p || !on_poly.is_zero() {
                rep.fail(format!("witness {i}: root {} is not a root of the minimal polynomial mod {p}", pr.root));
                continue;
            }
            ((&a + &b * &r) % &pb).is_zero()
        };
        if !divides {
            rep.fail(format!("witness {i}: ideal over {p} does not divide center + [{u}, {v}]"));
        }
        if let Some(g) = &pr.gen {
            if norm(t, n, &g[0].0, &g[1].0).abs() != BigInt::from(pr.norm) {
                rep.fail(format!("witness {i}: generator norm differs from {}", pr.norm));
            }
        }
        if norm(t, n, &a, &b) <= x {
            rep.fail(format!("witness {i}: center + [{u}, {v}] has norm at most x"));
        }
    }
    for (u, v) in expected.difference(&seen) {
        rep.fail(format!("offset [{u}, {v}] has no witness"));
    }
    rep.checked_offsets = seen.len();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts_match_direct_scan() {
        for d in [-1i64, -2, -3, -5, -7, -15] {
            let (t, n) = min_poly(d);
            for r in [1u64, 2, 5, 17, 60] {
                let mut direct = BTreeSet::new();
                for u in -20i64..=20 {
                    for v in -20i64..=20 {
                        if u * u + t * u * v + n * v * v < r as i64 {
                            direct.insert((u, v));
                        }
                    }
                }
                assert_eq!(ball(d, r), direct, "d={d} r={r}");
            }
        }
    }

    #[test]
    fn splitting_by_discriminant() {
        assert_eq!(expected_kind(-4, 2), "ramified");
        assert_eq!(expected_kind(-4, 5), "split");
        assert_eq!(expected_kind(-4, 3), "inert");
        assert_eq!(expected_kind(-3, 2), "inert");
        assert_eq!(expected_kind(-7, 2), "split");
        assert_eq!(expected_kind(-3, 3), "ramified");
    }
}
