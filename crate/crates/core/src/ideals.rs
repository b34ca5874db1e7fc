//! Prime ideals: splitting, enumeration, residues, and the totient of an ideal.

use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::ideal::IdealRec;
use crate::int::Int;
use crate::primes::{factor_u64, for_each_prime_in, inv_mod, is_prime_u64, kronecker, mul_mod, sqrt_mod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

impl SplitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitKind::Split => "split",
            SplitKind::Inert => "inert",
            SplitKind::Ramified => "ramified",
        }
    }
}

/// A nonzero prime ideal.
///
/// For split and ramified `p` the ideal is `(p, w - root)`, and reduction
/// modulo it sends `a + b w` to `a + b root (mod p)`. For inert `p` it is `(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdealRec {
    pub d: i64,
    pub p: u64,
    pub kind: SplitKind,
    pub norm: u64,
    pub root: u64,
    /// A generator when the ideal is principal, normalized to the associate
    /// with the largest `(a, b)`.
    pub gen: Option<QuadInt>,
    pub two_gen: (u64, QuadInt),
    /// Root of the conjugate ideal when `p` splits.
    pub conjugate_root: Option<u64>,
}

/// Identifies a prime ideal within one field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeKey {
    pub p: u64,
    pub root: u64,
}

impl PrimeIdealRec {
    pub fn key(&self) -> PrimeKey {
        PrimeKey { p: self.p, root: self.root }
    }

    pub fn conjugate_key(&self) -> Option<PrimeKey> {
        self.conjugate_root.map(|root| PrimeKey { p: self.p, root })
    }

    pub fn ideal(&self) -> IdealRec {
        let k = FieldDesc::with_class_number(self.d, 1).expect("valid d");
        match self.kind {
            SplitKind::Inert => IdealRec { d: self.d, a11: self.p as i64, a21: 0, a22: self.p as i64 },
            _ => IdealRec::two_gen(&k, self.p, self.root).expect("prime ideal lattice"),
        }
    }

    /// Canonical residue of `a + b w`, in `[0, norm)`.
    #[inline]
    pub fn residue_small(&self, a: i64, b: i64) -> u64 {
        // i64 division is much cheaper than i128; fall back when it would overflow
        if self.kind != SplitKind::Inert {
            let fast = i64::try_from(self.root).ok().zip(i64::try_from(self.p).ok());
            if let Some(v) = fast.and_then(|(r, p)| Some(b.checked_mul(r)?.checked_add(a)?.rem_euclid(p))) {
                return v as u64;
            }
        }
        let p = self.p as i128;
        match self.kind {
            SplitKind::Inert => (a as i128).rem_euclid(p) as u64 + self.p * (b as i128).rem_euclid(p) as u64,
            _ => (a as i128 + b as i128 * self.root as i128).rem_euclid(p) as u64,
        }
    }

    pub fn residue(&self, z: &QuadInt) -> u64 {
        let (a, b) = (z.a().rem_u64(self.p), z.b().rem_u64(self.p));
        match self.kind {
            SplitKind::Inert => a + self.p * b,
            _ => (a + mul_mod(b, self.root, self.p)) % self.p,
        }
    }

    pub fn divides(&self, z: &QuadInt) -> bool {
        z.d() == self.d && self.residue(z) == 0
    }

    #[inline]
    pub fn divides_small(&self, a: i64, b: i64) -> bool {
        self.residue_small(a, b) == 0
    }

    /// Smallest-coordinate element with the given residue.
    pub fn residue_rep(&self, r: u64) -> (i64, i64) {
        match self.kind {
            SplitKind::Inert => ((r % self.p) as i64, (r / self.p) as i64),
            _ => (r as i64, 0),
        }
    }

    fn min_poly(&self) -> (u64, u64) {
        let (t, n) = if self.d.rem_euclid(4) == 1 { (1, (1 - self.d) / 4) } else { (0, -self.d) };
        (t as u64 % self.p, n as u64 % self.p)
    }

    pub fn res_add(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        match self.kind {
            SplitKind::Inert => (x % p + y % p) % p + p * ((x / p + y / p) % p),
            _ => (x + y) % p,
        }
    }

    pub fn res_neg(&self, x: u64) -> u64 {
        let p = self.p;
        match self.kind {
            SplitKind::Inert => (p - x % p) % p + p * ((p - x / p) % p),
            _ => (p - x % p) % p,
        }
    }

    pub fn res_mul(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        match self.kind {
            SplitKind::Inert => {
                let (t, n) = self.min_poly();
                let (u1, v1, u2, v2) = (x % p, x / p, y % p, y / p);
                let vv = mul_mod(v1, v2, p);
                let u = (mul_mod(u1, u2, p) + p - mul_mod(n, vv, p)) % p;
                let v = (mul_mod(u1, v2, p) + mul_mod(u2, v1, p) + mul_mod(t, vv, p)) % p;
                u + p * v
            }
            _ => mul_mod(x, y, p),
        }
    }

    pub fn res_inv(&self, x: u64) -> Option<u64> {
        let p = self.p;
        match self.kind {
            SplitKind::Inert => {
                let (t, n) = self.min_poly();
                let (u, v) = (x % p, x / p);
                let nm = (mul_mod(u, u, p) + mul_mod(mul_mod(t, u, p), v, p) + mul_mod(n, mul_mod(v, v, p), p)) % p;
                let ni = inv_mod(nm, p)?;
                // conj(u + v w) = (u + t v) - v w
                let cu = (u + mul_mod(t, v, p)) % p;
                let cv = (p - v) % p;
                Some(mul_mod(cu, ni, p) + p * mul_mod(cv, ni, p))
            }
            _ => inv_mod(x, p),
        }
    }
}

impl fmt::Display for PrimeIdealRec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.gen {
            Some(g) => write!(f, "({g})"),
            None => write!(f, "({}, w-{})", self.p, self.root),
        }
    }
}

/// Roots of the minimal polynomial of `w` modulo `p`, ascending.
fn omega_roots(k: &FieldDesc, p: u64) -> Vec<u64> {
    let (t, n) = k.min_poly();
    let (t, n) = (t.rem_euclid(p as i64) as u64, n.rem_euclid(p as i64) as u64);
    if p == 2 {
        return (0..2).filter(|&x| (x * x + 2 - t * x % 2 + n) % 2 == 0).collect();
    }
    let dsc = (k.disc).rem_euclid(p as i64) as u64;
    let Some(s) = sqrt_mod(dsc, p) else { return Vec::new() };
    let half = inv_mod(2, p).unwrap();
    let r1 = mul_mod((t + s) % p, half, p);
    let r2 = mul_mod((t + p - s) % p, half, p);
    let mut v = alloc::vec![r1, r2];
    v.sort_unstable();
    v.dedup();
    v
}

/// Lagrange-Gauss reduction of the ideal lattice under the norm form;
/// returns a shortest nonzero vector.
fn shortest_vector(k: &FieldDesc, ideal: &IdealRec) -> (i64, i64) {
    let n = |(a, b): (i128, i128)| k.norm_small(a as i64, b as i64);
    let dot2 = |x: (i128, i128), y: (i128, i128)| n((x.0 + y.0, x.1 + y.1)) - n(x) - n(y);
    let [mut e1, mut e2] = ideal.basis();
    if n(e1) > n(e2) {
        core::mem::swap(&mut e1, &mut e2);
    }
    loop {
        let num = dot2(e1, e2);
        let den = 2 * n(e1);
        // nearest integer to num / den
        let mu = (2 * num + den).div_euclid(2 * den);
        e2 = (e2.0 - mu * e1.0, e2.1 - mu * e1.1);
        if n(e2) < n(e1) {
            core::mem::swap(&mut e1, &mut e2);
        } else {
            break;
        }
    }
    (e1.0 as i64, e1.1 as i64)
}

/// Associate of `z` with the lexicographically largest `(a, b)`.
pub fn canonical_associate(k: &FieldDesc, z: (i64, i64)) -> (i64, i64) {
    k.points_in_norm_range(0, 1)
        .into_iter()
        .map(|u| {
            let (a, b) = k.mul_small(z, u);
            (a as i64, b as i64)
        })
        .max()
        .unwrap()
}

fn make_prime(k: &FieldDesc, p: u64, kind: SplitKind, root: u64, conj: Option<u64>) -> PrimeIdealRec {
    let (norm, two_gen) = match kind {
        SplitKind::Inert => (p * p, (p, k.elem(p, 0u64))),
        _ => (p, (p, k.elem(-(root as i64), 1i64))),
    };
    let mut rec = PrimeIdealRec { d: k.d, p, kind, norm, root, gen: None, two_gen, conjugate_root: conj };
    rec.gen = if kind == SplitKind::Inert {
        Some(k.elem(p, 0u64))
    } else {
        let v = shortest_vector(k, &rec.ideal());
        if k.norm_small(v.0, v.1) == norm as i128 {
            let (a, b) = canonical_associate(k, v);
            Some(k.elem(a, b))
        } else {
            None
        }
    };
    rec
}

/// The prime ideals above the rational prime `p`.
pub fn splitting_type(k: &FieldDesc, p: u64) -> Result<Vec<PrimeIdealRec>, Error> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(classify(k, p))
}

fn classify(k: &FieldDesc, p: u64) -> Vec<PrimeIdealRec> {
    match kronecker(k.disc, p) {
        0 => {
            let r = omega_roots(k, p);
            alloc::vec![make_prime(k, p, SplitKind::Ramified, r[0], None)]
        }
        1 => {
            let r = omega_roots(k, p);
            alloc::vec![
                make_prime(k, p, SplitKind::Split, r[0], Some(r[1])),
                make_prime(k, p, SplitKind::Split, r[1], Some(r[0])),
            ]
        }
        _ => alloc::vec![make_prime(k, p, SplitKind::Inert, 0, None)],
    }
}

/// Every prime ideal of norm `<= x`, sorted by `(norm, p, root)`.
pub fn primes_up_to(k: &FieldDesc, x: u64) -> Vec<PrimeIdealRec> {
    primes_in_norm_range(k, 0, x)
}

/// Every prime ideal above a rational prime `p <= z`, sorted like [`primes_up_to`].
pub fn primes_over(k: &FieldDesc, z: u64) -> Vec<PrimeIdealRec> {
    let mut out = Vec::new();
    for_each_prime_in(0, z, |p| out.extend(classify(k, p)));
    out.sort_by_key(|r| (r.norm, r.p, r.root));
    out
}

/// Prime ideals with `lo < norm <= hi`, sorted by `(norm, p, root)`.
pub fn primes_in_norm_range(k: &FieldDesc, lo: u64, hi: u64) -> Vec<PrimeIdealRec> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    for_each_prime_in(lo, hi, |p| {
        if kronecker(k.disc, p) != -1 {
            out.extend(classify(k, p));
        }
    });
    let s_lo = crate::numeric::isqrt_u64(lo);
    let s_hi = crate::numeric::isqrt_u64(hi);
    for_each_prime_in(s_lo, s_hi, |p| {
        if kronecker(k.disc, p) == -1 && p * p > lo {
            out.push(make_prime(k, p, SplitKind::Inert, 0, None));
        }
    });
    out.sort_by_key(|r| (r.norm, r.p, r.root));
    out
}

/// Number of prime ideals of norm `<= x`, without building records.
pub fn pi_g(k: &FieldDesc, x: u64) -> u64 {
    let mut c = 0;
    for_each_prime_in(0, x, |p| {
        c += match kronecker(k.disc, p) {
            1 => 2,
            0 => 1,
            _ => (p.saturating_mul(p) <= x) as u64,
        };
    });
    c
}

/// Factorization of a nonzero ideal into prime ideals.
pub fn factor_ideal(k: &FieldDesc, q: &IdealRec) -> Result<Vec<(PrimeIdealRec, u32)>, Error> {
    let mut out = Vec::new();
    for (p, _) in factor_u64(q.norm()) {
        for pr in classify(k, p) {
            let base = pr.ideal();
            let mut e = 0;
            let mut pw = base;
            while pw.contains_ideal(q) {
                e += 1;
                pw = pw.mul(&base)?;
            }
            if e > 0 {
                out.push((pr, e));
            }
        }
    }
    Ok(out)
}

/// `phi(q) = N(q) prod (1 - 1/N(P))` over the primes dividing `q`.
pub fn euler_phi_ideal(k: &FieldDesc, q: &IdealRec) -> Result<u64, Error> {
    let mut phi = 1u64;
    for (pr, e) in factor_ideal(k, q)? {
        phi *= pr.norm.pow(e - 1) * (pr.norm - 1);
    }
    Ok(phi)
}

/// Ray class group size `phi(q) h / |U|`, kept as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RayClassSize {
    pub value: Ratio<u64>,
    /// The formula produced a non-integer, which happens for moduli where
    /// distinct units collide modulo `q`.
    pub non_integer: bool,
}

pub fn ray_class_size(k: &FieldDesc, q: &IdealRec) -> Result<RayClassSize, Error> {
    let phi = euler_phi_ideal(k, q)?;
    let value = Ratio::new(phi * k.class_number as u64, k.unit_count as u64);
    Ok(RayClassSize { value, non_integer: !value.is_integer() })
}

/// Residue of an arbitrary-size element, exposed for callers holding `Int`s.
pub fn residue_of(pr: &PrimeIdealRec, a: &Int, b: &Int) -> u64 {
    let (a, b) = (a.rem_u64(pr.p), b.rem_u64(pr.p));
    match pr.kind {
        SplitKind::Inert => a + pr.p * b,
        _ => (a + mul_mod(b, pr.root, pr.p)) % pr.p,
    }
}
