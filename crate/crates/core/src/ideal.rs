//! Ideals of the ring of integers as lattices in Hermite normal form.

use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};

/// A nonzero ideal, stored by the lower-triangular basis
/// `g1 = a11`, `g2 = a21 + a22 w` with `0 <= a21 < a11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealRec {
    pub d: i64,
    pub a11: i64,
    pub a21: i64,
    pub a22: i64,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl IdealRec {
    pub fn unit(k: &FieldDesc) -> IdealRec {
        IdealRec { d: k.d, a11: 1, a21: 0, a22: 1 }
    }

    pub fn norm(&self) -> u64 {
        (self.a11 * self.a22) as u64
    }

    fn field(&self) -> FieldDesc {
        FieldDesc::with_class_number(self.d, 1).expect("ideal carries a valid d")
    }

    /// Z-span of the given `(u, v)` coordinate vectors, in Hermite normal form.
    pub fn from_lattice(k: &FieldDesc, vecs: &[(i128, i128)]) -> Result<IdealRec, Error> {
        let mut pivot: Option<(i128, i128)> = None;
        let mut a11: i128 = 0;
        for &(u, v) in vecs {
            if v == 0 {
                a11 = ext_gcd(a11, u).0;
                continue;
            }
            match pivot {
                None => pivot = Some((u, v)),
                Some((pu, pv)) => {
                    let (g, s, t) = ext_gcd(pv, v);
                    let np = (s * pu + t * u, g);
                    let rest = (v / g) * pu - (pv / g) * u;
                    pivot = Some(np);
                    a11 = ext_gcd(a11, rest).0;
                }
            }
        }
        let (mut pu, mut pv) = pivot.ok_or(Error::ZeroModulus)?;
        if a11 == 0 {
            return Err(Error::ZeroModulus);
        }
        if pv < 0 {
            pu = -pu;
            pv = -pv;
        }
        let to64 = |x: i128| i64::try_from(x).map_err(|_| Error::NormTooLarge);
        Ok(IdealRec { d: k.d, a11: to64(a11)?, a21: to64(pu.rem_euclid(a11))?, a22: to64(pv)? })
    }

    /// Ideal generated (as a module over the ring) by the given elements.
    pub fn generated_by(k: &FieldDesc, gens: &[QuadInt]) -> Result<IdealRec, Error> {
        let (t, n) = k.min_poly();
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for g in gens {
            k.check(g)?;
            let (a, b) = g.small().ok_or(Error::NormTooLarge)?;
            let (a, b) = (a as i128, b as i128);
            vecs.push((a, b));
            // (a + b w) w = -n b + (a + t b) w
            vecs.push((-(n as i128) * b, a + t as i128 * b));
        }
        Self::from_lattice(k, &vecs)
    }

    pub fn principal(k: &FieldDesc, g: &QuadInt) -> Result<IdealRec, Error> {
        Self::generated_by(k, core::slice::from_ref(g))
    }

    /// `(p, w - r)`.
    pub fn two_gen(k: &FieldDesc, p: u64, r: u64) -> Result<IdealRec, Error> {
        Self::generated_by(k, &[k.elem(p, 0u64), k.elem(-(r as i64), 1i64)])
    }

    pub fn basis(&self) -> [(i128, i128); 2] {
        [(self.a11 as i128, 0), (self.a21 as i128, self.a22 as i128)]
    }

    pub fn mul(&self, other: &IdealRec) -> Result<IdealRec, Error> {
        if self.d != other.d {
            return Err(Error::MixedField { left: self.d, right: other.d });
        }
        let k = self.field();
        let mut vecs = Vec::with_capacity(4);
        for (a, b) in self.basis() {
            for (c, e) in other.basis() {
                let (a, b, c, e) = (a as i64, b as i64, c as i64, e as i64);
                vecs.push(k.mul_small((a, b), (c, e)));
            }
        }
        Self::from_lattice(&k, &vecs)
    }

    pub fn pow(&self, e: u32) -> Result<IdealRec, Error> {
        let mut acc = IdealRec { d: self.d, a11: 1, a21: 0, a22: 1 };
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    #[inline]
    pub fn contains_small(&self, u: i128, v: i128) -> bool {
        let (a11, a21, a22) = (self.a11 as i128, self.a21 as i128, self.a22 as i128);
        if v.rem_euclid(a22) != 0 {
            return false;
        }
        (u - (v / a22) * a21).rem_euclid(a11) == 0
    }

    pub fn contains(&self, z: &QuadInt) -> bool {
        if z.d() != self.d {
            return false;
        }
        let (u, v) = self.reduce(z);
        u == 0 && v == 0
    }

    /// Canonical representative of `z` modulo the ideal, with
    /// `0 <= v < a22` and `0 <= u < a11`.
    pub fn reduce(&self, z: &QuadInt) -> (i128, i128) {
        let (a11, a21, a22) = (self.a11 as u64, self.a21 as i128, self.a22 as u64);
        let bm = z.b().rem_u64(a11 * a22);
        let v = bm % a22;
        let t = ((bm - v) / a22) as i128;
        let u = (z.a().rem_u64(a11) as i128 - t * a21).rem_euclid(a11 as i128);
        (u, v as i128)
    }

    /// `other` is a subset of `self`.
    pub fn contains_ideal(&self, other: &IdealRec) -> bool {
        other.basis().iter().all(|&(u, v)| self.contains_small(u, v))
    }

    /// Whether the lattice is closed under multiplication by `w`.
    pub fn is_ideal(&self, k: &FieldDesc) -> bool {
        self.basis().iter().all(|&(u, v)| {
            let (x, y) = k.mul_small((u as i64, v as i64), (0, 1));
            self.contains_small(x, y)
        })
    }
}

impl fmt::Display for IdealRec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}+{}w]", self.a11, self.a21, self.a22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn principal_ideals() {
        let k = FieldDesc::new(-1).unwrap();
        let p = IdealRec::principal(&k, &k.elem(1, 1)).unwrap();
        assert_eq!(p.norm(), 2);
        assert!(p.contains(&k.elem(3, 1)));
        assert!(!p.contains(&k.elem(2, 1)));
        let five = IdealRec::principal(&k, &k.elem(5, 0)).unwrap();
        let a = IdealRec::principal(&k, &k.elem(2, 1)).unwrap();
        let b = IdealRec::principal(&k, &k.elem(2, -1)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), five);
        assert!(a.contains_ideal(&five));
        assert!(!a.contains_ideal(&b));
        assert!(IdealRec::principal(&k, &k.zero()).is_err());
    }

    #[test]
    fn non_principal_ideal() {
        // (2, 1 + sqrt -5) has norm 2 and no element of norm 2.
        let k = FieldDesc::new(-5).unwrap();
        let i = IdealRec::generated_by(&k, &[k.elem(2, 0), k.elem(1, 1)]).unwrap();
        assert_eq!(i.norm(), 2);
        assert!(i.is_ideal(&k));
        let sq = i.mul(&i).unwrap();
        assert_eq!(sq, IdealRec::principal(&k, &k.elem(2, 0)).unwrap());
    }

    proptest! {
        #[test]
        fn products_are_ideals_with_multiplicative_norm(
            d in prop::sample::select(vec![-1i64, -2, -3, -5, -7, -15, -23]),
            a in -30i64..30, b in -30i64..30, c in -30i64..30, e in -30i64..30,
            u in -500i64..500, v in -500i64..500,
        ) {
            prop_assume!((a, b) != (0, 0) && (c, e) != (0, 0));
            let k = FieldDesc::new(d).unwrap();
            let x = k.elem(a, b);
            let y = k.elem(c, e);
            let ix = IdealRec::principal(&k, &x).unwrap();
            let iy = IdealRec::principal(&k, &y).unwrap();
            prop_assert_eq!(ix.norm() as i128, k.norm_small(a, b));
            let prod = ix.mul(&iy).unwrap();
            prop_assert!(prod.is_ideal(&k));
            prop_assert_eq!(prod.norm(), ix.norm() * iy.norm());
            prop_assert_eq!(prod, IdealRec::principal(&k, &(&x * &y)).unwrap());
            // membership agrees with divisibility: z in (x) iff z * conj(x) / N(x) is integral
            let z = k.elem(u, v);
            let q = &z * &x.conj();
            let n = k.norm_small(a, b) as u64;
            prop_assert_eq!(ix.contains(&z), q.a().is_divisible_by(n) && q.b().is_divisible_by(n));
            let (ru, rv) = ix.reduce(&z);
            prop_assert!(ix.contains(&(&z - &k.elem(ru as i64, rv as i64))));
        }
    }
}
