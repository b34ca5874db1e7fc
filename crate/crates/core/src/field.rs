//! Imaginary quadratic fields and their rings of integers.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::class_numbers::CLASS_NUMBERS;
use crate::error::Error;
use crate::int::Int;
use crate::numeric::isqrt_u128;

/// Which integral basis `{1, w}` the ring of integers uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `w = sqrt(d)`, used when `d = 2, 3 mod 4`.
    Sqrt,
    /// `w = (1 + sqrt(d)) / 2`, used when `d = 1 mod 4`.
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    pub d: i64,
    pub disc: i64,
    pub basis: Basis,
    pub unit_count: u32,
    pub class_number: u32,
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn class_number_from_table(d: i64) -> Option<u32> {
    CLASS_NUMBERS
        .binary_search_by(|(e, _)| d.cmp(e))
        .ok()
        .map(|i| CLASS_NUMBERS[i].1)
}

impl FieldDesc {
    /// The field `Q(sqrt d)` with its class number taken from the built-in table.
    pub fn new(d: i64) -> Result<FieldDesc, Error> {
        Self::validate(d)?;
        let h = class_number_from_table(d).ok_or(Error::UnknownClassNumber(d))?;
        Ok(Self::build(d, h))
    }

    /// Same as [`FieldDesc::new`] but with a caller-supplied class number.
    pub fn with_class_number(d: i64, h: u32) -> Result<FieldDesc, Error> {
        Self::validate(d)?;
        if h == 0 {
            return Err(Error::InvalidParameter("class number must be positive"));
        }
        Ok(Self::build(d, h))
    }

    fn validate(d: i64) -> Result<(), Error> {
        if d >= 0 {
            return Err(Error::NonNegativeD(d));
        }
        if !is_squarefree(d.unsigned_abs()) {
            return Err(Error::NotSquarefree(d));
        }
        Ok(())
    }

    fn build(d: i64, h: u32) -> FieldDesc {
        let basis = if d.rem_euclid(4) == 1 { Basis::Omega } else { Basis::Sqrt };
        let disc = match basis {
            Basis::Omega => d,
            Basis::Sqrt => 4 * d,
        };
        let unit_count = match d {
            -1 => 4,
            -3 => 6,
            _ => 2,
        };
        FieldDesc { d, disc, basis, unit_count, class_number: h }
    }

    /// The unit count as printed in the literature for the ray class formula,
    /// which lists 3 for `Q(sqrt -3)` instead of the true 6.
    pub fn literature_unit_count(&self) -> u32 {
        if self.d == -3 {
            3
        } else {
            self.unit_count
        }
    }

    /// `(t, n)` with `w^2 - t w + n = 0`.
    pub fn min_poly(&self) -> (i64, i64) {
        match self.basis {
            Basis::Sqrt => (0, -self.d),
            Basis::Omega => (1, (1 - self.d) / 4),
        }
    }

    /// Number of lattice points per unit of norm, `2 pi / sqrt|disc|`.
    pub fn lattice_density(&self) -> f64 {
        2.0 * core::f64::consts::PI / libm::sqrt(self.disc.unsigned_abs() as f64)
    }

    pub fn elem(&self, a: impl Into<Int>, b: impl Into<Int>) -> QuadInt {
        QuadInt { d: self.d, a: a.into(), b: b.into() }
    }

    pub fn zero(&self) -> QuadInt {
        self.elem(0i64, 0i64)
    }

    pub fn one(&self) -> QuadInt {
        self.elem(1i64, 0i64)
    }

    pub fn omega(&self) -> QuadInt {
        self.elem(0i64, 1i64)
    }

    /// Norm of `a + b w` for machine-size coordinates.
    #[inline]
    pub fn norm_small(&self, a: i64, b: i64) -> i128 {
        let (a, b) = (a as i128, b as i128);
        match self.basis {
            Basis::Sqrt => a * a - self.d as i128 * b * b,
            Basis::Omega => a * a + a * b + b * b * ((1 - self.d as i128) / 4),
        }
    }

    /// Product of `a + b w` and `c + e w` for machine-size coordinates.
    #[inline]
    pub fn mul_small(&self, (a, b): (i64, i64), (c, e): (i64, i64)) -> (i128, i128) {
        let (a, b, c, e) = (a as i128, b as i128, c as i128, e as i128);
        let (t, n) = self.min_poly();
        // w^2 = t w - n
        (a * c - n as i128 * b * e, a * e + b * c + t as i128 * b * e)
    }

    pub fn units(&self) -> Vec<QuadInt> {
        let mut out: Vec<QuadInt> = self
            .points_in_norm_range(0, 1)
            .into_iter()
            .map(|(a, b)| self.elem(a, b))
            .collect();
        out.sort_by(|x, y| (x.a(), x.b()).cmp(&(y.a(), y.b())));
        out
    }

    /// All `(a, b)` with `lo < N(a + b w) <= hi`, in row order (by `b`, then `a`).
    pub fn points_in_norm_range(&self, lo: i128, hi: i128) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        self.for_each_row(lo, hi, |b, a0, a1| {
            for a in a0..=a1 {
                out.push((a, b));
            }
        });
        out
    }

    /// Calls `f(b, a_min, a_max)` for every maximal run of consecutive `a`
    /// with `lo < N(a + b w) <= hi`. Runs for one `b` come in increasing `a`.
    pub fn for_each_row(&self, lo: i128, hi: i128, mut f: impl FnMut(i64, i64, i64)) {
        if hi <= lo || hi < 0 {
            return;
        }
        let ad = (-self.d) as i128;
        match self.basis {
            // N = a^2 + |d| b^2
            Basis::Sqrt => {
                let bmax = isqrt_u128((hi / ad) as u128) as i64;
                for b in -bmax..=bmax {
                    let rest = hi - ad * (b as i128) * (b as i128);
                    let amax = isqrt_u128(rest as u128) as i64;
                    let low = lo - ad * (b as i128) * (b as i128);
                    if low < 0 {
                        f(b, -amax, amax);
                    } else {
                        let amin = isqrt_u128(low as u128) as i64 + 1;
                        if amin <= amax {
                            f(b, -amax, -amin);
                            f(b, amin, amax);
                        }
                    }
                }
            }
            // 4N = s^2 + |d| b^2 with s = 2a + b
            Basis::Omega => {
                let bmax = isqrt_u128((4 * hi / ad) as u128) as i64;
                for b in -bmax..=bmax {
                    let bb = ad * (b as i128) * (b as i128);
                    let rest = 4 * hi - bb;
                    if rest < 0 {
                        continue;
                    }
                    let smax = isqrt_u128(rest as u128) as i64;
                    let low = 4 * lo - bb;
                    let to_a_lo = |s: i64| (s - b).div_euclid(2) + ((s - b).rem_euclid(2));
                    let to_a_hi = |s: i64| (s - b).div_euclid(2);
                    if low < 0 {
                        let (a0, a1) = (to_a_lo(-smax), to_a_hi(smax));
                        if a0 <= a1 {
                            f(b, a0, a1);
                        }
                    } else {
                        let smin = isqrt_u128(low as u128) as i64 + 1;
                        if smin <= smax {
                            let (a0, a1) = (to_a_lo(-smax), to_a_hi(-smin));
                            if a0 <= a1 {
                                f(b, a0, a1);
                            }
                            let (a0, a1) = (to_a_lo(smin), to_a_hi(smax));
                            if a0 <= a1 {
                                f(b, a0, a1);
                            }
                        }
                    }
                }
            }
        }
    }

    /// All `(a, b)` with `lo < N <= hi`, sorted by `(norm, a, b)`.
    pub fn sorted_points(&self, lo: i128, hi: i128) -> Vec<(i64, i64)> {
        let mut pts = self.points_in_norm_range(lo, hi);
        pts.sort_unstable_by_key(|&(a, b)| (self.norm_small(a, b), a, b));
        pts
    }

    /// Streams every element with `0 < N <= x` in `(norm, a, b)` order.
    ///
    /// Points are produced in norm blocks holding roughly `block_points`
    /// elements each, so memory stays bounded for large `x`.
    pub fn enumerate_norm_le(&self, x: u64) -> NormOrdered {
        self.enumerate_norm_range(0, x, 1 << 20)
    }

    pub fn enumerate_norm_range(&self, lo: u64, hi: u64, block_points: usize) -> NormOrdered {
        let width = ((block_points.max(16) as f64) / self.lattice_density()).max(1.0) as u64;
        NormOrdered { field: *self, next_lo: lo, hi, width, buf: Vec::new(), pos: 0 }
    }

    /// Number of `u = a mod q` with `N(u) <= x`, zero included when it qualifies.
    pub fn count_in_class(
        &self,
        modulus: &crate::ideal::IdealRec,
        a: &QuadInt,
        x: u64,
    ) -> Result<ClassCount, Error> {
        self.check(a)?;
        if modulus.norm() == 0 {
            return Err(Error::ZeroModulus);
        }
        let (ra, rb) = modulus.reduce(a);
        let mut count = 0u64;
        self.for_each_row(-1, x as i128, |b, a0, a1| {
            for u in a0..=a1 {
                if modulus.contains_small(u as i128 - ra, b as i128 - rb) {
                    count += 1;
                }
            }
        });
        let nq = modulus.norm() as f64;
        let raw = x as f64 / nq;
        let area = self.lattice_density() * raw;
        Ok(ClassCount {
            x,
            modulus_norm: modulus.norm(),
            count,
            main_term_raw: raw,
            main_term_area: area,
            deviation: libm::fabs(count as f64 - area),
            scaled_deviation: libm::fabs(count as f64 - area) / (1.0 + libm::sqrt(raw)),
        })
    }

    pub(crate) fn check(&self, z: &QuadInt) -> Result<(), Error> {
        if z.d != self.d {
            return Err(Error::MixedField { left: self.d, right: z.d });
        }
        Ok(())
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// Exact count of a residue class inside a norm disc.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassCount {
    pub x: u64,
    pub modulus_norm: u64,
    pub count: u64,
    /// `x / N(q)`.
    pub main_term_raw: f64,
    /// `(2 pi / sqrt|disc|) x / N(q)`, the lattice-point main term.
    pub main_term_area: f64,
    /// `|count - main_term_area|`.
    pub deviation: f64,
    /// `deviation / (1 + sqrt(x / N(q)))`.
    pub scaled_deviation: f64,
}

/// Iterator over ring elements in increasing norm.
pub struct NormOrdered {
    field: FieldDesc,
    next_lo: u64,
    hi: u64,
    width: u64,
    buf: Vec<(i64, i64)>,
    pos: usize,
}

impl Iterator for NormOrdered {
    type Item = QuadInt;

    fn next(&mut self) -> Option<QuadInt> {
        while self.pos >= self.buf.len() {
            if self.next_lo >= self.hi {
                return None;
            }
            let top = self.next_lo.saturating_add(self.width).min(self.hi);
            self.buf = self.field.sorted_points(self.next_lo as i128, top as i128);
            self.pos = 0;
            self.next_lo = top;
        }
        let (a, b) = self.buf[self.pos];
        self.pos += 1;
        Some(self.field.elem(a, b))
    }
}

/// An element `a + b w` of the ring of integers of `Q(sqrt d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d: i64,
    a: Int,
    b: Int,
}

impl QuadInt {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &Int {
        &self.a
    }

    pub fn b(&self) -> &Int {
        &self.b
    }

    fn min_poly(&self) -> (i64, i64) {
        if self.d.rem_euclid(4) == 1 {
            (1, (1 - self.d) / 4)
        } else {
            (0, -self.d)
        }
    }

    /// Coordinates as machine integers, when they fit.
    pub fn small(&self) -> Option<(i64, i64)> {
        Some((self.a.as_i64()?, self.b.as_i64()?))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> Int {
        let (t, n) = self.min_poly();
        // N(a + b w) = a^2 + t a b + n b^2
        let ab = &self.a * &self.b;
        &(&(&self.a * &self.a) + &(&Int::from(t) * &ab)) + &(&Int::from(n) * &(&self.b * &self.b))
    }

    pub fn conj(&self) -> QuadInt {
        let (t, _) = self.min_poly();
        // conj(w) = t - w
        QuadInt { d: self.d, a: &self.a + &(&Int::from(t) * &self.b), b: -&self.b }
    }

    fn same_field(&self, other: &QuadInt) -> Result<(), Error> {
        if self.d != other.d {
            return Err(Error::MixedField { left: self.d, right: other.d });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &QuadInt) -> Result<QuadInt, Error> {
        self.same_field(other)?;
        Ok(QuadInt { d: self.d, a: &self.a + &other.a, b: &self.b + &other.b })
    }

    pub fn checked_sub(&self, other: &QuadInt) -> Result<QuadInt, Error> {
        self.same_field(other)?;
        Ok(QuadInt { d: self.d, a: &self.a - &other.a, b: &self.b - &other.b })
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt, Error> {
        self.same_field(other)?;
        let (t, n) = self.min_poly();
        let be = &self.b * &other.b;
        let a = &(&self.a * &other.a) - &(&Int::from(n) * &be);
        let b = &(&(&self.a * &other.b) + &(&self.b * &other.a)) + &(&Int::from(t) * &be);
        Ok(QuadInt { d: self.d, a, b })
    }

    pub fn scale(&self, k: &Int) -> QuadInt {
        QuadInt { d: self.d, a: &self.a * k, b: &self.b * k }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = if self.d.rem_euclid(4) == 1 { "w" } else if self.d == -1 { "i" } else { "s" };
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}{}", self.b, w)
        } else if self.b.is_negative() {
            write!(f, "{}-{}{}", self.a, self.b.abs(), w)
        } else {
            write!(f, "{}+{}{}", self.a, self.b, w)
        }
    }
}

macro_rules! quad_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadInt> for &QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: &QuadInt) -> QuadInt {
                self.$checked(rhs).expect("operands from different fields")
            }
        }
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: QuadInt) -> QuadInt {
                (&self).$m(&rhs)
            }
        }
    };
}

quad_op!(Add, add, checked_add);
quad_op!(Sub, sub, checked_sub);
quad_op!(Mul, mul, checked_mul);

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { d: self.d, a: -&self.a, b: -&self.b }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}
