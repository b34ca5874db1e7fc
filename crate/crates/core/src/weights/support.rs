//! The finite support of `lambda` and the transforms between `lambda`, `xi`, `zeta`.
//!
//! A support tuple `(d_1, ..., d_k)` is stored as `k` bitmasks over the prime
//! ideals `P` with `z < rad N(P) <= R`. The tuples kept are those whose masks
//! are pairwise disjoint (so `d_1 ... d_k` is squarefree) with
//! `rad N(d_1 ... d_k) <= R`. Every prime factor then has norm above `z`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

use super::cutoff::{f_eval, FCutoff};
use crate::error::Error;
use crate::field::FieldDesc;
use crate::ideals::{primes_over, PrimeIdealRec};

/// Field of coefficients for the transforms: `f64` for evaluation,
/// `BigRational` for exact identity checks.
pub trait Scalar: Clone + Num + Neg<Output = Self> {
    fn from_u64(n: u64) -> Self;
}

impl Scalar for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

pub type Tuple = Vec<u128>;

#[derive(Clone, Debug)]
pub struct Support {
    pub k: usize,
    pub z: u64,
    pub r: u64,
    /// Bit `i` of a mask stands for `primes[i]`.
    pub primes: Vec<PrimeIdealRec>,
    /// Sorted; the all-`(1)` tuple comes first.
    pub tuples: Vec<Tuple>,
    index: BTreeMap<Tuple, usize>,
}

fn mobius<T: Scalar>(mask: u128) -> T {
    if mask.count_ones() % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

impl Support {
    pub fn new(field: &FieldDesc, k: usize, z: u64, r: u64, max_tuples: usize) -> Result<Self, Error> {
        if k == 0 || z >= r {
            return Err(Error::InvalidParameter("support needs k >= 1 and z < R"));
        }
        let primes: Vec<PrimeIdealRec> = primes_over(field, r)
            .into_iter()
            .filter(|p| p.p > z && p.p <= r)
            .collect();
        if primes.len() > 128 {
            return Err(Error::Budget { what: "support prime ideals", limit: 128, requested: primes.len() as u64 });
        }
        let mut tuples = Vec::new();
        let mut cur = vec![0u128; k];
        let ok = Self::walk(&primes, k, r, 0, 1, &mut cur, &mut tuples, max_tuples);
        if !ok {
            return Err(Error::Budget { what: "support tuples", limit: max_tuples as u64, requested: max_tuples as u64 + 1 });
        }
        tuples.sort_unstable();
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Support { k, z, r, primes, tuples, index })
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        primes: &[PrimeIdealRec],
        k: usize,
        r: u64,
        from: usize,
        rad: u64,
        cur: &mut Tuple,
        out: &mut Vec<Tuple>,
        max: usize,
    ) -> bool {
        out.push(cur.clone());
        if out.len() > max {
            return false;
        }
        for i in from..primes.len() {
            let p = primes[i].p;
            let used = cur.iter().fold(0u128, |a, &m| a | m);
            let shares = (0..i).any(|j| used >> j & 1 == 1 && primes[j].p == p);
            let next = if shares { rad } else { rad * p };
            if next > r {
                // sorted by norm rather than p, so later ideals may still fit
                continue;
            }
            for slot in 0..k {
                cur[slot] |= 1 << i;
                let ok = Self::walk(primes, k, r, i + 1, next, cur, out, max);
                cur[slot] &= !(1 << i);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_of(&self, t: &[u128]) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn norm(&self, mask: u128) -> u64 {
        self.bits(mask).map(|i| self.primes[i].norm).product()
    }

    /// Product of the distinct rational primes below the ideals in `mask`.
    pub fn rad(&self, mask: u128) -> u64 {
        let mut ps: Vec<u64> = self.bits(mask).map(|i| self.primes[i].p).collect();
        ps.sort_unstable();
        ps.dedup();
        ps.iter().product()
    }

    fn bits(&self, mask: u128) -> impl Iterator<Item = usize> {
        (0..128).filter(move |i| mask >> i & 1 == 1)
    }

    fn tuple_norm(&self, t: &[u128]) -> u64 {
        t.iter().map(|&m| self.norm(m)).product()
    }

    /// Pairs `(e, e / r)` for support tuples `e` containing `r` componentwise.
    fn above<'a>(&'a self, r: &'a [u128]) -> impl Iterator<Item = (usize, Tuple)> + 'a {
        self.tuples.iter().enumerate().filter_map(move |(i, e)| {
            e.iter().zip(r).all(|(&e, &r)| e & r == r).then(|| (i, e.iter().zip(r).map(|(&e, &r)| e & !r).collect()))
        })
    }

    /// `xi(r) = sum_d lambda(r_1 d_1, ..., r_k d_k) / prod N(d_i)`.
    pub fn xi_from_lambda<T: Scalar>(&self, lambda: &[T]) -> Vec<T> {
        self.tuples
            .iter()
            .map(|r| {
                self.above(r).fold(T::zero(), |acc, (i, b)| acc + lambda[i].clone() / T::from_u64(self.tuple_norm(&b)))
            })
            .collect()
    }

    /// `lambda(d) = sum_b prod mu(b_i) xi(b_1 d_1, ..., b_k d_k) / prod N(b_i)`,
    /// with `xi` vanishing off the support.
    pub fn lambda_from_xi<T: Scalar>(&self, xi: &[T]) -> Vec<T> {
        self.tuples
            .iter()
            .map(|d| {
                self.above(d).fold(T::zero(), |acc, (i, b)| {
                    let sign = b.iter().fold(T::one(), |s, &m| s * mobius::<T>(m));
                    acc + sign * xi[i].clone() / T::from_u64(self.tuple_norm(&b))
                })
            })
            .collect()
    }

    /// `zeta_m(r) = 1_{r_m = (1)} sum_{d, d_m = (1)} lambda(r d) / prod N(d_i)`.
    pub fn zeta<T: Scalar>(&self, m: usize, lambda: &[T]) -> Vec<T> {
        self.tuples
            .iter()
            .map(|r| {
                if r[m] != 0 {
                    return T::zero();
                }
                self.above(r)
                    .filter(|(i, _)| self.tuples[*i][m] == 0)
                    .fold(T::zero(), |acc, (i, b)| acc + lambda[i].clone() / T::from_u64(self.tuple_norm(&b)))
            })
            .collect()
    }

    /// `1_{r_m = (1)} sum_b mu(b) xi(r with b in slot m) / N(b)`.
    pub fn zeta_via_xi<T: Scalar>(&self, m: usize, xi: &[T]) -> Vec<T> {
        self.tuples
            .iter()
            .map(|r| {
                if r[m] != 0 {
                    return T::zero();
                }
                self.tuples
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| (0..self.k).all(|j| j == m || e[j] == r[j]))
                    .fold(T::zero(), |acc, (i, e)| acc + mobius::<T>(e[m]) * xi[i].clone() / T::from_u64(self.norm(e[m])))
            })
            .collect()
    }

    /// `prod (1 + k / N(P))^-1` over the support primes.
    pub fn sieve_constant(&self) -> f64 {
        self.primes.iter().map(|p| 1.0 / (1.0 + self.k as f64 / p.norm as f64)).product()
    }

    /// `xi(r) = F(log rad N(r_i) / log R) prod mu(r_i)` times [`Self::sieve_constant`].
    pub fn xi_from_f(&self) -> Result<Vec<f64>, Error> {
        let fc = FCutoff::new(self.k)?;
        let c = self.sieve_constant();
        let log_r = libm::log(self.r as f64);
        Ok(self
            .tuples
            .iter()
            .map(|r| {
                let t: Vec<f64> = r.iter().map(|&m| libm::log(self.rad(m) as f64) / log_r).collect();
                let sign: f64 = r.iter().map(|&m| mobius::<f64>(m)).product();
                f_eval(&fc, &t) * sign * c
            })
            .collect())
    }
}
