//! Counting smooth ideals and smooth elements.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::field::FieldDesc;
use crate::ideals::primes_up_to;
use crate::primes::{for_each_prime_in, kronecker};

/// Largest `x` accepted by the counting routines.
pub const SMOOTH_MAX_X: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothCount {
    pub x: u64,
    pub y: u64,
    /// `log x / log y`.
    pub u: f64,
    pub count: u64,
    /// `x log^2 y exp(-u log u)`.
    pub envelope: f64,
}

impl SmoothCount {
    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.envelope
    }
}

pub fn envelope(x: u64, y: u64) -> f64 {
    let (lx, ly) = (libm::log(x as f64), libm::log(y as f64));
    let u = lx / ly;
    (x as f64) * ly * ly * libm::exp(-u * libm::log(u))
}

fn check(x: u64, y: u64) -> Result<(), Error> {
    if x > SMOOTH_MAX_X {
        return Err(Error::Budget { what: "smooth count x", limit: SMOOTH_MAX_X, requested: x });
    }
    if y < 2 || x < 2 {
        return Err(Error::InvalidParameter("smooth counts need x, y >= 2"));
    }
    Ok(())
}

fn record(x: u64, y: u64, count: u64) -> SmoothCount {
    let u = libm::log(x as f64) / libm::log(y as f64);
    SmoothCount { x, y, u, count, envelope: envelope(x, y) }
}

/// Number of ideals of norm `< x` whose prime ideal factors all have norm `< y`.
///
/// Walks products of prime ideals in non-decreasing order, so every ideal is
/// reached exactly once by unique factorization.
pub fn psi_k(k: &FieldDesc, x: u64, y: u64) -> Result<SmoothCount, Error> {
    check(x, y)?;
    let bound = (y - 1).min(x - 1);
    let norms: Vec<u64> = primes_up_to(k, bound).iter().map(|p| p.norm).collect();
    fn walk(norms: &[u64], start: usize, n: u64, x: u64) -> u64 {
        let mut c = 1;
        for i in start..norms.len() {
            let m = n * norms[i];
            if m >= x {
                break;
            }
            c += walk(norms, i, m, x);
        }
        c
    }
    Ok(record(x, y, walk(&norms, 0, 1, x)))
}

/// `smooth[n]` for `n < x`: every prime ideal above a prime dividing `n` has norm `< y`.
fn smooth_norms(k: &FieldDesc, x: u64, y: u64) -> Vec<bool> {
    let mut smooth = vec![true; x as usize];
    for_each_prime_in(0, x - 1, |p| {
        let local = if kronecker(k.disc, p) == -1 { p.saturating_mul(p) } else { p };
        if local >= y {
            for m in (p..x).step_by(p as usize) {
                smooth[m as usize] = false;
            }
        }
    });
    smooth
}

/// Number of nonzero elements of norm `< x` that are `y`-smooth, meaning the
/// principal ideal they generate is. When the class number is 1 this is
/// `|U|` times the number of smooth ideals.
pub fn psi_elements(k: &FieldDesc, x: u64, y: u64) -> Result<SmoothCount, Error> {
    check(x, y)?;
    let smooth = smooth_norms(k, x, y);
    let mut count = 0u64;
    k.for_each_row(0, x as i128 - 1, |b, a0, a1| {
        for a in a0..=a1 {
            let n = k.norm_small(a, b) as usize;
            count += smooth[n] as u64;
        }
    });
    Ok(record(x, y, count))
}

/// Counts over a grid of `(x, y)` pairs.
pub fn envelope_table(k: &FieldDesc, grid: &[(u64, u64)]) -> Result<Vec<SmoothCount>, Error> {
    grid.iter().map(|&(x, y)| psi_k(k, x, y)).collect()
}
