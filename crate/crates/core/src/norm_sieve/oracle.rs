//! Exhaustive gap search that relies on nothing but [`is_prime_element`].
//!
//! Golden values in the test suite are pinned to a hash of this file.

use alloc::vec::Vec;

use super::{is_prime_element, GapRecord};
use crate::error::Error;
use crate::field::FieldDesc;

/// Largest `X` the exhaustive search accepts.
pub const ORACLE_MAX_X: u64 = 100_000;

/// Distance from `(a, b)` to the nearest prime element, measured by the norm
/// of the difference, scanning offsets in increasing norm.
pub fn nearest_prime_distance(k: &FieldDesc, a: i64, b: i64) -> u64 {
    let mut lo: i128 = -1;
    let mut width: i128 = 16;
    loop {
        let hi = lo + width;
        for (u, v) in k.sorted_points(lo, hi) {
            let z = k.elem(a + u, b + v);
            if is_prime_element(k, &z).unwrap_or(false) {
                return k.norm_small(u, v) as u64;
            }
        }
        lo = hi;
        width *= 2;
    }
}

/// `G_K(X)` by scanning every center with norm at most `X`.
pub fn gap_oracle_exhaustive(k: &FieldDesc, x: u64) -> Result<GapRecord, Error> {
    if x > ORACLE_MAX_X {
        return Err(Error::Budget { what: "exhaustive gap oracle X", limit: ORACLE_MAX_X, requested: x });
    }
    let centers: Vec<(i64, i64)> = k.sorted_points(-1, x as i128);
    let mut best = (0u64, (0i64, 0i64));
    let mut first = true;
    for &(a, b) in &centers {
        let r = nearest_prime_distance(k, a, b);
        if first || r > best.0 {
            best = (r, (a, b));
            first = false;
        }
    }
    Ok(GapRecord {
        x,
        center: k.elem(best.1 .0, best.1 .1),
        radius: best.0,
        scanned_centers: centers.len() as u64,
    })
}
