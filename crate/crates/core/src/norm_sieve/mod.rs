//! Prime elements over norm ranges and the gap function `G_K(X)`.

pub mod oracle;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::numeric::isqrt_u64;
use crate::primes::{for_each_prime_in, is_prime_u64, kronecker};

/// Whether `(z)` is a prime ideal.
pub fn is_prime_element(k: &FieldDesc, z: &QuadInt) -> Result<bool, Error> {
    k.check(z)?;
    let n = z.norm().as_u64().ok_or(Error::NormTooLarge)?;
    if n <= 1 {
        return Err(Error::ZeroOrUnit);
    }
    if is_prime_u64(n) {
        return Ok(true);
    }
    let s = isqrt_u64(n);
    Ok(s * s == n && is_prime_u64(s) && kronecker(k.disc, s) == -1)
}

/// Bitset over `0..=limit` marking the norms of prime elements: rational
/// primes that split or ramify, and squares of inert primes.
#[derive(Clone, Debug)]
pub struct PrimeNormTable {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeNormTable {
    pub fn new(k: &FieldDesc, limit: u64) -> Self {
        let mut bits = vec![0u64; (limit / 64 + 1) as usize];
        let mut set = |n: u64| bits[(n / 64) as usize] |= 1 << (n % 64);
        for_each_prime_in(0, limit, |p| {
            match kronecker(k.disc, p) {
                -1 => {
                    if p.saturating_mul(p) <= limit {
                        set(p * p);
                    }
                }
                _ => set(p),
            }
        });
        PrimeNormTable { limit, bits }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        debug_assert!(n <= self.limit);
        self.bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }
}

/// Visits every prime element with `lo < N <= hi`, one norm segment at a time.
///
/// Within a segment points come in row order; segments come in increasing norm.
pub fn for_each_prime_element(k: &FieldDesc, lo: u64, hi: u64, mut f: impl FnMut(i64, i64)) {
    const SEG: u64 = 1 << 20;
    let mut seg_lo = lo;
    while seg_lo < hi {
        let seg_hi = seg_lo.saturating_add(SEG).min(hi);
        let width = (seg_hi - seg_lo) as usize;
        // bit i stands for norm seg_lo + 1 + i
        let mut local = vec![false; width];
        for_each_prime_in(seg_lo, seg_hi, |p| {
            if kronecker(k.disc, p) != -1 {
                local[(p - seg_lo - 1) as usize] = true;
            }
        });
        for_each_prime_in(isqrt_u64(seg_lo), isqrt_u64(seg_hi), |p| {
            let pp = p * p;
            if pp > seg_lo && pp <= seg_hi && kronecker(k.disc, p) == -1 {
                local[(pp - seg_lo - 1) as usize] = true;
            }
        });
        k.for_each_row(seg_lo as i128, seg_hi as i128, |b, a0, a1| {
            for a in a0..=a1 {
                let n = k.norm_small(a, b) as u64;
                if local[(n - seg_lo - 1) as usize] {
                    f(a, b);
                }
            }
        });
        seg_lo = seg_hi;
    }
}

#[derive(Clone, Debug)]
struct Run {
    b: i64,
    a0: i64,
    len: usize,
    offset: usize,
}

/// Bitmap of the prime elements with `lo < N <= hi`, one bit per lattice point.
#[derive(Clone, Debug)]
pub struct AnnulusBitmap {
    field: FieldDesc,
    lo: u64,
    hi: u64,
    runs: Vec<Run>,
    bits: Vec<u64>,
}

impl AnnulusBitmap {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    fn locate(&self, a: i64, b: i64) -> Option<usize> {
        let i = self.runs.partition_point(|r| (r.b, r.a0) <= (b, a));
        let r = self.runs.get(i.checked_sub(1)?)?;
        if r.b == b && a >= r.a0 && ((a - r.a0) as usize) < r.len {
            Some(r.offset + (a - r.a0) as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.locate(a, b).is_some_and(|i| self.bits[i / 64] >> (i % 64) & 1 == 1)
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of lattice points in the annulus.
    pub fn points(&self) -> u64 {
        self.runs.iter().map(|r| r.len as u64).sum()
    }

    /// Prime elements in row order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.runs.iter().flat_map(move |r| {
            (0..r.len).filter_map(move |j| {
                let i = r.offset + j;
                (self.bits[i / 64] >> (i % 64) & 1 == 1).then_some((r.a0 + j as i64, r.b))
            })
        })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }
}

/// Prime elements with `lo < N <= hi` as a bitmap.
pub fn sieve_annulus(k: &FieldDesc, lo: u64, hi: u64) -> AnnulusBitmap {
    let mut runs = Vec::new();
    let mut offset = 0usize;
    k.for_each_row(lo as i128, hi as i128, |b, a0, a1| {
        let len = (a1 - a0 + 1) as usize;
        runs.push(Run { b, a0, len, offset });
        offset += len;
    });
    let mut bm = AnnulusBitmap { field: *k, lo, hi, runs, bits: vec![0u64; offset / 64 + 1] };
    let mut marks = Vec::new();
    for_each_prime_element(k, lo, hi, |a, b| marks.push((a, b)));
    for (a, b) in marks {
        let i = bm.locate(a, b).expect("prime element inside annulus");
        bm.bits[i / 64] |= 1 << (i % 64);
    }
    bm
}

/// The largest prime-free norm ball around a center of norm at most `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapRecord {
    pub x: u64,
    pub center: QuadInt,
    pub radius: u64,
    pub scanned_centers: u64,
}

/// Largest `X` the table-driven search accepts by default.
pub const GAP_MAX_X: u64 = 10_000_000;

/// Table-driven gap search. Offsets are scanned in `(norm, a, b)` order and
/// prime elements are recognized by a precomputed [`PrimeNormTable`].
pub struct GapSearch {
    field: FieldDesc,
    x: u64,
    offsets: Vec<(i64, i64, u64)>,
    table: PrimeNormTable,
}

impl GapSearch {
    /// Prepares a search over centers of norm `<= x` with offsets of norm `<= reach`.
    pub fn new(k: &FieldDesc, x: u64, reach: u64) -> Self {
        let offsets = k
            .sorted_points(-1, reach as i128)
            .into_iter()
            .map(|(a, b)| (a, b, k.norm_small(a, b) as u64))
            .collect();
        let root = isqrt_u64(x) + isqrt_u64(reach) + 2;
        GapSearch { field: *k, x, offsets, table: PrimeNormTable::new(k, root * root) }
    }

    pub fn reach(&self) -> u64 {
        self.offsets.last().map_or(0, |o| o.2)
    }

    /// All centers in tie-break order.
    pub fn centers(&self) -> Vec<(i64, i64)> {
        self.field.sorted_points(-1, self.x as i128)
    }

    /// Distance to the nearest prime element, or `None` if it lies beyond the reach.
    #[inline]
    pub fn radius_at(&self, a: i64, b: i64) -> Option<u64> {
        for &(u, v, n) in &self.offsets {
            let m = self.field.norm_small(a + u, b + v) as u64;
            if self.table.contains(m) {
                return Some(n);
            }
        }
        None
    }

    /// Best `(radius, index)` over a slice of centers, first index on ties.
    /// `Err` carries the index of a center whose radius exceeds the reach.
    pub fn scan(&self, centers: &[(i64, i64)]) -> Result<Option<(u64, usize)>, usize> {
        let mut best: Option<(u64, usize)> = None;
        for (i, &(a, b)) in centers.iter().enumerate() {
            let r = self.radius_at(a, b).ok_or(i)?;
            if best.is_none_or(|(br, _)| r > br) {
                best = Some((r, i));
            }
        }
        Ok(best)
    }
}

/// `G_K(X)` with the default budget.
pub fn brute_force_gap(k: &FieldDesc, x: u64) -> Result<GapRecord, Error> {
    brute_force_gap_with_budget(k, x, GAP_MAX_X)
}

pub fn brute_force_gap_with_budget(k: &FieldDesc, x: u64, max_x: u64) -> Result<GapRecord, Error> {
    if x > max_x {
        return Err(Error::Budget { what: "gap search X", limit: max_x, requested: x });
    }
    let mut reach = 64;
    loop {
        let search = GapSearch::new(k, x, reach);
        let centers = search.centers();
        match search.scan(&centers) {
            Ok(best) => {
                let (r, i) = best.expect("at least the zero center");
                let (a, b) = centers[i];
                return Ok(GapRecord {
                    x,
                    center: k.elem(a, b),
                    radius: r,
                    scanned_centers: centers.len() as u64,
                });
            }
            Err(_) => reach *= 4,
        }
    }
}

/// Re-checks a record from scratch: the center has norm at most `X`, no
/// prime element lies at distance below the radius, and one lies at the radius.
pub fn verify_gap_record(k: &FieldDesc, rec: &GapRecord) -> Result<bool, Error> {
    k.check(&rec.center)?;
    let nc = rec.center.norm().as_u64().ok_or(Error::NormTooLarge)?;
    if nc > rec.x {
        return Ok(false);
    }
    let prime_at = |u: i64, v: i64| is_prime_element(k, &(&rec.center + &k.elem(u, v))).unwrap_or(false);
    let inside = k.points_in_norm_range(-1, rec.radius as i128 - 1);
    if inside.iter().any(|&(u, v)| prime_at(u, v)) {
        return Ok(false);
    }
    let shell = k.points_in_norm_range(rec.radius as i128 - 1, rec.radius as i128);
    Ok(shell.iter().any(|&(u, v)| prime_at(u, v)))
}
