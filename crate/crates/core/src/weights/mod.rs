//! Sieve weights for tuples of linear forms `a_i n + b_i` over the ring of integers.

mod brun;
mod cutoff;
mod support;
mod weight;

pub use brun::{SieveSide, SieveTable};
pub use cutoff::{f_eval, ik_jk, psi, quadrature_chunk, FCutoff, IkJk, Moments, Quadrature, CHUNK_SAMPLES, MIN_SAMPLES, SE_TOLERANCE};
pub use support::{Scalar, Support, Tuple};
pub use weight::{c_k_truncated, WeightContext, SumWReport};

use alloc::vec::Vec;

use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::ideal::IdealRec;
use crate::ideals::{factor_ideal, primes_over, PrimeIdealRec, SplitKind};
use crate::numeric::Neumaier;

pub type Form = ((i64, i64), (i64, i64));

/// `k` linear forms `a_i n + b_i`, stored as coordinate pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleConfig {
    field: FieldDesc,
    forms: Vec<Form>,
}

impl TupleConfig {
    /// The forms `n + h_i` for distinct offsets with `N(h_i) <= 2k^2`.
    pub fn from_offsets(k: &FieldDesc, offsets: &[(i64, i64)]) -> Result<Self, Error> {
        let bound = 2 * (offsets.len() as i128).pow(2);
        for (i, h) in offsets.iter().enumerate() {
            if offsets[..i].contains(h) {
                return Err(Error::InvalidParameter("offsets must be distinct"));
            }
            if k.norm_small(h.0, h.1) > bound {
                return Err(Error::InvalidParameter("offset norm exceeds 2k^2"));
            }
        }
        Self::from_forms(k, offsets.iter().map(|&h| ((1, 0), h)).collect())
    }

    pub fn from_forms(k: &FieldDesc, forms: Vec<Form>) -> Result<Self, Error> {
        if forms.is_empty() {
            return Err(Error::InvalidParameter("need at least one form"));
        }
        if forms.iter().any(|&(a, _)| a == (0, 0)) {
            return Err(Error::InvalidParameter("form with zero leading coefficient"));
        }
        Ok(TupleConfig { field: *k, forms })
    }

    pub fn k(&self) -> usize {
        self.forms.len()
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// `E = prod a_i * prod_{i<j} (a_i b_j - a_j b_i)`.
    pub fn exceptional(&self) -> QuadInt {
        let k = &self.field;
        let el = |(a, b): (i64, i64)| k.elem(a, b);
        let mut e = k.one();
        for &(a, _) in &self.forms {
            e = &e * &el(a);
        }
        for i in 0..self.forms.len() {
            for j in i + 1..self.forms.len() {
                let (ai, bi) = (el(self.forms[i].0), el(self.forms[i].1));
                let (aj, bj) = (el(self.forms[j].0), el(self.forms[j].1));
                e = &e * &(&(&ai * &bj) - &(&aj * &bi));
            }
        }
        e
    }

    /// Values of the forms at `n`, or `None` if a coordinate leaves `i64`.
    pub fn values(&self, n: (i64, i64)) -> Option<Vec<(i64, i64)>> {
        self.forms
            .iter()
            .map(|&(a, b)| {
                let (x, y) = self.field.mul_small(a, n);
                Some((i64::try_from(x + b.0 as i128).ok()?, i64::try_from(y + b.1 as i128).ok()?))
            })
            .collect()
    }
}

/// Number of classes `n mod P` where some form vanishes.
///
/// Each form with `a_i` a unit mod `P` has exactly one root; one with
/// `a_i = 0 (mod P)` has none unless `b_i` also vanishes, in which case every
/// class is a root.
pub fn rho(cfg: &TupleConfig, pr: &PrimeIdealRec) -> u64 {
    let mut roots: Vec<u64> = Vec::new();
    for &((a0, a1), (b0, b1)) in &cfg.forms {
        let ra = pr.residue_small(a0, a1);
        let rb = pr.residue_small(b0, b1);
        if ra == 0 {
            if rb == 0 {
                return pr.norm;
            }
            continue;
        }
        let inv = pr.res_inv(ra).expect("nonzero residue is invertible");
        let root = pr.res_mul(pr.res_neg(rb), inv);
        if !roots.contains(&root) {
            roots.push(root);
        }
    }
    roots.len() as u64
}

/// `rho` of a squarefree ideal, as the product over its prime factors.
pub fn rho_ideal(cfg: &TupleConfig, q: &IdealRec) -> Result<u64, Error> {
    let mut out = 1;
    for (pr, e) in factor_ideal(&cfg.field, q)? {
        if e > 1 {
            return Err(Error::NotSquarefreeIdeal);
        }
        out *= rho(cfg, &pr);
    }
    Ok(out)
}

/// Prime ideals with `rad N(P) = p <= z`.
fn primes_below_rad(k: &FieldDesc, z: u64) -> Vec<PrimeIdealRec> {
    primes_over(k, z)
}

/// `rho(P) < N(P)` for every prime ideal with `rad N(P) <= z`.
pub fn admissible(cfg: &TupleConfig, z: u64) -> bool {
    primes_below_rad(&cfg.field, z).iter().all(|p| rho(cfg, p) < p.norm)
}

/// Whether the prime ideal divides `H`, which at this scale is `|disc|`.
pub(crate) fn divides_h(pr: &PrimeIdealRec) -> bool {
    pr.kind == SplitKind::Ramified
}

/// `V = prod (1 - rho(P)/N(P))` over `rad N(P) <= z`, `P` not dividing `H`,
/// summed in log space with compensation.
pub fn singular_product(cfg: &TupleConfig, z: u64) -> f64 {
    let mut acc = Neumaier::new();
    for pr in primes_below_rad(&cfg.field, z).iter().filter(|p| !divides_h(p)) {
        let r = rho(cfg, pr);
        if r >= pr.norm {
            return 0.0;
        }
        acc.add(libm::log1p(-(r as f64) / pr.norm as f64));
    }
    libm::exp(acc.value())
}

/// Desk-scale sieve parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    /// The range is `N < N(n) <= 2N`.
    pub n: u64,
    pub z: u64,
    /// Level `R`: the support has `rad N(d_1 ... d_k) <= R`.
    pub r: u64,
    /// Upper sieve level, `z^2` by default.
    pub d: u64,
    /// `H = N(B) |disc|` with `B = (1)`.
    pub h: u64,
    pub theta: f64,
    /// `s` with `D = R^(1/s)`.
    pub s: f64,
}

impl WeightParams {
    pub fn desk(k: &FieldDesc, n: u64, z: u64, r: u64) -> Result<Self, Error> {
        let h = k.disc.unsigned_abs();
        let max_ramified = crate::primes::factor_u64(h).last().map_or(1, |&(p, _)| p);
        if z <= max_ramified {
            return Err(Error::InvalidParameter("z must exceed every prime dividing the discriminant"));
        }
        if r <= z {
            return Err(Error::InvalidParameter("R must exceed z"));
        }
        let d = z * z;
        let s = libm::log(r as f64) / libm::log(d as f64);
        Ok(WeightParams { n, z, r, d, h, theta: 0.5, s })
    }
}

/// The asymptotic parameter choices, in logarithms since they overflow any
/// machine number at feasible `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticScale {
    pub s: f64,
    pub log_r: f64,
    pub log_d: f64,
    pub log_z: f64,
}

/// `s = log_2 N`, `R = N^(theta/4 - 3/(2s))`, `D = R^(1/s)`, `z = (log N)^(9999 k^2)`.
pub fn asymptotic_scale(n: f64, theta: f64, k: u32) -> Option<AsymptoticScale> {
    let l1 = libm::log(n);
    let s = crate::numeric::iterated_log(n, 2)?;
    if s <= 0.0 {
        return None;
    }
    let log_r = l1 * (theta / 4.0 - 1.5 / s);
    Some(AsymptoticScale { s, log_r, log_d: log_r / s, log_z: 9999.0 * (k as f64) * (k as f64) * libm::log(l1) })
}

#[cfg(test)]
mod tests;
