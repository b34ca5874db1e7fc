//! The weight `w(n)` and its sums over a norm range.

use alloc::vec::Vec;

use super::brun::SieveTable;
use super::cutoff::ik_jk;
use super::support::Support;
use super::{divides_h, primes_below_rad, singular_product, TupleConfig, WeightParams};
use crate::error::Error;
use crate::field::{FieldDesc, QuadInt};
use crate::ideals::PrimeIdealRec;
use crate::norm_sieve::is_prime_element;
use crate::numeric::{li, EULER_GAMMA};

/// Everything needed to evaluate `w(n)` for one tuple and parameter set.
pub struct WeightContext {
    pub cfg: TupleConfig,
    pub params: WeightParams,
    pub support: Support,
    pub xi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub sieve: SieveTable,
    /// Prime ideals with `rad N(P) <= z` not dividing `H`.
    small: Vec<PrimeIdealRec>,
    /// Support primes dividing `E`.
    e_mask: u128,
}

/// Largest support the weight evaluation will enumerate.
pub const MAX_SUPPORT: usize = 20_000;
/// Largest `N` for [`WeightContext::sum_w`].
pub const MAX_RANGE_N: u64 = 200_000;

impl WeightContext {
    /// Builds `xi` from the cutoff and `lambda` from `xi`.
    pub fn new(cfg: TupleConfig, params: WeightParams) -> Result<Self, Error> {
        let k = *cfg.field();
        let support = Support::new(&k, cfg.k(), params.z, params.r, MAX_SUPPORT)?;
        let xi = support.xi_from_f()?;
        let lambda = support.lambda_from_xi(&xi);
        let sieve = SieveTable::upper(params.z, params.d)?;
        let small = primes_below_rad(&k, params.z).into_iter().filter(|p| !divides_h(p)).collect();
        let mut ctx = WeightContext { cfg, params, support, xi, lambda, sieve, small, e_mask: 0 };
        ctx.e_mask = ctx.mask_of(&ctx.cfg.exceptional());
        Ok(ctx)
    }

    /// Support primes dividing `e`, as a mask.
    pub fn mask_of(&self, e: &QuadInt) -> u128 {
        self.support
            .primes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.divides(e))
            .fold(0u128, |m, (i, _)| m | 1 << i)
    }

    pub fn max_abs_lambda(&self) -> f64 {
        self.lambda.iter().fold(0.0, |m, &l| m.max(libm::fabs(l)))
    }

    /// `sum mu+(rad N(t)) mu(t) / mu(rad N(t))` over squarefree `t` dividing
    /// the product of the forms, built from prime ideals with `rad N <= z`
    /// coprime to `H`.
    pub fn outer_sum(&self, values: &[(i64, i64)]) -> Result<i64, Error> {
        let hits: Vec<&PrimeIdealRec> = self
            .small
            .iter()
            .filter(|p| values.iter().any(|&(a, b)| p.divides_small(a, b)))
            .collect();
        if hits.len() > 24 {
            return Err(Error::Budget { what: "outer divisor primes", limit: 24, requested: hits.len() as u64 });
        }
        let mut total = 0i64;
        for mask in 0u32..(1 << hits.len()) {
            let chosen: Vec<&PrimeIdealRec> = (0..hits.len()).filter(|i| mask >> i & 1 == 1).map(|i| hits[i]).collect();
            let mut rad: Vec<u64> = chosen.iter().map(|p| p.p).collect();
            rad.sort_unstable();
            rad.dedup();
            let rad_value: u64 = rad.iter().product();
            let sign = if (chosen.len() - rad.len()) % 2 == 0 { 1 } else { -1 };
            total += self.sieve.lambda(rad_value) as i64 * sign;
        }
        Ok(total)
    }

    /// `sum lambda(d)` over support tuples in the coprimality set with `d_j`
    /// dividing the `j`-th form value.
    pub fn inner_sum(&self, values: &[(i64, i64)]) -> f64 {
        self.inner_sum_masked(values, self.e_mask)
    }

    fn inner_sum_masked(&self, values: &[(i64, i64)], e_mask: u128) -> f64 {
        let divides: Vec<u128> = values
            .iter()
            .map(|&(a, b)| {
                self.support
                    .primes
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.divides_small(a, b))
                    .fold(0u128, |m, (i, _)| m | 1 << i)
            })
            .collect();
        self.support
            .tuples
            .iter()
            .zip(&self.lambda)
            .filter(|(t, _)| {
                let all = t.iter().fold(0u128, |a, &m| a | m);
                all & e_mask == 0 && t.iter().zip(&divides).all(|(&m, &dv)| m & dv == m)
            })
            .map(|(_, &l)| l)
            .sum()
    }

    pub fn w_eval(&self, n: (i64, i64)) -> Result<f64, Error> {
        let values = self.cfg.values(n).ok_or(Error::InvalidParameter("form value overflows i64"))?;
        self.w_values(&values, self.e_mask)
    }

    /// `w` from precomputed form values, for forms other than `cfg`'s that
    /// share its `k`; `e_mask` comes from [`Self::mask_of`] on their `E`.
    pub fn w_values(&self, values: &[(i64, i64)], e_mask: u128) -> Result<f64, Error> {
        let outer = self.outer_sum(values)?;
        if outer == 0 {
            return Ok(0.0);
        }
        let inner = self.inner_sum_masked(values, e_mask);
        Ok(outer as f64 * inner * inner)
    }

    /// `sum xi(r)^2 / prod N(r_i)` over the support.
    pub fn xi_energy(&self) -> f64 {
        self.energy(&self.xi)
    }

    fn energy(&self, v: &[f64]) -> f64 {
        self.support
            .tuples
            .iter()
            .zip(v)
            .map(|(t, &x)| x * x / t.iter().map(|&m| self.support.norm(m) as f64).product::<f64>())
            .sum()
    }

    /// Sums `w` over `N < N(n) <= 2N` and sets them beside the predicted main terms.
    pub fn sum_w(&self, samples: u64, seed: u64) -> Result<SumWReport, Error> {
        let big_n = self.params.n;
        if big_n > MAX_RANGE_N {
            return Err(Error::Budget { what: "weight range N", limit: MAX_RANGE_N, requested: big_n });
        }
        let k = *self.cfg.field();
        let mut elements = 0u64;
        let mut sum = 0.0;
        let mut sum_prime = 0.0;
        let mut negative = 0u64;
        for z in k.enumerate_norm_range(big_n, 2 * big_n, 1 << 16) {
            let (a, b) = z.small().expect("small range");
            let w = self.w_eval((a, b))?;
            elements += 1;
            sum += w;
            negative += (w < 0.0) as u64;
            if is_prime_element(&k, &z)? {
                sum_prime += w;
            }
        }
        let v = singular_product(&self.cfg, self.params.z);
        let nf = big_n as f64;
        let kk = self.cfg.k() as i32;
        let log_ratio = libm::log(self.params.z as f64) / libm::log(self.params.r as f64);
        let quad = ik_jk(self.cfg.k(), samples, seed)?;
        let mertens: f64 = self.small.iter().map(|p| 1.0 - 1.0 / p.norm as f64).product();
        let zeta1 = self.support.zeta(0, &self.lambda);
        let units_over_h = k.unit_count as f64 / k.class_number as f64;
        Ok(SumWReport {
            n: big_n,
            elements,
            sum_w: sum,
            sum_w_prime: sum_prime,
            negative_points: negative,
            v,
            lattice_factor: k.lattice_density(),
            xi_energy: self.xi_energy(),
            predicted_sum: v * nf * self.xi_energy(),
            predicted_sum_asymptotic: v * nf * libm::pow(libm::exp(-EULER_GAMMA) * log_ratio, kk as f64) * quad.i_k,
            predicted_prime_sum: v * units_over_h * (li(2.0 * nf) - li(nf)) / mertens * self.energy(&zeta1),
            i_k: quad.i_k,
        })
    }
}

/// Sums of `w` over `N < N(n) <= 2N` and the main terms they are compared with.
/// The predictions count ideals; multiply by `lattice_factor` to compare with
/// element sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumWReport {
    pub n: u64,
    pub elements: u64,
    pub sum_w: f64,
    pub sum_w_prime: f64,
    pub negative_points: u64,
    pub v: f64,
    pub lattice_factor: f64,
    pub xi_energy: f64,
    /// `V N sum xi^2 / prod N(r_i)`.
    pub predicted_sum: f64,
    /// `V N (e^-gamma log z / log R)^k I_k(F)`.
    pub predicted_sum_asymptotic: f64,
    /// `V (|U|/h) (Li(2N) - Li(N)) / prod (1 - 1/N(P)) * sum zeta_1^2 / prod N(r_i)`.
    pub predicted_prime_sum: f64,
    pub i_k: f64,
}

/// The constant `c_{K,B}` with its limit replaced by the value at `z`:
/// `(|U|/h) prod_{p | disc, p <= z} (1 - 1/p) * (e^-gamma / log z) / prod_{rad N(P) <= z} (1 - 1/N(P))`.
pub fn c_k_truncated(k: &FieldDesc, z: u64) -> f64 {
    let mut log_prod = crate::numeric::Neumaier::new();
    for p in primes_below_rad(k, z) {
        log_prod.add(libm::log1p(-1.0 / p.norm as f64));
    }
    let ramified: f64 = crate::primes::factor_u64(k.disc.unsigned_abs())
        .iter()
        .filter(|&&(p, _)| p <= z)
        .map(|&(p, _)| 1.0 - 1.0 / p as f64)
        .product();
    let units_over_h = k.unit_count as f64 / k.class_number as f64;
    units_over_h * ramified * libm::exp(-EULER_GAMMA) / libm::log(z as f64) / libm::exp(log_prod.value())
}
