//! Small numeric helpers shared by the sieve and weight code.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `li(2)`, so that `Li(x) = li(x) - li(2)`.
const LI2: f64 = 1.045_163_780_117_492_8;

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

/// Compensated (Kahan-Babuska-Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if libm::fabs(self.sum) >= libm::fabs(v) {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

/// The logarithmic integral `li(x)` for `x > 1`, by Ramanujan's series.
pub fn li(x: f64) -> f64 {
    let l = libm::log(x);
    let mut sum = 0.0;
    let mut term = 1.0; // (ln x)^n / (n! 2^(n-1)) with sign
    let mut inner = 0.0;
    for n in 1..400 {
        term *= l / n as f64;
        if n > 1 {
            term /= 2.0;
        }
        if (n - 1) % 2 == 0 {
            inner += 1.0 / (n as f64);
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let add = sign * term * inner;
        sum += add;
        if libm::fabs(add) < 1e-17 * libm::fabs(sum) && n > 10 {
            break;
        }
    }
    EULER_GAMMA + libm::log(l) + libm::sqrt(x) * sum
}

/// The offset logarithmic integral `Li(x) = integral from 2 to x of dt / log t`.
pub fn offset_li(x: f64) -> f64 {
    li(x) - LI2
}

/// `log_k x`, the k-fold iterated natural logarithm, when every stage is
/// defined and positive.
pub fn iterated_log(x: f64, k: u32) -> Option<f64> {
    let mut v = x;
    for _ in 0..k {
        if !(v > 0.0) {
            return None;
        }
        v = libm::log(v);
    }
    if k == 0 || v.is_finite() {
        Some(v)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn li_reference_values() {
        // li(10^6) and li(100) to 10 digits.
        assert!((li(1e6) - 78_627.549_159_5).abs() < 1e-4);
        assert!((li(100.0) - 30.126_141_584_1).abs() < 1e-8);
        assert!(offset_li(2.0).abs() < 1e-12);
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..10_000u128 {
            let r = isqrt_u128(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt_u128(u64::MAX as u128 * u64::MAX as u128), u64::MAX as u128);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let vals = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(vals), 2.0);
    }

    #[test]
    fn iterated_log_domain() {
        assert_eq!(iterated_log(1.0, 2), None);
        assert!(iterated_log(10.0, 3).unwrap() < 0.0);
        assert_eq!(iterated_log(10.0, 4), None);
    }
}
