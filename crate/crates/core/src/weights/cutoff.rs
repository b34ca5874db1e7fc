//! The cutoff `F` and Monte Carlo estimates of `I_k(F)`, `J_k(F)`, `M_k(F)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::covering::rng_for;
use crate::error::Error;

/// `1` on `[0, 0.9]`, `0` on `[1, inf)`, and the quintic smoothstep between,
/// which is `C^2` and non-increasing.
pub fn psi(t: f64) -> f64 {
    if t <= 0.9 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let s = (1.0 - t) * 10.0;
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FCutoff {
    pub k: usize,
    /// `k log k`, zero at `k = 1`.
    pub t_k: f64,
    /// `k^(-1/2)`.
    pub u_k: f64,
}

impl FCutoff {
    pub fn new(k: usize) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::InvalidParameter("the cutoff needs k >= 1"));
        }
        let kf = k as f64;
        Ok(FCutoff { k, t_k: kf * libm::log(kf), u_k: 1.0 / libm::sqrt(kf) })
    }

    /// `psi(t / U_k) / (1 + T_k t)`.
    pub fn g_tilde(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        psi(t / self.u_k) / (1.0 + self.t_k * t)
    }

    /// `int_0^U 1/(1 + T t)^2 dt = U / (1 + T U)`.
    fn mass(&self) -> f64 {
        self.u_k / (1.0 + self.t_k * self.u_k)
    }

    /// Inverse CDF of the density proportional to `(1 + T t)^-2` on `[0, U]`.
    fn sample(&self, u: f64) -> f64 {
        if self.t_k == 0.0 {
            return u * self.u_k;
        }
        let tu = self.t_k * self.u_k;
        let inv = 1.0 - u * tu / (1.0 + tu);
        (1.0 / inv - 1.0) / self.t_k
    }
}

/// `F(t) = psi(sum t_i) prod psi(t_i / U_k) / (1 + T_k t_i)`, zero off the
/// nonnegative orthant.
pub fn f_eval(fc: &FCutoff, t: &[f64]) -> f64 {
    if t.iter().any(|&x| x < 0.0) {
        return 0.0;
    }
    let total: f64 = t.iter().sum();
    let mut v = psi(total);
    for &x in t {
        if v == 0.0 {
            break;
        }
        v *= fc.g_tilde(x);
    }
    v
}

/// `h(s) = int_0^U psi(s + t) g~(t) dt` on a uniform grid over `[0, 1]`.
struct InnerTable {
    values: Vec<f64>,
}

const TABLE_POINTS: usize = 4097;
const SIMPSON_PANELS: usize = 1024;

impl InnerTable {
    fn new(fc: &FCutoff) -> Self {
        let h = fc.u_k / SIMPSON_PANELS as f64;
        let values = (0..TABLE_POINTS)
            .map(|i| {
                let s = i as f64 / (TABLE_POINTS - 1) as f64;
                let f = |t: f64| psi(s + t) * fc.g_tilde(t);
                let mut acc = f(0.0) + f(fc.u_k);
                for j in 1..SIMPSON_PANELS {
                    acc += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            })
            .collect();
        InnerTable { values }
    }

    fn at(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        let x = s * (TABLE_POINTS - 1) as f64;
        let i = x as usize;
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Running sums of the two estimator integrands `A` (for `I_k`) and `B` (for `J_k`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub a: f64,
    pub aa: f64,
    pub b: f64,
    pub bb: f64,
    pub ab: f64,
}

impl Moments {
    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.a += o.a;
        self.aa += o.aa;
        self.b += o.b;
        self.bb += o.bb;
        self.ab += o.ab;
    }
}

/// Samples per deterministic chunk; chunk `c` draws from RNG stream `c`.
pub const CHUNK_SAMPLES: u64 = 1 << 14;

/// Precomputed state shared by all chunks of one estimate.
pub struct Quadrature {
    fc: FCutoff,
    table: InnerTable,
    total: u64,
}

impl Quadrature {
    pub fn new(k: usize, total: u64) -> Result<Self, Error> {
        let fc = FCutoff::new(k)?;
        Ok(Quadrature { fc, table: InnerTable::new(&fc), total })
    }

    pub fn chunks(&self) -> u64 {
        self.total.div_ceil(CHUNK_SAMPLES)
    }
}

/// One chunk of importance samples. Each `t_i` is drawn from the density
/// proportional to `(1 + T t)^-2` on `[0, U]`, which cancels the
/// `1/(1 + T t_i)^2` factors of `F^2`. The first coordinate is stratified
/// over the whole run.
pub fn quadrature_chunk(q: &Quadrature, seed: u64, chunk: u64) -> Moments {
    let k = q.fc.k;
    let start = chunk * CHUNK_SAMPLES;
    let end = (start + CHUNK_SAMPLES).min(q.total);
    let mut rng = rng_for(seed, chunk);
    let mut m = Moments::default();
    let mut t = alloc::vec![0.0f64; k];
    for j in start..end {
        let u1 = (j as f64 + rng.random::<f64>()) / q.total as f64;
        t[0] = q.fc.sample(u1);
        for x in t.iter_mut().skip(1) {
            *x = q.fc.sample(rng.random::<f64>());
        }
        let mut cut = 1.0;
        for &x in &t[..k - 1] {
            let c = psi(x / q.fc.u_k);
            cut *= c * c;
        }
        let head: f64 = t[..k - 1].iter().sum();
        let last = psi(t[k - 1] / q.fc.u_k);
        let total = psi(head + t[k - 1]);
        let a = cut * last * last * total * total;
        let h = q.table.at(head);
        let b = cut * h * h;
        m.n += 1;
        m.a += a;
        m.aa += a * a;
        m.b += b;
        m.bb += b * b;
        m.ab += a * b;
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IkJk {
    pub k: usize,
    pub samples: u64,
    pub i_k: f64,
    pub i_se: f64,
    pub j_k: f64,
    pub j_se: f64,
    /// `k J_k / I_k`.
    pub m_k: f64,
    pub m_se: f64,
    /// Some relative standard error exceeded the tolerance.
    pub flagged: bool,
}

/// Relative standard error above which an estimate is flagged.
pub const SE_TOLERANCE: f64 = 1e-2;

impl IkJk {
    pub fn from_moments(k: usize, m: &Moments) -> Result<Self, Error> {
        let fc = FCutoff::new(k)?;
        let n = m.n as f64;
        let (ea, eb) = (m.a / n, m.b / n);
        let va = (m.aa / n - ea * ea).max(0.0);
        let vb = (m.bb / n - eb * eb).max(0.0);
        let cab = m.ab / n - ea * eb;
        let c = fc.mass();
        let ck1 = libm::pow(c, (k - 1) as f64);
        let (i_k, j_k) = (ck1 * c * ea, ck1 * eb);
        let i_se = ck1 * c * libm::sqrt(va / n);
        let j_se = ck1 * libm::sqrt(vb / n);
        let ratio = eb / ea;
        let m_k = k as f64 * ratio / c;
        let var_ratio = (vb / (ea * ea) - 2.0 * eb * cab / (ea * ea * ea) + eb * eb * va / (ea * ea * ea * ea)) / n;
        let m_se = k as f64 / c * libm::sqrt(var_ratio.max(0.0));
        let flagged = !(i_se <= SE_TOLERANCE * i_k && j_se <= SE_TOLERANCE * j_k);
        Ok(IkJk { k, samples: m.n, i_k, i_se, j_k, j_se, m_k, m_se, flagged })
    }
}

/// Smallest sample budget accepted by [`ik_jk`].
pub const MIN_SAMPLES: u64 = 100_000;

/// Sequential estimate; chunk results are merged in order, so a parallel
/// driver calling [`quadrature_chunk`] gets the same numbers.
pub fn ik_jk(k: usize, samples: u64, seed: u64) -> Result<IkJk, Error> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter("quadrature needs at least 1e5 samples"));
    }
    let q = Quadrature::new(k, samples)?;
    let mut m = Moments::default();
    for c in 0..q.chunks() {
        m.merge(&quadrature_chunk(&q, seed, c));
    }
    IkJk::from_moments(k, &m)
}
