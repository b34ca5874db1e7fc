//! JSON documents written and read by the command-line tool.
//!
//! Integers that fit in `i64` are plain JSON numbers; larger ones are decimal
//! strings, which every document announces with `"bigint": "decimal-string"`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use quadgap_core::covering::GapCertificate;
use quadgap_core::norm_sieve::GapRecord;
use quadgap_core::{FieldDesc, Int, PrimeIdealRec, QuadInt};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const BIGINT_ENCODING: &str = "decimal-string";

/// An integer of any size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            U(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(v) => Ok(JsonInt(v.into())),
            Raw::U(v) => Ok(JsonInt(v.into())),
            Raw::S(s) => s.parse().map(JsonInt).map_err(serde::de::Error::custom),
        }
    }
}

/// `[a, b]` for `a + b w`.
pub type ElemDto = [JsonInt; 2];

pub fn elem_dto(z: &QuadInt) -> ElemDto {
    [JsonInt(z.a().to_big()), JsonInt(z.b().to_big())]
}

pub fn elem_from_dto(k: &FieldDesc, e: &ElemDto) -> QuadInt {
    k.elem(Int::from_big(e[0].0.clone()), Int::from_big(e[1].0.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIdealDto {
    pub p: u64,
    pub kind: String,
    pub norm: u64,
    /// The ideal is `(p, w - root)` unless it is inert.
    pub root: u64,
    pub gen: Option<ElemDto>,
}

impl From<&PrimeIdealRec> for PrimeIdealDto {
    fn from(p: &PrimeIdealRec) -> Self {
        PrimeIdealDto {
            p: p.p,
            kind: p.kind.as_str().to_string(),
            norm: p.norm,
            root: p.root,
            gen: p.gen.as_ref().map(elem_dto),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldInfoDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub disc: i64,
    /// `[t, n]` with `w^2 - t w + n = 0`.
    pub min_poly: [i64; 2],
    pub unit_count: u32,
    pub class_number: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub lo: u64,
    pub hi: u64,
    pub prime_elements: u64,
    pub prime_ideals: u64,
    /// `pi_K(hi) / Li(hi)`.
    pub landau_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub x: u64,
    pub center: ElemDto,
    pub radius: u64,
    pub scanned_centers: u64,
    pub verified: bool,
}

impl GapDoc {
    pub fn new(k: &FieldDesc, rec: &GapRecord, verified: bool, config: serde_json::Value) -> Self {
        GapDoc {
            schema: "quadgap/gap-record/v1".into(),
            bigint: BIGINT_ENCODING.into(),
            config,
            d: k.d,
            x: rec.x,
            center: elem_dto(&rec.center),
            radius: rec.radius,
            scanned_centers: rec.scanned_centers,
            verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub offset: ElemDto,
    pub prime: PrimeIdealDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub strategy: String,
    pub seed: u64,
    pub x: u64,
    pub y: u64,
    pub entries: usize,
    /// The plan covered every element of norm `<= y`.
    pub complete: bool,
    pub covered_radius: u64,
    pub covered_count: usize,
    pub modulus: JsonInt,
    pub translate: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub center: ElemDto,
    pub radius: u64,
    pub prime_bound_x: u64,
    pub witnesses: Vec<WitnessDto>,
    pub failures: Vec<ElemDto>,
    pub verified: bool,
    pub plan: Option<PlanSummary>,
}

pub const CERTIFICATE_SCHEMA: &str = "quadgap/gap-certificate/v1";

impl CertificateDoc {
    pub fn new(cert: &GapCertificate, plan: Option<PlanSummary>, config: serde_json::Value) -> Self {
        CertificateDoc {
            schema: CERTIFICATE_SCHEMA.into(),
            bigint: BIGINT_ENCODING.into(),
            config,
            d: cert.field.d,
            center: elem_dto(&cert.center),
            radius: cert.radius,
            prime_bound_x: cert.prime_bound_x,
            witnesses: cert
                .witnesses
                .iter()
                .map(|w| WitnessDto { offset: elem_dto(&w.offset), prime: (&w.prime).into() })
                .collect(),
            failures: cert.failures.iter().map(elem_dto).collect(),
            verified: cert.verified,
            plan,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumWDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub offsets: Vec<[i64; 2]>,
    pub admissible: bool,
    pub n: u64,
    pub z: u64,
    pub r: u64,
    pub level_d: u64,
    pub support_size: usize,
    pub max_abs_lambda: f64,
    pub elements: u64,
    pub sum_w: f64,
    pub sum_w_prime: f64,
    pub negative_points: u64,
    pub v: f64,
    pub lattice_factor: f64,
    pub xi_energy: f64,
    pub predicted_sum: f64,
    pub predicted_sum_asymptotic: f64,
    pub predicted_prime_sum: f64,
    /// `sum_w / (lattice_factor * predicted_sum)`.
    pub ratio: f64,
    pub prime_ratio: f64,
    pub i_k: f64,
    pub m_k: f64,
    /// `theta/8 * c_K * M_k` with `c_K` truncated at `z`.
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandselDoc {
    pub schema: String,
    pub bigint: String,
    pub config: serde_json::Value,
    pub d: i64,
    pub x: u64,
    pub y: u64,
    pub s_band: [u64; 2],
    pub p_band: [u64; 2],
    pub offsets: Vec<[i64; 2]>,
    pub sigma: f64,
    pub sigma_asymptotic: Option<f64>,
    pub s_primes: usize,
    pub p_primes: usize,
    pub q_count: usize,
    pub trials: u32,
    pub mean_ratio: f64,
    pub spread: f64,
    pub survivors: Vec<usize>,
    pub second_stage: String,
    pub leftovers: Vec<usize>,
    /// P primes left out of the weighted stage, by reason.
    pub excluded: Vec<String>,
    pub accepted_fraction: Vec<f64>,
}

/// Diagnostics written to standard error when a run fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub status: String,
    pub exit_code: i32,
    pub message: String,
    pub details: serde_json::Value,
}
