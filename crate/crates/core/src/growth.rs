//! Comparators for achieved gap sizes and covering lengths.

use alloc::vec::Vec;

use crate::numeric::iterated_log;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparator {
    /// `log X log_2 X log_4 X / log_3 X`, for gap sizes `G(X)`.
    MainTheorem,
    /// `x (log x / log_2 x) log_3 x`, for covering lengths `Y(x)`.
    Suffices,
    /// `log X`.
    TrivialLog,
}

impl Comparator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Comparator::MainTheorem => "mainthm",
            Comparator::Suffices => "suffices",
            Comparator::TrivialLog => "log",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Comparator::MainTheorem, Comparator::Suffices, Comparator::TrivialLog].into_iter().find(|c| c.as_str() == s)
    }

    /// `None` where an iterated log is undefined or the value is not positive.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let v = match self {
            Comparator::MainTheorem => {
                let l1 = iterated_log(x, 1)?;
                let l2 = iterated_log(x, 2)?;
                let l3 = iterated_log(x, 3)?;
                let l4 = iterated_log(x, 4)?;
                l1 * l2 * l4 / l3
            }
            Comparator::Suffices => {
                let l2 = iterated_log(x, 2)?;
                let l3 = iterated_log(x, 3)?;
                x * (iterated_log(x, 1)? / l2) * l3
            }
            Comparator::TrivialLog => iterated_log(x, 1)?,
        };
        (v.is_finite() && v > 0.0).then_some(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthRow {
    pub x: u64,
    pub achieved: f64,
    pub comparator: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn growth_table(series: &[(u64, f64)], cmp: Comparator) -> Vec<GrowthRow> {
    series
        .iter()
        .map(|&(x, achieved)| {
            let comparator = cmp.eval(x as f64);
            GrowthRow { x, achieved, comparator, ratio: comparator.map(|c| achieved / c) }
        })
        .collect()
}
