//! Significance tests, winning rates and data-efficiency curves.

mod efficiency;
mod paired;
pub mod special;
mod winrate;
mod ztest;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

pub use efficiency::{
    efficiency_curve, EfficiencyCurve, MarginalGain, EPSILON_COUNT, EPSILON_UNIT_METRIC,
};
pub use paired::{paired_test, PairedOptions, DEFAULT_RESAMPLES};
pub use winrate::{winning_rate, WinTally};
pub use ztest::{two_prop_z, ZTestOptions};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    TwoPropZ,
    PairedT,
    Wilcoxon,
    Bootstrap,
}

impl TestMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestMethod::TwoPropZ => "two-prop-z",
            TestMethod::PairedT => "paired-t",
            TestMethod::Wilcoxon => "wilcoxon",
            TestMethod::Bootstrap => "bootstrap",
        }
    }
}

impl fmt::Display for TestMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-prop-z" => Ok(TestMethod::TwoPropZ),
            "paired-t" => Ok(TestMethod::PairedT),
            "wilcoxon" => Ok(TestMethod::Wilcoxon),
            "bootstrap" => Ok(TestMethod::Bootstrap),
            other => Err(Error::invalid(format!("unknown test method `{other}`"))),
        }
    }
}

/// Result of a two-sample test.
///
/// `log10_p` is authoritative; `p_two_tailed` is `10^log10_p` and reads 0 once
/// that underflows the scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult<F> {
    pub method: TestMethod,
    pub statistic: F,
    pub p_two_tailed: F,
    pub log10_p: F,
    pub n1: usize,
    pub n2: usize,
    pub alpha: F,
    pub significant: bool,
    /// Zero-variance input; the test could not discriminate and p is 1.
    pub degenerate: bool,
}

impl<F: Real> SignificanceResult<F> {
    pub(crate) fn from_log10(
        method: TestMethod,
        statistic: F,
        log10_p: F,
        n1: usize,
        n2: usize,
        alpha: F,
    ) -> Self {
        let log10_p = log10_p.min(F::zero());
        let p = F::c(10.0).powf(log10_p).min(F::one());
        SignificanceResult {
            method,
            statistic,
            p_two_tailed: p,
            log10_p,
            n1,
            n2,
            alpha,
            significant: p < alpha,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(method: TestMethod, n1: usize, n2: usize, alpha: F) -> Self {
        SignificanceResult {
            degenerate: true,
            ..Self::from_log10(method, F::zero(), F::zero(), n1, n2, alpha)
        }
    }

    /// Re-gates the result at a different significance level.
    pub fn with_alpha(mut self, alpha: F) -> Self {
        self.alpha = alpha;
        self.significant = self.p_two_tailed < alpha;
        self
    }
}

fn check_alpha<F: Real>(alpha: F) -> Result<(), Error> {
    if alpha > F::zero() && alpha < F::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gating_at_point_zero_five() {
        let log10 = 0.053f64.log10();
        let r = SignificanceResult::from_log10(TestMethod::PairedT, 1.9, log10, 300, 300, 0.05);
        assert!((r.p_two_tailed - 0.053).abs() < 1e-15);
        assert!(!r.significant);
        assert!(r.with_alpha(0.1).significant);
    }

    #[test]
    fn underflowing_p_is_still_significant() {
        let r = SignificanceResult::<f64>::from_log10(TestMethod::TwoPropZ, 40.0, -349.1, 300, 300, 0.05);
        assert_eq!(r.p_two_tailed, 0.0);
        assert!(r.significant);
        assert!(r.log10_p.is_finite());
    }

    #[test]
    fn method_tags() {
        for m in [
            TestMethod::TwoPropZ,
            TestMethod::PairedT,
            TestMethod::Wilcoxon,
            TestMethod::Bootstrap,
        ] {
            assert_eq!(m.as_str().parse::<TestMethod>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }
}
