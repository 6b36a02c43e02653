//! Rule statistics: classification rates, relative risk, the nested-count
//! test and its asymptotic power bound.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mining::ClassRule;

/// Relative risk, `+inf` when no positive transaction falls outside the
/// pattern. Ordered totally, with `+inf` above every finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeRisk(f64);

impl RelativeRisk {
    pub const INFINITE: RelativeRisk = RelativeRisk(f64::INFINITY);

    pub fn new(value: f64) -> Self {
        debug_assert!(value >= 0.0, "negative relative risk {value}");
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn exceeds(self, threshold: f64) -> bool {
        self.0 > threshold
    }
}

impl Eq for RelativeRisk {}

impl PartialOrd for RelativeRisk {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RelativeRisk {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for RelativeRisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            return f.write_str("inf");
        }
        match f.precision() {
            Some(p) => write!(f, "{:.*}", p, self.0),
            None => write!(f, "{}", self.0),
        }
    }
}

impl Serialize for RelativeRisk {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for RelativeRisk {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) if v >= 0.0 => Ok(RelativeRisk(v)),
            Repr::Str(s) if s == "inf" => Ok(RelativeRisk::INFINITE),
            _ => Err(serde::de::Error::custom(
                "relative risk must be a non-negative number or \"inf\"",
            )),
        }
    }
}

/// Zero-cell handling for relative-risk estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Plug-in frequencies.
    #[default]
    None,
    /// Add 0.5 to each cell of the 2x2 table. Reporting only.
    Haldane,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleMetrics {
    pub tpr: f64,
    pub tnr: f64,
    pub fpr: f64,
    pub fnr: f64,
    /// Identical to `tpr`.
    pub local_support: f64,
    pub confidence: f64,
    pub relative_risk: RelativeRisk,
}

/// Rates and relative risk of `rule` on a set with `n_pos` positive and
/// `n_neg` negative transactions.
pub fn metrics(rule: &ClassRule, n_pos: u64, n_neg: u64) -> Result<RuleMetrics> {
    if n_pos == 0 {
        return Err(Error::NoPositives);
    }
    if n_neg == 0 {
        return Err(Error::Malformed("no negative transactions".into()));
    }
    if rule.conf_count > n_pos || rule.neg_count() > n_neg {
        return Err(Error::Malformed(format!(
            "counts (supp {}, conf {}) inconsistent with {n_pos} positives / {n_neg} negatives",
            rule.supp_count, rule.conf_count
        )));
    }
    let tpr = rule.conf_count as f64 / n_pos as f64;
    let fpr = rule.neg_count() as f64 / n_neg as f64;
    let confidence = if rule.supp_count == 0 {
        0.0
    } else {
        rule.conf_count as f64 / rule.supp_count as f64
    };
    let relative_risk = relative_risk(
        rule.supp_count,
        rule.conf_count,
        n_pos,
        n_pos + n_neg,
        Smoothing::None,
    )?;
    Ok(RuleMetrics {
        tpr,
        tnr: 1.0 - fpr,
        fpr,
        fnr: 1.0 - tpr,
        local_support: tpr,
        confidence,
        relative_risk,
    })
}

/// `P(Y=1 | pattern) / P(Y=1 | not pattern)` from counts.
///
/// Fails when the pattern matches every transaction. Without smoothing a
/// zero count of unmatched positives gives [`RelativeRisk::INFINITE`].
pub fn relative_risk(
    supp_count: u64,
    conf_count: u64,
    n_pos: u64,
    n: u64,
    smoothing: Smoothing,
) -> Result<RelativeRisk> {
    let matched_pos = conf_count as f64;
    let matched_neg = (supp_count - conf_count) as f64;
    let unmatched_pos = (n_pos - conf_count) as f64;
    let unmatched_neg = (n - supp_count - (n_pos - conf_count)) as f64;
    match smoothing {
        Smoothing::None => {
            if supp_count >= n {
                return Err(Error::UndefinedRelativeRisk(n));
            }
            if n_pos == conf_count {
                return Ok(RelativeRisk::INFINITE);
            }
            let exposed = if supp_count == 0 {
                0.0
            } else {
                matched_pos / supp_count as f64
            };
            let unexposed = unmatched_pos / (n - supp_count) as f64;
            Ok(RelativeRisk::new(exposed / unexposed))
        }
        Smoothing::Haldane => {
            let exposed = (matched_pos + 0.5) / (matched_pos + matched_neg + 1.0);
            let unexposed = (unmatched_pos + 0.5) / (unmatched_pos + unmatched_neg + 1.0);
            Ok(RelativeRisk::new(exposed / unexposed))
        }
    }
}

/// Outcome of the nested-count test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestDecision {
    pub reject: bool,
    pub diff_count: u64,
    pub margin: u64,
    /// Asymptotic lower bound on the power; absent when undefined.
    pub power_lower_bound: Option<f64>,
}

/// Rejects equality of the two joint probabilities iff the sub-pattern's
/// count exceeds the super-pattern's by at least `k`. Under exact equality
/// the difference is identically zero, so the test never rejects a true null.
pub fn count_test(count_small: u64, count_large_pattern: u64, k: u64) -> Result<TestDecision> {
    if k == 0 {
        return Err(Error::InvalidParams("test margin k must be >= 1".into()));
    }
    if count_small < count_large_pattern {
        return Err(Error::NestingViolated {
            small: count_small,
            large: count_large_pattern,
        });
    }
    let diff_count = count_small - count_large_pattern;
    Ok(TestDecision {
        reject: diff_count >= k,
        diff_count,
        margin: k,
        power_lower_bound: None,
    })
}

/// The standardized threshold
/// `u_n = (k/n - pi1) / sqrt((p - p') (1 + p' - p) / n)`.
pub fn power_statistic(n: u64, pi_hat_u: f64, pi_hat_uprime: f64, k: u64, pi1: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::UndefinedPowerBound("n must be >= 1".into()));
    }
    if !(pi1 > 0.0 && pi1 < 1.0) {
        return Err(Error::UndefinedPowerBound(format!("pi1 {pi1} not in (0, 1)")));
    }
    if pi_hat_u <= pi_hat_uprime {
        return Err(Error::UndefinedPowerBound(format!(
            "zero or negative variance: pi_hat(U) {pi_hat_u} <= pi_hat(U') {pi_hat_uprime}"
        )));
    }
    let n = n as f64;
    let d = pi_hat_u - pi_hat_uprime;
    let sd = (d * (1.0 - d) / n).sqrt();
    Ok((k as f64 / n - pi1) / sd)
}

/// Asymptotic lower bound `1 - Phi(u_n)` on the test's power.
pub fn power_bound(n: u64, pi_hat_u: f64, pi_hat_uprime: f64, k: u64, pi1: f64) -> Result<f64> {
    let u = power_statistic(n, pi_hat_u, pi_hat_uprime, k, pi1)?;
    Ok(std_normal_cdf(-u))
}

/// Standard normal CDF via the complementary error function.
///
/// `erfc` here is musl's rational approximation (sub-ulp in double
/// precision), so the result stays accurate deep into both tails and
/// `Phi(-x) = 1 - Phi(x)` holds to rounding.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
