//! Binomial statistics: Wilson score intervals, exact two-sided binomial
//! tests and the 2×2 chi-square homogeneity test.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "significance level {alpha} is outside (0, 1)"
        )))
    }
}

/// Two-sided standard normal critical value `z_{α/2}`.
pub fn z_critical(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(1.0 - alpha / 2.0))
}

/// Wilson score interval for `successes` out of `total` at confidence
/// `1 − alpha`. The bounds always bracket the point estimate.
pub fn wilson_interval(successes: u64, total: u64, alpha: f64) -> Result<(f64, f64)> {
    if total == 0 {
        return Err(Error::EmptyRecord);
    }
    if successes > total {
        return Err(Error::InvalidArgument(format!(
            "{successes} successes out of {total} trials"
        )));
    }
    let z = z_critical(alpha)?;
    let n = total as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let margin = z * ((p_hat * (1.0 - p_hat) + z2 / (4.0 * n)) / n).sqrt();
    let low = ((center - margin) / denom).clamp(0.0, 1.0).min(p_hat);
    let high = ((center + margin) / denom).clamp(0.0, 1.0).max(p_hat);
    Ok((low, high))
}

fn ln_pmf(k: u64, n: u64, ln_p: f64, ln_q: f64) -> f64 {
    ln_binomial(n, k) + k as f64 * ln_p + (n - k) as f64 * ln_q
}

/// Exact two-sided binomial test of `H₀: P(success) = p0`: the total
/// probability of all outcomes no more likely than the observed one.
pub fn binomial_test_two_sided(successes: u64, total: u64, p0: f64) -> Result<f64> {
    if total == 0 {
        return Err(Error::EmptyRecord);
    }
    if successes > total {
        return Err(Error::InvalidArgument(format!(
            "{successes} successes out of {total} trials"
        )));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidArgument(format!("null proportion {p0}")));
    }
    let (ln_p, ln_q) = (p0.ln(), (1.0 - p0).ln());
    // relative slack so outcomes tied with the observed one count as extreme
    let cutoff = ln_pmf(successes, total, ln_p, ln_q) + 1e-7f64.ln_1p();
    let mut pvalue = 0.0;
    for k in 0..=total {
        let l = ln_pmf(k, total, ln_p, ln_q);
        if l <= cutoff {
            pvalue += l.exp();
        }
    }
    Ok(pvalue.min(1.0))
}

/// Pearson chi-square test that two binomial samples share one success rate.
/// Returns the p-value (1 degree of freedom, no continuity correction).
pub fn chi_square_homogeneity(a_success: u64, a_total: u64, b_success: u64, b_total: u64) -> Result<f64> {
    if a_total == 0 || b_total == 0 {
        return Err(Error::EmptyRecord);
    }
    let total = (a_total + b_total) as f64;
    let success = (a_success + b_success) as f64;
    let failure = total - success;
    if success == 0.0 || failure == 0.0 {
        return Ok(1.0);
    }
    let cells = [
        (a_success as f64, a_total as f64 * success / total),
        ((a_total - a_success) as f64, a_total as f64 * failure / total),
        (b_success as f64, b_total as f64 * success / total),
        ((b_total - b_success) as f64, b_total as f64 * failure / total),
    ];
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let chi = ChiSquared::new(1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(chi.sf(stat))
}
