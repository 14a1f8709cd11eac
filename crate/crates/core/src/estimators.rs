//! Classical point estimators of the slope, basic bootstrap confidence
//! intervals, and Bland-Altman method-comparison statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::data::{Dataset, SufficientStats};
use crate::error::{Error, Result};
use crate::specfun::{self, Tolerance};

/// The five point estimates of the slope, all in units of y2/y1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimates {
    /// OLS slope of y2 on y1, S12/S11.
    pub b1: f64,
    /// OLS slope of y1 on y2 expressed in y2/y1 units, S22/S12.
    pub b2: f64,
    /// sign(S12) sqrt(b1 b2); equal in magnitude to l.
    pub geometric_mean: f64,
    /// tan((arctan b1 + arctan b2)/2), the angle bisector of the two OLS lines.
    pub ols_bisector: f64,
    /// B + sign(S12) sqrt(B^2 + 1) with B = (b2 - 1/b1)/2.
    pub orthogonal: f64,
}

/// Scale-change limits of the bisector and orthogonal estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitVariants {
    /// Bisector limit as the y2 scale shrinks: harmonic mean of b1, b2.
    pub olsb_zero: f64,
    /// Bisector limit as the y2 scale grows: arithmetic mean of b1, b2.
    pub olsb_inf: f64,
    /// Orthogonal limit as the y2 scale shrinks: b2.
    pub or_zero: f64,
    /// Orthogonal limit as the y2 scale grows: b1.
    pub or_inf: f64,
}

/// A basic bootstrap confidence interval for one named estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapCI {
    pub estimator: EstimatorKind,
    /// Point estimate on the original data.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Number of resamples that were redrawn because the estimator was
    /// undefined on them.
    pub redraws: usize,
}

/// Interchange-invariant point estimators resampled in the bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    GeometricMean,
    OlsBisector,
    Orthogonal,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::GeometricMean => "geometric_mean",
            EstimatorKind::OlsBisector => "ols_bisector",
            EstimatorKind::Orthogonal => "orthogonal",
        }
    }

    /// Evaluate on raw second moments; None when undefined (zero or
    /// nonfinite covariance or variances).
    fn evaluate(self, s11: f64, s22: f64, s12: f64) -> Option<f64> {
        if !(s11 > 0.0) || !(s22 > 0.0) || s12 == 0.0 || !s12.is_finite() {
            return None;
        }
        let b1 = s12 / s11;
        let b2 = s22 / s12;
        let v = match self {
            EstimatorKind::GeometricMean => s12.signum() * (b1 * b2).sqrt(),
            EstimatorKind::OlsBisector => (0.5 * (b1.atan() + b2.atan())).tan(),
            EstimatorKind::Orthogonal => {
                let b = 0.5 * (b2 - 1.0 / b1);
                b + s12.signum() * (b * b + 1.0).sqrt()
            }
        };
        v.is_finite().then_some(v)
    }
}

/// All five slope estimates from the sample moments.
///
/// When S12 = 0 only b1 is defined; it travels inside the
/// [`Error::ZeroCovariance`] error.
pub fn slope_estimates(stats: &SufficientStats) -> Result<SlopeEstimates> {
    let b1 = stats.s12 / stats.s11;
    if stats.s12 == 0.0 {
        return Err(Error::ZeroCovariance { b1 });
    }
    let b2 = stats.s22 / stats.s12;
    let sign = stats.s12.signum();
    let b = 0.5 * (b2 - 1.0 / b1);
    Ok(SlopeEstimates {
        b1,
        b2,
        geometric_mean: sign * (b1 * b2).sqrt(),
        ols_bisector: (0.5 * (b1.atan() + b2.atan())).tan(),
        orthogonal: b + sign * (b * b + 1.0).sqrt(),
    })
}

/// Limits of the bisector and orthogonal estimates under extreme rescaling
/// of the y2 coordinate.
pub fn limit_variants(b1: f64, b2: f64) -> Result<LimitVariants> {
    if !(b1 > 0.0) || !(b2 > 0.0) {
        return Err(Error::domain(format!(
            "limit variants require positive slopes, got b1 = {b1}, b2 = {b2}"
        )));
    }
    Ok(LimitVariants {
        olsb_zero: 2.0 / (1.0 / b1 + 1.0 / b2),
        olsb_inf: 0.5 * (b1 + b2),
        or_zero: b2,
        or_inf: b1,
    })
}

/// Second moments of a pair-index resample, divisor n - 1.
fn resample_moments(data: &Dataset, rng: &mut ChaCha12Rng) -> (f64, f64, f64) {
    let pairs = data.pairs();
    let n = pairs.len();
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    let mut idx = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.random_range(0..n);
        idx.push(k);
        sum1 += pairs[k].0;
        sum2 += pairs[k].1;
    }
    let nf = n as f64;
    let (m1, m2) = (sum1 / nf, sum2 / nf);
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for &k in &idx {
        let d1 = pairs[k].0 - m1;
        let d2 = pairs[k].1 - m2;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    (s11 / (nf - 1.0), s22 / (nf - 1.0), s12 / (nf - 1.0))
}

/// splitmix64, used to derive independent per-replicate seeds.
pub(crate) fn mix_seed(state: u64, salt: u64) -> u64 {
    let mut z = state
        .wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Basic bootstrap confidence interval from pair resampling.
///
/// The interval is [2 est - q(1 - alpha/2), 2 est - q(alpha/2)] over the
/// replicate estimates. Replicates are seeded individually from the master
/// seed and the replicate index, so the result is deterministic and
/// independent of evaluation order. A resample on which the estimator is
/// undefined is redrawn (with the redraw count reported); if more than 10%
/// of all draws fail the estimator is declared unusable on this data.
pub fn bootstrap_ci(
    data: &Dataset,
    estimator: EstimatorKind,
    level: f64,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapCI> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if replicates < 100 {
        return Err(Error::domain(format!(
            "bootstrap needs at least 100 replicates, got {replicates}"
        )));
    }
    let n = data.len();
    if n < 3 {
        return Err(Error::TooFewPoints { n, min: 3 });
    }

    let stats = SufficientStats::from_data(data)?;
    let estimate = estimator
        .evaluate(stats.s11, stats.s22, stats.s12)
        .ok_or(Error::ZeroCovariance {
            b1: stats.s12 / stats.s11,
        })?;

    const MAX_ATTEMPTS_PER_REPLICATE: u64 = 64;
    let mut values = Vec::with_capacity(replicates);
    let mut redraws = 0usize;
    for rep in 0..replicates {
        let mut value = None;
        for attempt in 0..MAX_ATTEMPTS_PER_REPLICATE {
            let rep_seed = mix_seed(mix_seed(seed, rep as u64), attempt);
            let mut rng = ChaCha12Rng::seed_from_u64(rep_seed);
            let (s11, s22, s12) = resample_moments(data, &mut rng);
            match estimator.evaluate(s11, s22, s12) {
                Some(v) => {
                    value = Some(v);
                    break;
                }
                None => redraws += 1,
            }
        }
        match value {
            Some(v) => values.push(v),
            None => {
                return Err(Error::EstimatorUndefined {
                    failed: redraws,
                    attempts: replicates + redraws,
                })
            }
        }
        if redraws * 10 > replicates {
            return Err(Error::EstimatorUndefined {
                failed: redraws,
                attempts: values.len() + redraws,
            });
        }
    }

    values.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    let q_lo = order_statistic(&values, 0.5 * alpha);
    let q_hi = order_statistic(&values, 1.0 - 0.5 * alpha);
    Ok(BootstrapCI {
        estimator,
        estimate,
        lower: 2.0 * estimate - q_hi,
        upper: 2.0 * estimate - q_lo,
        level,
        replicates,
        seed,
        redraws,
    })
}

/// Quantile of sorted replicate values at rank (R + 1) p, interpolating
/// between order statistics; exact at the conventional (R + 1) p integers.
fn order_statistic(sorted: &[f64], p: f64) -> f64 {
    let r = sorted.len();
    let h = (r + 1) as f64 * p;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= r as f64 {
        return sorted[r - 1];
    }
    let k = h.floor() as usize; // 1-based lower rank
    let frac = h - k as f64;
    sorted[k - 1] + frac * (sorted[k] - sorted[k - 1])
}

/// Bland-Altman agreement statistics for the differences d = y2 - y1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementStats {
    /// Mean difference (bias), in y units.
    pub mean_diff: f64,
    /// Standard deviation of the differences, divisor n - 1.
    pub sd_diff: f64,
    /// mean_diff - 1.96 sd_diff.
    pub loa_lower: f64,
    /// mean_diff + 1.96 sd_diff.
    pub loa_upper: f64,
    /// Sample covariance of the differences with the pair means; nonzero
    /// covariance signals proportional disagreement.
    pub cov_diff_mean: f64,
}

/// The conventional 95% factor for limits of agreement.
const LOA_FACTOR: f64 = 1.96;

pub fn agreement_stats(data: &Dataset) -> Result<AgreementStats> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    let nf = n as f64;
    let (mut sum_d, mut sum_m) = (0.0, 0.0);
    for &(y1, y2) in data.pairs() {
        sum_d += y2 - y1;
        sum_m += 0.5 * (y1 + y2);
    }
    let mean_d = sum_d / nf;
    let mean_m = sum_m / nf;
    let (mut var_d, mut cov_dm) = (0.0, 0.0);
    for &(y1, y2) in data.pairs() {
        let dd = (y2 - y1) - mean_d;
        let dm = 0.5 * (y1 + y2) - mean_m;
        var_d += dd * dd;
        cov_dm += dd * dm;
    }
    var_d /= nf - 1.0;
    cov_dm /= nf - 1.0;
    let sd_diff = var_d.sqrt();
    Ok(AgreementStats {
        mean_diff: mean_d,
        sd_diff,
        loa_lower: mean_d - LOA_FACTOR * sd_diff,
        loa_upper: mean_d + LOA_FACTOR * sd_diff,
        cov_diff_mean: cov_dm,
    })
}

/// A point estimate with a t confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Standard t confidence intervals for the two OLS slopes, both reported
/// in y2/y1 units; the reverse regression interval is mapped through the
/// reciprocal.
pub fn ols_slope_intervals(
    stats: &SufficientStats,
    level: f64,
) -> Result<(OlsInterval, OlsInterval)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if stats.n < 3 {
        return Err(Error::TooFewPoints {
            n: stats.n,
            min: 3,
        });
    }
    if stats.s12 == 0.0 {
        return Err(Error::ZeroCovariance {
            b1: stats.s12 / stats.s11,
        });
    }
    let dof = (stats.n - 2) as f64;
    let t = student_t_quantile(0.5 + 0.5 * level, dof)?;
    let spread = ((1.0 - stats.r * stats.r) / dof).sqrt();

    // Forward regression: slope b1 = r l, standard error l spread.
    let b1 = stats.s12 / stats.s11;
    let half1 = t * stats.l * spread;

    // Reverse regression of y1 on y2: slope c = r / l with its own t
    // interval; the slope in y2/y1 units is 1/c, so the endpoints invert.
    let c = stats.s12 / stats.s22;
    let half_c = t * spread / stats.l;
    let (c_lo, c_hi) = (c - half_c, c + half_c);
    if c_lo <= 0.0 && c_hi >= 0.0 {
        return Err(Error::domain(
            "reverse OLS interval crosses zero; its reciprocal is unbounded".to_string(),
        ));
    }
    let b2 = stats.s22 / stats.s12;
    Ok((
        OlsInterval {
            estimate: b1,
            lower: b1 - half1,
            upper: b1 + half1,
        },
        OlsInterval {
            estimate: b2,
            lower: 1.0 / c_hi,
            upper: 1.0 / c_lo,
        },
    ))
}

/// Student t quantile by bisection on the CDF expressed through the
/// incomplete beta function.
fn student_t_quantile(p: f64, nu: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("t quantile needs p in (0, 1), got {p}")));
    }
    let tol = Tolerance::default();
    let cdf = |t: f64| -> Result<f64> {
        let z = nu / (nu + t * t);
        let tail = 0.5 * specfun::reg_inc_beta(z, 0.5 * nu, 0.5, &tol)?;
        Ok(if t >= 0.0 { 1.0 - tail } else { tail })
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while cdf(lo)? > p {
        lo *= 2.0;
    }
    while cdf(hi)? < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
