//! Output rendering. Every floating-point number is emitted with exactly
//! 10 significant digits so repeated runs diff cleanly at a precision
//! below the quadrature tolerances.

use eiv_core::estimators::{AgreementStats, BootstrapCI, LimitVariants, SlopeEstimates};
use eiv_core::posterior::{GridRow, IntervalEstimate};
use eiv_core::Dataset;

/// 10 significant digits, scientific notation; a valid JSON number.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    format!("{x:.9e}")
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn error_json(kind: &str, message: &str) -> String {
    format!(
        "{{\"error\": {{\"kind\": {}, \"message\": {}}}}}\n",
        json_string(kind),
        json_string(message)
    )
}

fn interval_json(iv: &IntervalEstimate) -> String {
    format!(
        "{{\"level\": {}, \"lower\": {}, \"upper\": {}, \"width_unimodal\": {}}}",
        num(iv.level),
        num(iv.lower),
        num(iv.upper),
        iv.width_unimodal
    )
}

/// The `fit` report: sample summaries, median, shortest interval and the
/// plug-in intercept mean2 - median * mean1.
pub struct FitReport {
    pub n: usize,
    pub r: f64,
    pub l: f64,
    pub median: f64,
    pub interval: IntervalEstimate,
    pub plugin_intercept: f64,
}

pub fn fit_json(fit: &FitReport) -> String {
    format!(
        "{{\n  \"n\": {},\n  \"r\": {},\n  \"l\": {},\n  \"median\": {},\n  \"interval\": {},\n  \"plugin_intercept\": {}\n}}\n",
        fit.n,
        num(fit.r),
        num(fit.l),
        num(fit.median),
        interval_json(&fit.interval),
        num(fit.plugin_intercept)
    )
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("beta,theta,density,cdf\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            num(row.beta),
            num(row.theta),
            num(row.density),
            num(row.cdf)
        ));
    }
    out
}

pub fn grid_json(rows: &[GridRow]) -> String {
    let mut out = String::from("{\n  \"rows\": [\n");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"beta\": {}, \"theta\": {}, \"density\": {}, \"cdf\": {}}}{}\n",
            num(row.beta),
            num(row.theta),
            num(row.density),
            num(row.cdf),
            if i + 1 < rows.len() { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

fn bootstrap_json(ci: &BootstrapCI) -> String {
    format!(
        "{{\"estimator\": {}, \"estimate\": {}, \"lower\": {}, \"upper\": {}, \"level\": {}, \
         \"replicates\": {}, \"seed\": {}, \"redraws\": {}}}",
        json_string(ci.estimator.name()),
        num(ci.estimate),
        num(ci.lower),
        num(ci.upper),
        num(ci.level),
        ci.replicates,
        ci.seed,
        ci.redraws
    )
}

pub fn estimators_json(
    n: usize,
    slopes: &SlopeEstimates,
    limits: Option<&LimitVariants>,
    cis: &[BootstrapCI],
) -> String {
    let limits_json = match limits {
        Some(v) => format!(
            "{{\"olsb_zero\": {}, \"olsb_inf\": {}, \"or_zero\": {}, \"or_inf\": {}}}",
            num(v.olsb_zero),
            num(v.olsb_inf),
            num(v.or_zero),
            num(v.or_inf)
        ),
        None => "null".to_string(),
    };
    let mut out = format!(
        "{{\n  \"n\": {},\n  \"slopes\": {{\"b1\": {}, \"b2\": {}, \"geometric_mean\": {}, \
         \"ols_bisector\": {}, \"orthogonal\": {}}},\n  \"limits\": {},\n  \"bootstrap\": [\n",
        n,
        num(slopes.b1),
        num(slopes.b2),
        num(slopes.geometric_mean),
        num(slopes.ols_bisector),
        num(slopes.orthogonal),
        limits_json
    );
    for (i, ci) in cis.iter().enumerate() {
        out.push_str(&format!(
            "    {}{}\n",
            bootstrap_json(ci),
            if i + 1 < cis.len() { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn estimators_csv(
    slopes: &SlopeEstimates,
    limits: Option<&LimitVariants>,
    cis: &[BootstrapCI],
) -> String {
    let mut out = String::from("quantity,value\n");
    out.push_str(&format!("b1,{}\n", num(slopes.b1)));
    out.push_str(&format!("b2,{}\n", num(slopes.b2)));
    out.push_str(&format!("geometric_mean,{}\n", num(slopes.geometric_mean)));
    out.push_str(&format!("ols_bisector,{}\n", num(slopes.ols_bisector)));
    out.push_str(&format!("orthogonal,{}\n", num(slopes.orthogonal)));
    if let Some(v) = limits {
        out.push_str(&format!("olsb_zero,{}\n", num(v.olsb_zero)));
        out.push_str(&format!("olsb_inf,{}\n", num(v.olsb_inf)));
        out.push_str(&format!("or_zero,{}\n", num(v.or_zero)));
        out.push_str(&format!("or_inf,{}\n", num(v.or_inf)));
    }
    out.push_str("estimator,estimate,lower,upper,level,replicates,redraws\n");
    for ci in cis {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            ci.estimator.name(),
            num(ci.estimate),
            num(ci.lower),
            num(ci.upper),
            num(ci.level),
            ci.replicates,
            ci.redraws
        ));
    }
    out
}

pub fn agreement_json(stats: &AgreementStats, data: &Dataset) -> String {
    let mut out = format!(
        "{{\n  \"stats\": {{\"mean_diff\": {}, \"sd_diff\": {}, \"loa_lower\": {}, \
         \"loa_upper\": {}, \"cov_diff_mean\": {}}},\n  \"points\": [\n",
        num(stats.mean_diff),
        num(stats.sd_diff),
        num(stats.loa_lower),
        num(stats.loa_upper),
        num(stats.cov_diff_mean)
    );
    let n = data.len();
    for (i, &(y1, y2)) in data.pairs().iter().enumerate() {
        out.push_str(&format!(
            "    {{\"mean\": {}, \"diff\": {}}}{}\n",
            num(0.5 * (y1 + y2)),
            num(y2 - y1),
            if i + 1 < n { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn agreement_csv(stats: &AgreementStats, data: &Dataset) -> String {
    let mut out = String::from("quantity,value\n");
    out.push_str(&format!("mean_diff,{}\n", num(stats.mean_diff)));
    out.push_str(&format!("sd_diff,{}\n", num(stats.sd_diff)));
    out.push_str(&format!("loa_lower,{}\n", num(stats.loa_lower)));
    out.push_str(&format!("loa_upper,{}\n", num(stats.loa_upper)));
    out.push_str(&format!("cov_diff_mean,{}\n", num(stats.cov_diff_mean)));
    out.push_str("mean,diff\n");
    for &(y1, y2) in data.pairs() {
        out.push_str(&format!("{},{}\n", num(0.5 * (y1 + y2)), num(y2 - y1)));
    }
    out
}
