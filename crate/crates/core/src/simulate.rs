//! Synthetic data generation from the structural model and the interval
//! coverage experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::data::Dataset;
use crate::data::SufficientStats;
use crate::error::{Error, Result};
use crate::estimators::{bootstrap_ci, mix_seed, EstimatorKind};
use crate::posterior::{PosteriorModel, QuadSettings};

/// Parameters of the generating model: true values xi1 ~ N(mu1, tau^2) on
/// the line xi2 = alpha + beta xi1, observed through independent normal
/// errors with standard deviations sigma1 and sigma2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    pub beta: f64,
    pub alpha: f64,
    pub mu1: f64,
    pub tau: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub seed: u64,
}

impl ModelConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::TooFewPoints { n: self.n, min: 3 });
        }
        if !(self.tau > 0.0) {
            return Err(Error::domain(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.sigma1 >= 0.0) || !(self.sigma2 >= 0.0) {
            return Err(Error::domain("error standard deviations must be nonnegative"));
        }
        Ok(())
    }
}

/// Draw one dataset from the model. Deterministic in the seed: draws are
/// made per point in the fixed order (xi1, u1, u2).
pub fn generate_dataset(config: &ModelConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut pairs = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let z_xi: f64 = StandardNormal.sample(&mut rng);
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let xi1 = config.mu1 + config.tau * z_xi;
        let xi2 = config.alpha + config.beta * xi1;
        pairs.push((xi1 + config.sigma1 * z1, xi2 + config.sigma2 * z2));
    }
    Ok(Dataset::from_pairs(pairs))
}

/// One (n, sigma1, sigma2) cell of the coverage experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageSetting {
    pub n: usize,
    pub sigma1: f64,
    pub sigma2: f64,
}

/// Empirical coverage percentages for one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRow {
    pub setting: CoverageSetting,
    /// Shortest posterior probability interval.
    pub posterior_pct: f64,
    /// Basic bootstrap interval of the geometric mean estimate.
    pub gm_pct: f64,
    /// Basic bootstrap interval of the OLS bisector estimate.
    pub olsb_pct: f64,
    /// Basic bootstrap interval of the orthogonal regression estimate.
    pub or_pct: f64,
    /// Datasets dropped because some step failed on them.
    pub excluded: usize,
}

/// Full report of a coverage experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    /// Datasets generated per setting.
    pub datasets: usize,
    /// Bootstrap replicates per dataset.
    pub boot_reps: usize,
    /// Nominal interval level.
    pub level: f64,
    pub seed: u64,
}

/// The simulation grid reported in the coverage study: three sample sizes
/// crossed with five error configurations.
pub fn standard_settings() -> Vec<CoverageSetting> {
    let mut settings = Vec::new();
    for n in [20, 50, 100] {
        for (sigma1, sigma2) in [
            (0.05, 1.00),
            (0.10, 0.50),
            (0.20, 0.20),
            (0.50, 0.10),
            (1.00, 0.05),
        ] {
            settings.push(CoverageSetting { n, sigma1, sigma2 });
        }
    }
    settings
}

/// Outcome of one simulated dataset.
struct DatasetOutcome {
    posterior: bool,
    gm: bool,
    olsb: bool,
    or_: bool,
}

/// Run the coverage experiment: for each setting, generate datasets with
/// beta = 1, alpha = 0, mu1 = 0, tau = 1, then record how often the
/// shortest posterior interval and the three basic bootstrap intervals
/// contain the true slope.
///
/// Per-dataset seeds are derived from (seed, setting index, dataset index),
/// so results do not depend on the parallel schedule. Datasets on which any
/// step fails (degenerate resample, quadrature failure) are excluded and
/// counted per setting.
pub fn coverage_experiment(
    settings: &[CoverageSetting],
    datasets: usize,
    boot_reps: usize,
    level: f64,
    seed: u64,
    quad: QuadSettings,
) -> Result<CoverageReport> {
    if datasets < 50 {
        return Err(Error::domain(format!(
            "coverage experiment needs at least 50 datasets per setting, got {datasets}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level must lie in (0, 1), got {level}")));
    }
    const TRUE_BETA: f64 = 1.0;

    let mut rows = Vec::with_capacity(settings.len());
    for (s_idx, setting) in settings.iter().enumerate() {
        let outcomes: Vec<Option<DatasetOutcome>> = (0..datasets)
            .into_par_iter()
            .map(|d_idx| {
                let ds_seed = mix_seed(mix_seed(seed, s_idx as u64), d_idx as u64);
                let config = ModelConfig {
                    n: setting.n,
                    beta: TRUE_BETA,
                    alpha: 0.0,
                    mu1: 0.0,
                    tau: 1.0,
                    sigma1: setting.sigma1,
                    sigma2: setting.sigma2,
                    seed: ds_seed,
                };
                simulate_one(&config, boot_reps, level, quad)
            })
            .collect();

        let mut row = CoverageRow {
            setting: *setting,
            posterior_pct: 0.0,
            gm_pct: 0.0,
            olsb_pct: 0.0,
            or_pct: 0.0,
            excluded: 0,
        };
        let mut kept = 0usize;
        for outcome in outcomes {
            match outcome {
                Some(o) => {
                    kept += 1;
                    row.posterior_pct += o.posterior as u8 as f64;
                    row.gm_pct += o.gm as u8 as f64;
                    row.olsb_pct += o.olsb as u8 as f64;
                    row.or_pct += o.or_ as u8 as f64;
                }
                None => row.excluded += 1,
            }
        }
        if kept == 0 {
            return Err(Error::Simulation(format!(
                "every dataset failed for setting (n = {}, sigma1 = {}, sigma2 = {})",
                setting.n, setting.sigma1, setting.sigma2
            )));
        }
        let scale = 100.0 / kept as f64;
        row.posterior_pct *= scale;
        row.gm_pct *= scale;
        row.olsb_pct *= scale;
        row.or_pct *= scale;
        rows.push(row);
    }

    Ok(CoverageReport {
        rows,
        datasets,
        boot_reps,
        level,
        seed,
    })
}

fn simulate_one(
    config: &ModelConfig,
    boot_reps: usize,
    level: f64,
    quad: QuadSettings,
) -> Option<DatasetOutcome> {
    const TRUE_BETA: f64 = 1.0;
    let data = generate_dataset(config).ok()?;
    let stats = SufficientStats::from_data(&data).ok()?;
    let model = PosteriorModel::from_stats(&stats, quad).ok()?;
    let interval = model.shortest_interval(level).ok()?;
    let posterior = interval.lower <= TRUE_BETA && TRUE_BETA <= interval.upper;

    let mut contains = [false; 3];
    for (k, kind) in [
        EstimatorKind::GeometricMean,
        EstimatorKind::OlsBisector,
        EstimatorKind::Orthogonal,
    ]
    .into_iter()
    .enumerate()
    {
        let ci_seed = mix_seed(config.seed, 1000 + k as u64);
        let ci = bootstrap_ci(&data, kind, level, boot_reps, ci_seed).ok()?;
        contains[k] = ci.lower <= TRUE_BETA && TRUE_BETA <= ci.upper;
    }
    Some(DatasetOutcome {
        posterior,
        gm: contains[0],
        olsb: contains[1],
        or_: contains[2],
    })
}

impl CoverageReport {
    /// Render as CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,sigma1,sigma2,posterior_pct,gm_pct,olsb_pct,or_pct,excluded\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.1},{:.1},{:.1},{:.1},{}\n",
                row.setting.n,
                row.setting.sigma1,
                row.setting.sigma2,
                row.posterior_pct,
                row.gm_pct,
                row.olsb_pct,
                row.or_pct,
                row.excluded
            ));
        }
        out
    }

    /// Render as JSON with fixed field order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!(
            "  \"datasets\": {},\n  \"boot_reps\": {},\n  \"level\": {},\n  \"seed\": {},\n  \"rows\": [\n",
            self.datasets, self.boot_reps, self.level, self.seed
        ));
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"n\": {}, \"sigma1\": {}, \"sigma2\": {}, \"posterior_pct\": {:.1}, \
                 \"gm_pct\": {:.1}, \"olsb_pct\": {:.1}, \"or_pct\": {:.1}, \"excluded\": {}}}{}\n",
                row.setting.n,
                row.setting.sigma1,
                row.setting.sigma2,
                row.posterior_pct,
                row.gm_pct,
                row.olsb_pct,
                row.or_pct,
                row.excluded,
                if i + 1 < self.rows.len() { "," } else { "" }
            ));
        }
        out.push_str("  ]\n}\n");
        out
    }
}
