//! Paired observations and their sufficient statistics.

use crate::error::{Error, Result};

/// Threshold beyond which the sample correlation is treated as degenerate.
pub(crate) const CORRELATION_LIMIT: f64 = 1.0 - 1e-12;

/// n paired observations (y1, y2).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pairs: Vec<(f64, f64)>,
}

impl Dataset {
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        Dataset { pairs }
    }

    pub fn from_columns(y1: Vec<f64>, y2: Vec<f64>) -> Result<Self> {
        if y1.len() != y2.len() {
            return Err(Error::domain(format!(
                "column lengths differ: {} vs {}",
                y1.len(),
                y2.len()
            )));
        }
        Ok(Dataset {
            pairs: y1.into_iter().zip(y2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Dataset with the two coordinates interchanged.
    pub fn swapped(&self) -> Self {
        Dataset {
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

/// Sample moments of a dataset, with divisor n - 1, plus the derived
/// correlation coefficient r and standard deviation ratio l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    /// Number of observations.
    pub n: usize,
    /// Degrees of freedom, n - 1.
    pub nu: f64,
    pub mean1: f64,
    pub mean2: f64,
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
    /// Sample correlation coefficient, s12 / sqrt(s11 s22).
    pub r: f64,
    /// Ratio of standard deviations, sqrt(s22 / s11).
    pub l: f64,
}

impl SufficientStats {
    /// Compute moments from data. The posterior is well defined only for
    /// n > 2, nondegenerate variances and |r| strictly inside (-1, 1).
    pub fn from_data(data: &Dataset) -> Result<Self> {
        let n = data.len();
        if n < 3 {
            return Err(Error::TooFewPoints { n, min: 3 });
        }
        let nf = n as f64;
        let (sum1, sum2) = data
            .pairs()
            .iter()
            .fold((0.0, 0.0), |(a, b), &(y1, y2)| (a + y1, b + y2));
        let mean1 = sum1 / nf;
        let mean2 = sum2 / nf;

        let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
        for &(y1, y2) in data.pairs() {
            let d1 = y1 - mean1;
            let d2 = y2 - mean2;
            s11 += d1 * d1;
            s22 += d2 * d2;
            s12 += d1 * d2;
        }
        let nu = nf - 1.0;
        s11 /= nu;
        s22 /= nu;
        s12 /= nu;

        if !(s11 > 0.0) {
            return Err(Error::DegenerateVariance { coordinate: "y1" });
        }
        if !(s22 > 0.0) {
            return Err(Error::DegenerateVariance { coordinate: "y2" });
        }
        let r = s12 / (s11 * s22).sqrt();
        if !(r.abs() < CORRELATION_LIMIT) {
            return Err(Error::PerfectCorrelation { r });
        }
        let l = (s22 / s11).sqrt();
        Ok(SufficientStats {
            n,
            nu,
            mean1,
            mean2,
            s11,
            s22,
            s12,
            r,
            l,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_data() -> Dataset {
        Dataset::from_pairs(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)])
    }

    #[test]
    fn hand_computed_moments() {
        let s = SufficientStats::from_data(&grid_data()).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.nu, 3.0);
        assert!((s.s11 - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.s22 - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.s12 - 1.0 / 3.0).abs() < 1e-15);
        let inv_sqrt5 = 1.0 / 5.0_f64.sqrt();
        assert!((s.r - inv_sqrt5).abs() < 1e-15);
        assert!((s.l - inv_sqrt5).abs() < 1e-15);
        // r is consistent with the raw moments.
        assert!((s.r - s.s12 / (s.s11 * s.s22).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn swap_inverts_l_and_keeps_r() {
        let a = SufficientStats::from_data(&grid_data()).unwrap();
        let b = SufficientStats::from_data(&grid_data().swapped()).unwrap();
        assert!((a.r - b.r).abs() < 1e-15);
        assert!((b.l - 1.0 / a.l).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let too_few = Dataset::from_pairs(vec![(1.0, 2.0), (2.0, 3.0)]);
        assert!(matches!(
            SufficientStats::from_data(&too_few),
            Err(Error::TooFewPoints { n: 2, min: 3 })
        ));

        let flat1 = Dataset::from_pairs(vec![(1.0, 0.0), (1.0, 1.0), (1.0, 2.0)]);
        assert!(matches!(
            SufficientStats::from_data(&flat1),
            Err(Error::DegenerateVariance { coordinate: "y1" })
        ));

        let flat2 = Dataset::from_pairs(vec![(0.0, 5.0), (1.0, 5.0), (2.0, 5.0)]);
        assert!(matches!(
            SufficientStats::from_data(&flat2),
            Err(Error::DegenerateVariance { coordinate: "y2" })
        ));

        let exact_line = Dataset::from_pairs(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 4.0)]);
        assert!(matches!(
            SufficientStats::from_data(&exact_line),
            Err(Error::PerfectCorrelation { .. })
        ));
    }

    #[test]
    fn column_length_mismatch() {
        assert!(Dataset::from_columns(vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
