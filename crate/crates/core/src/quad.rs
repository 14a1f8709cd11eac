//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! 15-point Kronrod rule with embedded 7-point Gauss rule for the error
//! estimate, refined by bisecting whichever segment currently carries the
//! largest estimated error. All nodes are strictly interior, so integrands
//! that diverge (or are undefined) at the interval endpoints are never
//! evaluated there.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae for the interval [-1, 1]; the odd-indexed entries plus
// the origin are the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

/// One evaluated segment: Kronrod value plus error estimate.
#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Apply the 15-point Kronrod rule to one segment.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod_sum = WGK[7] * f_center;
    let mut gauss_sum = WG[3] * f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod_sum += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss_sum += WG[j / 2] * (f1 + f2);
        }
    }

    let value = kronrod_sum * half;
    let error = ((kronrod_sum - gauss_sum) * half).abs();
    Segment { a, b, value, error }
}

/// Integrate `f` over (a, b), never sampling the endpoints.
///
/// `presplit` lists interior points at which the interval is divided before
/// adaptation starts; points outside (a, b) are ignored. The tolerance test
/// is `total_error <= max(abs_tol, rel_tol * |integral|)`; failing it after
/// `max_subdiv` refinements is a [`Error::QuadratureFailure`].
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    presplit: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<f64> {
    if !(a < b) {
        if a == b {
            return Ok(0.0);
        }
        return Err(Error::domain(format!(
            "integration bounds must satisfy a <= b, got ({a}, {b})"
        )));
    }

    let mut cuts: Vec<f64> = presplit
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.insert(0, a);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let seg = kronrod(&f, w[0], w[1]);
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = 0;
    loop {
        let tol = abs_tol.max(rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if subdivisions >= max_subdiv {
            return Err(Error::QuadratureFailure {
                error: total_err,
                tolerance: tol,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment no longer representable; accept its estimate as is.
            let tol = abs_tol.max(rel_tol * total.abs());
            if total_err - worst.error <= tol {
                return Ok(total);
            }
            return Err(Error::QuadratureFailure {
                error: total_err,
                tolerance: tol,
                subdivisions,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        integrate(f, a, b, &[], 1e-12, 1e-14, 200).unwrap()
    }

    #[test]
    fn polynomial_exactness() {
        assert!((quad(|x| x * x, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((quad(|x| x.powi(7) - 3.0 * x, -1.0, 2.0) - (255.0 / 8.0 - 4.5)).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        assert!((quad(f64::sin, 0.0, std::f64::consts::PI) - 2.0).abs() < 1e-13);
        assert!((quad(|x| (-x * x).exp(), -8.0, 8.0) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_never_evaluated() {
        // 1/sqrt(x) integrates to 2 over (0, 1); x = 0 would be infinite.
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &[], 1e-10, 1e-12, 2000).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn presplit_points_used() {
        // |x| has a kink at 0; a presplit there makes each side polynomial.
        let v = integrate(|x| x.abs(), -1.0, 2.0, &[0.0], 1e-14, 1e-15, 10).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
        // Presplits outside the interval are ignored.
        let v = integrate(|x| x, 0.0, 1.0, &[-3.0, 7.0], 1e-14, 1e-15, 10).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_invalid_bounds() {
        assert_eq!(integrate(|x| x, 2.0, 2.0, &[], 1e-10, 1e-12, 10).unwrap(), 0.0);
        assert!(integrate(|x| x, 3.0, 2.0, &[], 1e-10, 1e-12, 10).is_err());
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let res = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &[], 1e-14, 0.0, 3);
        assert!(matches!(res, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn student_t_density_normalizes() {
        // Full-line normalization through t = sqrt(nu) tan(theta), which
        // folds the polynomial tails into a finite interval. For nu = 2 and
        // 3 the mass outside [-50, 50] is 4e-4 and 2e-5, so the invariant
        // must be checked on the whole line.
        for nu in [2.0_f64, 3.0, 19.0, 39.0] {
            let scale = nu.sqrt();
            let v = integrate(
                |theta| {
                    let t = scale * theta.tan();
                    let c = theta.cos();
                    crate::specfun::student_t_pdf(t, nu).unwrap() * scale / (c * c)
                },
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                &[0.0],
                1e-12,
                1e-14,
                400,
            )
            .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "nu = {nu}: {v}");
        }
        // On [-50, 50] the nu >= 19 tails are below double precision.
        for nu in [19.0, 39.0] {
            let v = integrate(
                |t| crate::specfun::student_t_pdf(t, nu).unwrap(),
                -50.0,
                50.0,
                &[0.0],
                1e-12,
                1e-14,
                400,
            )
            .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "nu = {nu}: {v}");
        }
    }
}
