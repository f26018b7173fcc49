//! Standard normal density, distribution function, quantile function, and
//! the constants derived from them.
//!
//! The distribution function is evaluated through a rational Chebyshev
//! approximation of the complementary error function (W. J. Cody's CALERF
//! scheme), giving absolute error below 1e-15 on [-8, 8]; the documented
//! contract is <= 1e-12 there. Outside [-8, 8] the returned values are
//! within 7e-16 of {0, 1} and tail probabilities below 1e-15 are not
//! meaningfully distinguished. The quantile function uses Acklam's rational
//! initial approximation refined by two Halley corrector steps against the
//! distribution function.

// Coefficient tables are kept exactly as published.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::OnceLock;

/// 1/sqrt(2*pi)
pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.39894228040143267793994605993438187;
/// 1/sqrt(pi)
const FRAC_1_SQRT_PI: f64 = 0.56418958354775628694807945156077259;

// ---------------------------------------------------------------------------
// Complementary error function (Cody's rational approximations).
// ---------------------------------------------------------------------------

const CODY_THRESHOLD: f64 = 0.46875;

const CODY_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const CODY_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const CODY_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const CODY_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const CODY_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const CODY_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// erf(x) for |x| <= CODY_THRESHOLD.
fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = CODY_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + CODY_A[i]) * z;
        den = (den + CODY_B[i]) * z;
    }
    x * (num + CODY_A[3]) / (den + CODY_B[3])
}

/// erfc(y) for y > CODY_THRESHOLD.
fn erfc_large(y: f64) -> f64 {
    let raw = if y <= 4.0 {
        let mut num = CODY_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + CODY_C[i]) * y;
            den = (den + CODY_D[i]) * y;
        }
        (num + CODY_C[7]) / (den + CODY_D[7])
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut num = CODY_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + CODY_P[i]) * z;
            den = (den + CODY_Q[i]) * z;
        }
        let poly = z * (num + CODY_P[4]) / (den + CODY_Q[4]);
        (FRAC_1_SQRT_PI - poly) / y
    } else {
        // erfc underflows past ~26.5; the normal tail is already < 1e-300.
        return 0.0;
    };
    // Split exp(-y^2) as exp(-ysq^2)*exp(-del) with ysq a 1/16-grid value,
    // which keeps the large-argument exponential accurate.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * raw
}

pub(crate) fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= CODY_THRESHOLD {
        1.0 - erf_small(x)
    } else if x < 0.0 {
        2.0 - erfc_large(y)
    } else {
        erfc_large(y)
    }
}

// ---------------------------------------------------------------------------
// Density, distribution function, quantile function.
// ---------------------------------------------------------------------------

pub(crate) fn pdf_unchecked(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub(crate) fn cdf_unchecked(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density at `x`.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "density argument must be finite, got {x}"
        )));
    }
    Ok(pdf_unchecked(x))
}

/// Standard normal distribution function at `x`.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "distribution argument must be finite, got {x}"
        )));
    }
    Ok(cdf_unchecked(x))
}

/// Acklam's rational approximation to the standard normal quantile
/// (absolute error below 1.2e-9 before refinement).
fn quantile_initial(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239e0,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838e0,
        -2.549732539343734e0,
        4.374664141464968e0,
        2.938163982698783e0,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996e0,
        3.754408661907416e0,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Standard normal quantile at `p`, for `p` in the open interval (0, 1).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile argument must lie in (0, 1), got {p}"
        )));
    }
    let mut x = quantile_initial(p);
    // Halley corrector steps against the distribution function.
    for _ in 0..2 {
        let err = cdf_unchecked(x) - p;
        let density = pdf_unchecked(x);
        if density == 0.0 {
            break;
        }
        let u = err / density;
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Derived constants.
// ---------------------------------------------------------------------------

/// The MAD rescaling constant Phi^-1(3/4), cached after first evaluation.
pub(crate) fn mad_consistency() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| std_normal_quantile(0.75).expect("0.75 lies in (0, 1)"))
}

/// Constants of the standard normal distribution used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalConstants {
    /// Phi^-1(3/4): divides the MAD to make it consistent for sigma.
    pub mad_consistency: f64,
    /// pi/2: asymptotic variance of sqrt(n) times the sample median.
    pub median_avar: f64,
    /// Density at the origin, 1/sqrt(2*pi).
    pub density_at_zero: f64,
}

impl NormalConstants {
    pub fn evaluate() -> Self {
        NormalConstants {
            mad_consistency: mad_consistency(),
            median_avar: FRAC_PI_2,
            density_at_zero: FRAC_1_SQRT_2PI,
        }
    }
}

/// sqrt(2n/pi) * Phi^-1(3/4): the factor that maps the pivot statistic onto
/// an asymptotically standard normal scale.
pub fn scaling_constant(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("scaling constant requires n >= 1"));
    }
    Ok((2.0 * n as f64 / PI).sqrt() * mad_consistency())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson integration of the density: the independent oracle
    /// for the distribution function.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        fn step(
            f: &dyn Fn(f64) -> f64,
            lo: (f64, f64),
            hi: (f64, f64),
            whole: f64,
            eps: f64,
            depth: u32,
        ) -> f64 {
            let (a, fa) = lo;
            let (b, fb) = hi;
            let m = 0.5 * (a + b);
            let fm = f(m);
            let left = (m - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + m)) + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * f(0.5 * (m + b)) + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                step(f, lo, (m, fm), left, eps / 2.0, depth - 1)
                    + step(f, (m, fm), hi, right, eps / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (fa + 4.0 * f(m) + fb);
        step(f, (a, fa), (b, fb), whole, 1e-15, 48)
    }

    /// Oracle distribution function: integrate the density from far in the
    /// left tail (the mass below -12 is ~1.8e-33).
    fn cdf_oracle(x: f64) -> f64 {
        simpson(&|t| pdf_unchecked(t), -12.0, x)
    }

    /// Bisection on the distribution function to 1e-14: the independent
    /// oracle for the quantile function.
    fn quantile_oracle(p: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if cdf_unchecked(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pdf_at_zero_is_peak_value() {
        assert!((std_normal_pdf(0.0).unwrap() - 0.3989422804014327).abs() < 1e-15);
    }

    #[test]
    fn pdf_is_symmetric() {
        assert_eq!(std_normal_pdf(1.0).unwrap(), std_normal_pdf(-1.0).unwrap());
        assert_eq!(
            std_normal_pdf(2.75).unwrap(),
            std_normal_pdf(-2.75).unwrap()
        );
    }

    #[test]
    fn pdf_at_two_matches_high_precision_value() {
        // exp(-2)/sqrt(2*pi) to 30 significant digits:
        // 0.0539909665131880519505642004107
        assert!((std_normal_pdf(2.0).unwrap() - 0.05399096651318805).abs() < 1e-14);
    }

    #[test]
    fn pdf_rejects_non_finite() {
        assert!(matches!(std_normal_pdf(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(
            std_normal_pdf(f64::INFINITY),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
    }

    #[test]
    fn cdf_tail_symmetry() {
        for x in [0.3, 0.9, 1.7, 2.4, 3.3, 5.0, 7.5] {
            let sum = std_normal_cdf(x).unwrap() + std_normal_cdf(-x).unwrap();
            assert!((sum - 1.0).abs() < 1e-14, "x={x}: sum={sum}");
        }
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        // Includes Phi(0.6744897501960817) = 3/4, the MAD consistency point.
        for x in [
            -6.0,
            -3.5,
            -1.0,
            -0.2,
            0.0,
            0.6744897501960817,
            1.5,
            2.0,
            4.0,
            6.0,
        ] {
            let got = std_normal_cdf(x).unwrap();
            let want = cdf_oracle(x);
            assert!(
                (got - want).abs() < 1e-12,
                "x={x}: got={got}, oracle={want}"
            );
        }
        assert!((std_normal_cdf(0.6744897501960817).unwrap() - 0.75).abs() < 1e-10);
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(matches!(
            std_normal_cdf(f64::NEG_INFINITY),
            Err(Error::Domain(_))
        ));
        assert!(matches!(std_normal_cdf(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn cdf_monotone_on_dense_grid() {
        let mut prev = 0.0;
        for i in 0..10_000 {
            let x = -8.0 + 16.0 * i as f64 / 9_999.0;
            let c = std_normal_cdf(x).unwrap();
            assert!(c >= prev, "not monotone at x={x}");
            prev = c;
        }
    }

    #[test]
    fn cdf_derivative_matches_pdf() {
        let h = 1e-5;
        for i in 0..10_000 {
            let x = -8.0 + 16.0 * i as f64 / 9_999.0;
            let slope = (cdf_unchecked(x + h) - cdf_unchecked(x - h)) / (2.0 * h);
            let density = pdf_unchecked(x);
            assert!(
                (slope - density).abs() < 1e-6,
                "x={x}: slope={slope}, pdf={density}"
            );
        }
    }

    #[test]
    fn quantile_at_half_is_zero() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_matches_bisection_oracle() {
        let q75 = std_normal_quantile(0.75).unwrap();
        assert!((q75 - quantile_oracle(0.75)).abs() < 1e-9);
        assert!((q75 - 0.6744897501960817).abs() < 1e-9);

        let q975 = std_normal_quantile(0.975).unwrap();
        assert!((q975 - quantile_oracle(0.975)).abs() < 1e-9);
        assert!((q975 - 1.9599639845400545).abs() < 1e-9);
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.25, 1.5, f64::NAN] {
            assert!(
                matches!(std_normal_quantile(p), Err(Error::Domain(_))),
                "p={p}"
            );
        }
    }

    #[test]
    fn quantile_cdf_roundtrip() {
        for x in [-6.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
            let p = std_normal_cdf(x).unwrap();
            let back = std_normal_quantile(p).unwrap();
            assert!((back - x).abs() < 1e-8, "x={x}: back={back}");
        }
    }

    #[test]
    fn constants_satisfy_their_identities() {
        let c = NormalConstants::evaluate();
        assert!((cdf_unchecked(c.mad_consistency) - 0.75).abs() < 1e-12);
        assert!(
            (c.median_avar - 1.0 / (4.0 * c.density_at_zero * c.density_at_zero)).abs() < 1e-12
        );
        assert!((c.density_at_zero - 0.3989422804014327).abs() < 1e-15);
    }

    #[test]
    fn scaling_constant_from_oracle_product() {
        // Oracle: the product of sqrt(2/pi) and the bisection-derived
        // Phi^-1(3/4). Note the 30-digit value of sqrt(2/pi)*Phi^-1(3/4) is
        // 0.538164958101235048727458597012.
        let oracle = (2.0 / PI).sqrt() * quantile_oracle(0.75);
        let got = scaling_constant(1).unwrap();
        assert!((got - oracle).abs() < 1e-9, "got={got}, oracle={oracle}");
        assert!((got - 0.538164958101235).abs() < 1e-12);
    }

    #[test]
    fn scaling_constant_sqrt_n_scaling() {
        let base = scaling_constant(1).unwrap();
        assert_eq!(scaling_constant(4).unwrap(), 2.0 * base);
        assert!((scaling_constant(100).unwrap() - 10.0 * base).abs() < 1e-12);
    }

    #[test]
    fn scaling_constant_rejects_zero() {
        assert!(matches!(scaling_constant(0), Err(Error::Domain(_))));
    }
}
