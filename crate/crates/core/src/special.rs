//! Distribution functions: Student's t CDF, the standard normal CDF and its
//! inverse, plus the log-gamma / log-beta / incomplete-beta machinery behind
//! them.
//!
//! Everything here is pure and allocation-free.

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Shift point above which the Stirling series is used directly.
const STIRLING_MIN: f64 = 10.0;

const BETA_CF_MAX_ITER: usize = 200_000;
const BETA_CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Tail of the Stirling series: `ln Γ(x) - [(x - ½) ln x - x + ½ ln 2π]`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 * (1.0 / 156.0)))))))
}

/// Natural log of the gamma function for `x > 0`.
///
/// Stirling series for `x >= 10`; smaller arguments are shifted up with the
/// recurrence `Γ(x + 1) = x Γ(x)`.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= STIRLING_MIN {
        return (x - 0.5) * libm::log(x) - x + HALF_LN_2PI + stirling_correction(x);
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma(shifted) - libm::log(prod)
}

/// Natural log of the beta function `B(a, b)` for `a, b > 0`.
///
/// Large arguments go through a differenced Stirling form so the result does
/// not lose digits to cancellation between three large log-gamma values.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let sum = lo + hi;
    if lo >= STIRLING_MIN {
        HALF_LN_2PI - 0.5 * libm::log(sum) - (lo - 0.5) * libm::log1p(hi / lo) - (hi - 0.5) * libm::log1p(lo / hi)
            + stirling_correction(lo)
            + stirling_correction(hi)
            - stirling_correction(sum)
    } else if hi >= STIRLING_MIN {
        // ln Γ(hi) - ln Γ(hi + lo), differenced
        let ratio = -(hi - 0.5) * libm::log1p(lo / hi) - lo * libm::log(sum) + lo + stirling_correction(hi)
            - stirling_correction(sum);
        ln_gamma(lo) + ratio
    } else {
        ln_gamma(lo) + ln_gamma(hi) - ln_gamma(sum)
    }
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta with `x`, `y = 1 - x` and their logs supplied
/// separately so callers can keep full precision on both sides.
fn beta_inc_parts(a: f64, b: f64, x: f64, y: f64, ln_x: f64, ln_y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * ln_x + b * ln_y - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        libm::exp(ln_front) * beta_cf(a, b, x) / a
    } else {
        1.0 - libm::exp(ln_front) * beta_cf(b, a, y) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(domain("incomplete beta requires finite a > 0 and b > 0"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("incomplete beta requires 0 <= x <= 1"));
    }
    let y = 1.0 - x;
    Ok(beta_inc_parts(a, b, x, y, libm::log(x), libm::log(y)))
}

fn check_t_args(x: f64, df: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(domain("t distribution argument must be finite"));
    }
    if !(df > 0.0) || !df.is_finite() {
        return Err(domain("degrees of freedom must be positive and finite"));
    }
    Ok(())
}

/// `P(|T| > |x|)` for `T ~ t(df)`, i.e. `I_{df/(df+x²)}(df/2, 1/2)`.
fn t_two_tail(x: f64, df: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let x2 = x * x;
    if !x2.is_finite() {
        return 0.0;
    }
    let denom = df + x2;
    let w = df / denom;
    let w_comp = x2 / denom;
    let ln_w = -libm::log1p(x2 / df);
    let ln_w_comp = libm::log(x2) - libm::log(denom);
    beta_inc_parts(0.5 * df, 0.5, w, w_comp, ln_w, ln_w_comp)
}

/// Student's t cumulative distribution function `P(T <= x)`.
pub fn t_cdf(x: f64, df: f64) -> Result<f64> {
    check_t_args(x, df)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * t_two_tail(x, df);
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value `P(|T| >= |x|)`, equal to `2 (1 - t_cdf(|x|, df))` but
/// computed without the subtraction.
pub fn t_two_sided_p(x: f64, df: f64) -> Result<f64> {
    check_t_args(x, df)?;
    Ok(t_two_tail(x, df).clamp(0.0, 1.0))
}

/// Upper tail `P(T >= x)`.
pub fn t_sf(x: f64, df: f64) -> Result<f64> {
    check_t_args(x, df)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * t_two_tail(x, df);
    Ok(if x > 0.0 { tail } else { 1.0 - tail })
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

// Wichura's AS 241 (PPND16) coefficients.
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn horner(coeffs: &[f64; 8], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

/// AS 241 rational approximation on the lower half, `p <= 0.5`.
fn ppnd16_lower(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * horner(&A, r) / horner(&B, r);
    }
    let r = libm::sqrt(-libm::log(p));
    if r <= 5.0 {
        let r = r - 1.6;
        -horner(&C, r) / horner(&D, r)
    } else {
        let r = r - 5.0;
        -horner(&E, r) / horner(&F, r)
    }
}

/// Inverse of the standard normal CDF.
///
/// AS 241 followed by one Newton step against [`normal_cdf`], evaluated on
/// the lower tail and reflected for `p > 0.5`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("normal quantile requires 0 < p < 1"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let lower = if p > 0.5 { 1.0 - p } else { p };
    let mut x = ppnd16_lower(lower);
    let dens = normal_pdf(x);
    if dens > 0.0 {
        x -= (normal_cdf(x) - lower) / dens;
    }
    Ok(if p > 0.5 { -x } else { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_cdf_at_zero_is_half() {
        assert_eq!(t_cdf(0.0, 10.0).unwrap(), 0.5);
    }

    #[test]
    fn cauchy_case() {
        assert!((t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-14);
        assert!((t_cdf(-1.0, 1.0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn df_two_closed_form() {
        // F(x) = 1/2 + x / (2 sqrt(2 + x^2))
        for &x in &[-7.5, -1.3, -0.01, 0.2, 1.0, 3.7, 40.0] {
            let expected = 0.5 + x / (2.0 * libm::sqrt(2.0 + x * x));
            assert!((t_cdf(x, 2.0).unwrap() - expected).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(t_cdf(f64::NAN, 3.0).is_err());
        assert!(t_cdf(f64::INFINITY, 3.0).is_err());
        assert!(t_cdf(1.0, 0.0).is_err());
        assert!(t_cdf(1.0, -2.0).is_err());
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
        assert!(beta_inc(0.0, 1.0, 0.5).is_err());
        assert!(beta_inc(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - 0.572_364_942_924_700_1).abs() < 1e-14);
        // ln(9!) = ln 362880
        assert!((ln_gamma(10.0) - libm::log(362_880.0)).abs() < 1e-13);
    }

    #[test]
    fn ln_beta_branches_agree() {
        // B(a, 1) = 1/a on all three branches
        for &a in &[0.3, 4.0, 12.0, 499.0, 5.0e5] {
            assert!((ln_beta(a, 1.0) + libm::log(a)).abs() < 1e-12, "a = {a}");
        }
        // both-large branch against the mixed branch
        let both = ln_beta(10.0, 30.0);
        let mixed = ln_gamma(10.0) + ln_gamma(30.0) - ln_gamma(40.0);
        assert!((both - mixed).abs() < 1e-12);
    }

    #[test]
    fn beta_inc_uniform_case() {
        // I_x(1, 1) = x
        for &x in &[0.0, 0.1, 0.5, 0.93, 1.0] {
            assert!((beta_inc(1.0, 1.0, x).unwrap() - x).abs() < 1e-15);
        }
    }

    #[test]
    fn normal_quantile_median_and_symmetry() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        for &p in &[0.001, 0.025, 0.2, 0.4] {
            let s = normal_quantile(p).unwrap() + normal_quantile(1.0 - p).unwrap();
            assert!(s.abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn normal_quantile_familiar_points() {
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((normal_quantile(0.8).unwrap() - 0.841_621_233_572_914_2).abs() < 1e-12);
    }
}
