//! `ln K_ν(x)`, the modified Bessel function of the second kind of real
//! order, without forming `K_ν(x)` itself.
//!
//! Regimes:
//!
//! * `|ν| >= 100`: the uniform large-order (Debye) expansion, written
//!   directly in log form.
//! * otherwise `ν = μ + n` with `|μ| <= 1/2`; `K_μ` and `K_{μ+1}` come from
//!   Temme's series (`x < 2`) or Steed's continued fraction CF2 (`x >= 2`),
//!   and the forward recurrence `K_{ν+1} = K_{ν-1} + (2ν/x) K_ν` is run on
//!   the ratio `K_{ν+1}/K_ν` while the logarithm is accumulated.
//!
//! Forward recurrence is stable for `K` since it is the dominant solution.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const DEBYE_MIN_ORDER: f64 = 100.0;
const DEBYE_TERMS: usize = 12;
const MAX_ITER: usize = 20_000;

/// `ln K_ν(x)` for `x > 0` and finite `ν`. Even in `ν`.
pub fn log_bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(Error::domain("log_bessel_k", format!("non-finite argument (nu = {nu}, x = {x})")));
    }
    if x <= 0.0 {
        return Err(Error::domain("log_bessel_k", format!("x must be positive, got {x}")));
    }
    let nu = nu.abs();
    if nu >= DEBYE_MIN_ORDER {
        return Ok(debye(nu, x));
    }

    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut log_k, mut ratio) = if x < 2.0 { temme(mu, x) } else { steed_cf2(mu, x) };
    for k in 0..n as usize {
        log_k += ratio.ln();
        ratio = 2.0 * (mu + k as f64 + 1.0) / x + 1.0 / ratio;
    }
    Ok(log_k)
}

// ---------- large order ----------

/// Coefficients (ascending powers of `t`) of the Debye polynomials `u_k(t)`,
/// generated from
/// `u_{k+1}(t) = ½ t²(1 − t²) u_k'(t) + ⅛ ∫_0^t (1 − 5s²) u_k(s) ds`.
fn debye_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![1.0]];
        for k in 0..DEBYE_TERMS {
            let u = &polys[k];
            let mut next = vec![0.0; u.len() + 3];
            // ½ (t² − t⁴) u'(t)
            for (i, &c) in u.iter().enumerate().skip(1) {
                let dc = 0.5 * c * i as f64;
                next[i + 1] += dc;
                next[i + 3] -= dc;
            }
            // ⅛ ∫ (1 − 5s²) u(s) ds
            for (i, &c) in u.iter().enumerate() {
                next[i + 1] += 0.125 * c / (i + 1) as f64;
                next[i + 3] -= 0.625 * c / (i + 3) as f64;
            }
            polys.push(next);
        }
        polys
    })
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn debye(nu: f64, x: f64) -> f64 {
    let z = x / nu;
    let s = z.hypot(1.0);
    let t = 1.0 / s;
    // η = √(1+z²) + ln(z / (1 + √(1+z²)))
    let eta = s - (1.0 / z).asinh();
    let mut sum = 0.0;
    let mut scale = 1.0;
    for (k, poly) in debye_polynomials().iter().enumerate() {
        let term = horner(poly, t) * scale;
        sum += if k % 2 == 0 { term } else { -term };
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        scale /= nu;
    }
    0.5 * (PI / (2.0 * nu)).ln() - nu * eta - 0.5 * s.ln() + sum.ln()
}

// ---------- small order, |mu| <= 1/2 ----------

// Chebyshev expansions on [-1, 1] of the Temme auxiliary functions
// γ₁(μ) and γ₂(μ) in the variable 4|μ| − 1.
const GAMMA1_CHEB: [f64; 14] = [
    -1.145_164_083_662_683_117_868_981_528_67,
    0.006_360_853_113_470_842_381_229_554_95,
    0.001_862_451_930_072_068_489_346_436_57,
    0.000_152_833_085_873_453_507_081_227_824,
    0.000_017_017_464_011_802_038_795_324_732,
    -6.459_750_292_334_725_435_466_832_645_1e-7,
    -5.181_984_843_251_938_089_410_431_296_8e-8,
    4.518_909_289_485_818_305_112_318_079_7e-10,
    3.243_322_737_102_087_304_366_625_918_0e-11,
    6.830_943_402_494_752_287_543_240_082_8e-13,
    2.835_350_275_517_210_151_311_962_813_0e-14,
    -7.988_390_576_932_359_287_563_808_754_1e-16,
    -3.372_667_730_077_194_983_334_121_345_7e-17,
    -3.658_633_480_921_052_074_405_443_710_4e-20,
];

const GAMMA2_CHEB: [f64; 15] = [
    1.882_645_524_949_671_835_019_616_975_350,
    -0.077_490_658_396_167_518_329_547_945_212,
    -0.018_256_714_847_324_929_419_579_340_950,
    0.000_633_803_020_907_489_579_592_397_173_1,
    0.000_076_229_054_350_872_902_119_446_117_5,
    -9.550_164_756_172_044_351_985_399_352_6e-7,
    -8.892_726_810_788_635_191_243_151_295_5e-8,
    -1.952_133_477_231_961_374_051_188_013_2e-9,
    -9.400_305_273_588_516_211_176_957_977_1e-11,
    4.687_513_384_953_239_317_929_087_910_1e-12,
    2.265_853_574_692_575_958_244_754_514_5e-13,
    -1.172_550_969_848_801_511_187_873_525_1e-15,
    -7.044_133_820_024_522_253_084_315_587_7e-17,
    -2.437_787_831_010_769_365_065_974_022_8e-18,
    -7.522_524_321_825_390_172_716_467_501_1e-20,
];

fn chebyshev(coeffs: &[f64], y: f64) -> f64 {
    let y2 = 2.0 * y;
    let (mut d, mut dd) = (0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let tmp = d;
        d = y2 * d - dd + c;
        dd = tmp;
    }
    y * d - dd + 0.5 * coeffs[0]
}

/// `(1/Γ(1+μ), 1/Γ(1−μ), γ₁, γ₂)` as used by Temme's series.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let y = 4.0 * mu.abs() - 1.0;
    let g1 = chebyshev(&GAMMA1_CHEB, y);
    let g2 = chebyshev(&GAMMA2_CHEB, y);
    let inv_g_1pmu = g2 - mu * g1;
    let inv_g_1mmu = g2 + mu * g1;
    (inv_g_1pmu, inv_g_1mmu, g1, g2)
}

/// Temme's series for `x < 2`: returns `(ln K_μ(x), K_{μ+1}(x)/K_μ(x))`.
fn temme(mu: f64, x: f64) -> (f64, f64) {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let half_x_mu = (mu * ln_half_x).exp();
    let pi_mu = PI * mu;
    let sigma = -mu * ln_half_x;
    let sinrat = if pi_mu.abs() < f64::EPSILON { 1.0 } else { pi_mu / pi_mu.sin() };
    let sinhrat = if sigma.abs() < f64::EPSILON { 1.0 } else { sigma.sinh() / sigma };
    let (inv_g_1pmu, inv_g_1mmu, g1, g2) = temme_gammas(mu);

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_mu / inv_g_1pmu;
    let mut qk = 0.5 * half_x_mu / inv_g_1mmu;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fk = (kf * fk + pk + qk) / (kf * kf - mu * mu);
        ck *= half_x * half_x / kf;
        pk /= kf - mu;
        qk /= kf + mu;
        let hk = -kf * fk + pk;
        let del0 = ck * fk;
        sum0 += del0;
        sum1 += ck * hk;
        if del0.abs() < 0.5 * sum0.abs() * f64::EPSILON {
            break;
        }
    }
    (sum0.ln(), sum1 * 2.0 / x / sum0)
}

/// Steed's continued fraction (Thompson–Barnett CF2) for `x >= 2`: returns
/// `(ln K_μ(x), K_{μ+1}(x)/K_μ(x))`, with the `e^{-x}` factor applied in log
/// space.
fn steed_cf2(mu: f64, x: f64) -> (f64, f64) {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    for i in 2..MAX_ITER {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi = (bi * di - 1.0) * delhi;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    hi *= -a1;
    let log_k = 0.5 * (PI / (2.0 * x)).ln() - s.ln() - x;
    (log_k, (mu + x + 0.5 - hi) / x)
}
