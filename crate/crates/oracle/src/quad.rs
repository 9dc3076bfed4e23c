//! Adaptive Gauss–Kronrod (7/15) quadrature of `exp(g(t))`, carried out
//! entirely on logarithms so that integrands far outside the `f64` range are
//! handled.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 50;

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Returns `(log K15, log |K15 - G7|)` on `[a, b]`.
fn panel<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut vals = [f64::NEG_INFINITY; 15];
    for k in 0..7 {
        vals[2 * k] = g(centre - half * XGK[k]);
        vals[2 * k + 1] = g(centre + half * XGK[k]);
    }
    vals[14] = g(centre);
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, f64::NEG_INFINITY);
    }
    let e = |v: f64| (v - m).exp();
    let mut kron = WGK[7] * e(vals[14]);
    let mut gauss = WG[3] * e(vals[14]);
    for k in 0..7 {
        let pair = e(vals[2 * k]) + e(vals[2 * k + 1]);
        kron += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    let log_half = half.ln();
    let err = (kron - gauss).abs();
    let log_err = if err > 0.0 {
        err.ln() + m + log_half
    } else {
        f64::NEG_INFINITY
    };
    (kron.ln() + m + log_half, log_err)
}

/// `ln ∫_a^b exp(g(t)) dt` with relative tolerance `rel_tol`.
pub fn log_integrate<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, rel_tol: f64) -> f64 {
    assert!(b > a, "empty interval");
    // Coarse pass for a reference magnitude.
    let coarse = 64;
    let h = (b - a) / coarse as f64;
    let mut reference = f64::NEG_INFINITY;
    let mut stack = Vec::with_capacity(coarse);
    for i in 0..coarse {
        let lo = a + h * i as f64;
        let hi = if i + 1 == coarse { b } else { lo + h };
        let (v, e) = panel(&g, lo, hi);
        reference = log_add(reference, v);
        stack.push((lo, hi, v, e, 0u32));
    }
    if reference == f64::NEG_INFINITY {
        return reference;
    }
    let log_tol = rel_tol.ln() + reference;
    let mut total = f64::NEG_INFINITY;
    while let Some((lo, hi, v, e, depth)) = stack.pop() {
        if e <= log_tol - 4.0 || depth >= MAX_DEPTH {
            total = log_add(total, v);
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = panel(&g, lo, mid);
        let (v2, e2) = panel(&g, mid, hi);
        stack.push((lo, mid, v1, e1, depth + 1));
        stack.push((mid, hi, v2, e2, depth + 1));
    }
    total
}

/// Integrates a unimodal log-integrand over `[lo, hi]`, first trimming the
/// interval to where `g` is within `80` nats of its maximum.
pub fn log_integrate_peaked<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    const SCAN: usize = 8000;
    let step = (hi - lo) / SCAN as f64;
    let vals: Vec<f64> = (0..=SCAN).map(|i| g(lo + step * i as f64)).collect();
    let (imax, gmax) = vals
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    assert!(gmax.is_finite(), "integrand has no finite value on the scan grid");
    let cut = gmax - 80.0;
    let mut left = imax;
    while left > 0 && vals[left] > cut {
        left -= 1;
    }
    let mut right = imax;
    while right < SCAN && vals[right] > cut {
        right += 1;
    }
    let a = lo + step * left.saturating_sub(1) as f64;
    let b = (lo + step * (right + 1) as f64).min(hi);
    log_integrate(g, a, b, rel_tol)
}
