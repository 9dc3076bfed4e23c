//! `ln K_ν(x)` from the integral representation
//! `K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(ν t) dt`.

fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2
}

pub fn log_bessel_k_quad(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    let nu = nu.abs();
    let g = move |t: f64| -x * t.cosh() + ln_cosh(nu * t);
    // Locate the peak roughly, then walk right until the integrand is
    // negligible.
    let t_peak = (nu / x).asinh();
    let g_peak = g(t_peak).max(g(0.0));
    let mut upper = t_peak + 1.0;
    while g(upper) > g_peak - 120.0 {
        upper += 1.0;
    }
    crate::quad::log_integrate_peaked(g, 0.0, upper, 1e-14)
}
