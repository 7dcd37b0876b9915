use num_complex::Complex64;
use rootshell::harmonic::{hc_transform_profile, spherical_sl2c, theta_rank1};

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

#[test]
fn sl2c_zero_parameter_identity() {
    for k in 0..200 {
        let t = 0.05 + k as f64 * 0.1;
        let v = spherical_sl2c(Complex64::new(0.0, 0.0), t);
        assert!((v.re * t.sinh() / t - 1.0).abs() < 1e-13, "t = {t}");
    }
}

/// |k̂_t(λ)| against (1+|λ|)^{−2} e^{ρ t} Θ(t, λ) for a smooth shell profile.
#[test]
fn smooth_shell_transform_decays() {
    let eps0 = 0.1;
    let mut per_t = Vec::new();
    for t in [2.0, 5.0, 10.0, 20.0, 40.0] {
        let mut sup: f64 = 0.0;
        for k in 0..=120 {
            let lam = k as f64 * 0.5;
            let khat = hc_transform_profile(Complex64::new(lam, 0.0), |h| bump((h - t) / eps0), t - eps0, t + eps0).unwrap();
            let rhs = (1.0 + lam).powi(-2) * (0.5 * t).exp() * theta_rank1(t, Complex64::new(lam, 0.0));
            sup = sup.max(khat.norm() / rhs);
        }
        per_t.push(sup);
    }
    let hi = per_t.iter().cloned().fold(0.0, f64::max);
    assert!(hi < 5.0, "sup ratios {per_t:?}");
    assert!(per_t[4] < 3.0 * per_t[0], "sup grows with t: {per_t:?}");
}
