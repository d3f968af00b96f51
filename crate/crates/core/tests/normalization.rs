//! `q*` integrates to one, checked by quadrature independently of the
//! closed-form attenuation it is normalized by.

use nmlg_core::verify::integrate;
use nmlg_core::{quadrature_atten_2d, GaussianClass, SufficientStats, UniversalDensity};

#[test]
fn single_observation_density_integrates_to_one() {
    for (alpha, lo, hi) in [(1.0, 1.0, std::f64::consts::E), (0.0, 0.5, 2.0), (3.0, 0.2, 0.2), (2.0, 0.1, 10.0)] {
        let class = GaussianClass::new(alpha, lo, hi).unwrap();
        let u = UniversalDensity::new(class, 1).unwrap();
        let q = |x: f64| u.log_q_star(&SufficientStats::single(x).unwrap()).unwrap().exp();
        let h = alpha / 2.0;
        let edge = h + 14.0 * hi;
        let pts = [-edge, -h - hi, -h - lo, -h, h, h + lo, h + hi, edge];
        let total: f64 = pts.windows(2).map(|w| integrate(q, w[0], w[1], 0.0, 1e-12, 1000).unwrap().value).sum();
        assert!((total - 1.0).abs() < 1e-6, "class ({alpha}, {lo}, {hi}): {total}");
    }
}

#[test]
fn two_observation_density_integrates_to_one() {
    for (alpha, lo, hi) in [(1.0, 0.5, 2.0), (0.0, 1.0, 3.0), (4.0, 1.0, 1.0)] {
        let class = GaussianClass::new(alpha, lo, hi).unwrap();
        let u = UniversalDensity::new(class, 2).unwrap();
        let mass = quadrature_atten_2d(&class, 1e-8).unwrap().value;
        let total = (mass.ln() - u.log_atten()).exp();
        assert!((total - 1.0).abs() < 1e-4, "class ({alpha}, {lo}, {hi}): {total}");
    }
}
