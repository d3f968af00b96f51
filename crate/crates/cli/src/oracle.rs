//! Brute-force maximization of the likelihood over the class box, used to
//! check the clipped ML estimate and the envelope.

use nmlg_core::{log_density, GaussianClass, SufficientStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    /// Largest log-likelihood found.
    pub best: f64,
    pub best_mu: f64,
    pub best_sigma: f64,
    /// Largest `log p(x) - reference` over every evaluated grid point.
    pub max_excess: f64,
    pub evaluations: usize,
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
    (0..points).map(move |i| if i + 1 == points { hi } else { lo + step * i as f64 })
}

/// Evaluates `log p_{σ,μ}(x)` on a `first × first` grid over the box, then
/// repeatedly on `zoom × zoom` grids spanning two cells either side of the
/// incumbent, clipped to the box. `reference` is the value every grid
/// density is compared against (normally the envelope).
pub fn grid_search_ml(
    stats: &SufficientStats,
    class: &GaussianClass,
    first: usize,
    zoom: usize,
    rounds: usize,
    reference: f64,
) -> GridSearch {
    let h = class.half_alpha();
    let (mut mu_lo, mut mu_hi) = (-h, h);
    let (mut s_lo, mut s_hi) = (class.sigma_min(), class.sigma_max());
    let mut out = GridSearch {
        best: f64::NEG_INFINITY,
        best_mu: 0.0,
        best_sigma: s_lo,
        max_excess: f64::NEG_INFINITY,
        evaluations: 0,
    };
    for round in 0..rounds {
        let points = if round == 0 { first } else { zoom };
        let mu_points = if mu_hi > mu_lo { points } else { 1 };
        let s_points = if s_hi > s_lo { points } else { 1 };
        for mu in grid(mu_lo, mu_hi, mu_points) {
            for sigma in grid(s_lo, s_hi, s_points) {
                let lp = log_density(stats, mu, sigma);
                out.evaluations += 1;
                out.max_excess = out.max_excess.max(lp - reference);
                if lp > out.best {
                    out.best = lp;
                    out.best_mu = mu;
                    out.best_sigma = sigma;
                }
            }
        }
        let dm = if mu_points > 1 { (mu_hi - mu_lo) / (mu_points - 1) as f64 } else { 0.0 };
        let ds = if s_points > 1 { (s_hi - s_lo) / (s_points - 1) as f64 } else { 0.0 };
        mu_lo = (out.best_mu - 2.0 * dm).max(-h);
        mu_hi = (out.best_mu + 2.0 * dm).min(h);
        s_lo = (out.best_sigma - 2.0 * ds).max(class.sigma_min());
        s_hi = (out.best_sigma + 2.0 * ds).min(class.sigma_max());
    }
    out
}
