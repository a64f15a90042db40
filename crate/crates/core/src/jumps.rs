//! Co-jump machinery.
//!
//! Jumps hit price and variance together: a jump J multiplies the asset by J
//! and adds a variance spike b ln^2(J) that decays at rate beta over a
//! window Delta (the proportional, exponentially attenuating impact).
//! Relocating every jump inside [T - Delta, T] to the start of that window
//! collapses the per-jump decay integral to a single aggregated coefficient
//! b_hat, and pricing then only needs the pair
//! (X_n, Y_n) = (sum ln J_i, sum ln^2 J_i), whose joint law for lognormal
//! jumps factorizes as a normal times a scaled chi-square. Expectations over
//! that pair are tensor-product Gauss-Hermite x generalized Gauss-Laguerre
//! quadratures. The expected AIV bias introduced by the relocation has a
//! closed form, exposed as [`jump_time_bias`].

use crate::error::{CoreError, Result};
use crate::math::norm_pdf;
use crate::quadrature::{gauss_gen_laguerre, gauss_hermite};

/// Lognormal jump law ln J ~ N(mu, eps2) arriving at Poisson rate lambda,
/// with the tail-mass bound used to truncate the jump-count sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSpec {
    pub intensity: f64,
    pub log_mean: f64,
    pub log_var: f64,
    pub truncation_eps: f64,
}

impl JumpSpec {
    pub fn new(intensity: f64, log_mean: f64, log_var: f64, truncation_eps: f64) -> Result<Self> {
        if intensity < 0.0 || !intensity.is_finite() {
            return Err(CoreError::Invalid { what: "jump intensity", detail: format!("{intensity}") });
        }
        if log_var < 0.0 || !log_var.is_finite() {
            return Err(CoreError::Invalid { what: "jump log-variance", detail: format!("{log_var}") });
        }
        if !(truncation_eps > 0.0 && truncation_eps < 1.0) {
            return Err(CoreError::Invalid {
                what: "truncation epsilon",
                detail: format!("{truncation_eps} must be in (0, 1)"),
            });
        }
        Ok(JumpSpec { intensity, log_mean, log_var, truncation_eps })
    }

    /// Mean proportional jump size: zeta = E[J - 1] = exp(mu + eps2/2) - 1.
    pub fn zeta(&self) -> f64 {
        (self.log_mean + 0.5 * self.log_var).exp() - 1.0
    }
}

/// Proportional, exponentially attenuating variance impact of a jump:
/// spike b ln^2(J) decaying at rate beta over a window of length delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeaSpec {
    pub proportional_coeff: f64,
    pub attenuation: f64,
    pub duration: f64,
}

impl PeaSpec {
    pub fn new(proportional_coeff: f64, attenuation: f64, duration: f64) -> Result<Self> {
        if proportional_coeff < 0.0 || !proportional_coeff.is_finite() {
            return Err(CoreError::Invalid {
                what: "PEA proportional coefficient",
                detail: format!("{proportional_coeff}"),
            });
        }
        if !(attenuation > 0.0) || !(duration > 0.0) {
            return Err(CoreError::Invalid {
                what: "PEA parameters",
                detail: format!("attenuation {attenuation} and duration {duration} must be positive"),
            });
        }
        Ok(PeaSpec { proportional_coeff, attenuation, duration })
    }
}

/// Aggregated variance-impact coefficient for maturity T:
/// b_hat = b (1 - exp(-beta delta)) / (T beta), from relocating every jump in
/// its window to the window start.
pub fn pea_aggregate(pea: &PeaSpec, maturity: f64) -> f64 {
    let b = pea.proportional_coeff;
    let beta = pea.attenuation;
    b * (1.0 - (-beta * pea.duration).exp()) / (maturity * beta)
}

/// Truncated Poisson jump-count weights.
#[derive(Debug, Clone)]
pub struct PoissonTruncation {
    pub n_max: usize,
    /// Untruncated probabilities p(N = n) for n = 0..=n_max; deliberately not
    /// renormalized so the pricing sum under-approximates by a known mass.
    pub weights: Vec<f64>,
    pub dropped_mass: f64,
}

/// Smallest N_max with P(N_T > N_max) < eps, together with the weights.
pub fn truncate_poisson(lambda: f64, maturity: f64, eps: f64) -> PoissonTruncation {
    let rate = lambda * maturity;
    if rate == 0.0 {
        return PoissonTruncation { n_max: 0, weights: vec![1.0], dropped_mass: 0.0 };
    }
    let mut weights = Vec::new();
    let mut p = (-rate).exp();
    let mut cum = 0.0;
    let mut n = 0usize;
    loop {
        weights.push(p);
        cum += p;
        if 1.0 - cum < eps {
            break;
        }
        n += 1;
        p *= rate / n as f64;
        if n > 100_000 {
            break; // unreachable for sane rates; avoids a pathological spin
        }
    }
    PoissonTruncation { n_max: n, weights, dropped_mass: (1.0 - cum).max(0.0) }
}

fn chi_square_pdf(q: f64, dof: usize) -> f64 {
    if q < 0.0 {
        return 0.0;
    }
    let k = dof as f64;
    if q == 0.0 {
        return match dof {
            1 => f64::INFINITY,
            2 => 0.5,
            _ => 0.0,
        };
    }
    let half = 0.5 * k;
    ((half - 1.0) * q.ln() - 0.5 * q - half * std::f64::consts::LN_2 - libm::lgamma(half)).exp()
}

/// Joint density g(x, y) of (X_n, Y_n) = (sum ln J, sum ln^2 J) for n
/// lognormal jumps: a normal in x times a scaled chi-square(n-1) in the
/// residual (y - x^2/n)/eps2. Zero outside y >= x^2/n; for n = 1 the mass
/// lives on the parabola y = x^2 and the value is the density of x alone.
pub fn joint_density(n: usize, mu: f64, eps2: f64, x: f64, y: f64) -> Result<f64> {
    if n == 0 {
        return Err(CoreError::Invalid {
            what: "jump count",
            detail: "joint density undefined for n = 0".into(),
        });
    }
    let nf = n as f64;
    if n == 1 {
        let on_parabola = (y - x * x).abs() <= 1e-12 * (1.0 + x * x);
        if !on_parabola {
            return Ok(0.0);
        }
        let s = eps2.sqrt();
        return Ok(norm_pdf((x - mu) / s) / s);
    }
    let resid = y - x * x / nf;
    if resid < 0.0 {
        return Ok(0.0);
    }
    let s = (nf * eps2).sqrt();
    let gx = norm_pdf((x - mu * nf) / s) / s;
    let q = resid / eps2;
    Ok(gx * chi_square_pdf(q, n - 1) / eps2)
}

/// Quadrature nodes for E over (X_n, Y_n): Gauss-Hermite in
/// x ~ N(n mu, n eps2) tensored with generalized Gauss-Laguerre (exponent
/// (n-3)/2) in the chi-square residual, recombined as y = x^2/n + eps2 q.
#[derive(Debug, Clone)]
pub struct JumpQuadrature {
    pub count: usize,
    /// (x, y, weight) triples; weights sum to one.
    pub nodes: Vec<(f64, f64, f64)>,
    pub hermite_order: usize,
    pub laguerre_order: usize,
}

impl JumpQuadrature {
    pub fn new(
        count: usize,
        mu: f64,
        eps2: f64,
        hermite_order: usize,
        laguerre_order: usize,
    ) -> Result<Self> {
        let nodes = match count {
            0 => vec![(0.0, 0.0, 1.0)],
            1 => {
                let (t, w) = gauss_hermite(hermite_order)?;
                let scale = (2.0 * eps2).sqrt();
                t.iter()
                    .zip(&w)
                    .map(|(&ti, &wi)| {
                        let x = mu + scale * ti;
                        (x, x * x, wi)
                    })
                    .collect()
            }
            n => {
                let nf = n as f64;
                let (t, wx) = gauss_hermite(hermite_order)?;
                let alpha = (nf - 3.0) / 2.0;
                let (s, wq) = gauss_gen_laguerre(laguerre_order, alpha)?;
                let scale = (2.0 * nf * eps2).sqrt();
                let mut nodes = Vec::with_capacity(hermite_order * laguerre_order);
                for (&ti, &wi) in t.iter().zip(&wx) {
                    let x = nf * mu + scale * ti;
                    let x2n = x * x / nf;
                    for (&sj, &wj) in s.iter().zip(&wq) {
                        let q = 2.0 * sj;
                        nodes.push((x, x2n + eps2 * q, wi * wj));
                    }
                }
                nodes
            }
        };
        Ok(JumpQuadrature { count, nodes, hermite_order, laguerre_order })
    }

    pub fn expectation(&self, mut h: impl FnMut(f64, f64) -> f64) -> f64 {
        self.nodes.iter().map(|&(x, y, w)| w * h(x, y)).sum()
    }
}

/// Default quadrature orders; adequate for smooth pricing integrands well
/// past the tolerances pinned in the acceptance suite.
pub const DEFAULT_HERMITE_ORDER: usize = 40;
pub const DEFAULT_LAGUERRE_ORDER: usize = 40;

/// E[h(X_n, Y_n)] at the default orders.
pub fn expectation_over_jumps(
    n: usize,
    mu: f64,
    eps2: f64,
    h: impl FnMut(f64, f64) -> f64,
) -> Result<f64> {
    Ok(JumpQuadrature::new(n, mu, eps2, DEFAULT_HERMITE_ORDER, DEFAULT_LAGUERRE_ORDER)?.expectation(h))
}

/// Expected AIV bias from relocating jumps in [T - Delta, T] to the window
/// start, truncated at n_max total jumps:
///
///   EB = sum_{l=1..n_max} sum_{j=1..l} P(N_Delta = j) P(N_{T-Delta} = l-j)
///        * (j b eta / (beta T)) ((1 - e^{-beta Delta})/(beta Delta) - e^{-beta Delta})
///
/// with eta = mu^2 + eps2 the mean squared log-jump.
pub fn jump_time_bias(jump: &JumpSpec, pea: &PeaSpec, maturity: f64, n_max: usize) -> Result<f64> {
    if n_max == 0 {
        return Err(CoreError::Invalid { what: "n_max", detail: "need n_max >= 1".into() });
    }
    let delta = pea.duration;
    if delta >= maturity {
        return Err(CoreError::Invalid {
            what: "PEA duration",
            detail: format!("duration {delta} must be smaller than maturity {maturity}"),
        });
    }
    let lambda = jump.intensity;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let beta = pea.attenuation;
    let eta = jump.log_mean * jump.log_mean + jump.log_var;
    let bd = beta * delta;
    let shape = (1.0 - (-bd).exp()) / bd - (-bd).exp();
    let per_jump = pea.proportional_coeff * eta / (beta * maturity) * shape;

    let pmf = |rate: f64, k: usize| -> f64 {
        let mut p = (-rate).exp();
        for i in 1..=k {
            p *= rate / i as f64;
        }
        p
    };
    let rate_window = lambda * delta;
    let rate_rest = lambda * (maturity - delta);
    let mut eb = 0.0;
    for l in 1..=n_max {
        for j in 1..=l {
            eb += j as f64 * pmf(rate_window, j) * pmf(rate_rest, l - j) * per_jump;
        }
    }
    Ok(eb)
}
