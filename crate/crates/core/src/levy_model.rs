//! Cramér–Lundberg surplus `X_t = x + p t + σ B_t − Σ C_k` with claims of
//! rational Laplace transform, its Laplace exponent `ψ`, and the roots of
//! `ψ(s) = q`.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::poly::{durand_kerner, Poly, C64};
use crate::{Error, Result};

/// Mixture component with density `weight · rate^shape y^{shape-1} e^{-rate y} / (shape-1)!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaTerm {
    pub weight: f64,
    pub shape: u32,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClaimLaw {
    Exponential { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    HyperExponential { weights: Vec<f64>, rates: Vec<f64> },
}

impl ClaimLaw {
    pub fn gamma_terms(&self) -> Vec<GammaTerm> {
        match self {
            ClaimLaw::Exponential { rate } => vec![GammaTerm {
                weight: 1.0,
                shape: 1,
                rate: *rate,
            }],
            ClaimLaw::Erlang { shape, rate } => vec![GammaTerm {
                weight: 1.0,
                shape: *shape,
                rate: *rate,
            }],
            ClaimLaw::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(&weight, &rate)| GammaTerm {
                    weight,
                    shape: 1,
                    rate,
                })
                .collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.gamma_terms()
            .iter()
            .map(|t| t.weight * t.shape as f64 / t.rate)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.gamma_terms()
            .iter()
            .map(|t| {
                let m = t.shape as f64;
                t.weight * m * (m + 1.0) / (t.rate * t.rate)
            })
            .sum()
    }

    pub fn min_rate(&self) -> f64 {
        self.gamma_terms()
            .iter()
            .map(|t| t.rate)
            .fold(f64::INFINITY, f64::min)
    }

    /// `E[e^{-sC}]`.
    pub fn laplace(&self, s: C64) -> C64 {
        self.gamma_terms()
            .iter()
            .map(|t| {
                let r = C64::new(t.rate, 0.0) / (s + t.rate);
                r.powi(t.shape as i32) * t.weight
            })
            .sum()
    }

    fn laplace_deriv(&self, s: C64) -> C64 {
        self.gamma_terms()
            .iter()
            .map(|t| {
                let m = t.shape as i32;
                let r = C64::new(t.rate, 0.0) / (s + t.rate);
                -r.powi(m) * (t.weight * m as f64) / (s + t.rate)
            })
            .sum()
    }

    fn validate(&self) -> Result<()> {
        match self {
            ClaimLaw::Exponential { rate } | ClaimLaw::Erlang { rate, .. } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidModel("claim rate must be positive"));
                }
                if matches!(self, ClaimLaw::Erlang { shape: 0, .. }) {
                    return Err(Error::InvalidModel("Erlang shape must be at least 1"));
                }
            }
            ClaimLaw::HyperExponential { weights, rates } => {
                if weights.is_empty() || weights.len() != rates.len() {
                    return Err(Error::InvalidModel(
                        "hyperexponential weights and rates must be non-empty and of equal length",
                    ));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidModel("hyperexponential weights must be positive"));
                }
                if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidModel("hyperexponential weights must sum to 1"));
                }
                if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return Err(Error::InvalidModel("claim rate must be positive"));
                }
                for (i, a) in rates.iter().enumerate() {
                    if rates[i + 1..].iter().any(|b| a == b) {
                        return Err(Error::InvalidModel("hyperexponential rates must be distinct"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiskModel {
    /// Premium rate `p`.
    pub p: f64,
    /// Claim intensity `λ`.
    pub lambda: f64,
    pub claims: ClaimLaw,
    /// Gaussian coefficient `σ²`.
    pub sigma2: f64,
    /// Discount rate `q`.
    pub q: f64,
}

impl RiskModel {
    pub fn new(p: f64, lambda: f64, claims: ClaimLaw, sigma2: f64, q: f64) -> Result<Self> {
        let m = RiskModel {
            p,
            lambda,
            claims,
            sigma2,
            q,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::InvalidModel("premium rate p must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidModel("intensity lambda must be nonnegative"));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::InvalidModel("sigma2 must be nonnegative"));
        }
        if !(self.q.is_finite() && self.q > 0.0) {
            return Err(Error::InvalidModel("discount rate q must be positive"));
        }
        self.claims.validate()?;
        if net_profit(self) <= 0.0 {
            return Err(Error::InvalidModel("net profit p - lambda E[C] must be positive"));
        }
        Ok(())
    }

    pub fn bounded_variation(&self) -> bool {
        self.sigma2 == 0.0
    }

    /// `ψ` on the complex plane away from the poles `-μ_k`.
    pub fn psi_c(&self, s: C64) -> C64 {
        s * s * (self.sigma2 / 2.0) + s * self.p + (self.claims.laplace(s) - 1.0) * self.lambda
    }

    pub fn psi_prime_c(&self, s: C64) -> C64 {
        s * self.sigma2 + self.p + self.claims.laplace_deriv(s) * self.lambda
    }

    /// Numerator of `ψ(s) − q` after multiplying by `Π (μ_k + s)^{m_k}`.
    pub fn cleared_polynomial(&self) -> Poly {
        if self.lambda == 0.0 {
            return Poly::from_real(&[-self.q, self.p, self.sigma2 / 2.0]);
        }
        let terms = self.claims.gamma_terms();
        // Distinct rates with their largest shape.
        let mut poles: Vec<(f64, u32)> = Vec::new();
        for t in &terms {
            match poles.iter_mut().find(|(r, _)| *r == t.rate) {
                Some(p) => p.1 = p.1.max(t.shape),
                None => poles.push((t.rate, t.shape)),
            }
        }
        let pole_poly = |skip: Option<(f64, u32)>| {
            let mut d = Poly::real_constant(1.0);
            for &(r, m) in &poles {
                let mut e = m;
                if let Some((sr, sm)) = skip {
                    if sr == r {
                        e -= sm;
                    }
                }
                for _ in 0..e {
                    d = &d * &Poly::linear(r, 1.0);
                }
            }
            d
        };
        let lead = Poly::from_real(&[-(self.lambda + self.q), self.p, self.sigma2 / 2.0]);
        let mut n = &lead * &pole_poly(None);
        for t in &terms {
            let c = self.lambda * t.weight * t.rate.powi(t.shape as i32);
            n = &n + &pole_poly(Some((t.rate, t.shape))).scale(C64::new(c, 0.0));
        }
        n
    }
}

/// Laplace exponent `ψ(θ) = σ²θ²/2 + pθ + λ(E e^{-θC} − 1)`.
pub fn psi(model: &RiskModel, theta: f64) -> f64 {
    model.psi_c(C64::new(theta, 0.0)).re
}

/// `η = ψ'(0) = p − λ E[C]`.
pub fn net_profit(model: &RiskModel) -> f64 {
    model.p - model.lambda * model.claims.mean()
}

/// Roots of `ψ(s) = q`, sorted by decreasing real part. Only `Φ(q)` is
/// guaranteed real; Erlang laws of shape three or more produce conjugate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<C64>,
    pub phi_q: f64,
}

impl RootSet {
    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|r| r.im == 0.0)
    }
}

fn newton_polish(model: &RiskModel, mut z: C64) -> C64 {
    let q = model.q;
    for _ in 0..50 {
        let f = model.psi_c(z) - q;
        let d = model.psi_prime_c(z);
        if d.is_zero() {
            break;
        }
        let step = f / d;
        let next = z - step;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        z = next;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn bisect_phi(model: &RiskModel) -> f64 {
    let q = model.q;
    let mut hi = 1.0;
    while psi(model, hi) <= q {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(model, mid) > q {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots of the Cramér–Lundberg equation `ψ(s) = q`.
pub fn cl_roots(model: &RiskModel) -> Result<RootSet> {
    model.validate()?;
    let poly = model.cleared_polynomial();
    let coeffs: Vec<f64> = poly.coeffs.iter().map(|c| c.re).collect();
    let raw = durand_kerner(&coeffs).ok_or(Error::RootNotConverged)?;
    let mut roots: Vec<C64> = raw
        .into_iter()
        .map(|z| {
            let mut z = newton_polish(model, z);
            if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) {
                z = newton_polish(model, C64::new(z.re, 0.0));
                z.im = 0.0;
            }
            z
        })
        .collect();
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() <= 1e-8 * scale {
                return Err(Error::MultipleRoot(roots[i].re, roots[j].re));
            }
        }
    }
    let q = model.q;
    for z in &roots {
        if (model.psi_c(*z) - q).norm() > 1e-9 * q.max(1.0) {
            return Err(Error::RootNotConverged);
        }
    }
    let positive: Vec<f64> = roots
        .iter()
        .filter(|z| z.im == 0.0 && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    if positive.len() != 1 {
        return Err(Error::RootNotConverged);
    }
    let phi_q = positive[0];
    if (phi_q - bisect_phi(model)).abs() > 1e-9 * phi_q.max(1.0) {
        return Err(Error::RootNotConverged);
    }
    Ok(RootSet { roots, phi_q })
}
