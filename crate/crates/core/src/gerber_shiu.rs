//! Gerber–Shiu functions: the `q`-harmonic extension `F` of a payoff given on
//! the negative half-line, built from
//! `F(x) = (σ²/2) w'(0−) W(x) + w(0) Z(x) − ∫_0^x W(x−y) w_ν(y) dy`
//! with `w_ν(y) = ∫_{(y,∞)} [w(y−z) − w(0)] ν(dz)`.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::exppoly::{moment, ExpPoly};
use crate::levy_model::{net_profit, RiskModel};
use crate::poly::{Poly, C64};
use crate::scale_functions::ScaleBasis;
use crate::{Error, Result};

/// Ruin penalty `w` on `(−∞, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Penalty {
    Zero,
    /// `w(x) = c x + c0`
    Affine { c: f64, c0: f64 },
    /// `w(x) = c e^{v x}`
    Exponential { c: f64, v: f64 },
}

impl Penalty {
    pub fn validate(&self, model: &RiskModel) -> Result<()> {
        match *self {
            Penalty::Zero => Ok(()),
            Penalty::Affine { c, c0 } => {
                if !(c.is_finite() && c0.is_finite()) {
                    return Err(Error::InvalidPenalty("coefficients must be finite"));
                }
                if c < 0.0 || c0 > 0.0 {
                    return Err(Error::InvalidPenalty("affine penalty needs c >= 0 and c0 <= 0"));
                }
                Ok(())
            }
            Penalty::Exponential { c, v } => {
                if !(c.is_finite() && v.is_finite()) {
                    return Err(Error::InvalidPenalty("coefficients must be finite"));
                }
                if c > 0.0 {
                    return Err(Error::InvalidPenalty("exponential penalty needs c <= 0"));
                }
                if v > 0.0 || v <= -model.claims.min_rate() {
                    return Err(Error::InvalidPenalty(
                        "exponential penalty needs -min claim rate < v <= 0",
                    ));
                }
                Ok(())
            }
        }
    }

    /// `w(x)`; the formulas extend naturally to `x > 0`.
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Penalty::Zero => 0.0,
            Penalty::Affine { c, c0 } => c * x + c0,
            Penalty::Exponential { c, v } => c * (v * x).exp(),
        }
    }

    pub fn derivative(&self, x: f64, deriv: usize) -> f64 {
        match (*self, deriv) {
            (_, 0) => self.value(x),
            (Penalty::Zero, _) => 0.0,
            (Penalty::Affine { c, .. }, 1) => c,
            (Penalty::Affine { .. }, _) => 0.0,
            (Penalty::Exponential { c, v }, d) => c * v.powi(d as i32) * (v * x).exp(),
        }
    }

    /// `x -> w(a + x)`.
    pub fn translated(&self, a: f64) -> Penalty {
        match *self {
            Penalty::Zero => Penalty::Zero,
            Penalty::Affine { c, c0 } => Penalty::Affine { c, c0: c0 + c * a },
            Penalty::Exponential { c, v } => Penalty::Exponential {
                c: c * (v * a).exp(),
                v,
            },
        }
    }

    pub fn as_exppoly(&self) -> ExpPoly {
        match *self {
            Penalty::Zero => ExpPoly::zero(),
            Penalty::Affine { c, c0 } => ExpPoly::polynomial(&[c0, c]),
            Penalty::Exponential { c, v } => ExpPoly::exponential(c, v),
        }
    }
}

/// Restriction of a payoff to `[lo, hi]` (`lo` may be `−∞`).
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffPiece {
    pub lo: f64,
    pub hi: f64,
    pub f: ExpPoly,
}

/// Payoff on `(−∞, 0]` made of exponential-polynomial pieces, ordered left to right.
#[derive(Clone, Debug, PartialEq)]
pub struct Payoff {
    pub pieces: Vec<PayoffPiece>,
}

impl Payoff {
    pub fn from_penalty(p: &Penalty) -> Payoff {
        Payoff {
            pieces: vec![PayoffPiece {
                lo: f64::NEG_INFINITY,
                hi: 0.0,
                f: p.as_exppoly(),
            }],
        }
    }

    /// Same payoff with the value at `0` alone replaced by `v`, as when the
    /// function jumps at `0`. A zero-width piece changes no integral.
    pub fn with_value_at_zero(mut self, v: f64) -> Payoff {
        self.pieces.push(PayoffPiece {
            lo: 0.0,
            hi: 0.0,
            f: ExpPoly::constant(v),
        });
        self
    }

    fn top(&self) -> &PayoffPiece {
        self.pieces.last().expect("payoff has at least one piece")
    }

    /// `w(0)`.
    pub fn at_zero(&self) -> f64 {
        self.top().f.eval(0.0)
    }

    /// `w'(0−)`.
    pub fn slope_at_zero(&self) -> f64 {
        self.top().f.eval_d(0.0, 1)
    }

    pub fn value(&self, s: f64) -> f64 {
        for piece in &self.pieces {
            if s <= piece.hi {
                return piece.f.eval(s);
            }
        }
        self.top().f.eval(s)
    }

    fn check_integrable(&self, model: &RiskModel) -> Result<()> {
        let mu = model.claims.min_rate();
        for piece in &self.pieces {
            if piece.lo == f64::NEG_INFINITY
                && piece.f.terms.iter().any(|t| t.rate.re + mu <= 0.0)
            {
                return Err(Error::InvalidPenalty("payoff not integrable against the claim law"));
            }
        }
        Ok(())
    }

    /// `y -> ∫_{(y,∞)} h(y − z) ν(dz)` on `y ≥ 0`, where `h` is this payoff.
    /// The result is a sum of `y^r e^{−μ y}` terms.
    pub fn tail_transform(&self, model: &RiskModel) -> Result<ExpPoly> {
        self.check_integrable(model)?;
        let mut out = ExpPoly::zero();
        for g in model.claims.gamma_terms() {
            let m = g.shape as usize;
            let mut fact = 1.0;
            for k in 1..m {
                fact *= k as f64;
            }
            let pre = model.lambda * g.weight * g.rate.powi(g.shape as i32) / fact;
            // Coefficients of y^r, r < m.
            let mut coeffs = vec![C64::new(0.0, 0.0); m];
            for piece in &self.pieces {
                for t in &piece.f.terms {
                    let beta = t.rate + g.rate;
                    for (r, slot) in coeffs.iter_mut().enumerate() {
                        let j = m - 1 - r;
                        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                        let mut acc = C64::new(0.0, 0.0);
                        for (k, &pk) in t.poly.coeffs.iter().enumerate() {
                            acc += pk * moment(k + j, beta, piece.lo, piece.hi);
                        }
                        *slot += acc * (pre * binom(m - 1, r) * sign);
                    }
                }
            }
            out.push(C64::new(-g.rate, 0.0), Poly { coeffs });
        }
        Ok(out)
    }

    /// `w_ν(y) = ∫_{(y,∞)} [w(y − z) − w(0)] ν(dz)` on `y ≥ 0`.
    pub fn w_nu(&self, model: &RiskModel) -> Result<ExpPoly> {
        let mut shifted = self.clone();
        shifted.pieces.push(PayoffPiece {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
            f: ExpPoly::constant(-self.at_zero()),
        });
        shifted.tail_transform(model)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// `y -> ∫_{(y,∞)} (z − y) ν(dz)` on `y ≥ 0`.
pub fn integrated_tail(model: &RiskModel) -> ExpPoly {
    let p = Payoff {
        pieces: vec![PayoffPiece {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
            f: ExpPoly::polynomial(&[0.0, -1.0]),
        }],
    };
    p.tail_transform(model).expect("polynomial payoffs are integrable")
}

/// Gerber–Shiu function of an arbitrary piecewise payoff, on `[0, ∞)`.
pub fn gerber_shiu_exppoly(basis: &ScaleBasis, payoff: &Payoff) -> Result<ExpPoly> {
    let model = &basis.model;
    let w_nu = payoff.w_nu(model)?;
    let mut f = basis.z_q_exppoly().scale(payoff.at_zero());
    if model.sigma2 > 0.0 {
        f = f.add(&basis.w().scale(model.sigma2 / 2.0 * payoff.slope_at_zero()));
    }
    Ok(f.sub(&w_nu.convolve(basis.w())))
}

/// `κ = (σ²/2) w'(0−) + (q/Φ) w(0) − L w_ν(Φ)`, the limit of `F/W`.
pub fn kappa_of(basis: &ScaleBasis, payoff: &Payoff, w_nu: &ExpPoly) -> f64 {
    let phi = basis.phi_q();
    basis.model.sigma2 / 2.0 * payoff.slope_at_zero() + basis.q() / phi * payoff.at_zero()
        - w_nu.laplace(phi)
}

/// Generator of the affine extension `w(0) + b x` applied on `x > 0`:
/// `bη − q(bx + w(0)) + ∫_{(x,∞)} [w(x−z) − w(0) + b(z−x)] ν(dz)`.
pub fn generator_exppoly(model: &RiskModel, payoff: &Payoff, w_nu: &ExpPoly, b: f64) -> ExpPoly {
    let w0 = payoff.at_zero();
    let eta = net_profit(model);
    ExpPoly::polynomial(&[b * eta - model.q * w0, -model.q * b])
        .add(w_nu)
        .add(&integrated_tail(model).scale(b))
}

/// Gerber–Shiu function of one of the closed-form penalties.
#[derive(Clone, Debug)]
pub struct GerberShiu {
    pub penalty: Penalty,
    pub basis: ScaleBasis,
    f: ExpPoly,
    w_nu: ExpPoly,
    kappa: f64,
}

impl GerberShiu {
    pub fn new(basis: &ScaleBasis, penalty: Penalty) -> Result<Self> {
        penalty.validate(&basis.model)?;
        Self::unchecked(basis, penalty)
    }

    /// No sign checks; used for translated penalties, which may turn positive.
    fn unchecked(basis: &ScaleBasis, penalty: Penalty) -> Result<Self> {
        // Z₁'(0) = 1 and Z^(q,v)'(0) = v, so these already paste smoothly
        // when σ² > 0; no separate W term is needed.
        let f = match penalty {
            Penalty::Zero => ExpPoly::zero(),
            Penalty::Affine { c, c0 } => basis
                .z_1_exppoly()
                .scale(c)
                .add(&basis.z_q_exppoly().scale(c0)),
            Penalty::Exponential { c, v } => basis.z_qv_exppoly(v).scale(c),
        };
        let payoff = Payoff::from_penalty(&penalty);
        let w_nu = payoff.w_nu(&basis.model)?;
        let kappa = kappa_of(basis, &payoff, &w_nu);
        Ok(GerberShiu {
            penalty,
            basis: basis.clone(),
            f,
            w_nu,
            kappa,
        })
    }

    pub fn payoff(&self) -> Payoff {
        Payoff::from_penalty(&self.penalty)
    }

    /// `F_w` on `[0, ∞)`.
    pub fn f_exppoly(&self) -> &ExpPoly {
        &self.f
    }

    /// `F_w` and derivatives; equals `w` on `(−∞, 0)`.
    pub fn f_w(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return self.penalty.derivative(x, deriv);
        }
        self.f.eval_d(x, deriv)
    }

    pub fn kappa_w(&self) -> f64 {
        self.kappa
    }

    /// `w_ν` on `[0, ∞)`.
    pub fn w_nu(&self) -> &ExpPoly {
        &self.w_nu
    }

    /// `V_w = F_w − κ_w W`, the discounted penalty without dividends.
    pub fn v_penalty(&self, x: f64) -> f64 {
        if x < 0.0 {
            return self.penalty.value(x);
        }
        self.f_w(x, 0) - self.kappa * self.basis.w_q(x, 0)
    }

    /// Generator remainder `J_w` for the affine extension with slope `b`.
    pub fn j_w(&self, b: f64, x: f64) -> f64 {
        generator_exppoly(&self.basis.model, &self.payoff(), &self.w_nu, b).eval(x)
    }

    /// `E_x[e^{−qT} w(X_T); exit below a] + δ E_x[e^{−qT}; exit above b]`.
    pub fn two_sided_exit(&self, a: f64, b: f64, x: f64, delta: f64) -> Result<f64> {
        if !(a < x && x < b) {
            return Err(Error::DomainError("two-sided exit needs a < x < b"));
        }
        let shifted = GerberShiu::unchecked(&self.basis, self.penalty.translated(a))?;
        let w = |y: f64| self.basis.w_q(y, 0);
        let fb = shifted.f_w(b - a, 0);
        Ok(shifted.f_w(x - a, 0) + w(x - a) * (delta - fb) / w(b - a))
    }
}
