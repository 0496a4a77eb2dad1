//! The `q`-scale function `W^(q)(x) = Σ A_i e^{ζ_i x}` and its relatives
//! `Z^(q)`, `Z^(q,v)` and `Z_1`, all as exact exponential sums.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::exppoly::ExpPoly;
use crate::levy_model::{cl_roots, net_profit, RiskModel, RootSet};
use crate::poly::{Poly, C64};
use crate::Result;

/// Partial-fraction data of `1/(ψ(θ) − q) = Σ A_i / (θ − ζ_i)`.
#[derive(Clone, Debug)]
pub struct ScaleBasis {
    pub model: RiskModel,
    pub roots: RootSet,
    /// `A_i = 1/ψ'(ζ_i)`, aligned with `roots.roots`.
    pub coeffs: Vec<C64>,
    w: ExpPoly,
}

impl ScaleBasis {
    pub fn new(model: &RiskModel) -> Result<Self> {
        let roots = cl_roots(model)?;
        let coeffs: Vec<C64> = roots
            .roots
            .iter()
            .map(|&z| C64::new(1.0, 0.0) / model.psi_prime_c(z))
            .collect();
        let mut w = ExpPoly::zero();
        for (&z, &a) in roots.roots.iter().zip(&coeffs) {
            w.push(z, Poly::constant(a));
        }
        Ok(ScaleBasis {
            model: model.clone(),
            roots,
            coeffs,
            w,
        })
    }

    pub fn phi_q(&self) -> f64 {
        self.roots.phi_q
    }

    pub fn q(&self) -> f64 {
        self.model.q
    }

    /// `W^(q)` on `[0, ∞)` as an exponential sum.
    pub fn w(&self) -> &ExpPoly {
        &self.w
    }

    fn terms(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.roots.roots.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// `W^(q)` and its first two derivatives; zero on `(−∞, 0)`.
    pub fn w_q(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let phi = self.phi_q();
        if phi * x > 700.0 {
            return (phi * x).exp() * self.w.eval_scaled(x, deriv, phi);
        }
        self.w.eval_d(x, deriv)
    }

    /// `e^{−Φ(q)x}` times the `deriv`-th derivative of `W^(q)`.
    pub fn w_q_scaled(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.w.eval_scaled(x, deriv, self.phi_q())
    }

    /// `Z^(q)(x) = q Σ A_i e^{ζ_i x}/ζ_i` on `[0, ∞)`.
    pub fn z_q_exppoly(&self) -> ExpPoly {
        let q = self.q();
        let mut e = ExpPoly::zero();
        for (z, a) in self.terms() {
            e.push(z, Poly::constant(a * q / z));
        }
        e
    }

    pub fn z_q(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return if deriv == 0 { 1.0 } else { 0.0 };
        }
        self.z_q_exppoly().eval_d(x, deriv)
    }

    /// `Z^(q,v)` on `[0, ∞)`. Uses the rational form
    /// `(ψ(v) − q) Σ A_i e^{ζ_i x}/(v − ζ_i)` unless `v` sits within `1e−8`
    /// of a root, where the integral form
    /// `e^{vx} + (q − ψ(v)) Σ A_j (e^{ζ_j x} − e^{vx})/(ζ_j − v)` is used
    /// with the offending divided difference replaced by its limit `x e^{vx}`.
    pub fn z_qv_exppoly(&self, v: f64) -> ExpPoly {
        let vc = C64::new(v, 0.0);
        let gap = self.model.psi_c(vc).re - self.q();
        let near = self.terms().any(|(z, _)| (vc - z).norm() < 1e-8);
        let mut e = ExpPoly::zero();
        if !near {
            for (z, a) in self.terms() {
                e.push(z, Poly::constant(a * gap / (vc - z)));
            }
            return e;
        }
        e.push(vc, Poly::real_constant(1.0));
        for (z, a) in self.terms() {
            let c = a * (-gap);
            if (vc - z).norm() < 1e-8 {
                e.push(vc, Poly::from_real(&[0.0, 1.0]).scale(c));
            } else {
                let k = c / (z - vc);
                e.push(z, Poly::constant(k));
                e.push(vc, Poly::constant(-k));
            }
        }
        e
    }

    pub fn z_qv(&self, v: f64, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return v.powi(deriv as i32) * (v * x).exp();
        }
        self.z_qv_exppoly(v).eval_d(x, deriv)
    }

    /// `Z_1 = ∂_v Z^(q,v)|_{v=0} = Σ A_i (q/ζ_i² − ψ'(0)/ζ_i) e^{ζ_i x}` on `[0, ∞)`.
    pub fn z_1_exppoly(&self) -> ExpPoly {
        let q = self.q();
        let eta = net_profit(&self.model);
        let mut e = ExpPoly::zero();
        for (z, a) in self.terms() {
            e.push(z, Poly::constant(a * (q / (z * z) - eta / z)));
        }
        e
    }

    pub fn z_1(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return if deriv == 0 { x } else if deriv == 1 { 1.0 } else { 0.0 };
        }
        self.z_1_exppoly().eval_d(x, deriv)
    }
}
