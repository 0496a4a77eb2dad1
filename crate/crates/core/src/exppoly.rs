use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

use crate::poly::{Poly, C64};

/// One term `P(x) e^{rate x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub rate: C64,
    pub poly: Poly,
}

/// Finite sum `Σ P_j(x) e^{ζ_j x}` with complex rates and coefficients.
///
/// Real functions are stored with conjugate pairs, and [`ExpPoly::eval`]
/// returns the real part.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

fn same_rate(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-14 * (1.0 + a.norm())
}

fn cexp(z: C64) -> C64 {
    if z.im == 0.0 {
        C64::new(z.re.exp(), 0.0)
    } else {
        z.exp()
    }
}

/// Values of `p, p', ..., p^(n)` at `x`.
fn poly_derivs(p: &Poly, x: f64, n: usize, out: &mut [C64; 4]) {
    // Taylor coefficients by repeated synthetic division.
    let mut c: [C64; 16] = [C64::zero(); 16];
    let len = p.coeffs.len();
    if len > 16 {
        let mut d = p.clone();
        for slot in out.iter_mut().take(n + 1) {
            *slot = d.eval_real(x);
            d = d.derivative();
        }
        return;
    }
    c[..len].copy_from_slice(&p.coeffs);
    let mut fact = 1.0;
    for k in 0..=n {
        if k >= len {
            out[k] = C64::zero();
            continue;
        }
        for i in (k..len - 1).rev() {
            let t = c[i + 1] * x;
            c[i] += t;
        }
        if k > 0 {
            fact *= k as f64;
        }
        out[k] = c[k] * fact;
    }
}

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn term(rate: C64, poly: Poly) -> Self {
        let mut e = ExpPoly::zero();
        e.push(rate, poly);
        e
    }

    /// Polynomial (rate zero) in real coefficients, lowest degree first.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self::term(C64::zero(), Poly::from_real(coeffs))
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(&[c])
    }

    /// `c e^{rate x}`
    pub fn exponential(c: f64, rate: f64) -> Self {
        Self::term(C64::new(rate, 0.0), Poly::real_constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.poly.is_zero())
    }

    pub fn push(&mut self, rate: C64, poly: Poly) {
        if poly.is_zero() {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| same_rate(t.rate, rate)) {
            t.poly = &t.poly + &poly;
        } else {
            self.terms.push(ExpTerm { rate, poly });
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.rate, t.poly.clone());
        }
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> ExpPoly {
        self.scale_c(C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            out.push(t.rate, t.poly.scale(s));
        }
        out
    }

    pub fn derivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            out.push(t.rate, &t.poly.derivative() + &t.poly.scale(t.rate));
        }
        out
    }

    /// `x -> self(x + d)`
    pub fn shift(&self, d: f64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            out.push(t.rate, t.poly.shift(d).scale(cexp(t.rate * d)));
        }
        out
    }

    pub fn eval_c(&self, x: f64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.poly.eval_real(x) * cexp(t.rate * x))
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_c(x).re
    }

    /// `deriv`-th derivative (at most 3) at `x`.
    pub fn eval_d(&self, x: f64, deriv: usize) -> f64 {
        self.eval_scaled(x, deriv, 0.0)
    }

    /// `e^{-s x}` times the `deriv`-th derivative at `x`, computed without
    /// forming `e^{s x}`; keeps ratios finite where the function overflows.
    pub fn eval_scaled(&self, x: f64, deriv: usize, s: f64) -> f64 {
        assert!(deriv <= 3, "derivatives above the third are not supported");
        let mut pd = [C64::zero(); 4];
        let mut acc = C64::zero();
        for t in &self.terms {
            poly_derivs(&t.poly, x, deriv, &mut pd);
            let mut v = C64::zero();
            let mut zpow = C64::new(1.0, 0.0);
            for j in (0..=deriv).rev() {
                v += pd[j] * zpow * BINOM[deriv][j];
                zpow *= t.rate;
            }
            acc += v * cexp((t.rate - s) * x);
        }
        acc.re
    }

    /// Largest real part among the rates.
    pub fn max_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫_0^∞ e^{-θy} self(y) dy`; every rate must have real part below `θ`.
    pub fn laplace(&self, theta: f64) -> f64 {
        let mut acc = C64::zero();
        for t in &self.terms {
            let d = C64::new(theta, 0.0) - t.rate;
            debug_assert!(d.re > 0.0);
            let mut fact = 1.0;
            let mut dpow = d;
            for (k, &c) in t.poly.coeffs.iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                    dpow *= d;
                }
                acc += c * fact / dpow;
            }
        }
        acc.re
    }

    /// `x -> ∫_0^x kernel(x - y) self(y) dy`, where `kernel` is a pure
    /// exponential sum (all polynomials constant).
    pub fn convolve(&self, kernel: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for k in &kernel.terms {
            debug_assert!(k.poly.degree() == 0);
            let a = k.poly.coeff(0);
            let zeta = k.rate;
            for t in &self.terms {
                let beta = t.rate - zeta;
                if beta.norm() <= 1e-12 * (1.0 + zeta.norm()) {
                    out.push(zeta, t.poly.integral().scale(a));
                } else {
                    let q = t.poly.exp_antiderivative(beta).scale(a);
                    out.push(zeta, Poly::constant(-q.coeff(0)));
                    out.push(t.rate, q);
                }
            }
        }
        out
    }
}

/// `∫_lo^hi s^n e^{beta s} ds` for `hi` finite and `lo` finite or `-∞`
/// (then `Re beta > 0` is required).
pub(crate) fn moment(n: usize, beta: C64, lo: f64, hi: f64) -> C64 {
    if lo == f64::NEG_INFINITY {
        return closed_moment(n, beta, hi);
    }
    let scale = lo.abs().max(hi.abs());
    if beta.norm() * scale < 0.5 {
        // Power series of e^{beta s}; converges fast in this regime.
        let mut acc = C64::zero();
        let mut coef = C64::new(1.0, 0.0);
        let mut hp = hi.powi(n as i32 + 1);
        let mut lp = lo.powi(n as i32 + 1);
        for t in 0..200 {
            let m = (n + t + 1) as f64;
            let term = coef * ((hp - lp) / m);
            acc += term;
            if term.norm() <= 1e-18 * acc.norm().max(1e-300) && t > 2 {
                break;
            }
            coef = coef * beta / (t as f64 + 1.0);
            hp *= hi;
            lp *= lo;
        }
        return acc;
    }
    closed_moment(n, beta, hi) - closed_moment(n, beta, lo)
}

/// Antiderivative `e^{beta s} Σ_j (-1)^j n!/(n-j)! s^{n-j} / beta^{j+1}` at `s`,
/// taken as zero at `s = -∞`.
fn closed_moment(n: usize, beta: C64, s: f64) -> C64 {
    if s == f64::NEG_INFINITY {
        return C64::zero();
    }
    let mut acc = C64::zero();
    let mut falling = 1.0;
    let mut bpow = beta;
    let mut sign = 1.0;
    for j in 0..=n {
        acc += C64::new(sign * falling * s.powi((n - j) as i32), 0.0) / bpow;
        falling *= (n - j) as f64;
        bpow *= beta;
        sign = -sign;
    }
    acc * cexp(beta * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn sample() -> ExpPoly {
        let mut e = ExpPoly::zero();
        e.push(C64::new(-0.5, 0.0), Poly::from_real(&[1.0, 2.0]));
        e.push(C64::new(0.1, 0.3), Poly::from_real(&[0.5]));
        e.push(C64::new(0.1, -0.3), Poly::from_real(&[0.5]));
        e.push(C64::zero(), Poly::from_real(&[0.0, 0.0, 1.5]));
        e
    }

    #[test]
    fn derivatives_match_symbolic() {
        let e = sample();
        let d1 = e.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        for x in [0.0, 0.7, 3.0] {
            assert!((e.eval_d(x, 1) - d1.eval(x)).abs() < 1e-12);
            assert!((e.eval_d(x, 2) - d2.eval(x)).abs() < 1e-12);
            assert!((e.eval_d(x, 3) - d3.eval(x)).abs() < 1e-12);
            let h = 1e-5;
            let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
            assert!((fd - d1.eval(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn shift_is_translation() {
        let e = sample();
        let s = e.shift(1.3);
        for x in [-2.0, 0.0, 1.0] {
            assert!((s.eval(x) - e.eval(x + 1.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_against_quadrature() {
        let e = sample();
        let mut k = ExpPoly::zero();
        k.push(C64::new(0.2, 0.0), Poly::real_constant(1.0));
        k.push(C64::new(-0.5, 0.0), Poly::real_constant(-0.3));
        let c = e.convolve(&k);
        for x in [0.0, 0.5, 2.5] {
            let q = simpson(|y| k.eval(x - y) * e.eval(y), 0.0, x, 2000);
            assert!((c.eval(x) - q).abs() < 1e-10, "{} vs {}", c.eval(x), q);
        }
    }

    #[test]
    fn moments_against_quadrature() {
        for &beta in &[0.0, 1e-3, 0.4, 2.0, -1.5] {
            for n in 0..4 {
                let b = C64::new(beta, 0.0);
                let got = moment(n, b, -3.0, -0.5).re;
                let want = simpson(
                    |s| s.powi(n as i32) * (beta * s).exp(),
                    -3.0,
                    -0.5,
                    4000,
                );
                assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()));
            }
        }
        // Γ-type tail: ∫_{-∞}^0 s^2 e^{2s} ds = 2/8
        let t = moment(2, C64::new(2.0, 0.0), f64::NEG_INFINITY, 0.0);
        assert!((t.re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn laplace_closed_form() {
        let e = ExpPoly::polynomial(&[1.0, 1.0]);
        // ∫ e^{-2y}(1+y) dy = 1/2 + 1/4
        assert!((e.laplace(2.0) - 0.75).abs() < 1e-15);
    }
}
