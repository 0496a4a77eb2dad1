use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

pub type C64 = Complex<f64>;

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly { coeffs: vec![c] }.trimmed()
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly {
            coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
        .trimmed()
    }

    /// `c0 + c1 x`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::from_real(&[c0, c1])
    }

    fn trimmed(mut self) -> Self {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(C64::zero)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly { coeffs }.trimmed()
    }

    pub fn scale(&self, s: C64) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
        .trimmed()
    }

    /// `x -> p(x + d)`
    pub fn shift(&self, d: f64) -> Self {
        let mut out = Poly::zero();
        let lin = Poly::linear(d, 1.0);
        for &c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(c);
        }
        out
    }

    /// Solution `Q` of `Q' + beta Q = self`, so that `(Q e^{beta x})' = self e^{beta x}`.
    /// Requires `beta != 0`.
    pub fn exp_antiderivative(&self, beta: C64) -> Self {
        let mut out = Poly::zero();
        let mut d = self.clone();
        let mut sign = 1.0;
        let mut bpow = beta;
        while !d.is_zero() {
            out = &out + &d.scale(C64::new(sign, 0.0) / bpow);
            d = d.derivative();
            sign = -sign;
            bpow *= beta;
        }
        out
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly {
            coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
        .trimmed()
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly {
            coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        }
        .trimmed()
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![C64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }.trimmed()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// All complex roots of a real polynomial (lowest degree first) by the
/// Weierstrass–Durand–Kerner iteration. Leading zeros are stripped.
pub(crate) fn durand_kerner(coeffs: &[f64]) -> Option<Vec<C64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while matches!(c.last(), Some(&x) if x == 0.0) {
        c.pop();
    }
    let n = c.len().checked_sub(1)?;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    // Fujiwara bound on the root moduli.
    let mut radius: f64 = 0.0;
    for (k, &a) in monic.iter().enumerate().take(n) {
        let e = (n - k) as f64;
        let mut t = a.abs();
        if k == 0 {
            t /= 2.0;
        }
        radius = radius.max(t.powf(1.0 / e));
    }
    radius = 2.0 * radius.max(1e-3);
    let eval = |z: C64| monic.iter().rev().fold(C64::zero(), |acc, &a| acc * z + a);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius * 0.5, th)
        })
        .collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.is_zero() {
                den = C64::new(1e-300, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            return Some(z);
        }
    }
    // Clustered roots converge only linearly; accept a loose fixed point.
    let resid = z
        .iter()
        .map(|&r| eval(r).norm() / (1.0 + r.norm()).powi(n as i32))
        .fold(0.0, f64::max);
    (resid < 1e-8).then_some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_and_antiderivative() {
        let p = Poly::from_real(&[1.0, -2.0, 3.0]);
        let q = p.shift(0.5);
        for x in [-1.0, 0.0, 2.0] {
            assert!((q.eval_real(x) - p.eval_real(x + 0.5)).norm() < 1e-12);
        }
        let beta = C64::new(-0.7, 0.2);
        let qa = p.exp_antiderivative(beta);
        let lhs = &qa.derivative() + &qa.scale(beta);
        assert!((&lhs - &p).coeffs.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn dk_cubic() {
        // (x - 1)(x + 2)(x - 0.25)
        let roots = durand_kerner(&[0.5, -2.25, 0.75, 1.0]).unwrap();
        let mut re: Vec<f64> = roots.iter().map(|r| r.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-2.0, 0.25, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(roots.iter().all(|r| r.im.abs() < 1e-12));
    }
}
