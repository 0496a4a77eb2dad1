//! Value functions of multi-band strategies: scale-function segments on the
//! continuation bands `[a_i, b_i⁺]` alternating with unit-slope affine
//! segments where dividends are paid.

use alloc::vec;
use alloc::vec::Vec;

use crate::exppoly::ExpPoly;
use crate::gerber_shiu::{gerber_shiu_exppoly, GerberShiu, Payoff, PayoffPiece, Penalty};
use crate::levy_model::RiskModel;
use crate::scale_functions::ScaleBasis;
use crate::{Error, Result};

/// Continuation band `[a, b_plus]`; hitting `b_plus` triggers payment down to `b_minus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub a: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BandStrategy {
    pub bands: Vec<Band>,
}

impl BandStrategy {
    pub fn new(bands: Vec<Band>) -> Result<Self> {
        let s = BandStrategy { bands };
        s.validate()?;
        Ok(s)
    }

    /// Reflection (or lump-sum payment, when `b_minus < b_plus`) at a single level.
    pub fn single(b_minus: f64, b_plus: f64) -> Self {
        BandStrategy {
            bands: vec![Band {
                a: 0.0,
                b_minus,
                b_plus,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .bands
            .first()
            .ok_or(Error::InvalidStrategy("strategy needs at least one band"))?;
        if first.a != 0.0 {
            return Err(Error::InvalidStrategy("the first band must start at 0"));
        }
        for (i, b) in self.bands.iter().enumerate() {
            if ![b.a, b.b_minus, b.b_plus].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidStrategy("band levels must be finite"));
            }
            if !(b.a <= b.b_plus && 0.0 <= b.b_minus && b.b_minus <= b.b_plus) {
                return Err(Error::InvalidStrategy(
                    "each band needs a <= b_plus and 0 <= b_minus <= b_plus",
                ));
            }
            if let Some(next) = self.bands.get(i + 1) {
                if b.b_plus >= next.a {
                    return Err(Error::InvalidStrategy("bands must be intertwined: b_plus < next a"));
                }
            }
        }
        Ok(())
    }

    pub fn a_levels(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b.a).collect()
    }

    pub fn b_levels(&self) -> Vec<(f64, f64)> {
        self.bands.iter().map(|b| (b.b_minus, b.b_plus)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    /// `v(x) = W(x − a) c + F(x − a)` on `[a, end]`; `v` holds the sum in the
    /// local variable `x − a`.
    Scale {
        a: f64,
        end: f64,
        c: f64,
        f: ExpPoly,
        v: ExpPoly,
    },
    /// `v(x) = x − anchor + offset` on `(start, end)`.
    Affine {
        start: f64,
        end: f64,
        anchor: f64,
        offset: f64,
    },
}

#[derive(Clone, Debug)]
pub struct PiecewiseValue {
    pub basis: ScaleBasis,
    pub penalty: Penalty,
    pub k: f64,
    pub strategy: BandStrategy,
    pub segments: Vec<Segment>,
}

impl PiecewiseValue {
    pub fn model(&self) -> &RiskModel {
        &self.basis.model
    }

    fn eval_d(&self, x: f64, deriv: usize) -> f64 {
        if x < 0.0 {
            return self.penalty.derivative(x, deriv);
        }
        for seg in &self.segments {
            match seg {
                Segment::Scale { a, end, v, .. } if *a <= x && x <= *end => {
                    return v.eval_d(x - a, deriv);
                }
                Segment::Affine {
                    start,
                    end,
                    anchor,
                    offset,
                } if *start < x && x < *end => {
                    return match deriv {
                        0 => x - anchor + offset,
                        1 => 1.0,
                        _ => 0.0,
                    };
                }
                _ => {}
            }
        }
        unreachable!("segments cover [0, ∞)")
    }

    /// `v(x)`; the penalty below 0.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.eval_d(x, 0)
    }

    /// `v'(x)`, taken from the left at the right end of each band.
    pub fn derivative(&self, x: f64) -> f64 {
        self.eval_d(x, 1)
    }

    /// Limit of `v` from the left at `x`.
    pub fn left_limit(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.penalty.value(x);
        }
        for seg in &self.segments {
            match seg {
                Segment::Scale { a, end, v, .. } if *a < x && x <= *end => return v.eval(x - a),
                Segment::Affine {
                    start,
                    end,
                    anchor,
                    offset,
                } if *start < x && x <= *end => return x - anchor + offset,
                _ => {}
            }
        }
        self.evaluate(x)
    }

    /// Payoff `s -> v(a + s)` on `s ≤ 0`.
    pub fn payoff_at(&self, a: f64) -> Payoff {
        let mut pieces = vec![PayoffPiece {
            lo: f64::NEG_INFINITY,
            hi: -a,
            f: self.penalty.translated(a).as_exppoly(),
        }];
        for seg in &self.segments {
            let (start, end, f) = match seg {
                Segment::Scale { a: sa, end, v, .. } => (*sa, *end, v.shift(a - sa)),
                Segment::Affine {
                    start,
                    end,
                    anchor,
                    offset,
                } => (*start, *end, ExpPoly::polynomial(&[a - anchor + offset, 1.0])),
            };
            if start >= a {
                break;
            }
            let hi = end.min(a) - a;
            let lo = start - a;
            if hi > lo {
                pieces.push(PayoffPiece { lo, hi, f });
            }
        }
        Payoff { pieces }
    }

    /// Top of the highest band.
    pub fn top(&self) -> f64 {
        self.strategy.bands.last().map_or(0.0, |b| b.b_plus)
    }
}

/// Builds the value function of `strategy`, band by band. For the bands above
/// the first, the Gerber–Shiu function uses the value of the lower bands as
/// the payoff at the band's bottom.
pub fn assemble(gs: &GerberShiu, strategy: &BandStrategy, k: f64) -> Result<PiecewiseValue> {
    strategy.validate()?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::DomainError("fixed cost K must be nonnegative"));
    }
    let basis = &gs.basis;
    let w = basis.w();
    let mut pv = PiecewiseValue {
        basis: basis.clone(),
        penalty: gs.penalty,
        k,
        strategy: BandStrategy::default(),
        segments: Vec::new(),
    };
    for (i, band) in strategy.bands.iter().enumerate() {
        let a = band.a;
        let f = if i == 0 {
            gs.f_exppoly().clone()
        } else {
            gerber_shiu_exppoly(basis, &pv.payoff_at(a))?
        };
        let (um, up) = (band.b_minus - a, band.b_plus - a);
        let c = if k == 0.0 {
            (1.0 - f.eval_d(up, 1)) / w.eval_d(up, 1)
        } else if um >= 0.0 {
            if up <= um {
                return Err(Error::InvalidStrategy("K > 0 needs b_minus < b_plus"));
            }
            (up - um - k - (f.eval(up) - f.eval(um))) / (w.eval(up) - w.eval(um))
        } else {
            (pv.evaluate(band.b_minus) + up - um - k - f.eval(up)) / w.eval(up)
        };
        if i > 0 {
            let left = pv.left_limit(a);
            let gap = w.eval(0.0) * c;
            if gap.abs() > 1e-7 * left.abs().max(1.0) {
                return Err(Error::KnotMismatch { x: a, gap });
            }
            // Close the previous affine segment at a.
            if let Some(Segment::Affine { end, .. }) = pv.segments.last_mut() {
                *end = a;
            }
        }
        let v = w.scale(c).add(&f);
        let vb = v.eval(up);
        pv.segments.push(Segment::Scale {
            a,
            end: band.b_plus,
            c,
            f,
            v,
        });
        pv.segments.push(Segment::Affine {
            start: band.b_plus,
            end: f64::INFINITY,
            anchor: band.b_plus,
            offset: vb,
        });
        pv.strategy.bands.push(*band);
    }
    Ok(pv)
}

/// Value of paying out everything immediately and then every premium as it
/// arrives until the first claim: `x + (p + w_ν(0) + λ w(0))/(q + λ)`.
pub fn lump_sum_value(model: &RiskModel, penalty: &Penalty, x: f64) -> Result<f64> {
    if model.sigma2 > 0.0 {
        return Err(Error::UnsupportedModel);
    }
    if x < 0.0 {
        return Err(Error::DomainError("lump-sum value needs x >= 0"));
    }
    penalty.validate(model)?;
    let w_nu0 = Payoff::from_penalty(penalty).w_nu(model)?.eval(0.0);
    let gamma = (model.p + w_nu0 + model.lambda * penalty.value(0.0)) / (model.q + model.lambda);
    Ok(x + gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::ClaimLaw;

    fn exp_model() -> RiskModel {
        RiskModel::new(1.5, 1.0, ClaimLaw::Exponential { rate: 1.0 }, 0.0, 0.1).unwrap()
    }

    #[test]
    fn single_barrier_zero_penalty() {
        let b = ScaleBasis::new(&exp_model()).unwrap();
        let gs = GerberShiu::new(&b, Penalty::Zero).unwrap();
        let bar = 2.0;
        let pv = assemble(&gs, &BandStrategy::single(bar, bar), 0.0).unwrap();
        let wp = b.w_q(bar, 1);
        for x in [0.0, 1.0, 2.0] {
            assert!((pv.evaluate(x) - b.w_q(x, 0) / wp).abs() < 1e-13);
        }
        let above = pv.evaluate(3.0);
        assert!((above - (1.0 + b.w_q(bar, 0) / wp)).abs() < 1e-13);
        assert_eq!(pv.evaluate(-1.0), 0.0);
    }

    #[test]
    fn lump_sum_examples() {
        let m = exp_model();
        let g = lump_sum_value(&m, &Penalty::Zero, 0.0).unwrap();
        assert!((g - 1.5 / 1.1).abs() < 1e-14);
        let am = RiskModel::new(21.4, 10.0, ClaimLaw::Erlang { shape: 2, rate: 1.0 }, 0.0, 0.1).unwrap();
        for c in [0.0, 0.2, 0.6, 1.0] {
            let g = lump_sum_value(&am, &Penalty::Affine { c, c0: 0.0 }, 0.0).unwrap();
            assert!((g - (214.0 - 200.0 * c) / 101.0).abs() < 1e-12);
        }
    }

    #[test]
    fn payoff_at_reproduces_value() {
        let b = ScaleBasis::new(&exp_model()).unwrap();
        let gs = GerberShiu::new(&b, Penalty::Affine { c: 0.5, c0: -0.2 }).unwrap();
        let pv = assemble(&gs, &BandStrategy::single(1.5, 1.5), 0.0).unwrap();
        let a = 4.0;
        let pay = pv.payoff_at(a);
        for s in [-6.0, -4.5, -3.999, -3.0, -2.5, -1.0, 0.0] {
            assert!((pay.value(s) - pv.evaluate(a + s)).abs() < 1e-12, "{s}");
        }
    }
}
