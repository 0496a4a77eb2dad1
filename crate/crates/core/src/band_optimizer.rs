//! Optimal band levels: last global maxima of the barrier-influence functions,
//! the stopping level of each further band, and the generator-sign test that
//! decides when the recursion stops.

use alloc::boxed::Box;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::exppoly::ExpPoly;
use crate::gerber_shiu::{gerber_shiu_exppoly, generator_exppoly, GerberShiu};
use crate::scale_functions::ScaleBasis;
use crate::search::{bisect, golden_max, last_global_max, nelder_mead_max, quadratic_grid};
use crate::value_function::{assemble, Band, BandStrategy, PiecewiseValue};
use crate::{Error, Result};

const GRID_1D: usize = 4000;
const GRID_2D: usize = 120;
const GRID_ALPHA: usize = 160;
const GRID_CHECK: usize = 2000;
const STARTS_2D: usize = 8;
const MAX_BANDS: usize = 16;
const GENERATOR_TOL: f64 = 1e-8;

/// Search horizon `40/Φ(q)`.
pub fn horizon(basis: &ScaleBasis) -> f64 {
    40.0 / basis.phi_q()
}

/// `G(b₋, b₊)`, `G^#` and `D` for a Gerber–Shiu function `F` in the local
/// variable of a band.
#[derive(Clone, Debug)]
pub struct BarrierInfluence {
    f: ExpPoly,
    w: ExpPoly,
    d: ExpPoly,
    phi: f64,
    pub k: f64,
    pub x_max: f64,
}

impl BarrierInfluence {
    pub fn new(gs: &GerberShiu, k: f64) -> Self {
        Self::from_parts(&gs.basis, gs.f_exppoly().clone(), k)
    }

    pub(crate) fn from_parts(basis: &ScaleBasis, f: ExpPoly, k: f64) -> Self {
        BarrierInfluence {
            d: d_exppoly(basis.w(), &f),
            f,
            w: basis.w().clone(),
            phi: basis.phi_q(),
            k,
            x_max: horizon(basis),
        }
    }

    /// `G^#(x) = (1 − F'(x))/W'(x)`.
    pub fn g_sharp(&self, x: f64) -> f64 {
        let s = self.phi;
        ((-s * x).exp() - self.f.eval_scaled(x, 1, s)) / self.w.eval_scaled(x, 1, s)
    }

    /// `(b₊ − b₋ − K − F[b₋, b₊]) / W[b₋, b₊]`.
    pub fn g(&self, bm: f64, bp: f64) -> f64 {
        (bp - bm - self.k - (self.f.eval(bp) - self.f.eval(bm))) / (self.w.eval(bp) - self.w.eval(bm))
    }

    /// `D(x) = W''(x)(1 − F'(x)) + F''(x)W'(x) = −G^#'(x) W'(x)²`.
    pub fn d(&self, x: f64) -> f64 {
        self.d.eval(x)
    }

    /// `(target − F(b))/W(b)`: stop at `b` and collect `target`.
    fn g_empty(&self, b: f64, target: f64) -> f64 {
        (target - self.f.eval(b)) / self.w.eval(b)
    }

    /// Best band `(b₋, b₊)` in local coordinates and its `G` value.
    fn best_band(&self) -> (f64, f64, f64) {
        if self.k == 0.0 {
            let grid = quadratic_grid(0.0, self.x_max, GRID_1D);
            let slope = |x: f64| -self.d(x);
            let (mut b, mut v) = last_global_max(&|x| self.g_sharp(x), Some(&slope), &grid);
            // A maximiser within rounding of 0 is the zero barrier.
            let g0 = self.g_sharp(0.0);
            if b < 1e-9 * self.x_max && g0 >= v - 1e-12 * v.abs() {
                (b, v) = (0.0, g0);
            }
            return (b, b, v);
        }
        self.best_band_fixed_cost()
    }

    fn best_band_fixed_cost(&self) -> (f64, f64, f64) {
        let x_max = self.x_max;
        let bs = quadratic_grid(0.0, x_max, GRID_2D);
        let ds: Vec<f64> = quadratic_grid(0.0, x_max, GRID_2D).into_iter().skip(1).collect();
        let nb = bs.len();
        let nd = ds.len();
        let mut vals = Vec::with_capacity(nb * nd);
        for &b in &bs {
            for &d in &ds {
                let v = self.g(b, b + d);
                vals.push(if v.is_nan() { f64::NEG_INFINITY } else { v });
            }
        }
        let at = |i: usize, j: usize| vals[i * nd + j];
        let mut starts: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..nb {
            for j in 0..nd {
                let v = at(i, j);
                let mut is_max = true;
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= nb as i64 || jj >= nd as i64 {
                            continue;
                        }
                        if at(ii as usize, jj as usize) > v {
                            is_max = false;
                        }
                    }
                }
                if is_max && v.is_finite() {
                    starts.push((v, i, j));
                }
            }
        }
        starts.sort_by(|a, b| b.0.total_cmp(&a.0));
        starts.truncate(STARTS_2D);

        let obj = |p: [f64; 2]| {
            let b = p[0].max(0.0);
            let d = p[1].max(1e-12);
            self.g(b, b + d)
        };
        let mut cands: Vec<(f64, f64, f64)> = Vec::new();
        for &(_, i, j) in &starts {
            let (b0, d0) = (bs[i], ds[j]);
            let hb = (bs[(i + 1).min(nb - 1)] - bs[i.saturating_sub(1)]).max(1e-3) / 2.0;
            let hd = (ds[(j + 1).min(nd - 1)] - ds[j.saturating_sub(1)]).max(1e-3) / 2.0;
            let (p, _) = nelder_mead_max(&obj, [b0, d0], [hb, hd], 1e-11, 4000);
            let (mut b, mut d) = (p[0].max(0.0), p[1].max(1e-12));
            // Coordinate-wise golden polishing.
            let mut h = hb.max(hd);
            for _ in 0..6 {
                let (nb_, _) = golden_max(&|x| self.g(x, x + d), (b - h).max(0.0), b + h, 1e-13);
                b = nb_;
                let (nd_, _) = golden_max(&|y| self.g(b, b + y), (d - h).max(1e-12), d + h, 1e-13);
                d = nd_;
                h *= 0.1;
            }
            // Snap to the boundary b = 0 when it is at least as good.
            if b < 1e-6 {
                let (d0, v0) = golden_max(&|y| self.g(0.0, y), (d - 1e-3).max(1e-12), d + 1e-3, 1e-13);
                let vb = self.g(b, b + d);
                if v0 >= vb - 1e-12 * vb.abs() {
                    b = 0.0;
                    d = d0;
                }
            }
            cands.push((b, b + d, self.g(b, b + d)));
        }
        let top = cands.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
        let thresh = top - 1e-9 * top.abs().max(1.0);
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for c in cands.into_iter().filter(|c| c.2 >= thresh) {
            if best.2 == f64::NEG_INFINITY || c.0 > best.0 || (c.0 == best.0 && c.1 > best.1) {
                best = c;
            }
        }
        best
    }
}

/// `D = W''(1 − F') + F''W'` as an exponential sum. For a term `a e^{ζx}` of
/// `W` and `P e^{ρx}` of `F` the cross terms combine to
/// `aζ (P'' + (2ρ − ζ)P' + ρ(ρ − ζ)P) e^{(ζ+ρ)x}`, so the `e^{2Φ(q)x}` parts,
/// which cancel exactly, are never formed.
fn d_exppoly(w: &ExpPoly, f: &ExpPoly) -> ExpPoly {
    let mut d = w.derivative().derivative();
    for wt in &w.terms {
        let (z, a) = (wt.rate, wt.poly.coeff(0));
        for ft in &f.terms {
            let r = ft.rate;
            let p1 = ft.poly.derivative();
            let p2 = p1.derivative();
            let poly = &(&p2 + &p1.scale(r * 2.0 - z)) + &ft.poly.scale(r * (r - z));
            d.push(z + r, poly.scale(a * z));
        }
    }
    d
}

/// `D(x)`, the stationarity function of the `K = 0` problem.
pub fn d_function(bi: &BarrierInfluence, x: f64) -> Result<f64> {
    if bi.k != 0.0 {
        return Err(Error::DomainError("D is defined for K = 0 only"));
    }
    Ok(bi.d(x))
}

/// Levels `(b₋, b₊)` of the optimal single band: the last global maximiser of
/// `G^#` when `K = 0`, of `G(b, b + d)` when `K > 0`.
pub fn find_single_band(bi: &BarrierInfluence) -> (f64, f64) {
    let (bm, bp, _) = bi.best_band();
    (bm, bp)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorCheck {
    pub ok: bool,
    pub margin: f64,
    pub worst_x: f64,
}

/// Sign of `(Γ − q)v` on `(from, from + 40/Φ(q)]`, with `v` affine of unit
/// slope above `from` and equal to the assembled value below.
pub fn check_generator_nonpositive(value: &PiecewiseValue, from: f64) -> Result<GeneratorCheck> {
    let model = value.model();
    // A zero barrier jumps at 0, and the affine extension starts from v(0).
    let payoff = value.payoff_at(from).with_value_at_zero(value.evaluate(from));
    let w_nu = payoff.w_nu(model)?;
    let j = generator_exppoly(model, &payoff, &w_nu, 1.0);
    let len = horizon(&value.basis);
    let mut worst = (f64::NEG_INFINITY, from);
    for k in 1..=GRID_CHECK {
        let y = len * k as f64 / GRID_CHECK as f64;
        let v = j.eval(y);
        if v > worst.0 {
            worst = (v, from + y);
        }
    }
    Ok(GeneratorCheck {
        ok: worst.0 <= GENERATOR_TOL,
        margin: worst.0,
        worst_x: worst.1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Dividends are paid at the top of the new band.
    Dividend,
    /// No dividends inside the band: leaving it at the top pays down to a lower level.
    NoDividend,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NextBand {
    pub band: Band,
    pub branch: Branch,
}

/// Stopping-level search above the current top band: the smallest `a` at
/// which the best band with bottom `a` is worth more than stopping, and the
/// maximiser at that `a`.
struct AboveTop<'a> {
    value: &'a PiecewiseValue,
    top: f64,
}

impl AboveTop<'_> {
    /// Influence functions for a band starting `a` above the current top.
    fn influence(&self, a: f64) -> Result<BarrierInfluence> {
        let basis = &self.value.basis;
        let f = gerber_shiu_exppoly(basis, &self.value.payoff_at(self.top + a))?;
        Ok(BarrierInfluence::from_parts(basis, f, self.value.k))
    }

    fn dividend_score(&self, a: f64) -> Result<(f64, f64, f64)> {
        Ok(self.influence(a)?.best_band())
    }

    /// Best `G_∅` over `b ≥ a`, for the no-dividend branch.
    fn empty_score(&self, a: f64) -> Result<(f64, f64)> {
        let bi = self.influence(a)?;
        let base = self.top + a;
        let grid = quadratic_grid(0.0, bi.x_max, GRID_1D / 4);
        let target = |u: f64| self.value.evaluate(base + u);
        let (u, v) = last_global_max(&|u| bi.g_empty(u, target(u)), None, &grid);
        Ok((u, v))
    }

    /// Smallest `a` in the scan with a positive score, refined by bisection.
    fn first_positive(&self, score: &dyn Fn(f64) -> Result<f64>, tol: f64) -> Result<Option<f64>> {
        // v may jump at the top (a zero barrier in bounded variation), so the
        // scan starts just above it and works with right limits.
        let x_max = horizon(&self.value.basis);
        let eps = 1e-9 * x_max;
        let grid = quadratic_grid(eps, x_max, GRID_ALPHA);
        let mut prev = eps;
        for (i, &a) in grid.iter().enumerate() {
            let s = score(a)?;
            if s > tol {
                if i == 0 {
                    return Ok(Some(eps));
                }
                let (mut lo, mut hi) = (prev, a);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if score(mid)? > tol {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(hi));
            }
            prev = a;
        }
        Ok(None)
    }
}

/// Levels of the next band above the top band of `value`.
pub fn find_two_band(value: &PiecewiseValue) -> Result<NextBand> {
    let top = value.top();
    let ctx = AboveTop { value, top };
    let k = value.k;
    let alpha_div = ctx.first_positive(&|a| Ok(ctx.dividend_score(a)?.2), 0.0)?;
    let alpha_empty = if k > 0.0 {
        ctx.first_positive(&|a| Ok(ctx.empty_score(a)?.1), 1e-10)?
    } else {
        None
    };
    let use_empty = match (alpha_empty, alpha_div) {
        (Some(e), Some(d)) => e < d,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => return Err(Error::NoSecondBand),
    };
    if use_empty {
        let alpha = alpha_empty.unwrap_or_default();
        let (beta, _) = ctx.empty_score(alpha)?;
        let a = top + alpha;
        let bp = a + beta;
        // Pay down to the smallest level with v(b₊) − v(b) = b₊ − b − K.
        let excess = |b: f64| value.evaluate(bp) - value.evaluate(b) - (bp - b - k);
        let old = value.strategy.bands.last().map_or(0.0, |b| b.b_minus);
        let mut bm = old;
        let grid = quadratic_grid(0.0, old, 400);
        let tol = 1e-9 * value.evaluate(bp).abs().max(1.0);
        for w in grid.windows(2) {
            if excess(w[0]) <= tol {
                bm = w[0];
                break;
            }
            if excess(w[1]) <= tol {
                bm = bisect(&|b| excess(b) - tol, w[0], w[1]);
                break;
            }
        }
        return Ok(NextBand {
            band: Band {
                a,
                b_minus: bm,
                b_plus: bp,
            },
            branch: Branch::NoDividend,
        });
    }
    let alpha = alpha_div.unwrap_or_default();
    let (bm, bp, _) = ctx.dividend_score(alpha)?;
    let a = top + alpha;
    Ok(NextBand {
        band: Band {
            a,
            b_minus: a + bm,
            b_plus: a + bp,
        },
        branch: Branch::Dividend,
    })
}

/// Output of [`multi_band_recursion`].
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateLevels {
    pub strategy: BandStrategy,
    pub converged: bool,
    /// Largest generator value found above the top band.
    pub generator_margin: f64,
    pub iterations: usize,
}

impl CandidateLevels {
    pub fn a_levels(&self) -> Vec<f64> {
        self.strategy.a_levels()
    }

    pub fn b_levels(&self) -> Vec<(f64, f64)> {
        self.strategy.b_levels()
    }
}

/// Adds bands until the generator test passes above the top band.
pub fn multi_band_recursion(gs: &GerberShiu, k: f64, max_bands: Option<usize>) -> Result<(CandidateLevels, PiecewiseValue)> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::DomainError("fixed cost K must be nonnegative"));
    }
    let cap = max_bands.unwrap_or(MAX_BANDS).clamp(1, MAX_BANDS);
    let bi = BarrierInfluence::new(gs, k);
    let (bm, bp) = find_single_band(&bi);
    let mut strategy = BandStrategy::single(bm, bp);
    let mut value = assemble(gs, &strategy, k)?;
    let mut iterations = 1;
    loop {
        let check = check_generator_nonpositive(&value, value.top())?;
        let levels = CandidateLevels {
            strategy: strategy.clone(),
            converged: check.ok,
            generator_margin: check.margin,
            iterations,
        };
        if check.ok {
            return Ok((levels, value));
        }
        if strategy.bands.len() >= cap {
            return Err(Error::IterationCapExceeded(Box::new(levels)));
        }
        let next = find_two_band(&value)?;
        strategy.bands.push(next.band);
        value = assemble(gs, &strategy, k)?;
        iterations += 1;
    }
}
