//! Exact event-driven Monte Carlo of the controlled reserve for compound
//! Poisson models. Between claims the reserve moves deterministically, so
//! barrier hits and dividend streams are integrated in closed form.

use core::ops::Range;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::gerber_shiu::Penalty;
use crate::levy_model::{GammaTerm, RiskModel};
use crate::value_function::BandStrategy;
use crate::{Error, Result};

/// Paths per accumulation block. Blocks are merged in index order, so results
/// do not depend on how blocks are scheduled.
pub const BLOCK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub n_paths: u64,
    pub seed: u64,
    pub x0: f64,
    /// A path stops once `e^{−qt}` falls below this.
    pub discount_floor: f64,
    /// Fixed cost per lump-sum dividend.
    pub k: f64,
}

impl SimConfig {
    pub fn new(n_paths: u64, seed: u64, x0: f64) -> Self {
        SimConfig {
            n_paths,
            seed,
            x0,
            discount_floor: 1e-12,
            k: 0.0,
        }
    }

    fn validate(&self, model: &RiskModel) -> Result<()> {
        if model.sigma2 > 0.0 {
            return Err(Error::UnsupportedModel);
        }
        if self.n_paths == 0 {
            return Err(Error::DomainError("n_paths must be at least 1"));
        }
        if !(self.discount_floor > 0.0 && self.discount_floor < 1.0) {
            return Err(Error::DomainError("discount_floor must lie in (0, 1)"));
        }
        if !(self.x0.is_finite() && self.x0 >= 0.0) {
            return Err(Error::DomainError("x0 must be finite and nonnegative"));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::DomainError("fixed cost K must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimResult {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
    pub ruin_fraction: f64,
    pub mean_discounted_penalty: f64,
    pub mean_discounted_dividends: f64,
    /// Bound on the bias from truncated paths.
    pub truncation_bias: f64,
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Running totals over a set of paths; merge in a fixed order for
/// reproducible results.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PathStats {
    n: u64,
    mean: f64,
    m2: f64,
    ruined: u64,
    penalty: Sum,
    dividends: Sum,
    bias: Sum,
}

impl PathStats {
    fn push(&mut self, o: &PathOutcome) {
        self.n += 1;
        let total = o.dividends + o.penalty;
        let d = total - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (total - self.mean);
        self.ruined += o.ruined as u64;
        self.penalty.add(o.penalty);
        self.dividends.add(o.dividends);
        self.bias.add(o.bias);
    }

    /// Chan's pairwise update.
    pub fn merge(&mut self, other: &PathStats) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
        self.ruined += other.ruined;
        self.penalty.add(other.penalty.value());
        self.dividends.add(other.dividends.value());
        self.bias.add(other.bias.value());
    }

    pub fn finish(&self) -> SimResult {
        let n = self.n as f64;
        let var = if self.n > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        let pen = self.penalty.value() / n;
        let div = self.dividends.value() / n;
        SimResult {
            mean: div + pen,
            stderr: (var / n).sqrt(),
            n_paths: self.n,
            ruin_fraction: self.ruined as f64 / n,
            mean_discounted_penalty: pen,
            mean_discounted_dividends: div,
            truncation_bias: self.bias.value() / n,
        }
    }
}

struct PathOutcome {
    dividends: f64,
    penalty: f64,
    ruined: bool,
    bias: f64,
}

struct Sampler {
    lambda: f64,
    terms: alloc::vec::Vec<GammaTerm>,
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    // Open interval (0, 1): safe for logarithms.
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl Sampler {
    fn interarrival(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lambda == 0.0 {
            return f64::INFINITY;
        }
        -uniform(rng).ln() / self.lambda
    }

    fn claim(&self, rng: &mut ChaCha8Rng) -> f64 {
        let t = if self.terms.len() == 1 {
            &self.terms[0]
        } else {
            let u = uniform(rng);
            let mut acc = 0.0;
            let mut pick = self.terms.last().unwrap();
            for t in &self.terms {
                acc += t.weight;
                if u < acc {
                    pick = t;
                    break;
                }
            }
            pick
        };
        // Erlang(m) as −log of a product of m uniforms.
        let mut prod = 1.0;
        let mut log_sum = 0.0;
        for _ in 0..t.shape {
            prod *= uniform(rng);
            if prod < 1e-280 {
                log_sum += prod.ln();
                prod = 1.0;
            }
        }
        -(log_sum + prod.ln()) / t.rate
    }
}

/// Where the control puts a reserve level.
enum Zone {
    /// Inside band `i` (strictly below its top when `K > 0`).
    Wait(usize),
    /// Above band `i` and below the next one: pay down.
    Pay(usize),
}

struct Control<'a> {
    bands: &'a [crate::value_function::Band],
    k: f64,
}

impl Control<'_> {
    fn zone(&self, u: f64) -> Zone {
        for (i, b) in self.bands.iter().enumerate() {
            let next_a = self.bands.get(i + 1).map_or(f64::INFINITY, |n| n.a);
            if u <= b.b_plus && u >= b.a || (i == 0 && u < b.a) {
                if self.k > 0.0 && u >= b.b_plus {
                    return Zone::Pay(i);
                }
                return Zone::Wait(i);
            }
            if u > b.b_plus && u < next_a {
                return Zone::Pay(i);
            }
        }
        Zone::Wait(0)
    }

    fn target(&self, i: usize) -> f64 {
        let b = &self.bands[i];
        if self.k > 0.0 {
            b.b_minus
        } else {
            b.b_plus
        }
    }

    /// Applies every lump sum due at level `u`; returns the new level.
    fn settle(&self, mut u: f64, disc: f64, dividends: &mut f64) -> f64 {
        loop {
            match self.zone(u) {
                Zone::Wait(_) => return u,
                Zone::Pay(i) => {
                    let target = self.target(i);
                    if target >= u {
                        return u;
                    }
                    *dividends += disc * (u - target - self.k);
                    u = target;
                }
            }
        }
    }
}

struct PathSpec<'a> {
    model: &'a RiskModel,
    control: Option<Control<'a>>,
    sampler: Sampler,
    x0: f64,
    floor: f64,
    penalty_bound: f64,
}

impl PathSpec<'_> {
    fn run(&self, rng: &mut ChaCha8Rng, ruin_payoff: &dyn Fn(f64) -> f64) -> PathOutcome {
        let (p, q) = (self.model.p, self.model.q);
        let mut t = 0.0;
        let mut u = self.x0;
        let mut div = 0.0;
        loop {
            if let Some(c) = &self.control {
                u = c.settle(u, (-q * t).exp(), &mut div);
            }
            let t_next = t + self.sampler.interarrival(rng);
            // Drift up to the next claim, paying at band tops on the way.
            loop {
                let Some(c) = &self.control else {
                    u += p * (t_next - t);
                    t = t_next;
                    break;
                };
                let top = match c.zone(u) {
                    Zone::Wait(i) => c.bands[i].b_plus,
                    Zone::Pay(_) => u,
                };
                let t_hit = t + (top - u) / p;
                if t_hit >= t_next {
                    u += p * (t_next - t);
                    t = t_next;
                    break;
                }
                if c.k == 0.0 {
                    // Pinned at the barrier: premiums flow out as dividends.
                    let e_hit = (-q * t_hit).exp();
                    let e_next = if t_next.is_finite() { (-q * t_next).exp() } else { 0.0 };
                    div += p * (e_hit - e_next) / q;
                    u = top;
                    t = t_next;
                    break;
                }
                t = t_hit;
                let disc = (-q * t).exp();
                if disc < self.floor {
                    return self.truncated(div, top, disc);
                }
                u = c.settle(top, disc, &mut div);
            }
            let disc = if t.is_finite() { (-q * t).exp() } else { 0.0 };
            if disc < self.floor {
                return self.truncated(div, u, disc);
            }
            u -= self.sampler.claim(rng);
            if u < 0.0 {
                return PathOutcome {
                    dividends: div,
                    penalty: disc * ruin_payoff(u),
                    ruined: true,
                    bias: 0.0,
                };
            }
        }
    }

    fn truncated(&self, div: f64, u: f64, disc: f64) -> PathOutcome {
        let (p, q) = (self.model.p, self.model.q);
        let bound = if u.is_finite() { u + p / q + self.penalty_bound } else { 0.0 };
        PathOutcome {
            dividends: div,
            penalty: 0.0,
            ruined: false,
            bias: disc * bound,
        }
    }
}

fn path_rng(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng.set_word_pos(0);
    rng
}

fn run_block(
    spec: &PathSpec<'_>,
    seed: u64,
    paths: Range<u64>,
    ruin_payoff: &dyn Fn(f64) -> f64,
) -> PathStats {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = PathStats::default();
    let mut start = paths.start;
    while start < paths.end {
        let end = ((start / BLOCK + 1) * BLOCK).min(paths.end);
        let mut block = PathStats::default();
        for i in start..end {
            let mut rng = path_rng(&base, i);
            block.push(&spec.run(&mut rng, ruin_payoff));
        }
        stats.merge(&block);
        start = end;
    }
    stats
}

fn penalty_bound(model: &RiskModel, penalty: &Penalty) -> f64 {
    let m1 = model.claims.mean();
    let sd = (model.claims.second_moment() - m1 * m1).max(0.0).sqrt();
    penalty.value(-(m1 + 6.0 * sd)).abs()
}

/// Statistics of the paths with indices in `paths` for a band strategy,
/// accumulated per [`BLOCK`] and merged left to right. Running `0..m` and
/// then merging the single blocks after `m` one by one reproduces
/// [`simulate`] exactly when `m` is a multiple of [`BLOCK`].
pub fn simulate_paths(
    model: &RiskModel,
    strategy: &BandStrategy,
    penalty: &Penalty,
    cfg: &SimConfig,
    paths: Range<u64>,
) -> Result<PathStats> {
    cfg.validate(model)?;
    strategy.validate()?;
    if cfg.k > 0.0 && strategy.bands.iter().any(|b| b.b_minus >= b.b_plus) {
        return Err(Error::InvalidStrategy("K > 0 needs b_minus < b_plus"));
    }
    penalty.validate(model)?;
    let spec = PathSpec {
        model,
        control: Some(Control {
            bands: &strategy.bands,
            k: cfg.k,
        }),
        sampler: Sampler {
            lambda: model.lambda,
            terms: model.claims.gamma_terms(),
        },
        x0: cfg.x0,
        floor: cfg.discount_floor,
        penalty_bound: penalty_bound(model, penalty),
    };
    let pay = |u: f64| penalty.value(u);
    Ok(run_block(&spec, cfg.seed, paths, &pay))
}

/// Expected discounted dividends plus discounted penalty of a band strategy.
pub fn simulate(
    model: &RiskModel,
    strategy: &BandStrategy,
    penalty: &Penalty,
    cfg: &SimConfig,
) -> Result<SimResult> {
    let mut stats = PathStats::default();
    let mut start = 0;
    while start < cfg.n_paths {
        let end = (start + BLOCK).min(cfg.n_paths);
        stats.merge(&simulate_paths(model, strategy, penalty, cfg, start..end)?);
        start = end;
    }
    Ok(stats.finish())
}

/// Statistics of `E_x[e^{−qT₀⁻}]` (no dividends) for paths in `paths`.
pub fn ruin_transform_paths(model: &RiskModel, cfg: &SimConfig, paths: Range<u64>) -> Result<PathStats> {
    cfg.validate(model)?;
    let spec = PathSpec {
        model,
        control: None,
        sampler: Sampler {
            lambda: model.lambda,
            terms: model.claims.gamma_terms(),
        },
        x0: cfg.x0,
        floor: cfg.discount_floor,
        penalty_bound: 1.0,
    };
    Ok(run_block(&spec, cfg.seed, paths, &|_| 1.0))
}

/// Monte Carlo estimate of `E_x[e^{−qT₀⁻}]` without dividends.
pub fn simulate_ruin_transform(model: &RiskModel, cfg: &SimConfig) -> Result<SimResult> {
    let mut stats = PathStats::default();
    let mut start = 0;
    while start < cfg.n_paths {
        let end = (start + BLOCK).min(cfg.n_paths);
        stats.merge(&ruin_transform_paths(model, cfg, start..end)?);
        start = end;
    }
    Ok(stats.finish())
}
