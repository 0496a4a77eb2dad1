//! Independent numerical oracles: a Volterra solve for W^(q), quadrature for
//! Gerber–Shiu functions, bisection for real Cramér–Lundberg roots.

use levyband_core::*;

fn exp_model() -> RiskModel {
    RiskModel::new(1.5, 1.0, ClaimLaw::Exponential { rate: 1.0 }, 0.0, 0.1).unwrap()
}

fn azcue_muler() -> RiskModel {
    RiskModel::new(21.4, 10.0, ClaimLaw::Erlang { shape: 2, rate: 1.0 }, 0.0, 0.1).unwrap()
}

fn hyper() -> RiskModel {
    let claims = ClaimLaw::HyperExponential {
        weights: vec![0.3, 0.7],
        rates: vec![0.5, 2.0],
    };
    RiskModel::new(2.0, 1.5, claims, 0.0, 0.05).unwrap()
}

fn density(m: &RiskModel, z: f64) -> f64 {
    match &m.claims {
        ClaimLaw::Exponential { rate } => rate * (-rate * z).exp(),
        ClaimLaw::Erlang { shape, rate } => {
            let mut f = rate * (-rate * z).exp();
            for k in 1..*shape {
                f *= rate * z / k as f64;
            }
            f
        }
        ClaimLaw::HyperExponential { weights, rates } => weights
            .iter()
            .zip(rates)
            .map(|(w, r)| w * r * (-r * z).exp())
            .sum(),
    }
}

fn tail(m: &RiskModel, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    1.0 - simpson(&|s| density(m, s), 0.0, z, 2000)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `p W(x) = 1 + ∫_0^x W(y) [q + λ F̄(x − y)] dy`, trapezoidal steps of size `h`.
fn volterra_w(m: &RiskModel, x_max: f64, h: f64) -> Vec<f64> {
    let n = (x_max / h).round() as usize;
    let fbar: Vec<f64> = (0..=n).map(|i| tail(m, i as f64 * h)).collect();
    let k = |i: usize| m.q + m.lambda * fbar[i];
    let mut w = vec![0.0; n + 1];
    w[0] = 1.0 / m.p;
    for i in 1..=n {
        let mut s = 0.5 * w[0] * k(i);
        for (j, wj) in w.iter().enumerate().take(i).skip(1) {
            s += wj * k(i - j);
        }
        w[i] = (1.0 + h * s) / (m.p - 0.5 * h * k(0));
    }
    w
}

#[test]
fn scale_function_matches_volterra_solution() {
    for m in [exp_model(), azcue_muler(), hyper()] {
        let b = ScaleBasis::new(&m).unwrap();
        let h = 2e-3;
        let w = volterra_w(&m, 6.0, h);
        for (i, wi) in w.iter().enumerate().step_by(250) {
            let x = i as f64 * h;
            let exact = b.w_q(x, 0);
            assert!((wi - exact).abs() < 2e-5 * exact, "{x}: {wi} vs {exact}");
        }
    }
}

fn bisect_root(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn real_roots_match_bisection() {
    // Between consecutive poles ψ − q changes sign, so each real root can be
    // bracketed independently of the polynomial solver.
    let m = azcue_muler();
    let g = |s: f64| psi(&m, s) - m.q;
    let r = cl_roots(&m).unwrap();
    let want = [
        bisect_root(&g, 1e-9, 5.0),
        bisect_root(&g, -1.0 + 1e-9, -1e-9),
        bisect_root(&g, -50.0, -1.0 - 1e-9),
    ];
    for (z, w) in r.roots.iter().zip(want) {
        assert!(z.im == 0.0);
        assert!((z.re - w).abs() < 1e-12 * (1.0 + w.abs()), "{} vs {w}", z.re);
    }
    assert!((r.phi_q - want[0]).abs() < 1e-14);
}

/// `F(x) = w(0) Z(x) − ∫_0^x W(x − y) w_ν(y) dy`, where
/// `w_ν(y) = ∫_{(y,∞)} (w(y − z) − w(0)) ν(dz)`; both integrals by quadrature.
fn quadrature_gs(m: &RiskModel, b: &ScaleBasis, pen: &Penalty, x: f64) -> f64 {
    let mu = m.claims.min_rate();
    let w_nu = |y: f64| {
        let hi = y + 60.0 / mu;
        m.lambda * simpson(&|z| (pen.value(y - z) - pen.value(0.0)) * density(m, z), y, hi, 3000)
    };
    let conv = if x > 0.0 {
        simpson(&|y| b.w_q(x - y, 0) * w_nu(y), 0.0, x, 400)
    } else {
        0.0
    };
    pen.value(0.0) * b.z_q(x, 0) - conv
}

#[test]
fn gerber_shiu_closed_forms_match_quadrature() {
    let pens = [
        Penalty::Affine { c: 0.4, c0: -0.3 },
        Penalty::Exponential { c: -0.7, v: -0.25 },
    ];
    for m in [exp_model(), azcue_muler(), hyper()] {
        let b = ScaleBasis::new(&m).unwrap();
        for pen in pens {
            let gs = GerberShiu::new(&b, pen).unwrap();
            for x in [0.0, 0.7, 2.5, 6.0] {
                let want = quadrature_gs(&m, &b, &pen, x);
                let got = gs.f_w(x, 0);
                assert!((got - want).abs() < 1e-7 * (1.0 + want.abs()), "{pen:?} {x}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn z_qv_matches_defining_integral() {
    // Z^(q,v)(x) = e^{vx} + (q − ψ(v)) ∫_0^x e^{v(x−y)} W(y) dy.
    for m in [exp_model(), azcue_muler()] {
        let b = ScaleBasis::new(&m).unwrap();
        for v in [-0.6, -0.1, 0.3] {
            for x in [0.5, 3.0, 8.0] {
                let integral = simpson(&|y| (v * (x - y)).exp() * b.w_q(y, 0), 0.0, x, 2000);
                let want = (v * x).exp() + (m.q - psi(&m, v)) * integral;
                let got = b.z_qv(v, x, 0);
                assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{v} {x}");
            }
        }
    }
}

#[test]
fn exponential_claims_barrier_log_formula() {
    // b* = log(ζ₋²(μ+ζ₋) / (ζ₊²(μ+ζ₊))) / (ζ₊ − ζ₋), the minimiser of W'.
    let (p, lam, mu, q) = (1.5, 1.0, 1.0, 0.1);
    let m = RiskModel::new(p, lam, ClaimLaw::Exponential { rate: mu }, 0.0, q).unwrap();
    let bq = q + lam - mu * p;
    let disc = (bq * bq + 4.0 * p * q * mu).sqrt();
    let (zp, zm) = ((bq + disc) / (2.0 * p), (bq - disc) / (2.0 * p));
    let want = ((zm * zm * (mu + zm)) / (zp * zp * (mu + zp))).ln() / (zp - zm);
    assert!((want - 2.2122).abs() < 1e-4);

    let b = ScaleBasis::new(&m).unwrap();
    let gs = GerberShiu::new(&b, Penalty::Zero).unwrap();
    let (bm, bp) = find_single_band(&BarrierInfluence::new(&gs, 0.0));
    assert_eq!(bm, bp);
    assert!((bp - want).abs() < 1e-8);
    assert!(b.w_q(bp, 2).abs() < 1e-10);
}

#[test]
fn lump_sum_value_matches_simulated_zero_barrier() {
    let m = exp_model();
    let want = lump_sum_value(&m, &Penalty::Zero, 0.0).unwrap();
    let r = simulate(&m, &BandStrategy::single(0.0, 0.0), &Penalty::Zero, &SimConfig::new(200_000, 11, 0.0)).unwrap();
    assert!((r.mean - want).abs() < 4.0 * r.stderr, "{} ± {} vs {want}", r.mean, r.stderr);
}
