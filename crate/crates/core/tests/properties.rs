use levyband_core::*;
use proptest::prelude::*;

/// Exponential claims with a positive safety loading.
fn exp_models() -> impl Strategy<Value = RiskModel> {
    (0.3f64..3.0, 0.1f64..3.0, 0.01f64..0.5, 0.05f64..2.0).prop_map(|(mu, lambda, q, load)| {
        let p = lambda / mu * (1.0 + load);
        RiskModel::new(p, lambda, ClaimLaw::Exponential { rate: mu }, 0.0, q).unwrap()
    })
}

fn erlang_models() -> impl Strategy<Value = RiskModel> {
    (1u32..4, 0.5f64..3.0, 0.1f64..5.0, 0.02f64..0.3, 0.05f64..1.0).prop_map(|(n, mu, lambda, q, load)| {
        let p = lambda * n as f64 / mu * (1.0 + load);
        RiskModel::new(p, lambda, ClaimLaw::Erlang { shape: n, rate: mu }, 0.0, q).unwrap()
    })
}

fn rate(m: &RiskModel) -> f64 {
    match m.claims {
        ClaimLaw::Exponential { rate } => rate,
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn roots_solve_the_lundberg_equation(m in erlang_models()) {
        let r = cl_roots(&m).unwrap();
        prop_assert_eq!(r.roots.len(), m.claims.gamma_terms()[0].shape as usize + 1);
        for z in &r.roots {
            prop_assert!((m.psi_c(*z) - m.q).norm() < 1e-9);
        }
        prop_assert!(r.phi_q > 0.0);
        prop_assert!(r.roots.iter().skip(1).all(|z| z.re < 0.0));
    }

    #[test]
    fn scale_function_initial_values(m in erlang_models()) {
        let b = ScaleBasis::new(&m).unwrap();
        prop_assert!((b.w_q(0.0, 0) - 1.0 / m.p).abs() < 1e-10 / m.p);
        let w1 = (m.q + m.lambda) / (m.p * m.p);
        prop_assert!((b.w_q(0.0, 1) - w1).abs() < 1e-9 * w1);
        prop_assert!((b.z_q(0.0, 0) - 1.0).abs() < 1e-10);
        for x in [0.5, 3.0] {
            let e = (b.phi_q() * x).exp();
            prop_assert!((b.z_qv(b.phi_q(), x, 0) - e).abs() < 1e-8 * e);
        }
    }

    #[test]
    fn gerber_shiu_starts_at_penalty(m in erlang_models(), c in 0.0f64..2.0, c0 in -2.0f64..0.0, v in -0.2f64..0.0) {
        let b = ScaleBasis::new(&m).unwrap();
        for pen in [Penalty::Affine { c, c0 }, Penalty::Exponential { c: c0, v }] {
            let gs = GerberShiu::new(&b, pen).unwrap();
            prop_assert!((gs.f_w(0.0, 0) - pen.value(0.0)).abs() < 1e-9 * (1.0 + pen.value(0.0).abs()));
        }
    }

    #[test]
    fn zero_penalty_barrier_criterion(m in exp_models()) {
        let (p, lam, mu, q) = (m.p, m.lambda, rate(&m), m.q);
        let s = (q + lam).powi(2) - p * lam * mu;
        prop_assume!(s.abs() > 1e-4);
        let b = ScaleBasis::new(&m).unwrap();
        let gs = GerberShiu::new(&b, Penalty::Zero).unwrap();
        let (bm, bp) = find_single_band(&BarrierInfluence::new(&gs, 0.0));
        prop_assert_eq!(bm, bp);
        if s >= 0.0 {
            prop_assert_eq!(bp, 0.0);
        } else {
            let zp = b.roots.roots[0].re;
            let zm = b.roots.roots[1].re;
            let want = ((zm * zm * (mu + zm)) / (zp * zp * (mu + zp))).ln() / (zp - zm);
            prop_assert!((bp - want).abs() < 1e-6 * (1.0 + want), "{} vs {}", bp, want);
        }
    }

    #[test]
    fn affine_penalty_barrier_criterion(m in exp_models(), c in 0.0f64..2.0, c0 in -2.0f64..0.0) {
        // b* = 0 exactly when (q+λ)² − λμp ≥ λq(c − c0 μ).
        let (p, lam, mu, q) = (m.p, m.lambda, rate(&m), m.q);
        let gap = (q + lam).powi(2) - lam * mu * p - lam * q * (c - c0 * mu);
        prop_assume!(gap.abs() > 1e-3);
        let b = ScaleBasis::new(&m).unwrap();
        let gs = GerberShiu::new(&b, Penalty::Affine { c, c0 }).unwrap();
        let (_, bp) = find_single_band(&BarrierInfluence::new(&gs, 0.0));
        prop_assert_eq!(bp == 0.0, gap >= 0.0, "b = {}, gap = {}", bp, gap);
    }

    #[test]
    fn single_band_value_obeys_gradient_constraint(m in exp_models(), k in prop_oneof![Just(0.0), 0.05f64..1.0]) {
        let b = ScaleBasis::new(&m).unwrap();
        let gs = GerberShiu::new(&b, Penalty::Affine { c: 0.3, c0: -0.1 }).unwrap();
        let (bm, bp) = find_single_band(&BarrierInfluence::new(&gs, k));
        prop_assume!(k == 0.0 || bm < bp);
        let v = assemble(&gs, &BandStrategy::single(bm, bp), k).unwrap();
        let top = 1.5 * bp + 1.0;
        let xs: Vec<f64> = (0..=40).map(|i| top * i as f64 / 40.0).collect();
        for &x in &xs {
            for &y in xs.iter().filter(|&&y| y < x) {
                prop_assert!(v.evaluate(x) - v.evaluate(y) >= x - y - k - 1e-9);
            }
        }
        if k == 0.0 && bp > 0.0 {
            prop_assert!((v.derivative(bp) - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn block_splits_do_not_change_results(seed in any::<u64>(), split in 1u64..3) {
        let m = RiskModel::new(1.5, 1.0, ClaimLaw::Exponential { rate: 1.0 }, 0.0, 0.1).unwrap();
        let st = BandStrategy::single(1.0, 1.0);
        let cfg = SimConfig::new(3 * BLOCK, seed, 0.5);
        let whole = simulate(&m, &st, &Penalty::Zero, &cfg).unwrap();
        let cut = split * BLOCK;
        let mut stats = simulate_paths(&m, &st, &Penalty::Zero, &cfg, 0..cut).unwrap();
        for start in (cut..3 * BLOCK).step_by(BLOCK as usize) {
            stats.merge(&simulate_paths(&m, &st, &Penalty::Zero, &cfg, start..start + BLOCK).unwrap());
        }
        prop_assert_eq!(stats.finish(), whole);
    }
}
