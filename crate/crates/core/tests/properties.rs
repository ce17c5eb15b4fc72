use num_complex::Complex64;
use proptest::prelude::*;

use knf::cnoidal::{build_cnoidal, orbit_period, potential_data, separatrix_top};
use knf::harness::{generate_hf_data, run_superposition, ExperimentSpec, WaveParams};
use knf::kdv::{airy_flow, build_g, evolve_kdv, galilean_shift, h1_growth_rate, modified_flow};
use knf::normal_form::{
    apply_b, apply_d, apply_e, apply_k, apply_l0, apply_r, Convention, NFContext,
};
use knf::{FourierField, Grid, SobolevVariant, SolverConfig, Trajectory};

fn field(n: usize, band: usize, mean: bool) -> impl Strategy<Value = FourierField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), band + 1).prop_map(move |c| {
        let mut f = FourierField::zeros(n);
        for (k, &(re, im)) in c.iter().enumerate() {
            if k == 0 {
                if mean {
                    f.set(0, Complex64::new(re, 0.0));
                }
            } else {
                f.set(k as i64, Complex64::new(re, im));
            }
        }
        f
    })
}

fn h1(f: &FourierField) -> f64 {
    f.weighted_l2(|k| (1.0 + (k * k) as f64).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operations_preserve_hermitian_symmetry(u in field(12, 12, true), w in field(12, 12, true)) {
        prop_assert!(u.convolve(&w).unwrap().hermitian_defect() < 1e-13);
        prop_assert_eq!(u.derivative().hermitian_defect(), 0.0);
        prop_assert_eq!(u.without_mean().antiderivative().unwrap().hermitian_defect(), 0.0);
        prop_assert!(Grid::padded_for(12).product(&u, &w, 24).hermitian_defect() < 1e-13);
        prop_assert_eq!(airy_flow(&u, 0.7, 2.0).hermitian_defect(), 0.0);
    }

    #[test]
    fn parseval_against_trapezoid(u in field(10, 10, true), extra in 0usize..20) {
        let m = 22 + extra;
        let samples = u.to_grid(m).unwrap();
        let trap = samples.iter().map(|x| x * x).sum::<f64>() / m as f64;
        prop_assert!((u.l2_norm().powi(2) - trap).abs() < 1e-10);
    }

    #[test]
    fn convolution_is_bilinear_and_commutative(
        u in field(8, 8, true), v in field(8, 8, true), w in field(8, 8, true), a in -2.0f64..2.0,
    ) {
        let uw = u.convolve(&w).unwrap();
        prop_assert!((&uw - &w.convolve(&u).unwrap()).l2_norm() < 1e-13);
        let lhs = (&u.scale(a) + &v).convolve(&w).unwrap();
        let rhs = &uw.scale(a) + &v.convolve(&w).unwrap();
        prop_assert!((&lhs - &rhs).l2_norm() < 1e-12);
        // direct truncated sum
        for k in -8i64..=8 {
            let mut s = Complex64::new(0.0, 0.0);
            for m in -8i64..=8 {
                if (k - m).abs() <= 8 {
                    s += u.get(m) * w.get(k - m);
                }
            }
            prop_assert!((uw.get(k) - s).norm() < 1e-13);
        }
    }

    #[test]
    fn sobolev_norms_are_equivalent(u in field(16, 16, false), s in 0.0f64..1.0) {
        let hom = u.sobolev_norm(s, SobolevVariant::Homogeneous).unwrap();
        let inh = u.sobolev_norm(s, SobolevVariant::Inhomogeneous).unwrap();
        prop_assert!(inh <= hom * (1.0 + 1e-14));
        prop_assert!(hom <= 2f64.powf(s / 2.0) * inh * (1.0 + 1e-14));
        for k in 1..=16i64 {
            let r = (1.0 + (k * k) as f64).powf(s / 2.0) / (k as f64).powf(s);
            prop_assert!((1.0..=2f64.powf(s / 2.0) * (1.0 + 1e-15)).contains(&r));
        }
    }

    #[test]
    fn airy_flow_is_unitary_and_galilean(u in field(16, 16, false), t in -1.0f64..1.0, a in -3.0f64..3.0, c in -2.0f64..2.0) {
        let e = airy_flow(&u, t, a);
        prop_assert!((e.l2_norm() - u.l2_norm()).abs() < 1e-13);
        // lowering the drift by c translates the Airy flow by ct
        let moved = airy_flow(&u, t, a - c);
        let shifted = e.map_modes(|k, v| v * Complex64::from_polar(1.0, (k as f64) * c * t));
        prop_assert!((&moved - &shifted).l2_norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn momentum_is_exact(u in field(16, 5, true), scale in 0.05f64..0.5) {
        let q0 = u.scale(scale);
        let t = evolve_kdv(&q0, &SolverConfig::new(16, 2e-4, 0.1).with_monitor(50)).unwrap();
        prop_assert!(t.states.iter().all(|q| q.get(0) == q0.get(0)));
        prop_assert!(t.momentum.iter().all(|&m| m == q0.mean()));
        prop_assert!(t.states.iter().all(|q| q.hermitian_defect() == 0.0));
    }

    #[test]
    fn galilean_shift_group_property(u in field(12, 4, true), c in -3.0f64..3.0) {
        let t: Trajectory = evolve_kdv(&u.scale(0.3), &SolverConfig::new(12, 5e-4, 0.05).with_monitor(20)).unwrap();
        let back = galilean_shift(&galilean_shift(&t, c), -c);
        for (a, b) in back.states.iter().zip(&t.states) {
            prop_assert!((a - b).l2_norm() < 1e-13);
        }
    }

    #[test]
    fn modified_flow_is_linear(g1 in field(24, 10, false), g2 in field(24, 10, false), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let wave = build_cnoidal(4.0, 0.0, 1e-12).unwrap();
        let cfg = SolverConfig::new(24, 1e-4, 0.02);
        let f = |g: &FourierField| modified_flow(g, &wave, &cfg).unwrap().last().clone();
        let combo = f(&(&g1.scale(a) + &g2.scale(b)));
        let sep = &f(&g1).scale(a) + &f(&g2).scale(b);
        prop_assert!((&combo - &sep).l2_norm() < 1e-11 * (1.0 + combo.l2_norm()));
    }

    #[test]
    fn operators_are_real_and_mean_zero(v in field(6, 6, false), t in 0.0f64..1.0) {
        let wave = build_cnoidal(8.0, 0.0, 1e-12).unwrap();
        let ctx = NFContext::from_wave(&wave, 6, t);
        let conv = Convention::derived();
        let mut outs = vec![
            apply_k(&v, &ctx, &conv).unwrap(),
            apply_b(&v, &ctx, &conv).unwrap().total(),
            apply_l0(&v, &ctx, &conv).unwrap(),
            apply_r(&v, &ctx, &conv).unwrap().total(),
            apply_d(&v, &ctx, &conv).unwrap(),
        ];
        outs.push(apply_e(&v, &ctx, &conv).unwrap().total());
        for o in outs {
            prop_assert!(o.hermitian_defect() < 1e-12 * (1.0 + o.l2_norm()));
            prop_assert!(o.get(0).norm() < 1e-13);
        }
    }

    #[test]
    fn operator_homogeneity(v in field(6, 6, false), lambda in 0.2f64..3.0) {
        let wave = build_cnoidal(8.0, 0.0, 1e-12).unwrap();
        let ctx = NFContext::from_wave(&wave, 6, 0.4);
        let conv = Convention::derived();
        let w = v.scale(lambda);
        let close = |a: &FourierField, b: &FourierField| (a - b).l2_norm() <= 1e-12 * (1.0 + b.l2_norm());
        prop_assert!(close(&apply_k(&w, &ctx, &conv).unwrap(), &apply_k(&v, &ctx, &conv).unwrap().scale(lambda)));
        prop_assert!(close(&apply_l0(&w, &ctx, &conv).unwrap(), &apply_l0(&v, &ctx, &conv).unwrap().scale(lambda)));
        let (bv, bw) = (apply_b(&v, &ctx, &conv).unwrap(), apply_b(&w, &ctx, &conv).unwrap());
        prop_assert!(close(&bw.b1, &bv.b1.scale(lambda * lambda)));
        let (rv, rw) = (apply_r(&v, &ctx, &conv).unwrap(), apply_r(&w, &ctx, &conv).unwrap());
        prop_assert!(close(&rw.r12, &rv.r12.scale(lambda * lambda)));
        prop_assert!(close(&rw.r11, &rv.r11.scale(lambda.powi(3))));
    }

    #[test]
    fn hf_data_contract(n0 in 4usize..16, seed in any::<u64>(), s in 0.01f64..0.49) {
        let (g, eps) = generate_hf_data(n0, s, seed, 64).unwrap();
        prop_assert!((g.l2_norm() - 1.0).abs() < 1e-14);
        prop_assert!(g.is_mean_zero());
        let lo = (2.0 * n0 as f64).powf(-s);
        let hi = (n0 as f64).powf(-s);
        prop_assert!(lo * (1.0 - 1e-14) <= eps && eps <= hi * (1.0 + 1e-14));
        prop_assert_eq!(generate_hf_data(n0, s, seed, 64).unwrap().0, g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn certified_waves_satisfy_the_third_order_form(a in 1.0f64..12.0) {
        // Newton on the period map can stall at the quadrature floor (~1e-12);
        // that must surface as NoConvergence, never as an uncertified wave
        let w = match build_cnoidal(a, 0.0, 1e-12) {
            Ok(w) => w,
            Err(e) => {
                prop_assert!(matches!(e, knf::Error::NoConvergence(r) if r.abs() < 1e-11), "{}", e);
                return Ok(());
            }
        };
        prop_assert!(w.third_order_residual() < 1e-7, "a = {}: {}", a, w.third_order_residual());
        prop_assert!(w.decay.rate > 0.0);
        prop_assert!(w.decay.k_max > 1);
    }

    #[test]
    fn orbit_period_is_monotone(a in 1.0f64..12.0, x in 0.05f64..0.9, y in 0.05f64..0.9) {
        prop_assume!((x - y).abs() > 1e-3);
        let p = potential_data(a, 0.0).unwrap();
        let top = separatrix_top(a, 0.0).unwrap();
        let f = |r: f64| p.f_plus + r * (top - p.f_plus);
        let (lo, hi) = (x.min(y), x.max(y));
        prop_assert!(orbit_period(a, 0.0, f(lo)).unwrap() < orbit_period(a, 0.0, f(hi)).unwrap());
    }

    #[test]
    fn modified_flow_h1_growth(g in field(32, 12, false)) {
        let wave = build_cnoidal(8.0, 0.0, 1e-12).unwrap();
        let rate = h1_growth_rate(&build_g(&wave.phi_at(32)).unwrap());
        let t = modified_flow(&g, &wave, &SolverConfig::new(32, 1e-4, 0.5).with_monitor(250)).unwrap();
        for (time, u) in t.times.iter().zip(&t.states) {
            prop_assert!(h1(u) <= (rate * time).exp() * h1(&g) * (1.0 + 1e-10));
        }
    }

    #[test]
    fn records_are_deterministic_and_start_at_zero(seed in any::<u64>()) {
        let spec = ExperimentSpec {
            s: 0.25,
            n0: 4,
            seed,
            wave: WaveParams::default(),
            solver: SolverConfig::new(16, 1e-4, 0.01).with_monitor(25),
            linear_dt: None,
            out: None,
        };
        let a = run_superposition(&spec).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), run_superposition(&spec).unwrap().to_json().unwrap());
        prop_assert!(a.err_l[0] < 1e-14 && a.err_l1[0] < 1e-14 && a.gap[0] == 0.0);
    }
}
