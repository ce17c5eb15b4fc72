use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fourier::FourierField;
use crate::kdv::apply_p;

fn random_field(n: usize, decay: f64, seed: u64) -> FourierField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = FourierField::zeros(n);
    for k in 1..=n as i64 {
        let amp = (-decay * k as f64).exp();
        f.set(
            k,
            amp * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
    }
    f
}

fn ctx(n: usize, t: f64) -> NFContext {
    NFContext::new(&random_field(n, 0.4, 7), 1.3, t).unwrap()
}

fn rel(a: &FourierField, b: &FourierField) -> f64 {
    (a - b).l2_norm() / a.l2_norm().max(b.l2_norm()).max(1e-300)
}

#[test]
fn vanishing_input_gives_zero() {
    let c = ctx(6, 0.3);
    let v = FourierField::zeros(6);
    let conv = Convention::derived();
    assert_eq!(apply_k(&v, &c, &conv).unwrap().l2_norm(), 0.0);
    assert_eq!(apply_b(&v, &c, &conv).unwrap().total().l2_norm(), 0.0);
    assert_eq!(apply_l0(&v, &c, &conv).unwrap().l2_norm(), 0.0);
    assert_eq!(apply_r(&v, &c, &conv).unwrap().total().l2_norm(), 0.0);
    assert_eq!(apply_d(&v, &c, &conv).unwrap().l2_norm(), 0.0);
    assert_eq!(apply_e(&v, &c, &conv).unwrap().total().l2_norm(), 0.0);
}

#[test]
fn k_hand_sum() {
    let n = 6;
    let p1 = Complex64::new(0.3, -0.7);
    let v2 = Complex64::new(-1.1, 0.4);
    let phi = FourierField::mode(n, 1, p1);
    let v = FourierField::mode(n, 2, v2);
    let c = NFContext::new(&phi, 2.0, 0.0).unwrap();
    let k = apply_k(&v, &c, &Convention::derived()).unwrap();
    let mut want = FourierField::zeros(n);
    want.set(3, -p1 * v2 / 6.0);
    want.set(1, p1.conj() * v2 / 6.0);
    assert!((&k - &want).l2_norm() < 1e-15);
    assert!(rel(&k, &direct::k(&v, &c).unwrap()) < 1e-15);
}

#[test]
fn closed_forms_match_direct_sums() {
    let n = 6;
    let c = ctx(n, 0.37);
    let conv = Convention::derived();
    let v = random_field(n, 0.1, 3);
    let b = apply_b(&v, &c, &conv).unwrap();
    let r = apply_r(&v, &c, &conv).unwrap();
    let e = apply_e(&v, &c, &conv).unwrap();
    let cc = Complex64::new(0.0, conv.coupling);
    let pairs = [
        (
            "K",
            apply_k(&v, &c, &conv).unwrap(),
            direct::k(&v, &c).unwrap(),
        ),
        ("B1", b.b1.clone(), direct::b1(&v, &c).unwrap()),
        ("B2", b.b2.clone(), direct::b2(&v, &c).unwrap()),
        (
            "L0",
            apply_l0(&v, &c, &conv).unwrap(),
            direct::l0(&v, &c).unwrap(),
        ),
        ("R2", r.r2.clone(), direct::r2(&v, &c).unwrap()),
        ("R3", r.r3.clone(), direct::r3(&v, &c).unwrap()),
        ("R4", r.r4.clone(), direct::r4(&v, &c).unwrap()),
        (
            "D",
            apply_d(&v, &c, &conv).unwrap(),
            direct::d(&v, &c, cc).unwrap(),
        ),
        ("E3", e.e3.clone(), direct::e3(&v, &c, cc).unwrap()),
        ("E4", e.e4.clone(), direct::e4(&v, &c, cc, -1.0).unwrap()),
    ];
    for (name, closed, oracle) in pairs {
        assert!(oracle.l2_norm() > 0.0, "{name} vanished");
        assert!(
            rel(&closed, &oracle) < 1e-13,
            "{name}: {}",
            rel(&closed, &oracle)
        );
    }
    let (r5, r6) = direct::quartic(&v, &c, -1.0).unwrap();
    assert!(rel(&r.r5, &r5) < 1e-13);
    assert!(rel(&r.r6, &r6) < 1e-13);
}

#[test]
fn printed_phase_sign_matches_direct_sums() {
    let n = 5;
    let c = ctx(n, 0.21);
    let v = random_field(n, 0.1, 4);
    let conv = Convention::printed();
    let r = apply_r(&v, &c, &conv).unwrap();
    let (r5, r6) = direct::quartic(&v, &c, 1.0).unwrap();
    assert!(rel(&r.r5, &r5.scale(1.0).map_modes(|_, z| z * conv.r5)) < 1e-13);
    assert!(rel(&r.r6, &r6.map_modes(|_, z| z * conv.r6)) < 1e-13);
    let e = apply_e(&v, &c, &conv).unwrap();
    let cc = Complex64::new(0.0, conv.coupling);
    let e4 = direct::e4(&v, &c, cc, 1.0)
        .unwrap()
        .map_modes(|_, z| z * conv.e4);
    assert!(rel(&e.e4, &e4) < 1e-13);
}

#[test]
fn l0_at_time_zero_is_p() {
    let n = 10;
    let c = ctx(n, 0.0);
    let v = random_field(n, 0.2, 11);
    let l0 = apply_l0(&v, &c, &Convention::derived()).unwrap();
    let p = apply_p(&v, c.phi()).unwrap();
    assert!((&l0 - &p).l2_norm() < 1e-13 * p.l2_norm());
}

#[test]
fn derived_convention_closes_mechanical_derivation() {
    for (n, t, seed) in [(6, 0.0, 1), (6, 0.43, 2), (9, 1.7, 3)] {
        let c = ctx(n, t);
        let v = random_field(n, 0.15, seed);
        let rep = oracle_dbp(&v, &c, &Convention::derived()).unwrap();
        assert!(rep.expansion_residual < 1e-12, "{}", rep.expansion_residual);
        for cmp in &rep.comparisons {
            assert!(cmp.rel_diff < 1e-12, "{}: {:e}", cmp.name, cmp.rel_diff);
        }
        for cmp in &rep.flow_comparisons {
            assert!(cmp.rel_diff < 1e-12, "{}: {:e}", cmp.name, cmp.rel_diff);
        }
        assert!(rep.closes(1e-12));
    }
}

#[test]
fn printed_convention_is_pinpointed() {
    let c = ctx(6, 0.43);
    let v = random_field(6, 0.15, 2);
    let choice = resolve_convention(&v, &c).unwrap();
    assert_eq!(choice.chosen.name, "derived");
    let printed = choice
        .reports
        .iter()
        .find(|r| r.convention.name == "printed")
        .unwrap();
    let bad: Vec<&str> = printed
        .divergent(1e-8)
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        bad.contains(&"L0+R14") && bad.contains(&"R3") && bad.contains(&"B2"),
        "{bad:?}"
    );
    assert!(!bad.contains(&"K+B1"));
    assert!(printed.total_residual > 0.1);
}

#[test]
fn single_mode_resonant_term() {
    let n = 8;
    let c = NFContext::new(&FourierField::zeros(n), 0.0, 0.9).unwrap();
    let z = Complex64::new(0.6, -0.2);
    let v = FourierField::mode(n, 3, z);
    let rep = oracle_dbp(&v, &c, &Convention::derived()).unwrap();
    let want = -Complex64::i() / 6.0 * z.norm_sqr() * z / 3.0;
    assert!((rep.r.r11.get(3) - want).norm() < 1e-15);
    let r11 = rep.comparisons.iter().find(|c| c.name == "R11").unwrap();
    assert!(r11.oracle_norm > 0.0 && r11.abs_diff < 1e-15);
}

#[test]
fn outputs_are_hermitian_and_mean_zero() {
    let n = 7;
    let c = ctx(n, 0.8);
    let v = random_field(n, 0.1, 5);
    let conv = Convention::derived();
    let r = apply_r(&v, &c, &conv).unwrap();
    let e = apply_e(&v, &c, &conv).unwrap();
    let mut all = vec![
        apply_k(&v, &c, &conv).unwrap(),
        apply_b(&v, &c, &conv).unwrap().total(),
        apply_l0(&v, &c, &conv).unwrap(),
        apply_d(&v, &c, &conv).unwrap(),
    ];
    all.extend(r.named().iter().map(|(_, f)| (*f).clone()));
    all.extend(e.named().iter().map(|(_, f)| (*f).clone()));
    for f in all {
        assert!(f.hermitian_defect() < 1e-14 * f.l2_norm().max(1.0));
        assert_eq!(f.get(0), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn homogeneity() {
    let n = 6;
    let c = NFContext::new(&random_field(n, 0.4, 9), 0.7, 0.2).unwrap();
    let v = random_field(n, 0.1, 6);
    let lam = 1.7;
    let lv = v.scale(lam);
    let conv = Convention::derived();
    let check = |a: FourierField, b: FourierField, p: i32| {
        assert!((&b - &a.scale(lam.powi(p))).l2_norm() < 1e-13 * b.l2_norm());
    };
    check(
        apply_k(&v, &c, &conv).unwrap(),
        apply_k(&lv, &c, &conv).unwrap(),
        1,
    );
    check(
        apply_l0(&v, &c, &conv).unwrap(),
        apply_l0(&lv, &c, &conv).unwrap(),
        1,
    );
    check(
        apply_b(&v, &c, &conv).unwrap().b1,
        apply_b(&lv, &c, &conv).unwrap().b1,
        2,
    );
    let (r, rl) = (
        apply_r(&v, &c, &conv).unwrap(),
        apply_r(&lv, &c, &conv).unwrap(),
    );
    check(r.r11, rl.r11, 3);
    check(r.r12, rl.r12, 2);
    check(r.r3, rl.r3, 2);
    check(
        apply_d(&v, &c, &conv).unwrap(),
        apply_d(&lv, &c, &conv).unwrap(),
        1,
    );
}

#[test]
fn excluded_denominators_are_nonzero() {
    // every tuple admitted by the closed forms at N = 5 has nonzero denominators
    let n = 5i64;
    let set = |k: i64| k != 0 && k.abs() <= n;
    for k1 in -n..=n {
        for k2 in -n..=n {
            for k3 in -n..=n {
                if !(set(k1) && set(k2) && set(k3)) || !set(k1 + k2 + k3) {
                    continue;
                }
                let nr = k1 + k2 != 0 && k1 + k3 != 0 && set(k2 + k3);
                if nr {
                    assert_ne!(k1 * (k1 + k2) * (k2 + k3) * (k3 + k1), 0);
                }
                let star = (k2 + k3).abs() <= n && (k1 + k2) * (k2 + k3) * (k3 + k1) != 0;
                if star {
                    assert_ne!(k1 * (k1 + k2) * (k2 + k3) * (k3 + k1), 0);
                }
            }
        }
    }
}

#[test]
fn oracle_rejects_large_truncation() {
    let c = ctx(17, 0.0);
    let v = random_field(17, 0.1, 1);
    assert!(oracle_dbp(&v, &c, &Convention::derived()).is_err());
}

#[test]
fn mismatched_truncation_is_rejected() {
    let c = ctx(6, 0.0);
    let v = random_field(7, 0.1, 1);
    assert!(apply_k(&v, &c, &Convention::derived()).is_err());
}

#[test]
fn fredholm_identity_and_bound() {
    let zero = FourierField::zeros(12);
    let rep = fredholm_report(&zero, 12, 0.25);
    assert!((rep.sigma_min - 1.0).abs() < 1e-14 && (rep.sigma_max - 1.0).abs() < 1e-14);
    let phi = random_field(24, 0.3, 4);
    let rep = fredholm_report(&phi, 12, 0.25);
    assert!(rep.ktilde_norm <= rep.bound);
    assert!(rep.sigma_min > 0.0);
}

#[test]
fn ktilde_matches_k_at_time_zero() {
    let n = 8;
    let phi = random_field(n, 0.3, 8);
    let c = NFContext::new(&phi, 0.5, 0.0).unwrap();
    let v = random_field(n, 0.1, 2);
    let m = ktilde_matrix(&phi, n);
    let k = apply_k(&v, &c, &Convention::derived()).unwrap();
    let idx: Vec<i64> = (-(n as i64)..=n as i64).filter(|&k| k != 0).collect();
    for (i, &ki) in idx.iter().enumerate() {
        let row: Complex64 = idx
            .iter()
            .enumerate()
            .map(|(j, &kj)| m[(i, j)] * v.get(kj))
            .sum();
        assert!((row - k.get(ki)).norm() < 1e-14);
    }
}

#[test]
fn bound_chains_hold_on_small_problem() {
    let c = ctx(8, 0.3);
    let rep = bound_report(&c, 0.25, 9, 42, &Convention::derived()).unwrap();
    for row in &rep.rows {
        assert!(row.holds(), "{row:?}");
    }
    assert!(bound_report(&c, 0.25, 0, 42, &Convention::derived()).is_err());
}

#[test]
fn random_unit_fields() {
    for law in SupportLaw::ALL {
        let v = random_unit_field(16, law, 3);
        assert!((v.l2_norm() - 1.0).abs() < 1e-14);
        assert_eq!(v.get(0), Complex64::new(0.0, 0.0));
        assert_eq!(v, random_unit_field(16, law, 3));
    }
    let h = random_unit_field(16, SupportLaw::HighBand, 1);
    assert_eq!(h.get(8), Complex64::new(0.0, 0.0));
    assert!(h.get(9).norm() > 0.0);
}
