//! Property tests over the pure functions: angles, rewards, encoder,
//! controller limits, LQR scaling and summary statistics.

use std::f64::consts::PI;

use proptest::prelude::*;

use qube_gym::controllers::{make_controller, ControllerConfig, ControllerContext, LqrController, CONTROLLER_NAMES};
use qube_gym::domain::{count_resolution, decode_encoder, quantize_encoder};
use qube_gym::harness::summarize;
use qube_gym::state::{angle_from_down, make_observation, wrap_angle, PendulumState, PhysicalParams};
use qube_gym::tasks::{dense_reward, reward_balance, reward_follow, TaskKind, TaskSpec};

fn state() -> impl Strategy<Value = PendulumState<f64>> {
    (-PI..=PI, -PI..=PI, -20.0..20.0, -20.0..20.0)
        .prop_map(|(t, a, td, ad)| PendulumState::new(t, a, td, ad).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn wrap_lands_in_half_open_interval(x in -1e6..1e6_f64) {
        let w = wrap_angle(x).unwrap();
        prop_assert!(w > -PI && w <= PI, "wrap({x}) = {w}");
        // same direction on the circle
        prop_assert!((w.sin() - x.sin()).abs() < 1e-6 && (w.cos() - x.cos()).abs() < 1e-6);
    }

    #[test]
    fn wrap_is_idempotent(x in -100.0..100.0_f64) {
        let w = wrap_angle(x).unwrap();
        prop_assert_eq!(wrap_angle(w).unwrap(), w);
    }

    #[test]
    fn angle_from_down_is_bounded(a in -PI..=PI) {
        let d = angle_from_down(a).unwrap();
        prop_assert!((0.0..=PI).contains(&d));
        prop_assert!((d - (PI - a.abs())).abs() < 1e-12);
    }

    #[test]
    fn rewards_are_bounded_and_balance_matches_swingup(s in state(), target in -1.4..1.4_f64) {
        for kind in TaskKind::ALL {
            if kind == TaskKind::Rotor {
                continue;
            }
            let t = kind.is_follow().then_some(target);
            let r = dense_reward(kind, &s, t).unwrap();
            prop_assert!((0.0..=1.0).contains(&r), "{kind}: {r}");
        }
        prop_assert_eq!(reward_balance(&s), dense_reward(TaskKind::SwingUp, &s, None).unwrap());
        prop_assert_eq!(reward_follow(&s, 0.0), reward_balance(&s));
    }

    #[test]
    fn sparse_rewards_are_zero_or_one(s in state()) {
        for kind in TaskKind::ALL.into_iter().filter(|k| k.supports_sparse()) {
            let spec = TaskSpec::<f64>::new(kind).sparse(true).unwrap();
            let target = kind.is_follow().then_some(0.3);
            let r = spec.reward(&s, target).unwrap();
            prop_assert!(r == 0.0 || r == 1.0);
        }
    }

    #[test]
    fn observation_layout(s in state(), target in -1.4..1.4_f64) {
        let plain = make_observation(&s, None);
        prop_assert_eq!(plain.len(), 4);
        let follow = make_observation(&s, Some(target));
        prop_assert_eq!(follow.len(), 5);
        prop_assert_eq!(&follow.values()[..4], plain.values());
        prop_assert_eq!(follow.target(), Some(target));
    }

    #[test]
    fn controllers_respect_the_voltage_limit(s in state(), seed in any::<u64>()) {
        let ctx = ControllerContext {
            params: PhysicalParams::default(),
            config: ControllerConfig::default(),
            max_voltage: 3.0,
            seed,
        };
        for name in CONTROLLER_NAMES {
            let mut c = make_controller::<f64>(name, &ctx).unwrap();
            let v = c.act_state(&s).voltage;
            prop_assert!(v.is_finite() && v.abs() <= 3.0, "{name}: {v}");
        }
    }

    #[test]
    fn summary_matches_two_pass(values in prop::collection::vec(-10.0..10.0_f64, 1..200)) {
        let stats = summarize(&values).unwrap();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        prop_assert!((stats.mean - mean).abs() < 1e-12);
        prop_assert!((stats.std - var.sqrt()).abs() < 1e-12);
        prop_assert!(stats.min <= stats.mean + 1e-12 && stats.mean <= stats.max + 1e-12);
    }
}

#[test]
fn encoder_round_trip_within_one_count() {
    let res = count_resolution::<f64>(2048);
    let mut worst = 0.0_f64;
    for i in 0..100_000 {
        let x = -PI + 2.0 * PI * (i as f64 + 0.37) / 100_000.0;
        let back: f64 = decode_encoder(quantize_encoder(x, 2048), 2048);
        worst = worst.max((back - x).abs());
    }
    assert!(worst <= res, "{worst} > {res}");
}

#[test]
fn encoder_truncates_toward_zero() {
    let res = count_resolution::<f64>(2048);
    assert_eq!(quantize_encoder(0.999 * res, 2048), 0);
    assert_eq!(quantize_encoder(-0.999 * res, 2048), 0);
    assert_eq!(quantize_encoder(1.001 * res, 2048), 1);
    assert_eq!(quantize_encoder(-1.001 * res, 2048), -1);
}

#[test]
fn lqr_gain_is_invariant_under_weight_scaling() {
    let p = PhysicalParams::<f64>::default();
    let base = ControllerConfig::<f64>::default();
    let k0 = LqrController::design(&p, &base, 3.0).unwrap().gain.k;
    for scale in [0.01, 7.5, 1e3] {
        let mut cfg = base;
        cfg.lqr_q_theta *= scale;
        cfg.lqr_q_alpha *= scale;
        cfg.lqr_q_theta_dot *= scale;
        cfg.lqr_q_alpha_dot *= scale;
        cfg.lqr_r *= scale;
        let k = LqrController::design(&p, &cfg, 3.0).unwrap().gain.k;
        for (a, b) in k.iter().zip(k0) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "scale {scale}: {k:?} vs {k0:?}");
        }
    }
}

#[test]
fn summarize_rejects_empty_input() {
    assert!(summarize(&[]).is_err());
}
