use ratio_core::data::{sample_markov, MarkovSpec};
use ratio_core::loss::preset;
use ratio_core::markov::{
    conditional_increment, cusum_step, fit_conditional, sprt_update, windows, ConditionalLr, ConditionalNets,
    CusumState, ExactConditional, IncrementSource,
};
use ratio_core::rng;
use ratio_core::{Error, LogRatio, Preset, PresetParams, TrainConfig, TrainMode};

const A: f64 = 0.6;

/// Joint log density of `m` consecutive values of the stationary process
/// `x_t = a x_{t-1} + sqrt(1 - a^2) w_t` (unit marginal variance), via its
/// tridiagonal precision matrix.
fn ar1_log_density(x: &[f64], a: f64) -> f64 {
    let m = x.len();
    if m == 1 {
        return iid_log_density(x);
    }
    let s = 1.0 - a * a;
    let mut q = 0.0;
    for i in 0..m {
        let diag = if i == 0 || i == m - 1 { 1.0 } else { 1.0 + a * a };
        q += diag * x[i] * x[i];
        if i + 1 < m {
            q -= 2.0 * a * x[i] * x[i + 1];
        }
    }
    q /= s;
    -0.5 * m as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * (m as f64 - 1.0) * s.ln() - 0.5 * q
}

fn iid_log_density(x: &[f64]) -> f64 {
    x.iter().map(|v| -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * v * v).sum()
}

fn joint_log_lr(x: &[f64]) -> f64 {
    ar1_log_density(x, A) - iid_log_density(x)
}

type Oracle = (usize, fn(&[f64]) -> f64);

fn oracle_clr(k: usize) -> ConditionalLr<Oracle> {
    let u_k = (k > 0).then_some((k, joint_log_lr as fn(&[f64]) -> f64));
    ConditionalLr::new(k, u_k, (k + 1, joint_log_lr as fn(&[f64]) -> f64)).unwrap()
}

fn ar1_series(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::seeded(seed);
    let mut x = rng::normal(&mut r);
    let mut out = vec![x];
    while out.len() < n {
        x = A * x + (1.0 - A * A).sqrt() * rng::normal(&mut r);
        out.push(x);
    }
    out
}

#[test]
fn oracle_increment_is_the_conditional_log_ratio() {
    let series = ar1_series(200, 1);
    for k in [1, 2, 3] {
        let clr = oracle_clr(k);
        let w = windows(&series, k + 1).unwrap();
        for win in w.rows() {
            let (x, prev) = (win[0], win[1]);
            let s = 1.0 - A * A;
            let cond = -0.5 * s.ln() - (x - A * prev).powi(2) / (2.0 * s) + 0.5 * x * x;
            let got = conditional_increment(&clr, win).unwrap();
            assert!((got - cond).abs() < 1e-12, "k={k}: {got} vs {cond}");
        }
    }
}

#[test]
fn increments_telescope_to_the_joint_log_ratio() {
    for seed in 0..20 {
        let series = ar1_series(40, 100 + seed);
        for k in [1, 2, 4] {
            let clr = oracle_clr(k);
            let mut l = 0.0;
            for win in windows(&series, k + 1).unwrap().rows() {
                l = sprt_update(l, &clr, win).unwrap();
            }
            // windows are newest first, the joint density is order-free here
            let want = joint_log_lr(&series) - joint_log_lr(&series[..k]);
            assert!((l - want).abs() < 1e-11 * want.abs().max(1.0), "k={k}: {l} vs {want}");
        }
    }
}

#[test]
fn order_zero_increment_is_the_plain_log_ratio() {
    let u1: (usize, fn(&[f64]) -> f64) = (1, |x| 0.5 * x[0] - 0.1);
    let clr = ConditionalLr::new(0, None, u1).unwrap();
    for x in [-2.0, 0.0, 0.3, 5.0] {
        assert_eq!(conditional_increment(&clr, &[x]).unwrap(), u1.log_lr(&[x]).unwrap());
    }
}

#[test]
fn sprt_drifts_down_under_the_nominal() {
    let exact = ExactConditional { nominal: MarkovSpec::IidStandardNormal, alternative: MarkovSpec::SqrtFeedback };
    let series = sample_markov(MarkovSpec::IidStandardNormal, 10_001, 4, None);
    let mut l = 0.0;
    for win in windows(&series, 2).unwrap().rows() {
        l = sprt_update(l, &exact, win).unwrap();
    }
    let drift = l / 10_000.0;
    // E0[x m - m^2 / 2] with m = sign(p) sqrt|p| is -E|p| / 2
    let want = -1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!(drift < 0.0);
    assert!((drift - want).abs() < 0.05, "{drift} vs {want}");
}

fn brute_force_cusum(inc: &[f64]) -> Vec<f64> {
    (0..inc.len())
        .map(|t| {
            (0..=t)
                .map(|j| inc[j..=t].iter().fold(0.0, |s, v| s + v))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

#[test]
fn recursion_equals_max_over_partial_sums() {
    let mut r = rng::seeded(9);
    for _ in 0..100 {
        let inc: Vec<f64> = (0..50).map(|_| rng::normal(&mut r) - 0.2).collect();
        let want = brute_force_cusum(&inc);
        let mut s = CusumState::new(f64::INFINITY, 0);
        for (v, w) in inc.iter().zip(&want) {
            s.advance(*v).unwrap();
            assert!((s.s_hat - w).abs() < 1e-12);
        }
    }
}

#[test]
fn hand_computed_cusum_table() {
    let u1: (usize, fn(&[f64]) -> f64) = (1, |x| x[0]);
    let clr = ConditionalLr::new(0, None, u1).unwrap();
    let inc = [1.0, -2.0, 0.5, 0.5, -0.25, 3.0, -4.0, 1.0, 1.0, 2.0];
    let table = [1.0, -1.0, 0.5, 1.0, 0.75, 3.75, -0.25, 1.0, 2.0, 4.0];
    let mut s = CusumState::new(3.9, 0);
    for (t, (x, want)) in inc.iter().zip(table).enumerate() {
        s = cusum_step(s, &clr, &[*x]).unwrap();
        assert_eq!(s.s_hat, want);
        assert_eq!(s.t, t + 1);
        assert_eq!(s.is_stopped(), t == 9);
    }
    assert_eq!(s.stopped_at, Some(10));
    assert_eq!(cusum_step(s, &clr, &[0.0]), Err(Error::Stopped(10)));
}

#[test]
fn non_positive_increments_never_stop() {
    let mut r = rng::seeded(10);
    let mut s = CusumState::new(1e-9, 0);
    for _ in 0..10_000 {
        s.advance(-rng::uniform(&mut r, 0.0, 1.0)).unwrap();
    }
    assert!(!s.is_stopped());
}

#[test]
fn identical_series_give_near_zero_conditional_nets() {
    let loss = preset(Preset::Exponential, PresetParams::default()).unwrap();
    let cfg = TrainConfig { iterations: 4000, mode: TrainMode::StochasticPaired, ..Default::default() };
    let mut total = 0.0;
    for seed in 0..20 {
        let series = sample_markov(MarkovSpec::SqrtFeedback, 1000, seed, None);
        let nets = ConditionalNets { hidden_k: 20, hidden_k1: 50, init_seed: seed };
        let clr = fit_conditional(&series, &series, 1, &loss, nets, &TrainConfig { seed, ..cfg }).unwrap();
        let held = sample_markov(MarkovSpec::SqrtFeedback, 501, 1000 + seed, None);
        let w2 = windows(&held, 2).unwrap();
        let mut m = 0.0;
        for win in w2.rows() {
            m += clr.u_k1().log_lr(win).unwrap().abs() + clr.u_k().unwrap().log_lr(&win[1..]).unwrap().abs();
        }
        total += m / (2.0 * w2.len() as f64);
    }
    let mean = total / 20.0;
    assert!(mean < 0.3, "{mean}");
}

#[test]
fn fitting_needs_two_windows() {
    let loss = preset(Preset::Exponential, PresetParams::default()).unwrap();
    let nets = ConditionalNets { hidden_k: 2, hidden_k1: 2, init_seed: 0 };
    let e = fit_conditional(&[0.1, 0.2], &[0.3, 0.4], 1, &loss, nets, &TrainConfig::default()).unwrap_err();
    assert_eq!(e, Error::InsufficientData { windows: 1 });
    let ce = preset(Preset::C1, PresetParams::default()).unwrap();
    assert!(matches!(
        fit_conditional(&[0.0; 10], &[0.0; 10], 1, &ce, nets, &TrainConfig::default()),
        Err(Error::Param(_))
    ));
    let exact = ExactConditional { nominal: MarkovSpec::IidStandardNormal, alternative: MarkovSpec::SqrtFeedback };
    assert_eq!(exact.order(), 1);
}
