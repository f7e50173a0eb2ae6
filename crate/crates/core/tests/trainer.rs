mod common;

use common::{close, fd_params, random_net, random_point, well_inside};
use ratio_core::data::{sample_gaussian, GaussianSpec, Samples};
use ratio_core::local_stat::{omega_cost, omega_grad, scale_spec, translation_spec};
use ratio_core::loss::{catalog, preset};
use ratio_core::rng;
use ratio_core::trainer::{train_local, train_mutual_information, train_two_sample};
use ratio_core::{HiddenActivation, LossPair, Mlp2, OutputNonlinearity, Preset, PresetParams, TrainConfig, TrainMode};

fn separated_gaussians() -> (Samples, Samples) {
    let f0 = GaussianSpec::standard(10);
    let f1 = GaussianSpec::new(vec![1.0 / 10f64.sqrt(); 10], 1.2).unwrap();
    (sample_gaussian(&f0, 100, 1), sample_gaussian(&f1, 100, 2))
}

/// With `smoothing = 0` one update is `mu g / sqrt(g^2 + eps)`, which inverts
/// to the gradient exactly.
fn one_step_gradient(before: &Mlp2, after: &Mlp2, cfg: &TrainConfig) -> Vec<f64> {
    before
        .params()
        .iter()
        .zip(after.params())
        .map(|(a, b)| {
            let s = a - b;
            s * cfg.epsilon.sqrt() / (cfg.step_size * cfg.step_size - s * s).sqrt()
        })
        .collect()
}

fn probe_cfg() -> TrainConfig {
    TrainConfig { step_size: 1e-2, smoothing: 0.0, iterations: 1, epsilon: 1.0, ..Default::default() }
}

#[test]
fn single_full_batch_step_on_mean_square_cost() {
    let ms = preset(Preset::A1, PresetParams::alpha(0.0)).unwrap().pair;
    let mut net = Mlp2::zeros(1, 1, OutputNonlinearity::Identity).unwrap();
    net.set_params(&[0.8, 0.1, 0.5, -0.3]).unwrap();
    let d = Samples::scalars(vec![1.0]);
    let cost = |m: &Mlp2| {
        let u = m.forward(&[1.0]).unwrap();
        u * u / 2.0 - u
    };
    let cfg = TrainConfig { smoothing: 0.0, iterations: 1, ..Default::default() };
    let (out, trace) = train_two_sample(&net, &ms, &d, &d, &cfg, None).unwrap();
    assert_eq!(trace.costs, [cost(&net)]);
    let g = fd_params(&net, 1e-6, cost);
    for ((before, after), gi) in net.params().iter().zip(out.params()).zip(&g) {
        let want = before - cfg.step_size * gi / (gi * gi + cfg.epsilon).sqrt();
        assert!((after - want).abs() < 1e-12, "{after} vs {want}");
    }
    // u = 0.5 * 0.9 - 0.3 < 1, so every coordinate moves up by about mu
    for (before, after) in net.params().iter().zip(out.params()) {
        assert!(((after - before) / cfg.step_size - 1.0).abs() < 1e-4);
    }
}

#[test]
fn full_batch_gradient_matches_differences_of_the_sample_cost() {
    let (d0, d1) = separated_gaussians();
    let (d0, d1) = (d0.slice(0..15), d1.slice(0..12));
    let mut r = rng::seeded(4);
    for name in [Preset::Exponential, Preset::B2, Preset::A2, Preset::B3] {
        let p = preset(name, PresetParams::default()).unwrap();
        let net = random_net(10, 6, p.output, HiddenActivation::Softplus, &mut r);
        let cost = |m: &Mlp2| {
            let a: f64 = d0.rows().map(|x| p.pair.phi_value(m.forward(x).unwrap())).sum::<f64>() / 15.0;
            let b: f64 = d1.rows().map(|x| p.pair.psi_value(m.forward(x).unwrap())).sum::<f64>() / 12.0;
            a + b
        };
        let cfg = probe_cfg();
        let (out, trace) = train_two_sample(&net, &p.pair, &d0, &d1, &cfg, None).unwrap();
        assert!(close(trace.costs[0], cost(&net), 1e-9, 1e-12));
        let g = one_step_gradient(&net, &out, &cfg);
        for (a, b) in g.iter().zip(fd_params(&net, 1e-5, cost)) {
            assert!(close(*a, b, 1e-5, 1e-9), "{name}: {a} vs {b}");
        }
    }
}

fn double_sum_cost(pair: &LossPair, m: &Mlp2, xs: &Samples, ys: &Samples) -> f64 {
    let n = xs.len() as f64;
    let mut c = 0.0;
    for x in xs.rows() {
        for y in ys.rows() {
            c += pair.phi_value(m.forward(&[x[0], y[0]]).unwrap()) / (n * n);
        }
    }
    for (x, y) in xs.rows().zip(ys.rows()) {
        c += pair.psi_value(m.forward(&[x[0], y[0]]).unwrap()) / n;
    }
    c
}

#[test]
fn mutual_information_gradient_is_the_double_sum_gradient() {
    let pair = preset(Preset::Exponential, PresetParams::default()).unwrap().pair;
    let mut r = rng::seeded(6);
    let degenerate = (Samples::scalars(vec![0.3; 5]), Samples::scalars(vec![-0.5; 5]));
    let generic = (
        Samples::scalars((0..6).map(|_| rng::normal(&mut r)).collect()),
        Samples::scalars((0..6).map(|_| rng::normal(&mut r)).collect()),
    );
    for (xs, ys) in [degenerate, generic] {
        let net = random_net(2, 5, OutputNonlinearity::Identity, HiddenActivation::Tanh, &mut r);
        let cfg = probe_cfg();
        let (out, trace) = train_mutual_information(&net, &pair, &xs, &ys, &cfg, None).unwrap();
        assert!(close(trace.costs[0], double_sum_cost(&pair, &net, &xs, &ys), 1e-12, 1e-14));
        let g = one_step_gradient(&net, &out, &cfg);
        let fd = fd_params(&net, 1e-5, |m| double_sum_cost(&pair, m, &xs, &ys));
        for (a, b) in g.iter().zip(&fd) {
            assert!(close(*a, *b, 1e-5, 1e-9), "{a} vs {b}");
        }
    }
}

#[test]
fn omega_gradient_matches_differences_of_omega() {
    let mut r = rng::seeded(7);
    let pairs = [
        preset(Preset::A1, PresetParams::alpha(0.0)).unwrap().pair,
        preset(Preset::A1, PresetParams::alpha(-0.5)).unwrap().pair,
        preset(Preset::A1, PresetParams::alpha(0.5)).unwrap().pair,
    ];
    let mut tested = 0;
    for k in [1usize, 2, 3] {
        let delta: Vec<f64> = (0..k).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
        for spec in [translation_spec(&delta).unwrap(), scale_spec(k).unwrap()] {
            for pair in &pairs {
                for g0 in [OutputNonlinearity::Identity, OutputNonlinearity::BoundedRational(2.0)] {
                    for g1 in [HiddenActivation::Relu, HiddenActivation::Softplus] {
                        let net = random_net(k, 4, g0, g1, &mut r);
                        let x = random_point(k, &mut r);
                        let u = net.forward(&x).unwrap();
                        if !well_inside(&net, &x) || u.abs() < 1e-3 {
                            continue;
                        }
                        let g = omega_grad(&spec, pair, &net, &x).unwrap();
                        let fd = fd_params(&net, 1e-6, |m| omega_cost(&spec, pair, m, &x).unwrap());
                        for (a, b) in g.iter().zip(&fd) {
                            assert!(close(*a, *b, 1e-4, 1e-7), "{}: {a} vs {b}", pair.name);
                        }
                        tested += 1;
                    }
                }
            }
        }
    }
    assert!(tested >= 40, "{tested}");
}

#[test]
fn local_training_trace_is_the_mean_omega() {
    let pair = preset(Preset::A1, PresetParams::alpha(0.0)).unwrap().pair;
    let spec = scale_spec(2).unwrap();
    let data = sample_gaussian(&GaussianSpec::standard(2), 40, 3);
    let net = Mlp2::init(2, 5, OutputNonlinearity::Identity, 1).unwrap().with_hidden(HiddenActivation::Softplus);
    let cfg = probe_cfg();
    let (out, trace) = train_local(&net, &pair, &spec, &data, &cfg, None).unwrap();
    let mean = |m: &Mlp2| data.rows().map(|x| omega_cost(&spec, &pair, m, x).unwrap()).sum::<f64>() / 40.0;
    assert!(close(trace.costs[0], mean(&net), 1e-12, 1e-14));
    let g = one_step_gradient(&net, &out, &cfg);
    for (a, b) in g.iter().zip(fd_params(&net, 1e-5, mean)) {
        assert!(close(*a, b, 1e-5, 1e-9), "{a} vs {b}");
    }
}

/// Shared initialization with three output maps; records parameters after
/// every update.
fn parameter_paths(iterations: usize, mode: TrainMode) -> Vec<Vec<Vec<f64>>> {
    let (d0, d1) = separated_gaussians();
    let init = Mlp2::init(10, 20, OutputNonlinearity::Identity, 9).unwrap();
    let runs = [
        (Preset::B2, OutputNonlinearity::Identity),
        (Preset::A3, OutputNonlinearity::Exp),
        (Preset::C1, OutputNonlinearity::Sigmoid),
    ];
    let cfg = TrainConfig { iterations, mode, seed: 5, ..Default::default() };
    runs.iter()
        .map(|&(name, g0)| {
            let pair = preset(name, PresetParams::default()).unwrap().pair;
            let mut net = init.clone();
            net.g0 = g0;
            let mut path = Vec::new();
            let mut hook = |m: &Mlp2| {
                path.push(m.params());
                0.0
            };
            train_two_sample(&net, &pair, &d0, &d1, &cfg, Some(&mut hook)).unwrap();
            path
        })
        .collect()
}

#[test]
fn equivalent_objectives_take_identical_steps() {
    for mode in [TrainMode::FullBatch, TrainMode::StochasticPaired] {
        let paths = parameter_paths(200, mode);
        let mut worst = 0.0f64;
        for t in 0..200 {
            for other in &paths[1..] {
                for (a, b) in paths[0][t].iter().zip(&other[t]) {
                    worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
                }
            }
        }
        assert!(worst < 1e-10, "{mode:?}: {worst}");
    }
}

#[test]
fn full_batch_costs_stay_finite_for_every_preset() {
    let (d0, d1) = separated_gaussians();
    let cfg = TrainConfig { iterations: 200, ..Default::default() };
    for p in catalog() {
        let net = Mlp2::init(10, 20, p.output, 1).unwrap();
        let (_, trace) = train_two_sample(&net, &p.pair, &d0, &d1, &cfg, None)
            .unwrap_or_else(|e| panic!("{}: {e}", p.pair.name));
        assert_eq!(trace.costs.len(), 200);
        assert!(trace.costs.iter().all(|c| c.is_finite()), "{}", p.pair.name);
    }
}

#[test]
fn stochastic_training_is_reproducible() {
    let (d0, d1) = separated_gaussians();
    let pair = preset(Preset::Exponential, PresetParams::default()).unwrap().pair;
    let net = Mlp2::init(10, 20, OutputNonlinearity::Identity, 2).unwrap();
    let cfg = TrainConfig { iterations: 500, mode: TrainMode::StochasticPaired, seed: 3, ..Default::default() };
    let a = train_two_sample(&net, &pair, &d0, &d1, &cfg, None).unwrap();
    let b = train_two_sample(&net, &pair, &d0, &d1, &cfg, None).unwrap();
    assert_eq!(a, b);
    let c = train_two_sample(&net, &pair, &d0, &d1, &TrainConfig { seed: 4, ..cfg }, None).unwrap();
    assert_ne!(a.0, c.0);
}
