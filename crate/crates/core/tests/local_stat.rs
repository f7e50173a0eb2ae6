use ratio_core::data::{sample_gaussian, GaussianSpec};
use ratio_core::local_stat::{direct_cost, omega_cost, scale_spec, translation_spec, LocalSpec};
use ratio_core::loss::preset;
use ratio_core::rng;
use ratio_core::{HiddenActivation, Mlp2, OutputNonlinearity, Preset, PresetParams};

#[test]
fn builtin_specs_have_consistent_divergences() {
    let t = translation_spec(&[1.0]).unwrap();
    assert_eq!(((t.d)(&[0.3]), (t.p[0])(&[0.3]), (t.p_div)(&[0.3])), (0.0, -1.0, 0.0));
    for k in 1..5 {
        let delta: Vec<f64> = (0..k).map(|i| i as f64 - 1.5).collect();
        assert!(translation_spec(&delta).unwrap().divergence_error(100, 1) < 1e-5);
        let s = scale_spec(k).unwrap();
        assert!(s.divergence_error(100, 2) < 1e-5);
        assert_eq!((s.p_div)(&vec![0.2; k]), k as f64);
    }
}

#[test]
fn zero_translation_reduces_to_the_plain_cost() {
    let pair = preset(Preset::A1, PresetParams::alpha(0.0)).unwrap().pair;
    let spec = translation_spec(&[0.0, 0.0]).unwrap();
    let net = Mlp2::init(2, 6, OutputNonlinearity::Identity, 3).unwrap();
    for x in [[0.1, 0.2], [-1.0, 2.0], [3.0, -0.5]] {
        assert_eq!(omega_cost(&spec, &pair, &net, &x).unwrap(), direct_cost(&pair, &net, &x, 0.0).unwrap());
    }
}

/// Paired Monte-Carlo comparison of `Omega` with `phi(u) + r psi(u)`; returns
/// the mean difference in standard errors.
fn identity_z_score(spec: &LocalSpec, r: impl Fn(&[f64]) -> f64, net: &Mlp2, alpha: f64, seed: u64) -> f64 {
    let pair = preset(Preset::A1, PresetParams::alpha(alpha)).unwrap().pair;
    let data = sample_gaussian(&GaussianSpec::standard(spec.k), 100_000, seed);
    let diffs: Vec<f64> = data
        .rows()
        .map(|x| omega_cost(spec, &pair, net, x).unwrap() - direct_cost(&pair, net, x, r(x)).unwrap())
        .collect();
    let n = diffs.len() as f64;
    let m = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - m) * (d - m)).sum::<f64>() / (n - 1.0);
    m / (var / n).sqrt()
}

#[test]
fn integration_by_parts_identity_holds_in_monte_carlo() {
    let mut r = rng::seeded(11);
    for k in [1usize, 2] {
        let delta: Vec<f64> = (0..k).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
        let translation = translation_spec(&delta).unwrap();
        let scale = scale_spec(k).unwrap();
        let d2 = delta.clone();
        for seed in 0..5u64 {
            let g1 = if seed % 2 == 0 { HiddenActivation::Relu } else { HiddenActivation::Softplus };
            let mut net = Mlp2::init(k, 10, OutputNonlinearity::BoundedRational(2.0), seed).unwrap().with_hidden(g1);
            net.a0.iter_mut().for_each(|a| *a = rng::uniform(&mut r, -1.0, 1.0));
            net.b1.iter_mut().for_each(|b| *b *= 3.0);
            for alpha in [0.0, -0.5] {
                let zt = identity_z_score(&translation, |x| x.iter().zip(&d2).map(|(a, b)| a * b).sum(), &net, alpha, seed);
                let zs = identity_z_score(&scale, |x| 1.0 - x.iter().map(|v| v * v).sum::<f64>(), &net, alpha, 50 + seed);
                assert!(zt.abs() < 3.0, "translation k={k} net {seed} alpha {alpha}: z = {zt}");
                assert!(zs.abs() < 3.0, "scale k={k} net {seed} alpha {alpha}: z = {zs}");
            }
        }
    }
}
