use ratio_net::config::{ExperimentConfig, ExperimentKind, ImageSource, ModeName};
use ratio_net::Error;

fn parse(text: &str) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::parse(text)?.resolve()
}

#[test]
fn defaults_follow_the_experiment() {
    let c = parse("experiment = \"hyptest\"\nseeds = [3]\n").unwrap();
    let h = c.hyptest.as_ref().unwrap();
    assert_eq!((h.dim, h.train_size, h.block_size, h.trials), (10, 100, 20, 100_000));
    assert_eq!(h.alternative_mean, Some(1.0 / 10f64.sqrt()));
    assert_eq!(h.alternative_variance, 1.2);
    assert_eq!(c.network.hidden, Some(20));
    assert_eq!(c.train.iterations, Some(10_000));
    assert_eq!(c.train.step_size, Some(2e-4));
    assert_eq!(c.train.smoothing, Some(0.99));
    assert_eq!(c.train.mode, Some(ModeName::FullBatch));
    let names: Vec<&str> = c.methods.iter().map(|m| m.name.as_str()).collect();
    assert_eq!(names, ["ms", "exp", "ce"]);
    let outputs: Vec<&str> = c.methods.iter().map(|m| m.build().unwrap().output.kind()).collect();
    assert_eq!(outputs, ["elu", "identity", "sigmoid"]);

    let c = parse("experiment = \"cusum\"\nseeds = [1]\n").unwrap();
    let cu = c.cusum.as_ref().unwrap();
    assert_eq!(cu.train_lengths, vec![500, 2500]);
    assert_eq!((cu.hidden_k, cu.hidden_k1), (20, 50));
    assert_eq!(c.train.iterations, Some(10_000));

    let c = parse("experiment = \"glrt\"\nseeds = [1]\n").unwrap();
    assert_eq!(c.train.iterations, Some(5000));
    assert_eq!(c.glrt.as_ref().unwrap().sizes, vec![100, 200]);

    let c = parse("experiment = \"classify\"\nseeds = [1]\n[classify]\nsource = \"surrogate\"\n").unwrap();
    assert_eq!(c.network.hidden, Some(300));
    assert_eq!(c.classify.as_ref().unwrap().source, ImageSource::Surrogate);
    assert_eq!(c.experiment, ExperimentKind::Classify);
}

#[test]
fn resolving_twice_changes_nothing() {
    for kind in ["hyptest", "glrt", "cusum", "kl", "mi", "local"] {
        let c = parse(&format!("experiment = \"{kind}\"\nseeds = [1, 2]\n")).unwrap();
        let again = parse(&c.to_toml()).unwrap();
        assert_eq!(again, c, "{kind}");
    }
}

#[test]
fn schema_violations_are_config_errors() {
    let bad = [
        "experiment = \"hyptest\"\n",
        "experiment = \"nope\"\nseeds = [1]\n",
        "experiment = \"kl\"\nseeds = []\n",
        "experiment = \"kl\"\nseeds = [1, 1]\n",
        "experiment = \"kl\"\nseeds = [1]\ncolour = 3\n",
        "experiment = \"kl\"\nseeds = [1]\n[kl]\ntrain_sise = 10\n",
        "experiment = \"kl\"\nseeds = [1]\n[glrt]\n",
        "experiment = \"kl\"\nseeds = [1]\n[train]\nsmoothing = 1.5\n",
        "experiment = \"kl\"\nseeds = [1]\n[[methods]]\nname = \"x\"\npreset = \"C1\"\n",
        "experiment = \"kl\"\nseeds = [1]\n[[methods]]\nname = \"x\"\npreset = \"Z9\"\n",
        "experiment = \"hyptest\"\nseeds = [1]\n[[methods]]\nname = \"x\"\npreset = \"C1\"\noutput = \"identity\"\n",
        "experiment = \"hyptest\"\nseeds = [1]\n[[methods]]\nname = \"h\"\npreset = \"D3_hinge\"\n",
        "experiment = \"hyptest\"\nseeds = [1]\n[[methods]]\nname = \"a/b\"\npreset = \"C1\"\n",
        "experiment = \"classify\"\nseeds = [1]\n",
        "experiment = \"local\"\nseeds = [1]\n[[methods]]\nname = \"ce\"\npreset = \"C1\"\n",
        "experiment = \"local\"\nseeds = [1]\n[local]\ndim = 2\ndelta = [1.0]\n",
        "experiment = \"mi\"\nseeds = [1]\n[mi]\ncorrelation = 1.0\n",
        "experiment = \"cusum\"\nseeds = [1]\n[cusum]\nthresholds = [3.0, 2.0]\n",
        "experiment = \"kl\"\nseeds = [1]\n[network]\nhidden_activation = \"gelu\"\n",
    ];
    for text in bad {
        assert!(matches!(parse(text), Err(Error::Config(_))), "{text}");
    }
}
