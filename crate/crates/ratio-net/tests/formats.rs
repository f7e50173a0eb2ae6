use std::fs;

use ratio_core::estimators::Provenance;
use ratio_core::eval::{roc, DelayCurve};
use ratio_core::{HiddenActivation, Mlp2, OutputNonlinearity, RatioEstimator, Target, TrainConfig, TrainTrace};
use ratio_net::formats;
use ratio_net::Error;

#[test]
fn estimator_bundle_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let net = Mlp2::init(3, 4, OutputNonlinearity::Elu(0.05), 9).unwrap().with_hidden(HiddenActivation::Softplus);
    let prov = Provenance { preset: "A1".into(), config: TrainConfig { seed: 4, iterations: 77, ..Default::default() } };
    let est = RatioEstimator::new(net, Target::LikelihoodRatio, Some(prov)).unwrap();
    let p = dir.path().join("m.json");
    formats::write_bundle(&p, &est).unwrap();
    assert_eq!(formats::read_bundle(&p).unwrap(), est);

    let bare = RatioEstimator::new(est.net.clone(), Target::SignLogLr, None).unwrap();
    formats::write_bundle(&p, &bare).unwrap();
    assert_eq!(formats::read_bundle(&p).unwrap(), bare);

    formats::write_model(&dir.path().join("m.txt"), &est.net).unwrap();
    assert_eq!(formats::read_model(&dir.path().join("m.txt")).unwrap(), est.net);
}

#[test]
fn bad_bundles_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    let net = Mlp2::init(1, 2, OutputNonlinearity::Identity, 1).unwrap();
    let good = formats::bundle_to_string(&RatioEstimator::new(net, Target::LogLikelihoodRatio, None).unwrap());
    for bad in [
        good.replace("log_likelihood_ratio", "likelihood_ratio"),
        good.replace("ratio-net-estimator 1", "ratio-net-estimator 9"),
        good.replace("\"format\"", "\"extra\": 1, \"format\""),
        "{".to_string(),
    ] {
        fs::write(&p, bad).unwrap();
        assert!(matches!(formats::read_bundle(&p), Err(Error::Format { .. })));
    }
}

#[test]
fn csv_artifacts_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let trace = TrainTrace { costs: vec![3.0, 2.0, 1.5], metrics: vec![(2, 0.25)] };
    let p = dir.path().join("t.csv");
    formats::write_trace(&p, &trace, Some("test_error")).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "iteration,cost,test_error\n1,3,\n2,2,0.25\n3,1.5,\n");
    formats::write_trace(&p, &trace, None).unwrap();
    assert_eq!(fs::read_to_string(&p).unwrap(), "iteration,cost\n1,3\n2,2\n3,1.5\n");

    let curve = roc(&[0.0, 1.0], &[2.0]).unwrap();
    formats::write_roc(&p, &curve).unwrap();
    assert_eq!(
        fs::read_to_string(&p).unwrap(),
        "threshold,false_alarm,detection\ninf,0,0\n2,0,1\n1,0.5,1\n0,1,1\n"
    );

    let runs0 = vec![vec![Some(10), None], vec![Some(20), Some(30)]];
    let runs1 = vec![vec![Some(1), Some(2)], vec![Some(3), Some(4)]];
    let curve = DelayCurve::aggregate(&[1.0, 2.0], &runs0, &runs1, 100);
    formats::write_delay_curve(&p, &curve).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    assert_eq!(
        text,
        "threshold,false_alarm_period,detection_delay,censored_false_alarms,censored_delays\n1,15,2,0,0\n2,65,3,1,0\n"
    );
    formats::write_trial_log(&p, &[1.0, 2.0], &runs0, &runs1).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    assert!(text.contains("\n0,0,2,\n"));
}

#[test]
fn score_files_accept_a_header_and_reject_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    fs::write(&p, "score\n1.5\n-2\n\n3e-1,ignored\n").unwrap();
    assert_eq!(formats::read_scores(&p).unwrap(), vec![1.5, -2.0, 0.3]);
    fs::write(&p, "1\nx\n").unwrap();
    assert!(matches!(formats::read_scores(&p), Err(Error::Format { .. })));
}
