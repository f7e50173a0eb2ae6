use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ratio-net"));
    c.env_remove("RATIO_NET_THREADS");
    c
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

const SMALL_HYPTEST: &str = r#"
experiment = "hyptest"
seeds = [5, 6]

[network]
hidden = 6

[train]
iterations = 40

[hyptest]
dim = 3
train_size = 30
block_size = 4
trials = 300
"#;

#[test]
fn reruns_are_byte_identical_and_the_manifest_reproduces_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, SMALL_HYPTEST).unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let mut cmd = bin();
        cmd.args(["run", "--config"]).arg(&cfg).arg("--out-dir").arg(out).args(["--threads", threads]);
        assert!(cmd.status().unwrap().success());
    }
    let fa = files(&a);
    assert!(fa.contains_key("manifest.toml"));
    assert!(fa.contains_key("summary.csv"));
    assert!(fa.contains_key("plot.gp"));
    for name in ["roc_optimum.csv", "roc_ms.csv", "roc_exp.csv", "roc_ce.csv", "model_ce.json", "trace_ms.csv"] {
        assert!(fa.contains_key(&format!("seed-5/{name}")), "{name}");
    }
    let strip = |m: BTreeMap<String, Vec<u8>>| {
        m.into_iter().filter(|(k, _)| k != "manifest.toml").collect::<BTreeMap<_, _>>()
    };
    let fb = files(&b);
    assert_eq!(strip(fa.clone()), strip(fb));

    let st = bin().args(["run", "--config"]).arg(a.join("manifest.toml")).arg("--out-dir").arg(&c).status().unwrap();
    assert!(st.success());
    assert_eq!(strip(fa), strip(files(&c)));
}

#[test]
fn seed_override_runs_one_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, SMALL_HYPTEST).unwrap();
    let out = dir.path().join("o");
    let st = bin().args(["run", "--seed-override", "9", "--config"]).arg(&cfg).arg("--out-dir").arg(&out).status();
    assert!(st.unwrap().success());
    let f = files(&out);
    assert!(f.keys().any(|k| k.starts_with("seed-9/")));
    assert!(!f.keys().any(|k| k.starts_with("seed-5/")));
    let manifest = String::from_utf8(f["manifest.toml"].clone()).unwrap();
    assert!(manifest.contains("seeds = [9]"));
}

#[test]
fn malformed_configs_exit_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["experiment = \"hyptest\"\nseeds = [1]\nbogus = true\n", "not toml at all [", ""]
        .iter()
        .enumerate()
    {
        let cfg = dir.path().join(format!("c{i}.toml"));
        fs::write(&cfg, text).unwrap();
        let out = dir.path().join(format!("out{i}"));
        let st = bin().args(["run", "--config"]).arg(&cfg).arg("--out-dir").arg(&out).status().unwrap();
        assert_eq!(st.code(), Some(2), "{text}");
        assert!(!out.exists());
    }
    let st = bin().args(["run", "--config"]).arg(dir.path().join("missing.toml")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let text = format!(
        "experiment = \"classify\"\nseeds = [1]\n[classify]\nmnist_dir = \"{}\"\n",
        dir.path().join("nowhere").display()
    );
    fs::write(&cfg, text).unwrap();
    let st = bin().args(["run", "--config"]).arg(&cfg).arg("--out-dir").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn diagnostics_subcommands() {
    let out = bin().arg("verify-losses").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 failed"));
    assert!(text.contains("A1 alpha=1     convex=false"));
    assert!(text.contains("A1 alpha=-0.5  convex=true"));

    let out = bin().args(["gradcheck", "--configs", "2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 21);

    let st = bin().args(["--threads", "0", "verify-losses"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn roc_and_plot_script_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let (s0, s1, r) = (dir.path().join("s0"), dir.path().join("s1"), dir.path().join("roc.csv"));
    fs::write(&s0, "0\n1\n").unwrap();
    fs::write(&s1, "2\n").unwrap();
    let st = bin().args(["roc", "--scores0"]).arg(&s0).arg("--scores1").arg(&s1).arg("--out").arg(&r).status();
    assert!(st.unwrap().success());
    assert!(fs::read_to_string(&r).unwrap().starts_with("threshold,false_alarm,detection\ninf,0,0\n"));

    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, SMALL_HYPTEST.replace("[5, 6]", "[5]")).unwrap();
    let out = dir.path().join("o");
    assert!(bin().args(["run", "--config"]).arg(&cfg).arg("--out-dir").arg(&out).status().unwrap().success());
    fs::remove_file(out.join("plot.gp")).unwrap();
    assert!(bin().args(["plot-script", "--out-dir"]).arg(&out).status().unwrap().success());
    let script = fs::read_to_string(out.join("plot.gp")).unwrap();
    assert!(script.contains("'seed-5/roc_ce.csv' using 2:3"));
}
