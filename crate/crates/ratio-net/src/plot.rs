//! gnuplot scripts for the CSV artifacts of a run directory.

use std::fmt::Write;

use crate::config::ExperimentKind;

/// Script plotting every matching CSV under `seed_dirs` (relative paths).
pub fn script(kind: ExperimentKind, seed_dirs: &[(u64, Vec<String>)]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key autotitle columnhead bottom right\nset grid\n");
    s.push_str("set terminal pngcairo size 900,650\n");
    let (prefix, x, y, setup) = match kind {
        ExperimentKind::Hyptest | ExperimentKind::Glrt => {
            ("roc_", 2, 3, "set xlabel 'false alarm probability'\nset ylabel 'detection probability'\n")
        }
        ExperimentKind::Cusum => (
            "delay_",
            2,
            3,
            "set logscale x\nset xlabel 'average false alarm period'\nset ylabel 'average detection delay'\n",
        ),
        ExperimentKind::Classify => ("trace_", 1, 3, "set xlabel 'iteration'\nset ylabel 'test error'\n"),
        ExperimentKind::Kl | ExperimentKind::Mi | ExperimentKind::Local => {
            ("trace_", 1, 2, "set xlabel 'iteration'\nset ylabel 'cost'\n")
        }
    };
    s.push_str(setup);
    for (seed, files) in seed_dirs {
        let mut plots = Vec::new();
        for f in files.iter().filter(|f| {
            let base = f.rsplit('/').next().unwrap_or(f);
            base.starts_with(prefix) && base.ends_with(".csv")
        }) {
            let base = f.rsplit('/').next().unwrap_or(f);
            let title = base.trim_start_matches(prefix).trim_end_matches(".csv");
            plots.push(format!("'{f}' using {x}:{y} with lines title '{title}'"));
        }
        if plots.is_empty() {
            continue;
        }
        let _ = writeln!(s, "set output 'seed-{seed}.png'\nset title 'seed {seed}'");
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    if kind == ExperimentKind::Local {
        for (seed, files) in seed_dirs {
            if let Some(f) = files.iter().find(|f| f.ends_with("local.csv")) {
                let _ = writeln!(
                    s,
                    "set output 'local-seed-{seed}.png'\nset xlabel 'x'\nset ylabel 'statistic'\n\
                     plot for [i=2:*] '{f}' using 1:i with lines"
                );
            }
        }
    }
    s
}
