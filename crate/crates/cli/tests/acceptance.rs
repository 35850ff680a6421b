//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero
//! exit if any criterion fails.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, ExitCode};

use rbcsp::analysis::{
    distance_profile, first_moment_log, flawed_prob_rb, flawed_prob_rd, forced_expected_count_log,
    log_sum_exp, maximize_exponent, p_threshold, r_threshold, threesat_profile_exponent,
};
use rbcsp::harness::{
    cost_peak, forced_vs_random, linspace, log_cost_slope, scaling_study, sweep,
    threshold_crossing, Axis, ComparisonSpec, ScalingSpec, SweepSpec,
};
use rbcsp::rng::InstanceRng;
use rbcsp::validate::{moment_check, moment_params, oracle_equivalence};
use rbcsp::{derive_stream, CspParams, Exec, Heuristic, ModelKind};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn rbcsp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rbcsp"))
        .args(args)
        .output()
        .expect("run rbcsp")
}

fn key_values(stdout: &[u8]) -> HashMap<String, String> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn benchmark_r() -> f64 {
    0.8 / (4.0f64 / 3.0).ln()
}

fn threshold_formulas() -> Outcome {
    let r = format!("{:?}", benchmark_r());
    let out = rbcsp(&[
        "thresholds",
        "--k",
        "2",
        "--alpha",
        "0.8",
        "--r",
        &r,
        "--n",
        "59",
    ]);
    let kv = key_values(&out.stdout);
    let p_cr: f64 = kv["p_cr"].parse().unwrap();
    let sizes_ok = kv["d"] == "26" && kv["m"] == "669" && kv["q"] == "169";

    let out = rbcsp(&["thresholds", "--k", "2", "--alpha", "0.8", "--p", "0.25"]);
    let kv2 = key_values(&out.stdout);
    let r_cr: f64 = kv2["r_cr"].parse().unwrap();
    let conditions_ok = kv2
        .iter()
        .filter(|(k, _)| k.starts_with("condition.") && !k.ends_with(".margin"))
        .all(|(_, v)| v == "true");

    // 59 domain clauses, 59 C(26,2) at-most-one clauses, 669 * 169 conflicts
    let out = rbcsp(&[
        "gen", "--model", "rb", "--k", "2", "--n", "59", "--alpha", "0.8", "--r", &r, "--p",
        "0.25", "--seed", "1", "--forced", "--format", "dimacs",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    let header = text
        .lines()
        .find(|l| l.starts_with("p cnf"))
        .unwrap_or("")
        .to_string();
    let header_ok = header == format!("p cnf {} {}", 59 * 26, 59 + 59 * 325 + 669 * 169);

    (
        (p_cr - 0.25).abs() <= 1e-12
            && sizes_ok
            && conditions_ok
            && header_ok
            && (r_cr - benchmark_r()).abs() < 1e-12,
        format!(
            "p_cr={p_cr} d={} m={} q={} r_cr={r_cr} conditions_ok={conditions_ok} [{header}]",
            kv["d"], kv["m"], kv["q"]
        ),
    )
}

fn round_trip_grid() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in linspace(0.1, 2.0, 20) {
        for p in linspace(0.02, 0.98, 20) {
            let back = p_threshold(alpha, r_threshold(alpha, p).unwrap()).unwrap();
            worst = worst.max((back - p).abs());
        }
    }
    (
        worst <= 1e-12,
        format!("max |error| = {worst:e} over 400 points"),
    )
}

fn oracle() -> Outcome {
    let report = oracle_equivalence(600, 2026, Exec::default()).unwrap();
    (
        report.passed(),
        format!(
            "{} instances ({} SAT): status discrepancies {}, count discrepancies {}, forced not SAT {}",
            report.instances, report.sat, report.status_discrepancies, report.count_discrepancies, report.forced_not_sat
        ),
    )
}

fn moments() -> Outcome {
    let params = moment_params();
    let random = moment_check(&params, false, 2000, 41, Exec::default()).unwrap();
    let forced = moment_check(&params, true, 2000, 42, Exec::default()).unwrap();
    let mut grid_points = 0;
    let mut grid_ok = true;
    for model in [ModelKind::Rb, ModelKind::Rd] {
        for n in [10, 20, 40, 59] {
            for alpha in [0.6, 0.8, 1.0] {
                for r in [0.5, 1.5, 3.0] {
                    for p in [0.1, 0.25, 0.5, 0.7] {
                        let params = CspParams::new(model, 2, n, alpha, r, p).unwrap();
                        let e = first_moment_log(&params).unwrap();
                        let ef = forced_expected_count_log(&params).unwrap();
                        grid_ok &= ef >= e;
                        grid_points += 1;
                    }
                }
            }
        }
    }
    (
        random.within(3.0) && forced.within(3.0) && grid_ok,
        format!(
            "random z={:.2} (mean {:.4}, E[N] {:.4}); forced z={:.2} (mean {:.4}, E_f[N] {:.4}); E_f>=E on {grid_points} points: {grid_ok}",
            random.z_score(),
            random.empirical_mean,
            random.closed_form,
            forced.z_score(),
            forced.empirical_mean,
            forced.closed_form
        ),
    )
}

fn profiles() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = vec![CspParams::new(ModelKind::Rb, 2, 59, 0.8, benchmark_r(), 0.25).unwrap()];
    for model in [ModelKind::Rb, ModelKind::Rd] {
        for (k, n, alpha, r, p) in [
            (2, 20, 0.8, 1.5, 0.41),
            (2, 30, 1.0, 1.0, 0.2),
            (3, 15, 0.7, 0.8, 0.5),
            (2, 100, 0.5, 2.0, 0.3),
        ] {
            points.push(CspParams::new(model, k, n, alpha, r, p).unwrap());
        }
    }
    for params in &points {
        for forced in [false, true] {
            let xs: Vec<f64> = distance_profile(params, forced)
                .unwrap()
                .iter()
                .map(|x| x.log_expected)
                .collect();
            let target = if forced {
                forced_expected_count_log(params).unwrap()
            } else {
                first_moment_log(params).unwrap()
            };
            worst =
                worst.max((log_sum_exp(&xs) - target).abs() / target.abs().max(f64::MIN_POSITIVE));
        }
    }
    (
        worst <= 1e-9,
        format!(
            "max relative error {worst:e} over {} parameter points",
            points.len()
        ),
    )
}

fn threesat() -> Outcome {
    let (random, _) = maximize_exponent(|x| threesat_profile_exponent(x, 4.25, false).unwrap());
    let (forced, _) = maximize_exponent(|x| threesat_profile_exponent(x, 4.25, true).unwrap());
    (
        (random - 0.5).abs() <= 1e-4 && (0.23..=0.25).contains(&forced),
        format!("random argmax {random:.6}, forced argmax {forced:.6}"),
    )
}

fn simulate_flawed(
    d: usize,
    k: usize,
    i: usize,
    trials: u64,
    seed: u64,
    mut forbid: impl FnMut(&mut InstanceRng) -> Vec<bool>,
) -> f64 {
    let stride = d.pow(k as u32 - 1);
    let mut rng = InstanceRng::new(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut flawed = vec![false; d];
        for _ in 0..i {
            let forbidden = forbid(&mut rng);
            for (v, f) in flawed.iter_mut().enumerate() {
                *f |= forbidden[v * stride];
            }
        }
        hits += flawed.iter().all(|&f| f) as u64;
    }
    hits as f64 / trials as f64
}

fn flawed() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    let z = |emp: f64, exact: f64| (emp - exact) / (exact * (1.0 - exact) / TRIALS as f64).sqrt();
    let mut worst = 0.0f64;
    let mut points = 0;
    for (j, &(d, p, i)) in [
        (2usize, 0.5, 2usize),
        (3, 0.3, 3),
        (4, 0.5, 3),
        (2, 0.2, 5),
        (5, 0.6, 4),
    ]
    .iter()
    .enumerate()
    {
        let emp = simulate_flawed(d, 2, i, TRIALS, derive_stream(70, j as u64), |rng| {
            (0..d * d).map(|_| rng.coin(p)).collect()
        });
        worst = worst.max(z(emp, flawed_prob_rd(d, p, i)).abs());
        points += 1;
    }
    for (j, &(d, k, q, i)) in [
        (2usize, 2usize, 2u64, 1usize),
        (3, 2, 4, 2),
        (3, 2, 5, 3),
        (4, 2, 8, 3),
        (2, 3, 4, 2),
        (3, 3, 12, 4),
    ]
    .iter()
    .enumerate()
    {
        let space = d.pow(k as u32);
        let emp = simulate_flawed(d, k, i, TRIALS, derive_stream(71, j as u64), |rng| {
            let mut forbidden = vec![false; space];
            for r in rng.floyd_subset(space as u64, q) {
                forbidden[r as usize] = true;
            }
            forbidden
        });
        worst = worst.max(z(emp, flawed_prob_rb(d, k, q, i).unwrap()).abs());
        points += 1;
    }
    // the 6 two-element subsets of the 4 tuples; the variable is flawed
    // iff both tuples with the neighbour at 0 (ranks 0 and 2) are forbidden
    let subsets: Vec<(u32, u32)> = (0..4u32)
        .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
        .collect();
    let flawed_subsets = subsets.iter().filter(|&&(a, b)| a == 0 && b == 2).count();
    let exact = flawed_prob_rb(2, 2, 2, 1).unwrap();
    let exact_ok = subsets.len() == 6 && flawed_subsets == 1 && exact == 1.0 / 6.0;
    (
        worst <= 3.0 && exact_ok,
        format!(
            "max |z| = {worst:.2} over {points} points at 1e6 trials; exhaustive 1/6: {exact_ok}"
        ),
    )
}

fn crossing() -> Outcome {
    let p_cr = p_threshold(0.8, 1.5).unwrap();
    let spec = SweepSpec {
        base: CspParams::new(ModelKind::Rb, 2, 20, 0.8, 1.5, p_cr).unwrap(),
        axis: Axis::P,
        values: linspace(0.5 * p_cr, 1.5 * p_cr, 11),
        samples_per_point: 200,
        base_seed: 8,
        node_limit: rbcsp::harness::DEFAULT_NODE_LIMIT,
        forced: false,
        heuristic: Heuristic::Mrv,
    };
    let records = sweep(&spec, Exec::default()).unwrap();
    let inversions = records
        .windows(2)
        .filter(|w| w[1].sat_fraction > w[0].sat_fraction)
        .count();
    let cross = threshold_crossing(&records);
    let peak = cost_peak(&records);
    let ok = inversions <= 1
        && cross.is_some_and(|c| (c - p_cr).abs() <= 0.08)
        && peak.is_some_and(|x| (x - p_cr).abs() <= 0.1 * p_cr + 1e-12);
    let fractions: Vec<String> = records
        .iter()
        .map(|r| format!("{:.3}", r.sat_fraction))
        .collect();
    (
        ok,
        format!(
            "p_cr={p_cr:.5} crossing={cross:?} cost peak={peak:?} inversions={inversions} sat=[{}]",
            fractions.join(" ")
        ),
    )
}

fn scaling() -> Outcome {
    let p_cr = p_threshold(0.8, 1.5).unwrap();
    let spec = ScalingSpec {
        base: CspParams::new(ModelKind::Rb, 2, 12, 0.8, 1.5, p_cr).unwrap(),
        n_values: vec![12, 16, 20, 24],
        samples: 100,
        base_seed: 9,
        node_limit: rbcsp::harness::DEFAULT_NODE_LIMIT,
        heuristic: Heuristic::Mrv,
    };
    let records = scaling_study(&spec, Exec::default()).unwrap();
    let medians: Vec<f64> = records.iter().map(|r| r.median_nodes).collect();
    let nondecreasing = medians.windows(2).all(|w| w[1] >= w[0]);
    let ratio = medians[3] / medians[0];
    let slope = log_cost_slope(&records);
    (
        nondecreasing && ratio >= 4.0 && slope.is_some_and(|s| s > 0.0),
        format!("medians {medians:?} ratio {ratio:.2} ln-slope {slope:?}"),
    )
}

fn parity() -> Outcome {
    let p_cr = p_threshold(0.8, 1.5).unwrap();
    let spec = ComparisonSpec {
        params: CspParams::new(ModelKind::Rb, 2, 20, 0.8, 1.5, p_cr).unwrap(),
        samples: 100,
        base_seed: 10,
        node_limit: rbcsp::harness::DEFAULT_NODE_LIMIT,
        heuristic: Heuristic::Mrv,
        max_random_draws: 20_000,
    };
    let s = forced_vs_random(&spec, Exec::default()).unwrap();
    (
        (0.3..=3.0).contains(&s.ratio) && s.forced_samples >= 100 && s.random_sat_samples >= 100,
        format!(
            "median forced {} / random-SAT {} = {:.3} ({} forced, {} random SAT of {} drawn)",
            s.median_forced,
            s.median_random_sat,
            s.ratio,
            s.forced_samples,
            s.random_sat_samples,
            s.random_generated
        ),
    )
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let gen = |dir: &Path| {
        rbcsp(&[
            "gen",
            "--n",
            "20",
            "--alpha",
            "0.8",
            "--r",
            "1.5",
            "--p",
            "0.4",
            "--seed",
            "77",
            "--forced",
            "--count",
            "4",
            "--format",
            "both",
            "--emit-solution",
            "--split-width",
            "4",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let gen_ok = gen(&a).status.success()
        && gen(&b).status.success()
        && read_dir_bytes(&a) == read_dir_bytes(&b);
    let files = read_dir_bytes(&a).len();

    let sweep_args = [
        "sweep",
        "--n",
        "14",
        "--alpha",
        "0.8",
        "--r",
        "1.5",
        "--points",
        "5",
        "--samples",
        "30",
        "--seed",
        "5",
    ];
    let s1 = rbcsp(&sweep_args);
    let s2 = rbcsp(&sweep_args);
    let mut seq_args = sweep_args.to_vec();
    seq_args.push("--sequential");
    let s3 = rbcsp(&seq_args);
    let sweep_ok = s1.status.success() && s1.stdout == s2.stdout && s1.stdout == s3.stdout;

    let scale_args = [
        "scale",
        "--n-values",
        "10,12,14",
        "--alpha",
        "0.8",
        "--r",
        "1.5",
        "--samples",
        "20",
        "--seed",
        "6",
    ];
    let c1 = rbcsp(&scale_args);
    let c2 = rbcsp(&scale_args);
    let scale_ok = c1.status.success() && c1.stdout == c2.stdout;
    (
        gen_ok && files == 12 && sweep_ok && scale_ok,
        format!("gen ({files} files): {gen_ok}; sweep (incl. sequential): {sweep_ok}; scale: {scale_ok}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("threshold formulas", threshold_formulas),
        ("threshold round trip", round_trip_grid),
        ("oracle equivalence", oracle),
        ("moment validation", moments),
        ("profile identities", profiles),
        ("3-SAT profile maxima", threesat),
        ("flawed-tuple probabilities", flawed),
        ("phase-transition crossing", crossing),
        ("hardness growth", scaling),
        ("forced/random parity", parity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += !ok as usize;
        println!(
            "criterion {:>2} {} {name}: {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
