use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use rbcsp::analysis::{
    check_conditions, distance_profile, first_moment_log, forced_expected_count_log, p_threshold,
    r_threshold, second_moment_log,
};
use rbcsp::encoder::{
    encode_cnf, read_csp_native, read_dimacs, write_csp_native, write_dimacs, write_solution,
};
use rbcsp::harness::{
    cost_peak, forced_vs_random, linspace, scaling_csv, scaling_study, sweep, sweep_csv,
    threshold_crossing, Axis, ComparisonSpec, ScalingSpec, SweepSpec,
};
use rbcsp::model::derive_sizes;
use rbcsp::solver::{dpll, solve_csp};
use rbcsp::validate::{moment_check, moment_params, oracle_equivalence};
use rbcsp::{derive_stream, generate, CspParams, Exec, GenRequest, SolveConfig};

use crate::{AxisArg, Command, FormatArg, ParamArgs, SearchArgs};

pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(err: E) -> Self {
        CliError::Runtime(err.into())
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exec_mode(search: &SearchArgs) -> Exec {
    if search.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn build_params(a: &ParamArgs) -> Result<CspParams, CliError> {
    CspParams::new(a.model.into(), a.k, a.n, a.alpha, a.r, a.p).map_err(|e| usage(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Gen {
            params,
            seed,
            forced,
            count,
            format,
            out_dir,
            emit_solution,
            split_width,
        } => {
            let params = build_params(&params)?;
            if split_width.is_some_and(|w| w < 3) {
                return Err(usage("--split-width must be at least 3"));
            }
            if emit_solution && !forced {
                return Err(usage("--emit-solution requires --forced"));
            }
            let Some(dir) = out_dir else {
                if count != 1 || format == FormatArg::Both || emit_solution {
                    return Err(usage(
                        "--out-dir is required for --count > 1, --format both or --emit-solution",
                    ));
                }
                let inst = generate(&GenRequest::in_batch(params, seed, 0, forced))?;
                let text = match format {
                    FormatArg::Dimacs => write_dimacs(&encode_cnf(&inst, split_width)?),
                    _ => write_csp_native(&inst),
                };
                return emit(None, &text);
            };
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for i in 0..count {
                let inst = generate(&GenRequest::in_batch(params, seed, i as u64, forced))?;
                let stem = format!("{}-n{}-{:016x}-{i:04}", params.model, params.n, seed);
                if matches!(format, FormatArg::Rbcsp | FormatArg::Both) {
                    emit(
                        Some(&dir.join(format!("{stem}.rbcsp"))),
                        &write_csp_native(&inst),
                    )?;
                }
                if matches!(format, FormatArg::Dimacs | FormatArg::Both) {
                    let cnf = encode_cnf(&inst, split_width)?;
                    emit(Some(&dir.join(format!("{stem}.cnf"))), &write_dimacs(&cnf))?;
                }
                if let (true, Some(hidden)) = (emit_solution, inst.hidden()) {
                    emit(
                        Some(&dir.join(format!("{stem}.solution"))),
                        &write_solution(hidden),
                    )?;
                }
            }
            Ok(())
        }

        Command::Thresholds {
            model,
            k,
            alpha,
            p,
            r,
            n,
        } => {
            let (p, r, r_cr, p_cr) = match (p, r) {
                (None, None) => return Err(usage("give --p, --r or both")),
                (Some(p), None) => {
                    let r_cr = r_threshold(alpha, p)?;
                    (p, r_cr, Some(r_cr), p_threshold(alpha, r_cr)?)
                }
                (None, Some(r)) => {
                    let p_cr = p_threshold(alpha, r)?;
                    (p_cr, r, r_threshold(alpha, p_cr).ok(), p_cr)
                }
                (Some(p), Some(r)) => (p, r, r_threshold(alpha, p).ok(), p_threshold(alpha, r)?),
            };
            let params = CspParams::new(model.into(), k, n.unwrap_or(k), alpha, r, p)
                .map_err(|e| usage(e.to_string()))?;
            let mut out = String::new();
            let _ = writeln!(
                out,
                "model={}\nk={k}\nalpha={alpha}\np={p}\nr={r}",
                params.model
            );
            match r_cr {
                Some(v) => {
                    let _ = writeln!(out, "r_cr={v}");
                }
                None => out.push_str("r_cr=none\n"),
            }
            let _ = writeln!(out, "p_cr={p_cr}");
            for c in check_conditions(&params) {
                let _ = writeln!(out, "condition.{}={}", c.name, c.satisfied);
                let _ = writeln!(out, "condition.{}.margin={}", c.name, c.margin);
            }
            if let Some(n) = n {
                let s = derive_sizes(&params)?;
                let _ = writeln!(
                    out,
                    "n={n}\nd={}\nm={}\nq={}\ntuple_space={}",
                    s.d, s.m, s.q, s.tuple_space
                );
                let _ = writeln!(out, "ln_expected_solutions={}", first_moment_log(&params)?);
                match second_moment_log(&params) {
                    Ok(v) => {
                        let _ = writeln!(out, "ln_second_moment={v}");
                        let _ = writeln!(
                            out,
                            "ln_expected_solutions_forced={}",
                            forced_expected_count_log(&params)?
                        );
                    }
                    Err(_) => {
                        out.push_str("ln_second_moment=none\nln_expected_solutions_forced=none\n")
                    }
                }
            }
            emit(None, &out)
        }

        Command::Profile { params, out } => {
            let params = build_params(&params)?;
            let random = distance_profile(&params, false)?;
            let forced = distance_profile(&params, true)?;
            let mut text = String::from("S,d_t,log_expected_random,log_expected_forced\n");
            for (a, b) in random.iter().zip(&forced) {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    a.s, a.d_t, a.log_expected, b.log_expected
                );
            }
            emit(out.as_deref(), &text)
        }

        Command::Encode {
            input,
            split_width,
            out,
        } => {
            if split_width.is_some_and(|w| w < 3) {
                return Err(usage("--split-width must be at least 3"));
            }
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let inst =
                read_csp_native(&text).with_context(|| format!("parsing {}", input.display()))?;
            emit(
                out.as_deref(),
                &write_dimacs(&encode_cnf(&inst, split_width)?),
            )
        }

        Command::Solve {
            input,
            heuristic,
            node_limit,
            count_all,
            no_witness,
        } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let cfg = SolveConfig {
                node_limit,
                heuristic: heuristic.into(),
                count_all,
            };
            let is_native = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .is_some_and(|l| l.starts_with("RBCSP"));
            let (res, witness) = if is_native {
                let inst = read_csp_native(&text)
                    .with_context(|| format!("parsing {}", input.display()))?;
                let res = solve_csp(&inst, &cfg);
                let w = res.witness.as_ref().map(|w| {
                    w.values()
                        .iter()
                        .map(|v| (v + 1).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                });
                (res, w)
            } else {
                let cnf =
                    read_dimacs(&text).with_context(|| format!("parsing {}", input.display()))?;
                let res = dpll(&cnf, &cfg);
                let w = res.witness.as_ref().map(|w| {
                    w.values()
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| {
                            let lit = i as i64 + 1;
                            if b == 1 { lit } else { -lit }.to_string()
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                });
                (res, w)
            };
            let mut out = format!(
                "status={}\nnodes={}\nbacktracks={}\n",
                res.status, res.nodes, res.backtracks
            );
            if let Some(s) = res.solutions {
                let _ = writeln!(out, "solutions={s}");
            }
            if let (false, Some(w)) = (no_witness, witness) {
                let _ = writeln!(out, "witness={w}");
            }
            emit(None, &out)
        }

        Command::Sweep {
            model,
            k,
            n,
            alpha,
            r,
            p,
            axis,
            values,
            from,
            to,
            points,
            samples,
            seed,
            forced,
            search,
            out,
        } => {
            let values = if !values.is_empty() {
                values
            } else {
                let centre = match axis {
                    AxisArg::P => {
                        p_threshold(alpha, r.ok_or_else(|| usage("--axis p needs --r"))?)?
                    }
                    AxisArg::R => {
                        r_threshold(alpha, p.ok_or_else(|| usage("--axis r needs --p"))?)?
                    }
                };
                linspace(
                    from.unwrap_or(0.5 * centre),
                    to.unwrap_or(1.5 * centre),
                    points,
                )
            };
            let (axis, p, r) = match axis {
                AxisArg::P => (
                    Axis::P,
                    values[0],
                    r.ok_or_else(|| usage("--axis p needs --r"))?,
                ),
                AxisArg::R => (
                    Axis::R,
                    p.ok_or_else(|| usage("--axis r needs --p"))?,
                    values[0],
                ),
            };
            let base = CspParams::new(model.into(), k, n, alpha, r, p)
                .map_err(|e| usage(e.to_string()))?;
            let spec = SweepSpec {
                base,
                axis,
                values,
                samples_per_point: samples,
                base_seed: seed,
                node_limit: search.node_limit,
                forced,
                heuristic: search.heuristic.into(),
            };
            let records = sweep(&spec, exec_mode(&search))?;
            emit(out.as_deref(), &sweep_csv(&records))?;
            let fmt = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
            eprintln!("crossing={}", fmt(threshold_crossing(&records)));
            eprintln!("cost_peak={}", fmt(cost_peak(&records)));
            Ok(())
        }

        Command::Scale {
            model,
            k,
            n_values,
            alpha,
            r,
            p,
            samples,
            seed,
            search,
            out,
        } => {
            let p = match p {
                Some(p) => p,
                None => p_threshold(alpha, r)?,
            };
            let first = n_values[0];
            let base = CspParams::new(model.into(), k, first, alpha, r, p)
                .map_err(|e| usage(e.to_string()))?;
            let spec = ScalingSpec {
                base,
                n_values,
                samples,
                base_seed: seed,
                node_limit: search.node_limit,
                heuristic: search.heuristic.into(),
            };
            let records = scaling_study(&spec, exec_mode(&search))?;
            emit(out.as_deref(), &scaling_csv(&records))
        }

        Command::CompareForced {
            params,
            samples,
            seed,
            max_draws,
            search,
        } => {
            let params = build_params(&params)?;
            let spec = ComparisonSpec {
                params,
                samples,
                base_seed: seed,
                node_limit: search.node_limit,
                heuristic: search.heuristic.into(),
                max_random_draws: max_draws.unwrap_or(samples.saturating_mul(50)),
            };
            let s = forced_vs_random(&spec, exec_mode(&search))?;
            let out = format!(
                "median_forced={}\nmedian_random_sat={}\nratio={}\nmean_forced={}\nmean_random_sat={}\n\
                 forced_samples={}\nforced_censored={}\nrandom_sat_samples={}\nrandom_generated={}\n\
                 random_discarded_unsat={}\nrandom_censored={}\n",
                s.median_forced,
                s.median_random_sat,
                s.ratio,
                s.mean_forced,
                s.mean_random_sat,
                s.forced_samples,
                s.forced_censored,
                s.random_sat_samples,
                s.random_generated,
                s.random_discarded_unsat,
                s.random_censored
            );
            emit(None, &out)
        }

        Command::Validate {
            instances,
            samples,
            seed,
        } => {
            let exec = Exec::default();
            let report = oracle_equivalence(instances, seed, exec)?;
            let mut ok = report.passed();
            println!(
                "oracle {}: instances={} sat={} status_discrepancies={} count_discrepancies={} forced_not_sat={}",
                if report.passed() { "PASS" } else { "FAIL" },
                report.instances,
                report.sat,
                report.status_discrepancies,
                report.count_discrepancies,
                report.forced_not_sat
            );
            let params = moment_params();
            for forced in [false, true] {
                let check = moment_check(
                    &params,
                    forced,
                    samples,
                    derive_stream(seed, forced as u64),
                    exec,
                )?;
                ok &= check.within(3.0);
                println!(
                    "moment_{} {}: mean={} se={} closed_form={} z={:.3}",
                    if forced { "forced" } else { "random" },
                    if check.within(3.0) { "PASS" } else { "FAIL" },
                    check.empirical_mean,
                    check.standard_error,
                    check.closed_form,
                    check.z_score()
                );
            }
            if ok {
                Ok(())
            } else {
                Err(CliError::Runtime(anyhow::anyhow!("validation failed")))
            }
        }
    }
}
