//! Execution of the seven subcommands: build inputs from the validated
//! config, run the experiment, and render both report forms.

use crate::config::{CommandKind, ExperimentConfig};
use crate::report::{kv_block, sig12, table, Envelope};
use crate::suites::run_suite;
use crate::CliError;
use gplab::bilinear::{correlation_t, mobius_balance, mobius_balance_with_psi};
use gplab::main_term::{compare_report, parse_zero_file, predict_main, ZeroDatum};
use gplab::sieve::{build_set, count_strata, count_weighted, SetB, SparseSetSpec, Weight};
use gplab::GaussInt;
use serde_json::json;

pub struct RunOutput {
    pub text: String,
    pub envelope: Envelope,
    pub failed_checks: usize,
}

fn run_err(e: gplab::Error) -> CliError {
    CliError::Run(e.to_string())
}

/// Set construction failures are config problems (bad parameters, unreadable
/// member files), reported as schema errors.
fn build_set_checked(spec: &SparseSetSpec, x: u64) -> Result<SetB, CliError> {
    build_set(spec, x).map_err(|e| CliError::Schema(e.to_string()))
}

fn set_summary(spec: &SparseSetSpec, set: &SetB) -> String {
    format!(
        "{} [{}, {}] ({} members)",
        serde_json::to_value(spec.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_else(|| format!("{:?}", spec.kind)),
        spec.interval[0],
        spec.interval[1],
        set.len()
    )
}

fn weight_name(w: Weight) -> &'static str {
    match w {
        Weight::Unit => "unit",
        Weight::Lambda => "lambda",
    }
}

/// The config as echoed into reports: artifact paths stripped so the same
/// experiment always serializes identically.
fn config_echo(cfg: &ExperimentConfig) -> serde_json::Value {
    let mut copy = cfg.clone();
    copy.output_path = None;
    copy.strata_csv = None;
    serde_json::to_value(&copy).expect("config echo")
}

fn write_strata_csv(
    path: &str,
    set: &SetB,
    x: u64,
    weight: Weight,
) -> Result<(), CliError> {
    let rows = count_strata(set, x, weight, true).map_err(run_err)?;
    let mut text = String::from("b,partial_sum,pairs\n");
    for (b, s, c) in rows {
        text.push_str(&format!("{b},{},{c}\n", sig12(s)));
    }
    std::fs::write(path, text).map_err(|e| CliError::Run(format!("writing {path}: {e}")))
}

pub fn execute(kind: CommandKind, cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate_for(kind)?;
    let run = || execute_inner(kind, cfg);
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| CliError::Run(e.to_string()))?;
        pool.install(run)
    } else {
        run()
    }
}

fn execute_inner(kind: CommandKind, cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let weight = cfg.weight.unwrap_or(Weight::Unit);
    match kind {
        CommandKind::Count => {
            let x = cfg.x.unwrap();
            let spec = cfg.set.as_ref().unwrap();
            let set = build_set_checked(spec, x)?;
            let r = count_weighted(&set, x, weight, true).map_err(run_err)?;
            if let Some(path) = &cfg.strata_csv {
                write_strata_csv(path, &set, x, weight)?;
            }
            let mut rows = vec![
                ("command".into(), "count".to_string()),
                ("set".into(), set_summary(spec, &set)),
                ("x".into(), x.to_string()),
                ("weight".into(), weight_name(weight).into()),
                ("pairs scanned".into(), r.pairs_scanned.to_string()),
            ];
            let result = if weight == Weight::Unit {
                let count = r.s_observed as u64;
                rows.push(("count".into(), count.to_string()));
                json!({
                    "count": count,
                    "pairs_scanned": r.pairs_scanned,
                    "weight": weight_name(weight),
                    "coprime_filter": r.coprime_filter,
                })
            } else {
                rows.push(("weighted sum".into(), sig12(r.s_observed)));
                json!({
                    "weighted_sum": r.s_observed,
                    "pairs_scanned": r.pairs_scanned,
                    "weight": weight_name(weight),
                    "coprime_filter": r.coprime_filter,
                })
            };
            Ok(RunOutput {
                text: kv_block(&rows),
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result,
                },
                failed_checks: 0,
            })
        }
        CommandKind::Predict => {
            let x = cfg.x.unwrap();
            let spec = cfg.set.as_ref().unwrap();
            let set = build_set_checked(spec, x)?;
            let m = predict_main(&set, x, weight).map_err(run_err)?;
            let rows = vec![
                ("command".into(), "predict".to_string()),
                ("set".into(), set_summary(spec, &set)),
                ("x".into(), x.to_string()),
                ("weight".into(), weight_name(weight).into()),
                ("predicted".into(), sig12(m)),
            ];
            Ok(RunOutput {
                text: kv_block(&rows),
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result: json!({ "m_predicted": m, "weight": weight_name(weight) }),
                },
                failed_checks: 0,
            })
        }
        CommandKind::Compare | CommandKind::Bias => {
            let x = cfg.x.unwrap();
            let spec = cfg.set.as_ref().unwrap();
            let set = build_set_checked(spec, x)?;
            let (weight, zeros) = if kind == CommandKind::Bias {
                let path = cfg.zeros_path.as_ref().unwrap();
                let zeros: Vec<ZeroDatum> =
                    parse_zero_file(path, cfg.t_max).map_err(|e| CliError::Schema(e.to_string()))?;
                (Weight::Lambda, zeros)
            } else {
                (weight, Vec::new())
            };
            let r = compare_report(&set, x, weight, &zeros).map_err(run_err)?;
            if let Some(path) = &cfg.strata_csv {
                write_strata_csv(path, &set, x, weight)?;
            }
            let mut rows = vec![
                ("command".into(), kind.name().to_string()),
                ("set".into(), set_summary(spec, &set)),
                ("x".into(), x.to_string()),
                ("weight".into(), weight_name(weight).into()),
                ("predicted".into(), sig12(r.m_predicted)),
                ("observed".into(), sig12(r.s_observed)),
                (
                    "relative error".into(),
                    r.relative_error.map_or("n/a".into(), sig12),
                ),
                ("terms".into(), r.terms.to_string()),
            ];
            if kind == CommandKind::Bias {
                rows.push(("zeros applied".into(), zeros.len().to_string()));
            }
            let mut result = serde_json::to_value(&r).expect("report");
            if kind == CommandKind::Bias {
                result["zero_count"] = json!(zeros.len());
            }
            Ok(RunOutput {
                text: kv_block(&rows),
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result,
                },
                failed_checks: 0,
            })
        }
        CommandKind::VerifyLemma => {
            let suite = cfg.suite.as_ref().unwrap();
            let rows = run_suite(suite, cfg.seed)
                .map_err(run_err)?
                .ok_or_else(|| {
                    CliError::Schema(format!(
                        "unknown suite `{suite}` (characters, analysis, density, bilinear)"
                    ))
                })?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            let table_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.label.to_string(),
                        sig12(r.observed),
                        sig12(r.bound),
                        format!("{:.4}", r.ratio),
                        if r.pass { "pass".into() } else { "FAIL".into() },
                    ]
                })
                .collect();
            let mut text = format!("suite {suite}\n");
            text.push_str(&table(
                &["check", "observed", "bound", "ratio", "status"],
                &table_rows,
            ));
            text.push_str(&format!(
                "summary {}/{} pass\n",
                rows.len() - failed,
                rows.len()
            ));
            Ok(RunOutput {
                text,
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result: json!({
                        "suite": suite,
                        "checks": rows,
                        "all_pass": failed == 0,
                    }),
                },
                failed_checks: failed,
            })
        }
        CommandKind::Correlation => {
            let spec = cfg.set.as_ref().unwrap();
            let p = cfg.correlation.as_ref().unwrap();
            let x = cfg.x.unwrap_or(u64::MAX);
            let set = build_set_checked(spec, x)?;
            let z1 = GaussInt::new(p.z1[0], p.z1[1]);
            let z2 = GaussInt::new(p.z2[0], p.z2[1]);
            let r = correlation_t(&set, z1, z2, p.threshold).map_err(run_err)?;
            let failed = usize::from(!r.exact_match);
            let rows = vec![
                ("command".into(), "correlation".to_string()),
                ("set".into(), set_summary(spec, &set)),
                ("z1".into(), format!("{z1}")),
                ("z2".into(), format!("{z2}")),
                ("delta".into(), r.delta.to_string()),
                ("ratio class".into(), r.a_ratio.to_string()),
                ("T brute".into(), r.t_brute.to_string()),
                ("T reconstructed".into(), r.t_reconstructed.to_string()),
                ("residual".into(), sig12(r.residual)),
                (
                    "main fraction".into(),
                    r.main_fraction.map_or("n/a".into(), sig12),
                ),
                (
                    "match".into(),
                    if r.exact_match { "exact" } else { "MISMATCH" }.into(),
                ),
            ];
            Ok(RunOutput {
                text: kv_block(&rows),
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result: serde_json::to_value(&r).expect("report"),
                },
                failed_checks: failed,
            })
        }
        CommandKind::Balance => {
            let p = cfg.balance.as_ref().unwrap();
            let u = GaussInt::new(p.u[0], p.u[1]);
            let mut rows = vec![
                ("command".into(), "balance".to_string()),
                ("u".into(), format!("{u}")),
                ("n".into(), p.n.to_string()),
                ("w".into(), p.w.to_string()),
            ];
            let result = if let Some(idx) = p.psi_index {
                let r = mobius_balance_with_psi(u, p.n, p.w, idx).map_err(run_err)?;
                rows.push(("statistic".into(), sig12(r.stat)));
                rows.push(("after projection".into(), sig12(r.stat_subtracted)));
                rows.push((
                    "projection residual".into(),
                    sig12(r.residual_correlation),
                ));
                serde_json::to_value(&r).expect("report")
            } else {
                let stat = mobius_balance(u, p.n, p.w).map_err(run_err)?;
                rows.push(("statistic".into(), sig12(stat)));
                json!({ "stat": stat })
            };
            Ok(RunOutput {
                text: kv_block(&rows),
                envelope: Envelope {
                    schema_version: crate::config::SCHEMA_VERSION,
                    command: kind.name(),
                    config: config_echo(cfg),
                    result,
                },
                failed_checks: 0,
            })
        }
    }
}
