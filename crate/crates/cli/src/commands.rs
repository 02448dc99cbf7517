use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use qcap_core::codes::catalog_entries;
use qcap_core::exponent::{exponent, exponent_grid_oracle};
use qcap_core::qoracle::coherent_info_direct;
use qcap_core::simconcat::{fidelity_bound_exact, simulate, OuterMode, SimConfig};
use qcap_core::spectra::{bound_sweep, coherent_bound, linear_grid, probability_array};
use qcap_core::{BoundReport, Field, LogBase, PauliChannel, StabilizerCode};
use serde::Serialize;
use serde_json::json;

use crate::args::{BoundArgs, ChannelArgs, Command, ExponentArgs, FboundArgs, LogBaseArg, SimulateArgs, SweepArgs};
use crate::input::{load_channel, load_code, parse_code_text};
use crate::manifest::RunManifest;
use crate::CliError;

pub const SWEEP_SCHEMA: &str = "qcap/sweep/1";
pub const SWEEP_COLUMNS: [&str; 5] = ["p", "c_n", "per_symbol", "H_syndrome", "H_cond"];
const ORACLE_GRID_POINTS: u128 = 1 << 26;

pub fn dispatch(cmd: Command, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Bound(a) => bound(&a, argv, out),
        Command::Sweep(a) => sweep(&a, argv, out),
        Command::Exponent(a) => exponent_cmd(&a, argv, out),
        Command::Simulate(a) => simulate_cmd(&a, argv, out),
        Command::Fbound(a) => fbound(&a, argv, out),
        Command::OracleCheck(a) => oracle_check(&a, argv, out),
        Command::Catalog => {
            for (name, what) in catalog_entries() {
                writeln!(out, "{name:<12} {what}")?;
            }
            Ok(())
        }
    }
}

fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => Ok(out.write_all(bytes)?),
    }
}

fn emit_json<R: Serialize>(
    schema: &str,
    mut manifest: RunManifest,
    started: Instant,
    result: &R,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    let doc = json!({ "schema": schema, "manifest": manifest, "result": result });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    emit(&bytes, path, out)
}

fn code_and_channel(code: &str, ch: &ChannelArgs) -> Result<(StabilizerCode, PauliChannel), CliError> {
    let code = load_code(code, ch.d)?;
    let channel = load_channel(ch, code.field())?;
    Ok((code, channel))
}

fn base_name(b: LogBaseArg) -> &'static str {
    match b {
        LogBaseArg::D => "d",
        LogBaseArg::Two => "2",
        LogBaseArg::E => "e",
    }
}

#[derive(Serialize)]
struct BoundOut {
    d: u8,
    n: usize,
    k: usize,
    base: &'static str,
    c_n: f64,
    per_symbol: f64,
    #[serde(rename = "H_syndrome")]
    h_syndrome: f64,
    #[serde(rename = "H_cond")]
    h_cond: f64,
}

fn bound_out(r: &BoundReport, field: Field, base: LogBaseArg) -> BoundOut {
    BoundOut {
        d: field.order(),
        n: r.n,
        k: r.k,
        base: base_name(base),
        c_n: r.c_n,
        per_symbol: r.per_symbol,
        h_syndrome: r.h_syndrome,
        h_cond: r.h_cond,
    }
}

fn bound(a: &BoundArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = RunManifest::new("bound", argv, a, vec![]);
    let (code, ch) = code_and_channel(&a.code, &a.channel)?;
    let r = coherent_bound(&code, &ch, a.log_base.into())?;
    emit_json(
        "qcap/bound/1",
        manifest,
        started,
        &bound_out(&r, code.field(), a.log_base),
        a.out.out.as_deref(),
        out,
    )
}

fn sweep(a: &SweepArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("sweep", argv, a, vec![]);
    if a.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&a.p_min) || !(0.0..=1.0).contains(&a.p_max) || a.p_min > a.p_max {
        return Err(CliError::Usage("need 0 <= --p-min <= --p-max <= 1".into()));
    }
    let code = load_code(&a.code, a.d)?;
    let field = code.field();
    let grid = linear_grid(a.p_min, a.p_max, a.steps);
    let base: LogBase = a.log_base.into();
    let rows = bound_sweep(&code, |p| PauliChannel::depolarizing(field, p), &grid, base)?;
    manifest.wall_time_s = started.elapsed().as_secs_f64();

    let mut buf = Vec::new();
    writeln!(buf, "# schema: {SWEEP_SCHEMA} base={}", base_name(a.log_base))?;
    writeln!(buf, "# manifest: {}", serde_json::to_string(&manifest)?)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(SWEEP_COLUMNS)?;
        for (p, r) in grid.iter().zip(&rows) {
            w.write_record([p, &r.c_n, &r.per_symbol, &r.h_syndrome, &r.h_cond].map(|x| x.to_string()))?;
        }
        w.flush()?;
    }
    emit(&buf, a.out.out.as_deref(), out)
}

#[derive(Serialize)]
struct ExponentOut {
    #[serde(rename = "E")]
    e: f64,
    rate: f64,
    rho: f64,
    kkt_residual: f64,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_grid: Option<u32>,
    #[serde(rename = "E_grid", skip_serializing_if = "Option::is_none")]
    e_grid: Option<f64>,
}

fn exponent_cmd(a: &ExponentArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = RunManifest::new("exponent", argv, a, vec![]);
    let (code, ch) = code_and_channel(&a.code, &a.channel)?;
    let array = probability_array(&code, &ch)?;
    let r = exponent(&array, a.rate)?;
    let e_grid = match a.oracle_grid {
        Some(steps) => Some(exponent_grid_oracle(&array, a.rate, steps, ORACLE_GRID_POINTS)?),
        None => None,
    };
    let result = ExponentOut {
        e: r.e,
        rate: r.rate,
        rho: r.rho,
        kkt_residual: r.kkt_residual,
        threshold: r.threshold,
        oracle_grid: a.oracle_grid,
        e_grid,
    };
    emit_json("qcap/exponent/1", manifest, started, &result, a.out.out.as_deref(), out)
}

#[derive(Serialize)]
struct TraceOut {
    trial: u64,
    success: bool,
    error_weight: usize,
}

#[derive(Serialize)]
struct SimulateOut {
    failures: u64,
    trials: u64,
    failure_rate: f64,
    wilson_low: f64,
    wilson_high: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceOut>>,
}

fn outer_mode(spec: &str, inner: &StabilizerCode, a: &SimulateArgs) -> Result<OuterMode, CliError> {
    match spec {
        "random" => Ok(OuterMode::Resample),
        "once" => Ok(OuterMode::SampleOnce),
        path => {
            let p = Path::new(path);
            if !p.is_file() {
                return Err(CliError::Usage(format!(
                    "--outer `{path}` is not `random`, `once` or an existing code file"
                )));
            }
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: path.to_string(),
                source,
            })?;
            let outer = parse_code_text(&text, Some(inner.field().order() as u32))?;
            if outer.n() != inner.k() * a.blocks || outer.k() != a.logical {
                return Err(CliError::Usage(format!(
                    "outer code must have n = kN = {} and k = K = {}",
                    inner.k() * a.blocks,
                    a.logical
                )));
            }
            Ok(OuterMode::Fixed(outer.stabilizer().clone()))
        }
    }
}

fn simulate_cmd(a: &SimulateArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = RunManifest::new("simulate", argv, a, vec![a.seed]);
    let (inner, ch) = code_and_channel(&a.inner, &a.channel)?;
    let outer = outer_mode(&a.outer, &inner, a)?;
    let report = simulate(&SimConfig {
        inner,
        channel: ch,
        blocks: a.blocks,
        logical: a.logical,
        outer,
        trials: a.trials,
        seed: a.seed,
        trace: a.trace,
    })?;
    let result = SimulateOut {
        failures: report.failures,
        trials: report.trials,
        failure_rate: report.failure_rate,
        wilson_low: report.interval.0,
        wilson_high: report.interval.1,
        trace: report.trace.map(|t| {
            t.into_iter()
                .map(|r| TraceOut {
                    trial: r.trial,
                    success: r.success,
                    error_weight: r.error_weight,
                })
                .collect()
        }),
    };
    emit_json("qcap/simulate/1", manifest, started, &result, a.out.out.as_deref(), out)
}

fn fbound(a: &FboundArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = RunManifest::new("fbound", argv, a, vec![]);
    let (inner, ch) = code_and_channel(&a.inner, &a.channel)?;
    let b = fidelity_bound_exact(&inner, &ch, a.blocks, a.logical)?;
    let result = json!({ "N": a.blocks, "K": a.logical, "bound": b });
    emit_json("qcap/fbound/1", manifest, started, &result, a.out.out.as_deref(), out)
}

fn oracle_check(a: &BoundArgs, argv: &[OsString], out: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = RunManifest::new("oracle-check", argv, a, vec![]);
    let (code, ch) = code_and_channel(&a.code, &a.channel)?;
    let base: LogBase = a.log_base.into();
    let array = coherent_bound(&code, &ch, base)?;
    let dense = coherent_info_direct(&code, &ch, base)?;
    let result = json!({
        "base": base_name(a.log_base),
        "c_n": array.c_n,
        "i_c": dense.i_c,
        "difference": array.c_n - dense.i_c,
        "S_output": dense.s_output,
        "S_joint": dense.s_joint,
    });
    emit_json("qcap/oracle-check/1", manifest, started, &result, a.out.out.as_deref(), out)
}
