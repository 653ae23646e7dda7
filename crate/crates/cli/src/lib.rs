//! Scenario runner: reads a JSON scenario, runs one pipeline and writes
//! CSV results, optional SVG plots and a provenance record.

pub mod bundle;
pub mod config;
pub mod error;
pub mod run;
pub mod svg;

use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use bundle::{Bundle, Plot};
use config::{Kind, Scenario};
use error::CliError;
use geogate::tolerances as tol;

/// Options shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub plots: bool,
}

/// Runs `kind` on the scenario file and writes the bundle; returns the files written.
pub fn execute(kind: Kind, opts: &Options) -> Result<Vec<PathBuf>, CliError> {
    let (cfg, raw) = config::read_config(&opts.config)?;
    let sc = cfg.scenario(kind)?;
    let bundle = run::run(&sc)?;
    std::fs::create_dir_all(&opts.out).map_err(|e| CliError::Io(format!("{}: {e}", opts.out.display())))?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<(), CliError> {
        bundle::write(&opts.out.join(&name), &text)?;
        written.push(name);
        Ok(())
    };
    put("scalars.csv".into(), bundle::scalar_csv(&bundle.scalars))?;
    for t in &bundle.tables {
        put(format!("{}.csv", t.name), bundle::table_csv(t))?;
    }
    if opts.plots {
        for p in &bundle.plots {
            let (name, svg) = render(p, &bundle);
            put(format!("{name}.svg"), svg)?;
        }
    }
    if kind == Kind::Report {
        put("report.md".into(), run::report_markdown(&bundle, &sc))?;
    }
    drop(put);
    let prov = provenance(kind, &cfg, &raw, &sc, &bundle, &written);
    bundle::write(&opts.out.join("provenance.json"), &prov)?;
    written.push("provenance.json".into());
    Ok(written.into_iter().map(|n| opts.out.join(n)).collect())
}

fn render(p: &Plot, b: &Bundle) -> (String, String) {
    match p {
        Plot::Heatmap { table } => {
            let t = &b.tables[*table];
            (t.name.clone(), svg::heatmap(t))
        }
        Plot::Lines {
            name,
            title,
            xlabel,
            ylabel,
            series,
        } => (name.clone(), svg::lines(title, xlabel, ylabel, series)),
        Plot::Bars {
            name,
            title,
            ylabel,
            categories,
            series,
        } => (name.clone(), svg::bars(title, ylabel, categories, series)),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn provenance(
    kind: Kind,
    cfg: &config::Config,
    raw: &[u8],
    sc: &Scenario,
    b: &Bundle,
    outputs: &[String],
) -> String {
    let steps: serde_json::Map<String, serde_json::Value> =
        b.steps.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let v = json!({
        "tool": "geogate",
        "version": env!("CARGO_PKG_VERSION"),
        "command": kind.name(),
        "config_sha256": sha256_hex(raw),
        "config": cfg,
        "units": {"frequency": "rad/us internally, MHz (omega/2pi) in files", "time": "us"},
        "tolerances": {
            "pulse_max_step": tol::PULSE_MAX_STEP,
            "device_max_step": tol::DEVICE_MAX_STEP,
            "step_phase_cap": tol::STEP_PHASE_CAP,
            "step_decay_cap": tol::STEP_DECAY_CAP,
            "propagator_unitary": tol::PROPAGATOR_UNITARY,
            "master_trace_drift": tol::MASTER_TRACE_DRIFT,
        },
        "step_sizes": steps,
        "fidelity_nodes": {
            "single": sc.run.numerics.points_single,
            "two": sc.run.numerics.points_two,
        },
        "outputs": outputs,
    });
    let mut s = serde_json::to_string_pretty(&v).unwrap_or_default();
    s.push('\n');
    s
}

/// Resolves the worker count: flag, then `GEOGATE_THREADS`, then rayon's default.
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(CliError::config("--threads: must be at least 1"));
        }
        return Ok(Some(n));
    }
    match env.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!("GEOGATE_THREADS: expected a positive integer, got '{s}'"))),
        },
    }
}

pub fn out_dir_default(config: &Path) -> PathBuf {
    let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    PathBuf::from("out").join(stem)
}
