//! Subcommand pipelines. Each returns a [`Bundle`]; nothing here touches the filesystem.

use rayon::prelude::*;

use geogate::geo::{self, GateName};
use geogate::open_system::{self as os, DeviceRun, FidelityReport, NoiseParams};
use geogate::qcore::{self, QOperator};
use geogate::robustness::{self, ControlError};
use geogate::tolerances as tol;

use crate::bundle::{Bundle, Plot, Series, Table};
use crate::config::{to_mhz, Kind, Scenario, SchemeName, Target};
use crate::error::CliError;

pub fn run(sc: &Scenario) -> Result<Bundle, CliError> {
    match sc.kind {
        Kind::Synth => synth(sc),
        Kind::Simulate => simulate(sc),
        Kind::Scan => scan(sc),
        Kind::Master => master(sc),
        Kind::Report => report(sc),
    }
}

fn singles(sc: &Scenario) -> Vec<GateName> {
    sc.targets
        .iter()
        .filter_map(|t| match t {
            Target::Single(g) => Some(*g),
            Target::Cp => None,
        })
        .collect()
}

fn pulse_step(sc: &Scenario) -> f64 {
    tol::PULSE_MAX_STEP / sc.peak.max(1.0)
}

fn synth(sc: &Scenario) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    let step = pulse_step(sc);
    b.steps.push(("pulse_max_step_us".into(), step));
    let gates = singles(sc);
    for &g in &gates {
        if sc.schemes.contains(&SchemeName::Geometric) {
            let p = geo::gate_preset(g);
            b.scalar(format!("{g}.geometric.chi1"), p.chi1);
            b.scalar(format!("{g}.geometric.chi2"), p.chi2);
            b.scalar(format!("{g}.geometric.xi1"), p.xi1);
            b.scalar(format!("{g}.geometric.xi2"), p.xi2);
            if let Some(gp) = p.gamma_prime {
                b.scalar(format!("{g}.geometric.gamma_prime"), gp);
            }
            b.scalar(format!("{g}.geometric.geometric_phase"), geo::geometric_phase(&p));
        }
    }
    for &shape in &sc.shapes {
        let mut series = Vec::new();
        for &scheme in &sc.schemes {
            let mut pts = Vec::new();
            for (i, &g) in gates.iter().enumerate() {
                let pulse = robustness::nominal_pulse(scheme.core(), g, sc.profile(shape))?;
                let u = pulse.propagate(step)?;
                let key = format!("{g}.{}.{}", scheme.name(), shape.name());
                b.scalar(format!("{key}.area"), pulse.total_area());
                b.scalar(format!("{key}.time_us"), pulse.total_time());
                b.scalar(
                    format!("{key}.distance_to_target"),
                    qcore::distance_up_to_global_phase(&u, &QOperator::new(g.target())?)?,
                );
                if scheme == SchemeName::Geometric {
                    b.scalar(
                        format!("{key}.dynamical_phase"),
                        geo::dynamical_phase(&pulse, &geo::gate_preset(g))?,
                    );
                }
                pts.push((i as f64, pulse.total_area()));
                b.plots.push(waveform(&pulse, &key));
            }
            series.push(Series {
                label: scheme.name().into(),
                points: pts,
            });
        }
        b.plots.push(Plot::Bars {
            name: format!("areas_{}", shape.name()),
            title: format!("Pulse area at equal peak amplitude ({})", shape.name()),
            ylabel: "area (rad)".into(),
            categories: gates.iter().map(|g| g.to_string()).collect(),
            series,
        });
    }
    Ok(b)
}

fn waveform(pulse: &geo::PulseSequence, key: &str) -> Plot {
    let total = pulse.total_time();
    let n = 400;
    let (mut om, mut de) = (Vec::new(), Vec::new());
    for k in 0..=n {
        let t = total * k as f64 / n as f64;
        let mut t0 = 0.0;
        for (idx, s) in pulse.segments.iter().enumerate() {
            let last = idx + 1 == pulse.segments.len();
            if t <= t0 + s.duration() || last {
                let local = (t - t0).clamp(0.0, s.duration());
                om.push((t, to_mhz(s.omega(local))));
                de.push((t, to_mhz(s.delta(local))));
                break;
            }
            t0 += s.duration();
        }
    }
    Plot::Lines {
        name: format!("waveform_{}", key.replace('.', "_")),
        title: format!("Control waveform {key}"),
        xlabel: "t (us)".into(),
        ylabel: "frequency / 2pi (MHz)".into(),
        series: vec![
            Series {
                label: "Omega".into(),
                points: om,
            },
            Series {
                label: "Delta".into(),
                points: de,
            },
        ],
    }
}

fn simulate(sc: &Scenario) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    let step = pulse_step(sc);
    b.steps.push(("pulse_max_step_us".into(), step));
    let err = ControlError {
        epsilon: sc.epsilon,
        eta: sc.eta,
        ..Default::default()
    };
    for &shape in &sc.shapes {
        for &g in &singles(sc) {
            for &scheme in &sc.schemes {
                let pulse = robustness::nominal_pulse(scheme.core(), g, sc.profile(shape))?;
                let ideal = pulse.propagate(step)?;
                let faulty = robustness::inject_errors(&pulse, &err)?;
                let u = faulty.propagate(step)?;
                let key = format!("{g}.{}.{}", scheme.name(), shape.name());
                b.scalar(
                    format!("{key}.fidelity"),
                    robustness::gate_fidelity_trace_mode(&ideal, &u, sc.trace)?,
                );
                b.scalar(
                    format!("{key}.distance_to_target"),
                    qcore::distance_up_to_global_phase(&u, &QOperator::new(g.target())?)?,
                );
                b.scalar(format!("{key}.time_us"), faulty.total_time());
            }
        }
    }
    Ok(b)
}

fn scan(sc: &Scenario) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    for &shape in &sc.shapes {
        for &g in &singles(sc) {
            let mut results = Vec::new();
            for &scheme in &sc.schemes {
                let r = robustness::scan2d_with(
                    scheme.core(),
                    g,
                    &sc.eps_grid,
                    &sc.eta_grid,
                    sc.profile(shape),
                    sc.trace,
                )?;
                let key = format!("{g}.{}.{}", scheme.name(), shape.name());
                let finite: Vec<f64> = r.values.iter().flatten().copied().filter(|v| v.is_finite()).collect();
                b.scalar(format!("{key}.failures"), r.failures.len() as f64);
                b.scalar(format!("{key}.min"), finite.iter().copied().fold(f64::INFINITY, f64::min));
                b.scalar(format!("{key}.mean"), finite.iter().sum::<f64>() / finite.len().max(1) as f64);
                b.tables.push(Table {
                    name: format!("scan_{g}_{}_{}", scheme.name(), shape.name()),
                    title: format!("{g} {} fidelity ({})", scheme.name(), shape.name()),
                    axis1_label: "epsilon".into(),
                    axis2_label: "eta".into(),
                    axis1: r.axis1.clone(),
                    axis2: r.axis2.clone(),
                    values: r.values.clone(),
                });
                b.plots.push(Plot::Heatmap {
                    table: b.tables.len() - 1,
                });
                results.push((scheme, r));
            }
            let geo = results.iter().find(|(s, _)| *s == SchemeName::Geometric);
            let dyn_ = results.iter().find(|(s, _)| *s == SchemeName::Dynamical);
            if let (Some((_, a)), Some((_, d))) = (geo, dyn_) {
                let mut wins = 0usize;
                let mut total = 0usize;
                for (ra, rd) in a.values.iter().zip(&d.values) {
                    for (x, y) in ra.iter().zip(rd) {
                        total += 1;
                        // equal up to rounding at the error-free point
                        if *x >= *y - 1e-12 {
                            wins += 1;
                        }
                    }
                }
                b.scalar(
                    format!("{g}.{}.geometric_not_worse_fraction", shape.name()),
                    wins as f64 / total.max(1) as f64,
                );
            }
        }
    }
    Ok(b)
}

fn fidelity(t: Target, scheme: SchemeName, run: &DeviceRun, cp_chi: f64) -> geogate::Result<FidelityReport> {
    match (t, scheme) {
        (Target::Single(g), SchemeName::Geometric) => os::single_logical_gate_fidelity(g, run),
        (Target::Single(g), SchemeName::Dynamical) => os::dynamical_single_fidelity(g, run),
        (Target::Cp, SchemeName::Geometric) => os::two_logical_gate_fidelity(run, cp_chi),
        (Target::Cp, SchemeName::Dynamical) => os::dynamical_cp_fidelity(run),
    }
}

/// Evaluates every job in parallel; results come back in job order.
fn evaluate(jobs: &[(Target, SchemeName, DeviceRun)], cp_chi: f64) -> Result<Vec<FidelityReport>, CliError> {
    jobs.par_iter()
        .map(|(t, s, r)| fidelity(*t, *s, r, cp_chi))
        .collect::<geogate::Result<Vec<_>>>()
        .map_err(CliError::from)
}

fn nominal(sc: &Scenario, b: &mut Bundle) -> Result<Vec<(Target, SchemeName, FidelityReport)>, CliError> {
    let mut jobs = Vec::new();
    for &t in &sc.targets {
        for &s in &sc.schemes {
            jobs.push((t, s, sc.run));
        }
    }
    let reps = evaluate(&jobs, sc.cp_chi)?;
    let mut out = Vec::new();
    for ((t, s, _), r) in jobs.into_iter().zip(reps) {
        let key = format!("{}.{}", t.name(), s.name());
        b.scalar(format!("{key}.fidelity"), r.fidelity);
        b.scalar(format!("{key}.fidelity_coarse_grid"), r.fidelity_coarse);
        b.scalar(format!("{key}.gate_time_us"), r.gate_time);
        out.push((t, s, r));
    }
    Ok(out)
}

fn master(sc: &Scenario) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    b.steps.push(("device_max_step_us".into(), sc.run.numerics.max_step));
    nominal(sc, &mut b)?;
    if let Some(kappas) = &sc.kappa_sweep {
        let variants: Vec<DeviceRun> = kappas
            .iter()
            .map(|&k| {
                let mut r = sc.run;
                r.noise.kappa_minus = k;
                r.noise.kappa_z = k;
                r
            })
            .collect();
        sweep(
            sc,
            &mut b,
            &variants,
            Axis {
                name: "kappa",
                label: "kappa/2pi (MHz)",
                values: kappas,
            },
            Axis {
                name: "",
                label: "delta1/2pi (MHz)",
                values: &[sc.run.drift1],
            },
        )?;
    }
    if let Some(d1) = &sc.drift1_sweep {
        match &sc.drift2_sweep {
            None => {
                let variants: Vec<DeviceRun> = d1.iter().map(|&d| DeviceRun { drift1: d, ..sc.run }).collect();
                sweep(
                    sc,
                    &mut b,
                    &variants,
                    Axis {
                        name: "drift1",
                        label: "delta1/2pi (MHz)",
                        values: d1,
                    },
                    Axis {
                        name: "",
                        label: "kappa/2pi (MHz)",
                        values: &[sc.run.noise.kappa_minus],
                    },
                )?;
            }
            Some(d2) => {
                let mut variants = Vec::new();
                for &x in d1 {
                    for &y in d2 {
                        variants.push(DeviceRun {
                            drift1: x,
                            drift2: y,
                            ..sc.run
                        });
                    }
                }
                sweep(
                    sc,
                    &mut b,
                    &variants,
                    Axis {
                        name: "drift",
                        label: "delta1/2pi (MHz)",
                        values: d1,
                    },
                    Axis {
                        name: "drift",
                        label: "delta2/2pi (MHz)",
                        values: d2,
                    },
                )?;
            }
        }
    }
    Ok(b)
}

struct Axis<'a> {
    /// Empty for a fixed companion coordinate.
    name: &'a str,
    label: &'a str,
    values: &'a [f64],
}

/// Runs `variants` (row-major over `a1 × a2`) for every target and scheme.
fn sweep(sc: &Scenario, b: &mut Bundle, variants: &[DeviceRun], a1: Axis, a2: Axis) -> Result<(), CliError> {
    let mut jobs = Vec::new();
    for &t in &sc.targets {
        for &s in &sc.schemes {
            for r in variants {
                jobs.push((t, s, *r));
            }
        }
    }
    let reps = evaluate(&jobs, sc.cp_chi)?;
    let n2 = a2.values.len();
    let grid = !a2.name.is_empty();
    let mut k = 0;
    for &t in &sc.targets {
        let mut series = Vec::new();
        for &s in &sc.schemes {
            let flat: Vec<f64> = reps[k..k + variants.len()].iter().map(|r| r.fidelity).collect();
            k += variants.len();
            let values: Vec<Vec<f64>> = flat.chunks(n2).map(|c| c.to_vec()).collect();
            let name = format!("{}_{}_{}", a1.name, t.name(), s.name());
            b.tables.push(Table {
                name,
                title: format!("{} {} fidelity", t.name(), s.name()),
                axis1_label: a1.label.into(),
                axis2_label: a2.label.into(),
                axis1: a1.values.iter().map(|&v| to_mhz(v)).collect(),
                axis2: a2.values.iter().map(|&v| to_mhz(v)).collect(),
                values,
            });
            if grid {
                b.plots.push(Plot::Heatmap {
                    table: b.tables.len() - 1,
                });
            } else {
                series.push(Series {
                    label: s.name().into(),
                    points: a1.values.iter().zip(&flat).map(|(&x, &f)| (to_mhz(x), f)).collect(),
                });
            }
        }
        if !grid {
            b.plots.push(Plot::Lines {
                name: format!("{}_{}", a1.name, t.name()),
                title: format!("{} fidelity versus {}", t.name(), a1.name),
                xlabel: a1.label.into(),
                ylabel: "average fidelity".into(),
                series,
            });
        }
    }
    Ok(())
}

fn report(sc: &Scenario) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    b.steps.push(("device_max_step_us".into(), sc.run.numerics.max_step));
    let noisy = nominal(sc, &mut b)?;
    let mut jobs = Vec::new();
    for &t in &sc.targets {
        for &s in &sc.schemes {
            jobs.push((
                t,
                s,
                DeviceRun {
                    noise: NoiseParams::none(),
                    ..sc.run
                },
            ));
        }
    }
    let closed = evaluate(&jobs, sc.cp_chi)?;
    let mut series: Vec<Series> = sc
        .schemes
        .iter()
        .map(|s| Series {
            label: s.name().into(),
            points: Vec::new(),
        })
        .collect();
    for (i, ((t, s, r), c)) in noisy.iter().zip(&closed).enumerate() {
        b.scalar(format!("{}.{}.fidelity_noiseless", t.name(), s.name()), c.fidelity);
        let si = i % sc.schemes.len();
        let ti = i / sc.schemes.len();
        series[si].points.push((ti as f64, r.fidelity));
    }
    b.plots.push(Plot::Bars {
        name: "fidelities".into(),
        title: "Average gate fidelity".into(),
        ylabel: "fidelity".into(),
        categories: sc.targets.iter().map(|t| t.name()).collect(),
        series,
    });
    Ok(b)
}

/// Markdown summary written next to the report CSV.
pub fn report_markdown(b: &Bundle, sc: &Scenario) -> String {
    let get = |k: String| b.scalars.iter().find(|(n, _)| *n == k).map(|(_, v)| *v);
    let mut s = String::from("| gate | scheme | fidelity | noiseless | gate time (us) |\n|---|---|---|---|---|\n");
    for t in &sc.targets {
        for sch in &sc.schemes {
            let key = format!("{}.{}", t.name(), sch.name());
            let f = |suffix: &str| {
                get(format!("{key}.{suffix}"))
                    .map(|v| format!("{v:.5}"))
                    .unwrap_or_else(|| "-".into())
            };
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                t.name(),
                sch.name(),
                f("fidelity"),
                f("fidelity_noiseless"),
                f("gate_time_us")
            ));
        }
    }
    s
}
