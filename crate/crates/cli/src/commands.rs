use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmeasure::analysis::{
    freedman_diaconis_bins, histogram, run_pipeline, significance, synthesize_traces,
    BootstrapConfig, NoiseModel, PipelineConfig, Scenario, SigmaConvention, Summary, TraceSet,
};
use qmeasure::optics::ComponentKind;
use qmeasure::{build_dsi_filter, DsiParams, Event, HopperModel, OpticalCircuit};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{
    read_json, resolve_seed, write_json, write_provenance, write_text, FileConfig,
};
use crate::error::{CliError, Result};
use crate::{AnalyzeArgs, Cli, Command, MeasureArgs, SignificanceArgs, SimulateArgs, SynthArgs};

pub fn run(cli: &Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Measure(args) => measure(args, file),
        Command::Simulate(args) => simulate(args, file),
        Command::Analyze(args) => analyze(args, file),
        Command::Synth(args) => synth(args, file),
        Command::Significance(args) => significance_cmd(args, file),
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn required_out_dir(flag: &Option<PathBuf>, file: Option<PathBuf>) -> Result<PathBuf> {
    flag.clone()
        .or(file)
        .ok_or_else(|| CliError::new("config.missing", "--out-dir is required"))
}

fn measure(args: &MeasureArgs, file: FileConfig) -> Result<()> {
    let model_path = args.model.clone().or(file.model);
    let model = match &model_path {
        Some(path) => read_json::<HopperModel>(path)?,
        None => HopperModel::ideal(),
    };
    let items = match (&args.event, file.event) {
        (Some(text), _) => split_list(text),
        (None, Some(items)) => items,
        (None, None) => return Err(CliError::new("config.missing", "--event is required")),
    };
    let event = Event::parse(&items)?;
    let mu = model.measure(&event)?;
    let result = json!({
        "event": event,
        "n_steps": model.n_steps(),
        "measure": mu,
    });
    if let Some(dir) = args.out_dir.clone().or(file.out_dir) {
        write_json(&dir.join("measure.json"), &result)?;
        write_provenance(
            &dir,
            "measure",
            json!({ "model_path": model_path, "model": model, "event": event }),
        )?;
    }
    print_json(&result);
    Ok(())
}

fn set_phase(circuit: &mut OpticalCircuit, name: &str, phase: f64) -> Result<()> {
    match circuit.component_mut(name).map(|c| &mut c.kind) {
        Some(ComponentKind::PhasePlate { phase: p }) => {
            *p = phase;
            Ok(())
        }
        Some(_) => Err(CliError::new(
            "config.sweep",
            format!("component {name:?} is not a phase plate"),
        )),
        None => Err(CliError::new(
            "config.sweep",
            format!("no component named {name:?}"),
        )),
    }
}

fn simulate(args: &SimulateArgs, file: FileConfig) -> Result<()> {
    let netlist_path = args.netlist.clone().or(file.netlist);
    let mut circuit = match (&netlist_path, &args.filter_params) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            OpticalCircuit::from_json(&text)?
        }
        (None, Some(path)) => build_dsi_filter(&read_json::<DsiParams>(path)?)?,
        (None, None) => build_dsi_filter(&DsiParams::ideal())?,
    };
    let blocked = split_list(&args.block);
    let blocked_refs: Vec<&str> = blocked.iter().map(String::as_str).collect();
    let out_dir = args.out_dir.clone().or(file.out_dir);

    let resolved = json!({
        "netlist_path": netlist_path,
        "filter_params_path": args.filter_params,
        "circuit": circuit,
        "blocked": blocked,
        "sweep": args.sweep,
        "sweep_component": args.sweep.map(|_| &args.sweep_component),
    });

    match args.sweep {
        None => {
            let result = json!({
                "blocked": blocked,
                "ports": circuit.port_powers(&blocked_refs)?,
            });
            if let Some(dir) = &out_dir {
                write_json(&dir.join("ports.json"), &result)?;
                write_provenance(dir, "simulate", resolved)?;
            }
            print_json(&result);
        }
        Some(n) => {
            if n == 0 {
                return Err(CliError::new(
                    "config.sweep",
                    "--sweep needs at least one point",
                ));
            }
            let ports = circuit.monitored_ports.clone();
            let mut csv = format!("phase,{}\n", ports.join(","));
            for k in 0..n {
                let phase = std::f64::consts::TAU * k as f64 / n as f64;
                set_phase(&mut circuit, &args.sweep_component, phase)?;
                let powers = circuit.port_powers(&blocked_refs)?;
                write!(csv, "{phase}").unwrap();
                for port in &ports {
                    write!(csv, ",{}", powers[port]).unwrap();
                }
                csv.push('\n');
            }
            match &out_dir {
                Some(dir) => {
                    write_text(&dir.join("sweep.csv"), &csv)?;
                    write_provenance(dir, "simulate", resolved)?;
                }
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn noise_model(spec: &str) -> Result<NoiseModel> {
    match spec {
        "ideal" => Ok(NoiseModel::ideal()),
        "bench" => Ok(NoiseModel::bench()),
        path => read_json(Path::new(path)),
    }
}

fn analyze(args: &AnalyzeArgs, file: FileConfig) -> Result<()> {
    let manifest = args
        .manifest
        .clone()
        .or(file.manifest)
        .ok_or_else(|| CliError::new("config.missing", "--manifest is required"))?;
    let out_dir = required_out_dir(&args.out_dir, file.out_dir)?;
    let (seed, seed_source) = resolve_seed(args.seed, file.seed)?;
    let defaults = PipelineConfig::default();
    let noise = match &args.noise {
        Some(spec) => noise_model(spec)?,
        None => file.noise.unwrap_or(defaults.noise),
    };
    let cfg = PipelineConfig {
        bootstrap: BootstrapConfig::new(
            args.window_seconds
                .or(file.window_seconds)
                .unwrap_or(defaults.bootstrap.window_seconds),
            args.resamples
                .or(file.resamples)
                .unwrap_or(defaults.bootstrap.n_resamples),
            seed,
        ),
        noise,
        theory_draws: args
            .theory_draws
            .or(file.theory_draws)
            .unwrap_or(defaults.theory_draws),
        sigma_convention: args
            .sigma_convention
            .or(file.sigma_convention)
            .unwrap_or(defaults.sigma_convention),
    };

    let traces = TraceSet::load(&manifest)?;
    let out = run_pipeline(&traces, &cfg)?;
    let samples = out.measure.samples();
    let n_bins = args
        .bins
        .or(file.bins)
        .unwrap_or_else(|| freedman_diaconis_bins(samples));
    let mut csv = String::from("bin_left,bin_right,count\n");
    for bin in histogram(samples, n_bins) {
        writeln!(csv, "{},{},{}", bin.bin_left, bin.bin_right, bin.count).unwrap();
    }

    write_json(&out_dir.join("report.json"), &out.report)?;
    write_text(&out_dir.join("histogram.csv"), &csv)?;
    write_provenance(
        &out_dir,
        "analyze",
        json!({
            "manifest": manifest,
            "seed": seed,
            "seed_source": seed_source,
            "pipeline": cfg,
            "bins": n_bins,
        }),
    )?;
    print_json(&serde_json::to_value(&out.report).expect("report serializes"));
    Ok(())
}

fn synth(args: &SynthArgs, file: FileConfig) -> Result<()> {
    let out_dir = required_out_dir(&args.out_dir, file.out_dir)?;
    let (seed, seed_source) = resolve_seed(args.seed, file.seed)?;
    let base = file.scenario.unwrap_or_default();
    let scenario = Scenario {
        mu_star: args.mu_star.unwrap_or(base.mu_star),
        noise_rel: args.noise_rel.unwrap_or(base.noise_rel),
        drift_rel: args.drift_rel.unwrap_or(base.drift_rel),
        duration_s: args.duration.unwrap_or(base.duration_s),
        rate_hz: args.rate.unwrap_or(base.rate_hz),
        phase_offset: args.phase_offset.unwrap_or(base.phase_offset),
        phase_jitter: args.phase_jitter.unwrap_or(base.phase_jitter),
        ..base
    };
    let traces = synthesize_traces(&scenario, seed)?;
    let manifest = traces.save(&out_dir)?;
    write_provenance(
        &out_dir,
        "synth",
        json!({ "scenario": scenario, "seed": seed, "seed_source": seed_source }),
    )?;
    print_json(&json!({
        "manifest": manifest,
        "n_traces": traces.len(),
        "n_samples": scenario.n_samples(),
    }));
    Ok(())
}

#[derive(Deserialize)]
struct ReportSpread {
    median: f64,
    sigma_plus: f64,
    sigma_minus: f64,
    std_dev: f64,
    n_samples: usize,
}

fn significance_cmd(args: &SignificanceArgs, file: FileConfig) -> Result<()> {
    let summary = match (&args.report, args.median) {
        (Some(path), _) => {
            let r: ReportSpread = read_json(path)?;
            Summary {
                median: r.median,
                sigma_plus: r.sigma_plus,
                sigma_minus: r.sigma_minus,
                std_dev: r.std_dev,
                n_samples: r.n_samples,
            }
        }
        (None, Some(median)) => {
            let pick = |v: Option<f64>| v.or(args.sigma).unwrap_or(f64::NAN);
            Summary {
                median,
                sigma_plus: pick(args.sigma_plus),
                sigma_minus: pick(args.sigma_minus),
                std_dev: pick(args.std_dev),
                n_samples: 0,
            }
        }
        (None, None) => {
            return Err(CliError::new(
                "config.missing",
                "either --report or --median with a spread is required",
            ))
        }
    };
    let convention: SigmaConvention = args
        .sigma_convention
        .or(file.sigma_convention)
        .unwrap_or_default();
    let sigma_needed = match convention {
        SigmaConvention::SampleStd => summary.std_dev,
        SigmaConvention::SigmaPlus => summary.sigma_plus,
        SigmaConvention::SigmaMinus => summary.sigma_minus,
        SigmaConvention::SideMatched if args.reference > summary.median => summary.sigma_plus,
        SigmaConvention::SideMatched => summary.sigma_minus,
    };
    if sigma_needed.is_nan() {
        return Err(CliError::new(
            "config.missing",
            format!("no spread given for the {convention} convention"),
        ));
    }
    let z = significance(&summary, args.reference, convention)?;
    let result = json!({
        "median": summary.median,
        "reference": args.reference,
        "convention": convention,
        "sigma": sigma_needed,
        "significance": z,
    });
    if let Some(dir) = args.out_dir.clone().or(file.out_dir) {
        write_json(&dir.join("significance.json"), &result)?;
        write_provenance(
            &dir,
            "significance",
            json!({ "report": args.report, "summary": summary, "reference": args.reference, "convention": convention }),
        )?;
    }
    print_json(&result);
    Ok(())
}
