use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use scatlab::dynamics::{evolve, log_sample_times, pseudoconformal_report, SolverConfig};
use scatlab::exponents::{report, PhysParams};
use scatlab::fit::fit_power_law;
use scatlab::lab::{
    geometric_amplitudes, holder_probe, quotient_blowup_test, run_scaling_sweep, Manifest, MapTarget,
    QuotientKind, ScalarModel, SweepConfig,
};
use scatlab::scattering::{born_term, expansion_error, solve_map, BornSettings, MapKind, MapSettings};
use scatlab::spectral::io::{load_field, save_field};
use scatlab::spectral::{dispersive_time, mass, sigma_norm, Field, Profile};
use scatlab::{Error, Result};

#[derive(Parser)]
#[command(name = "scatlab", version, about = "Scattering maps and scaling experiments for defocusing NLS")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the run manifest to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent bookkeeping for (d, p).
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: f64,
        /// Sharpened-exponent parameters η, ν.
        #[arg(long, requires = "nu")]
        eta: Option<f64>,
        #[arg(long, requires = "eta")]
        nu: Option<f64>,
    },
    /// Strang evolution with conservation and pseudoconformal diagnostics.
    Simulate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 100.0)]
        t_final: f64,
        #[arg(long, default_value_t = 8)]
        per_decade: usize,
        /// Save the final state.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Born term and the duality identity.
    Born {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        adaptive_tol: Option<f64>,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Scattering map S.
    Scatter {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Wave operator W.
    Wave {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Expansion error e(φ) with norms and the lower-bound chain.
    Expand {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum, default_value_t = MapChoice::S)]
        kind: MapChoice,
        #[arg(long, requires = "nu")]
        eta: Option<f64>,
        #[arg(long, requires = "eta")]
        nu: Option<f64>,
    },
    /// (ε, σ) sweep along ε = σ^{-j} with quotient fits.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; overrides the config.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Power-law fit of two CSV columns.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "x")]
        x: String,
        #[arg(long, default_value = "y")]
        y: String,
    },
    /// Pointwise Hölder probe along the amplitude direction.
    Probe {
        #[arg(long, value_enum, default_value_t = ProbeTarget::Scalar)]
        target: ProbeTarget,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 0.1)]
        eps_max: f64,
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        ratio: f64,
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MapChoice {
    S,
    W,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeTarget {
    Scalar,
    Scatter,
    Wave,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileName {
    Gaussian,
    Sech,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    /// Read the initial field from a binary field file.
    #[arg(long, conflicts_with_all = ["profile", "width", "amplitude"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    profile: Option<ProfileName>,
    #[arg(long)]
    width: Option<f64>,
    /// L² norm of the sampled profile.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Free-evolution horizon, in units of the dispersive time, that the
    /// automatic grid must hold.
    #[arg(long, default_value_t = 40.0)]
    horizon_factor: f64,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

impl MapArgs {
    fn settings(&self) -> MapSettings {
        MapSettings { tol: self.tol, max_iter: self.max_iter, ..Default::default() }
    }
}

impl FieldArgs {
    fn params(&self) -> Result<PhysParams> {
        PhysParams::new(self.d, self.p)
    }

    fn build(&self) -> Result<Field> {
        if let Some(path) = &self.input {
            let f = load_field(path)?;
            if f.grid().dim() != self.d {
                return Err(Error::InvalidParameter(format!(
                    "field file is {}-dimensional but --d is {}",
                    f.grid().dim(),
                    self.d
                )));
            }
            return Ok(f);
        }
        let width = self.width.unwrap_or(1.0);
        let profile = match self.profile.unwrap_or(ProfileName::Gaussian) {
            ProfileName::Gaussian => Profile::Gaussian { width },
            ProfileName::Sech => Profile::Sech { width },
        };
        let amplitude = self.amplitude.unwrap_or(0.1);
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!("amplitude must be >= 0, got {amplitude}")));
        }
        let coarse = profile.grid_for(self.d, 1.0, 0.0)?;
        let tau = dispersive_time(&profile.sample(coarse, 1.0, 1.0))?;
        let grid = profile.grid_for(self.d, 1.0, self.horizon_factor * tau)?;
        Ok(profile.unit_mass(grid).scale(amplitude))
    }
}

fn field_summary(f: &Field) -> Value {
    let g = f.grid();
    json!({
        "d": g.dim(),
        "points_per_axis": g.points_per_axis(),
        "length": g.length(),
        "l2_norm": mass(f).sqrt(),
        "sigma_norm": sigma_norm(f),
    })
}

fn save(path: &Option<PathBuf>, f: &Field, outputs: &mut Vec<String>) -> Result<()> {
    if let Some(p) = path {
        save_field(p, f)?;
        outputs.push(p.display().to_string());
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn run(cli: &Cli, manifest: &mut Manifest, manifest_paths: &mut Vec<PathBuf>) -> Result<Value> {
    let outputs = &mut manifest.outputs;
    match &cli.command {
        Command::Exponents { d, p, eta, nu } => {
            let params = PhysParams::new(*d, *p)?;
            to_value(&report(params, eta.zip(*nu))?)
        }
        Command::Simulate { field, dt, t_final, per_decade, save: target } => {
            let phi = field.build()?;
            let params = field.params()?;
            let mut times = vec![0.0];
            if *t_final > 0.0 {
                times.extend(log_sample_times(t_final.min(1.0) / 10.0, *t_final, *per_decade));
            }
            times.dedup_by(|a, b| a == b);
            let cfg = SolverConfig::new(params, *phi.grid(), *dt, *t_final).with_samples(times);
            let traj = evolve(&phi, &cfg)?;
            let rep = pseudoconformal_report(&traj)?;
            save(target, &traj.last().1, outputs)?;
            Ok(json!({
                "field": field_summary(&phi),
                "steps": traj.steps,
                "max_phase_per_step": traj.max_phase_per_step,
                "report": to_value(&rep)?,
            }))
        }
        Command::Born { field, adaptive_tol, save: target } => {
            let phi = field.build()?;
            let settings = BornSettings { adaptive_tol: *adaptive_tol, ..Default::default() };
            let r = born_term(&phi, field.params()?, &settings)?;
            save(target, &r.born, outputs)?;
            Ok(json!({
                "field": field_summary(&phi),
                "born_norm": r.norm,
                "duality_lhs": r.duality_lhs,
                "duality_rhs": r.duality_rhs,
                "duality_gap": r.duality_gap,
                "tail_fraction": r.tail_fraction,
                "tail_slope": r.tail_slope,
                "horizon": r.horizon,
                "nodes": r.nodes,
                "horizon_capped": r.horizon_capped,
            }))
        }
        Command::Scatter { field, map, save: target } | Command::Wave { field, map, save: target } => {
            let kind = if matches!(cli.command, Command::Scatter { .. }) { MapKind::Scattering } else { MapKind::Wave };
            let phi = field.build()?;
            let sol = solve_map(&phi, field.params()?, kind, &map.settings())?;
            save(target, &sol.image, outputs)?;
            Ok(json!({
                "map": kind.tag(),
                "sign_convention": kind.sign_convention(),
                "field": field_summary(&phi),
                "image_l2_norm": mass(&sol.image).sqrt(),
                "displacement_norm": sol.displacement_norm,
                "born_norm": sol.born_norm,
                "error_norm": sol.error_norm,
                "iterations": sol.iterations,
                "residuals": sol.residuals,
                "tail_fraction": sol.tail_fraction,
                "horizon": sol.horizon,
            }))
        }
        Command::Expand { field, map, kind, eta, nu } => {
            let kind = match kind {
                MapChoice::S => MapKind::Scattering,
                MapChoice::W => MapKind::Wave,
            };
            let phi = field.build()?;
            to_value(&expansion_error(&phi, field.params()?, kind, &map.settings(), eta.zip(*nu))?)
        }
        Command::Sweep { config, csv } => {
            let text = std::fs::read_to_string(config)?;
            let mut cfg = SweepConfig::from_toml(&text)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let resolve = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
            cfg.output.csv = csv.clone().or_else(|| resolve(&cfg.output.csv));
            cfg.output.plot = resolve(&cfg.output.plot);
            cfg.output.manifest = resolve(&cfg.output.manifest);
            let csv_path = cfg.output.csv.clone().unwrap_or_else(|| config.with_extension("csv"));
            let mut file = BufWriter::new(File::create(&csv_path)?);
            let outcome = run_scaling_sweep(&cfg, Some(&mut file))?;
            file.flush()?;
            outputs.push(csv_path.display().to_string());
            manifest.config_hash = scatlab::lab::config_hash(&cfg);
            manifest.timings.extend(outcome.timing_map());
            let records = outcome.records();
            let mut tests = Vec::new();
            for kind in [QuotientKind::Sigma { s: cfg.s }, QuotientKind::L2 { beta: cfg.beta }] {
                tests.push(match quotient_blowup_test(&cfg, &records, kind) {
                    Ok(t) => to_value(&t)?,
                    Err(e) => json!({ "kind": to_value(&kind)?, "error": e.to_string() }),
                });
            }
            if let Some(plot) = &cfg.output.plot {
                let mut w = BufWriter::new(File::create(plot)?);
                for r in &records {
                    writeln!(w, "{} {}", r.sigma, r.sigma_quotient)?;
                }
                w.flush()?;
                outputs.push(plot.display().to_string());
            }
            let manifest_path = cfg.output.manifest.clone().unwrap_or_else(|| csv_path.with_extension("manifest.json"));
            let failures: Vec<Value> = outcome
                .failures()
                .iter()
                .map(|(p, e)| json!({ "sigma": p.sigma, "eps": p.eps, "error": e.to_string() }))
                .collect();
            outputs.push(manifest_path.display().to_string());
            let result = json!({
                "csv": csv_path.display().to_string(),
                "points": outcome.points.len(),
                "failures": failures,
                "quotient_tests": tests,
            });
            manifest_paths.push(manifest_path);
            Ok(result)
        }
        Command::Fit { input, x, y } => {
            let text = std::fs::read_to_string(input)?;
            let meta: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
            let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
            let mut rdr = csv::Reader::from_reader(body.as_bytes());
            let headers = rdr.headers()?.clone();
            let col = |name: &str| {
                headers
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| Error::Format(format!("column {name:?} not found in {}", input.display())))
            };
            let (ix, iy) = (col(x)?, col(y)?);
            let mut pairs = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let parse = |i: usize| {
                    rec.get(i)
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .ok_or_else(|| Error::Format(format!("non-numeric cell in row {:?}", rec)))
                };
                pairs.push((parse(ix)?, parse(iy)?));
            }
            let fit = fit_power_law(&pairs)?;
            Ok(json!({ "fit": to_value(&fit)?, "metadata": meta }))
        }
        Command::Probe { target, s, d, p, width, eps_max, ratio, count } => {
            let eps = geometric_amplitudes(*eps_max, *ratio, *count);
            let params = PhysParams::new(*d, *p)?;
            let fit = match target {
                ProbeTarget::Scalar => holder_probe(&ScalarModel { p: *p }, *s, &eps)?,
                ProbeTarget::Scatter | ProbeTarget::Wave => {
                    let kind = if matches!(target, ProbeTarget::Scatter) { MapKind::Scattering } else { MapKind::Wave };
                    let prof = Profile::Gaussian { width: *width };
                    let grid = prof.grid_for(*d, 1.0, 40.0 * width * width)?;
                    let t = MapTarget::new(params, kind, &prof.unit_mass(grid), MapSettings::default(), "gaussian")?;
                    holder_probe(&t, *s, &eps)?
                }
            };
            to_value(&fit)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Exponents { .. } => "exponents",
        Command::Simulate { .. } => "simulate",
        Command::Born { .. } => "born",
        Command::Scatter { .. } => "scatter",
        Command::Wave { .. } => "wave",
        Command::Expand { .. } => "expand",
        Command::Sweep { .. } => "sweep",
        Command::Fit { .. } => "fit",
        Command::Probe { .. } => "probe",
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SCATLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("SCATLAB_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn emit(path: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = configure_threads().and_then(|_| {
        let mut manifest = Manifest::new(command_name(&cli.command), &args.join(" "));
        let mut paths: Vec<PathBuf> = cli.manifest.iter().cloned().collect();
        let result = run(&cli, &mut manifest, &mut paths)?;
        manifest.finish(start.elapsed().as_secs_f64());
        for p in &paths {
            manifest.write(p)?;
        }
        emit(cli.out.as_deref(), &json!({ "manifest": to_value(&manifest)?, "result": result }))
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
            eprintln!("{body}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
