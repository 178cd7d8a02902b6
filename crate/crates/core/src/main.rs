//! Command-line front end: lattice dumps, single-point sampling, parameter
//! sweeps, structure factors from sample dumps, and the built-in oracle suite.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use liebkag::config::{ConfigError, RunConfig};
use liebkag::lattice::Lattice;
use liebkag::model::SpinModel;
use liebkag::observables::{magnetization, structure_factor};
use liebkag::output::{
    self, param_label, pgm_bytes, samples_text, sq_meta, write_outputs,
};
use liebkag::samplers::sample;
use liebkag::sweep::{run_sweep, SweepPlan};
use liebkag::{selftest, Error};

const USAGE: &str = "\
liebkag - Ising magnetism on Lieb-to-kagome interpolated lattices

USAGE:
    liebkag <SUBCOMMAND> [--config FILE] [--key value ...]

SUBCOMMANDS:
    lattice   print the lattice (one `index x y role` line per site, then
              one `i j class` line per bond) to stdout
    sample    sample a single (jprime, h) point; writes a samples dump and,
              with --write-sq, a structure-factor map
    sweep     run the full (jprime, h) grid; writes magnetization.csv,
              optional maps/dumps, and manifest.txt
    sq        compute a structure-factor map from a samples dump
              (requires --samples FILE)
    verify    run the built-in oracle suite (exact enumeration vs the
              stochastic engines at small size)

FLAGS mirror config-file keys (`key = value` lines, `#` comments); flags
override the file. Unknown keys are rejected. Keys and defaults:

    l 8                lattice cells per side (N = 3L^2+4L+1 sites)
    j 0.6              corner-edge coupling (antiferromagnetic, > 0)
    jprime 0.3:0.05:1.7  anti-diagonal coupling list (single value,
                       comma list, or start:step:end range)
    h 0,0.1,0.2,0.3,0.45,0.6  longitudinal field list
    engine sa          sa | sqa | exact
    reads 1000         independent reads per point
    sweeps 500         Metropolis passes per read (sa)
    beta0 0.1          initial inverse temperature (sa, geometric ramp)
    beta1 10           final inverse temperature (sa)
    slices 8           Trotter replicas (sqa)
    beta 32            inverse temperature of the replica system (sqa)
    gamma0 3           initial transverse scale (sqa)
    steps 1000         annealing-parameter increments (sqa)
    seed 1             base seed; per-point seeds derive from it
    embed false        run through 3-spin ferromagnetic chains
    jfm -2             intra-chain coupling when embedded
    zone square        square | hexagonal (structure-factor positions)
    resolution 64      structure-factor raster size (>= 8)
    shear 1            position shear for the hexagonal zone, in [0, 1]
    outdir out         output directory
    write-sq false     write per-point sq_<jprime>_<h>.pgm + .meta
    write-samples false  write per-point samples_<jprime>_<h>.txt
    sq-ground-only false  average S(q) over minimum-energy reads only
    random-order false randomize the Metropolis site order
    workers 0          worker threads (0 = all cores)
    verbose false      progress chatter on stderr
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") || args.is_empty() {
        print!("{USAGE}");
        return if args.is_empty() { ExitCode::from(2) } else { ExitCode::SUCCESS };
    }
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, Error> {
    let sub = args[0].as_str();
    let mut rest: Vec<String> = args[1..].to_vec();

    // `--samples FILE` belongs to the sq subcommand, not to the run config.
    let samples_path = extract_value_flag(&mut rest, "--samples");
    let config_path = extract_value_flag(&mut rest, "--config");
    let file_text = match &config_path {
        Some(path) => Some(fs::read_to_string(path).map_err(|source| {
            Error::Output(output::OutputError::Read { path: PathBuf::from(path), source })
        })?),
        None => None,
    };
    let cfg = RunConfig::from_sources(file_text.as_deref(), &rest)?;

    if cfg.workers > 0 {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    }

    match sub {
        "lattice" => cmd_lattice(&cfg),
        "sample" => cmd_sample(&cfg),
        "sweep" => cmd_sweep(&cfg),
        "sq" => cmd_sq(&cfg, samples_path.as_deref()),
        "verify" => cmd_verify(),
        other => Err(Error::Config(ConfigError::UnknownKey(format!("subcommand {other}")))),
    }
}

fn extract_value_flag(args: &mut Vec<String>, flag: &str) -> Option<String> {
    let pos = args.iter().position(|a| a == flag)?;
    if pos + 1 < args.len() {
        let value = args.remove(pos + 1);
        args.remove(pos);
        Some(value)
    } else {
        args.remove(pos);
        None
    }
}

fn cmd_lattice(cfg: &RunConfig) -> Result<ExitCode, Error> {
    let lat = Lattice::new(cfg.l)?;
    print!("{}", output::lattice_text(&lat));
    Ok(ExitCode::SUCCESS)
}

fn single(key: &str, values: &[f64]) -> Result<f64, Error> {
    if values.len() == 1 {
        Ok(values[0])
    } else {
        Err(Error::Config(ConfigError::OutOfRange {
            key: key.to_string(),
            reason: format!("this subcommand needs a single value, got {}", values.len()),
        }))
    }
}

fn cmd_sample(cfg: &RunConfig) -> Result<ExitCode, Error> {
    let jprime = single("jprime", &cfg.jprime)?;
    let h = single("h", &cfg.h)?;
    let lat = Lattice::new(cfg.l)?;
    let model = SpinModel::from_lattice(&lat, cfg.j, jprime, h)?;
    let set = sample(&model, &cfg.sampler_spec())?;
    let stat = magnetization(&set)?;

    fs::create_dir_all(&cfg.outdir).map_err(|source| {
        Error::Output(output::OutputError::Write { path: cfg.outdir.clone(), source })
    })?;
    let stem = format!("{}_{}", param_label(jprime), param_label(h));
    let dump_path = cfg.outdir.join(format!("samples_{stem}.txt"));
    fs::write(&dump_path, samples_text(&set)).map_err(|source| {
        Error::Output(output::OutputError::Write { path: dump_path.clone(), source })
    })?;

    if cfg.write_sq {
        let grid = structure_factor(&set, &lat, &cfg.sq_options())?;
        for (name, bytes) in [
            (format!("sq_{stem}.pgm"), pgm_bytes(&grid)),
            (format!("sq_{stem}.meta"), sq_meta(&grid).into_bytes()),
        ] {
            let path = cfg.outdir.join(name);
            fs::write(&path, bytes).map_err(|source| {
                Error::Output(output::OutputError::Write { path: path.clone(), source })
            })?;
        }
    }

    println!(
        "jprime {} h {} reads {} mean_abs_m {:.6} stderr {:.6} min_energy {}{}",
        jprime,
        h,
        stat.reads,
        stat.mean_abs_m,
        stat.std_err,
        set.min_energy(),
        match set.chain_break_rate() {
            Some(rate) => format!(" chain_break_rate {rate:.4}"),
            None => String::new(),
        }
    );
    println!("wrote {}", dump_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<ExitCode, Error> {
    // Fail on an unwritable output directory before computing anything.
    fs::create_dir_all(&cfg.outdir).map_err(|source| {
        Error::Output(output::OutputError::Write { path: cfg.outdir.clone(), source })
    })?;
    let mut plan: SweepPlan = cfg.plan();
    plan.keep_samples = cfg.write_samples;
    let result = run_sweep(&plan)?;
    if cfg.verbose {
        for p in &result.points {
            eprintln!(
                "point jprime {} h {}: mean_abs_m {:.4} min_energy {}",
                p.jprime, p.h, p.mag.mean_abs_m, p.min_energy
            );
        }
    }
    let dumps: Vec<(f64, f64, String)> = result
        .points
        .iter()
        .filter_map(|p| p.samples.as_ref().map(|s| (p.jprime, p.h, samples_text(s))))
        .collect();
    let manifest = write_outputs(&result, cfg, &dumps)?;
    println!("wrote {} files to {}", manifest.entries.len() + 1, cfg.outdir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_sq(cfg: &RunConfig, samples_path: Option<&str>) -> Result<ExitCode, Error> {
    let path = samples_path.ok_or_else(|| {
        Error::Config(ConfigError::MissingValue("samples".to_string()))
    })?;
    let text = fs::read_to_string(path).map_err(|source| {
        Error::Output(output::OutputError::Read { path: PathBuf::from(path), source })
    })?;
    let (lat, model, set) = output::parse_samples(&text)?;
    let grid = structure_factor(&set, &lat, &cfg.sq_options())?;
    let params = model.lattice_params().expect("dump rebuilds a lattice model");

    fs::create_dir_all(&cfg.outdir).map_err(|source| {
        Error::Output(output::OutputError::Write { path: cfg.outdir.clone(), source })
    })?;
    let stem = format!("sq_{}_{}", param_label(params.jprime), param_label(params.h));
    for (name, bytes) in [
        (format!("{stem}.pgm"), pgm_bytes(&grid)),
        (format!("{stem}.meta"), sq_meta(&grid).into_bytes()),
    ] {
        let out = cfg.outdir.join(&name);
        fs::write(&out, bytes).map_err(|source| {
            Error::Output(output::OutputError::Write { path: out.clone(), source })
        })?;
        println!("wrote {}", cfg.outdir.join(name).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify() -> Result<ExitCode, Error> {
    let checks = selftest::run()?;
    let mut all_ok = true;
    for c in &checks {
        if c.passed {
            println!("ok   {} ({})", c.name, c.detail);
        } else {
            println!("FAIL {} ({})", c.name, c.detail);
            all_ok = false;
        }
    }
    if all_ok {
        println!("{} checks passed", checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Error::Config(ConfigError::OutOfRange {
            key: "verify".to_string(),
            reason: "oracle suite reported failures".to_string(),
        }))
    }
}
