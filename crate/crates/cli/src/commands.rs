use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use rggcc::analytics::{mu_n, regime_constants, sigma2n_sq_mc};
use rggcc::cltlab::{
    expansion_scaling_check, write_outputs, ExpansionCheck, Quantity, Table1Report,
};
use rggcc::geometry::oracle_sweep;
use rggcc::{
    derive_stream, run_experiment, table1_reproduce, AsymptoticConstants, CircularDensity,
    DensitySpec, Error, ExperimentConfig, McEstimate, RegimeConstants, Result,
};

use crate::DensityArgs;

pub enum Verdict {
    Pass,
    Fail,
}

impl From<bool> for Verdict {
    fn from(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl From<Verdict> for ExitCode {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => ExitCode::SUCCESS,
            Verdict::Fail => ExitCode::from(1),
        }
    }
}

/// 2 for unusable input, 3 for a refused regime.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::RegimeRefused(_) => 3,
        _ => 2,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    density: DensitySpec,
    #[serde(default)]
    r: Option<f64>,
}

fn resolve_density(
    args: &DensityArgs,
    default: Option<DensitySpec>,
) -> Result<(CircularDensity, Option<f64>)> {
    let (spec, r) = match (&args.config, &args.density) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let file: DensityFile =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            (file.density, args.r.or(file.r))
        }
        (None, Some(json)) => (
            serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?,
            args.r,
        ),
        (None, None) => (
            default.ok_or_else(|| Error::Config("give --density or --config".into()))?,
            args.r,
        ),
    };
    let density = CircularDensity::new(spec).map_err(|e| Error::Config(e.to_string()))?;
    Ok((density, r))
}

fn require_r(r: Option<f64>) -> Result<f64> {
    r.ok_or_else(|| Error::Config("a radius is required (--r or \"r\" in the config)".into()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

#[derive(Serialize)]
struct ConstantsReport {
    density: DensitySpec,
    constants: AsymptoticConstants,
    regime_constants: Option<RegimeConstants>,
}

pub fn constants(args: &DensityArgs) -> Result<Verdict> {
    let (density, r) = resolve_density(args, None)?;
    let constants = density.constants()?;
    let m = &constants.moments;
    println!("E[f^2]            {:.10e}", m.e_f2);
    println!("E[f'^2]           {:.10e}", m.e_fp2);
    println!("E[f f'']          {:.10e}", m.e_ffpp);
    println!("a_f               {:.10e}", constants.a_f);
    println!("b_f               {:.10e}", constants.b_f);
    println!("c_f               {:.10e}", constants.c_f);
    println!("sigma_1^2         {:.6}", constants.sigma1_sq);
    let rc = match r {
        Some(r) => {
            let rc = regime_constants(&density, &constants, r)?;
            println!("r                 {r}");
            println!("mu_n (exact)      {:.15}", rc.mu_n_exact);
            println!("mu_n (expansion)  {:.15}", rc.mu_n_expansion);
            println!("sigma_3n^2 (lead) {:.10e}", rc.sigma3n_sq_leading);
            Some(rc)
        }
        None => None,
    };
    if let Some(dir) = &args.out {
        let report = ConstantsReport {
            density: density.spec().clone(),
            constants,
            regime_constants: rc,
        };
        let path = write_json(dir, "constants.json", &report)?;
        println!("wrote {}", path.display());
    }
    Ok(Verdict::Pass)
}

pub fn table1(tolerance: f64, out: Option<&Path>) -> Result<Verdict> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let report = table1_reproduce(tolerance)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("table1.csv");
            report.write_csv(fs::File::create(&path)?)?;
            print_table1(&report);
            println!("wrote {}", path.display());
        }
        None => report.write_csv(std::io::stdout().lock())?,
    }
    let passed = report.cells.len() - report.failures();
    println!(
        "table1: {passed}/{} cells within {tolerance}",
        report.cells.len()
    );
    Ok(report.passed().into())
}

fn print_table1(report: &Table1Report) {
    for c in &report.cells {
        println!(
            "kappa {:>4} mu {:>4}  sigma_1^2 {:>18.6}  published {:>14.2}  rel {:.2e}  {}",
            c.kappa,
            c.mu,
            c.sigma1_sq,
            c.reference,
            c.rel_error,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
}

pub struct SimulateArgs {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
    pub plot: bool,
    pub max_ks: Option<f64>,
    pub threads: Option<usize>,
    pub verbose: bool,
}

pub fn simulate(args: SimulateArgs) -> Result<Verdict> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    let plot = args.plot || config.output.as_ref().is_some_and(|o| o.plot_script);
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.output.as_ref().map(|o| o.dir.clone()));
    if args.verbose {
        eprintln!(
            "running {} replications of n = {}",
            config.replications, config.n
        );
    }
    let outcome = run_experiment(&config, args.threads)?;
    let s = &outcome.summary;
    println!("regime      {}", s.regime);
    println!("r           {}", s.r);
    println!("mu_n        {}", s.mu_n);
    if let Some(est) = s.sigma2n_sq {
        println!(
            "sigma_2n^2  {:.6e} (stderr {:.2e})",
            est.estimate, est.std_error
        );
    }
    println!("R_effective {} of {}", s.r_effective, s.replications);
    if let Some(z) = &s.z {
        println!(
            "z: mean {:.4} var {:.4} skew {:.4} kurt {:.4} KS {:.4}",
            z.mean, z.variance, z.skewness, z.excess_kurtosis, z.ks
        );
    }
    match out_dir {
        Some(dir) => {
            for path in write_outputs(&outcome, &dir, plot)? {
                println!("wrote {}", path.display());
            }
        }
        None => println!("{}", serde_json::to_string_pretty(s)?),
    }
    let pass = match args.max_ks {
        Some(bar) => s.z.is_some_and(|z| z.ks <= bar),
        None => true,
    };
    Ok(pass.into())
}

#[derive(Serialize)]
struct PropCheckReport {
    density: DensitySpec,
    checks: Vec<CheckResult>,
}

#[derive(Serialize)]
struct CheckResult {
    #[serde(flatten)]
    check: ExpansionCheck,
    bar: f64,
    pass: bool,
}

pub fn prop_check(args: &DensityArgs, grid: &[f64]) -> Result<Verdict> {
    let default = DensitySpec::VonMises {
        kappa: 1.0,
        mu: 0.0,
    };
    let (density, _) = resolve_density(args, Some(default))?;
    let mut checks = Vec::new();
    println!("{:<10} {:>12} orders", "quantity", "min order");
    for q in Quantity::ALL {
        let bar = if q == Quantity::MuN { 2.5 } else { 3.5 };
        let check = expansion_scaling_check(&density, q, grid)?;
        let pass = check.passes(bar);
        let orders: Vec<String> = check
            .orders
            .iter()
            .map(|o| o.map_or("exact".into(), |o| format!("{o:.3}")))
            .collect();
        let min = check
            .min_order()
            .map_or("exact".into(), |o| format!("{o:.3}"));
        println!(
            "{:<10} {:>12} [{}]  bar {bar}  {}",
            format!("{q:?}"),
            min,
            orders.join(", "),
            if pass { "PASS" } else { "FAIL" }
        );
        checks.push(CheckResult { check, bar, pass });
    }
    let all = checks.iter().all(|c| c.pass);
    if let Some(dir) = &args.out {
        let report = PropCheckReport {
            density: density.spec().clone(),
            checks,
        };
        println!(
            "wrote {}",
            write_json(dir, "prop_check.json", &report)?.display()
        );
    }
    Ok(all.into())
}

pub fn oracle_test(
    instances: usize,
    max_n: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<Verdict> {
    let report = oracle_sweep(instances, max_n, seed)?;
    println!(
        "oracle-test: {} instances, {} mismatches, wraparound fixture {}",
        report.instances,
        report.mismatches.len(),
        if report.wraparound_fixture_ok {
            "ok"
        } else {
            "FAILED"
        }
    );
    for m in report.mismatches.iter().take(10) {
        println!("  mismatch: {m:?}");
    }
    if let Some(dir) = out {
        println!(
            "wrote {}",
            write_json(dir, "oracle_test.json", &report)?.display()
        );
    }
    Ok(report.passed().into())
}

#[derive(Serialize)]
struct Sigma2nReport {
    density: DensitySpec,
    r: f64,
    mu_n: f64,
    seed: u64,
    estimate: McEstimate,
    relative_error: f64,
    /// `sigma_2n^2 / r^3`
    normalized: f64,
}

pub fn sigma2n(args: &DensityArgs, samples: usize, seed: u64, tolerance: f64) -> Result<Verdict> {
    let (density, r) = resolve_density(args, None)?;
    let r = require_r(r)?;
    let mu = mu_n(&density, r)?.exact;
    let estimate = sigma2n_sq_mc(&density, r, mu, samples, &mut derive_stream(seed, u64::MAX))?;
    let rel = estimate.relative_error();
    let report = Sigma2nReport {
        density: density.spec().clone(),
        r,
        mu_n: mu,
        seed,
        estimate,
        relative_error: rel,
        normalized: estimate.estimate / r.powi(3),
    };
    println!(
        "sigma_2n^2 = {:.6e} +- {:.2e} ({:.2}%), sigma_2n^2 / r^3 = {:.5}",
        estimate.estimate,
        estimate.std_error,
        100.0 * rel,
        report.normalized
    );
    let pass = rel < tolerance;
    println!("sigma2n: {}", if pass { "PASS" } else { "FAIL" });
    if let Some(dir) = &args.out {
        println!(
            "wrote {}",
            write_json(dir, "sigma2n.json", &report)?.display()
        );
    }
    Ok(pass.into())
}
