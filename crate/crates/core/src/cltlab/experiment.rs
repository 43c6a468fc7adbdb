use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{summarize_z, ZStats};
use crate::analytics::{
    classify_regime, mu_n, scaling, sigma2n_sq_mc, twopath_count_leading, McEstimate, Regime,
    RegimeKind, StandardizationInputs, Thresholds,
};
use crate::density::{CircularDensity, DensitySpec};
use crate::error::{Error, Result};
use crate::geometry::{clustering_coefficient, counts, Radius, SubgraphCounts};
use crate::sampler::{derive_stream, sample_points};
use crate::CODE_VERSION;

/// Fixed header of the records CSV.
pub const RECORDS_HEADER: [&str; 7] =
    ["index", "edges", "two_paths", "triangles", "c_n", "z", "ms"];

const RECORDS_FILE: &str = "records.csv";
const SUMMARY_FILE: &str = "summary.json";
const PLOT_FILE: &str = "plot_z.py";

/// Stream index reserved for the sigma_2n Monte Carlo run.
const SIGMA2N_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusRule {
    Fixed {
        value: f64,
    },
    /// `r = c n^(-alpha)`
    PowerLaw {
        c: f64,
        alpha: f64,
    },
}

impl RadiusRule {
    pub fn resolve(&self, n: usize) -> Result<f64> {
        let r = match *self {
            RadiusRule::Fixed { value } => value,
            RadiusRule::PowerLaw { c, alpha } => c * (n as f64).powf(-alpha),
        };
        if r > 0.0 && r <= 0.5 {
            Ok(r)
        } else {
            Err(Error::Config(format!("radius {r} is outside (0, 0.5]")))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Dense,
    Intermediate,
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub plot_script: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub density: DensitySpec,
    pub n: usize,
    pub radius: RadiusRule,
    #[serde(default)]
    pub regime: RegimeChoice,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default = "default_sigma2n_samples")]
    pub sigma2n_samples: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Fill the `ms` column. Off by default so reruns give identical files.
    #[serde(default)]
    pub record_timings: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn default_sigma2n_samples() -> usize {
    2_000_000
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the invariants and returns the density and resolved radius.
    pub fn validate(&self) -> Result<(CircularDensity, f64)> {
        if self.replications < 2 {
            return Err(Error::Config(format!(
                "replications must be >= 2, got {}",
                self.replications
            )));
        }
        if self.n < 3 {
            return Err(Error::Config(format!("n must be >= 3, got {}", self.n)));
        }
        let density =
            CircularDensity::new(self.density.clone()).map_err(|e| Error::Config(e.to_string()))?;
        let r = self.radius.resolve(self.n)?;
        Ok((density, r))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: u64,
    pub counts: SubgraphCounts,
    pub c_n: Option<f64>,
    pub z: Option<f64>,
    pub ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub index: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub code_version: String,
    pub config: ExperimentConfig,
    pub r: f64,
    pub regime: Regime,
    /// Regime whose standardization produced `z`.
    pub standardization: RegimeKind,
    pub mu_n: f64,
    pub mu_n_expansion: f64,
    pub scaling: f64,
    pub sigma2n_sq: Option<McEstimate>,
    pub replications: usize,
    pub r_effective: usize,
    pub skipped: Vec<Skip>,
    pub z: Option<ZStats>,
    pub mean_c_n: Option<f64>,
    pub stderr_c_n: Option<f64>,
    /// Mean of `two_paths / (4 n³ r² E[f²])`.
    pub mean_two_path_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<ReplicationRecord>,
    pub summary: ExperimentSummary,
}

fn chosen_kind(choice: RegimeChoice, regime: &Regime) -> Result<RegimeKind> {
    if regime.kind == RegimeKind::Degenerate {
        return Err(Error::RegimeRefused(format!(
            "{regime}: too few triangles for any limit law"
        )));
    }
    match choice {
        RegimeChoice::Auto if regime.kind.is_refused() => Err(Error::RegimeRefused(format!(
            "{regime}: no regime condition holds; force one with \"regime\""
        ))),
        RegimeChoice::Auto => Ok(regime.kind),
        RegimeChoice::Dense => Ok(RegimeKind::DenseI),
        RegimeChoice::Intermediate => Ok(RegimeKind::IntermediateII),
        RegimeChoice::Sparse => Ok(RegimeKind::SparseIII),
    }
}

/// Runs every replication of `config`. `threads = None` uses all cores.
///
/// Replication `i` draws from `derive_stream(master_seed, i)`, so results do
/// not depend on the thread count.
pub fn run_experiment(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ExperimentOutcome> {
    let (density, r) = config.validate()?;
    let n = config.n;
    let constants = density.constants()?;
    let regime = classify_regime(
        n,
        r,
        constants.sigma1_sq,
        density.is_uniform(),
        &config.thresholds,
    );
    let kind = chosen_kind(config.regime, &regime)?;
    let mu = mu_n(&density, r)?;
    let sigma2n = if kind == RegimeKind::IntermediateII {
        let mut stream = derive_stream(config.master_seed, SIGMA2N_STREAM);
        Some(sigma2n_sq_mc(
            &density,
            r,
            mu.exact,
            config.sigma2n_samples,
            &mut stream,
        )?)
    } else {
        None
    };
    let inputs = StandardizationInputs {
        mu_n: mu.exact,
        e_f2: constants.moments.e_f2,
        sigma1_sq: constants.sigma1_sq,
        sigma2n_sq: sigma2n.map(|s| s.estimate),
    };
    let scale = scaling(kind, n, r, &inputs)?;
    let radius = Radius::new(r)?;

    let replicate = |index: u64| -> Result<ReplicationRecord> {
        let start = Instant::now();
        let mut stream = derive_stream(config.master_seed, index);
        let sample = sample_points(&density, n, &mut stream)?;
        let c = counts(&sample, radius)?;
        let c_n = clustering_coefficient(&c);
        let ms = config
            .record_timings
            .then(|| start.elapsed().as_secs_f64() * 1e3);
        Ok(ReplicationRecord {
            index,
            counts: c,
            c_n,
            z: c_n.map(|v| scale * (v - mu.exact)),
            ms,
            skip_reason: c_n
                .is_none()
                .then(|| "no 2-paths: C_n undefined".to_string()),
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let records: Vec<ReplicationRecord> = pool.install(|| {
        (0..config.replications as u64)
            .into_par_iter()
            .map(replicate)
            .collect::<Result<_>>()
    })?;

    let paths_scale = twopath_count_leading(n, r, constants.moments.e_f2);
    let summary = summarize(
        config,
        &records,
        Summarized {
            r,
            regime,
            kind,
            mu_n: mu.exact,
            mu_n_expansion: mu.expansion,
            scale,
            sigma2n,
            paths_scale,
        },
    )?;
    Ok(ExperimentOutcome { records, summary })
}

struct Summarized {
    r: f64,
    regime: Regime,
    kind: RegimeKind,
    mu_n: f64,
    mu_n_expansion: f64,
    scale: f64,
    sigma2n: Option<McEstimate>,
    paths_scale: f64,
}

fn summarize(
    config: &ExperimentConfig,
    records: &[ReplicationRecord],
    s: Summarized,
) -> Result<ExperimentSummary> {
    let z: Vec<f64> = records.iter().filter_map(|r| r.z).collect();
    let cs: Vec<f64> = records.iter().filter_map(|r| r.c_n).collect();
    let skipped = records
        .iter()
        .filter(|r| r.c_n.is_none())
        .map(|r| Skip {
            index: r.index,
            reason: r.skip_reason.clone().unwrap_or_default(),
        })
        .collect();
    let z_stats = if z.len() >= 2 {
        Some(summarize_z(&z)?)
    } else {
        None
    };
    let (mean_c_n, stderr_c_n) = match cs.len() {
        0 => (None, None),
        1 => (Some(cs[0]), None),
        m => {
            let mean = cs.iter().sum::<f64>() / m as f64;
            let var = cs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (Some(mean), Some((var / m as f64).sqrt()))
        }
    };
    let mean_two_path_ratio = records
        .iter()
        .map(|r| r.counts.ordered_two_paths as f64 / s.paths_scale)
        .sum::<f64>()
        / records.len() as f64;
    Ok(ExperimentSummary {
        code_version: CODE_VERSION.to_string(),
        config: config.clone(),
        r: s.r,
        regime: s.regime,
        standardization: s.kind,
        mu_n: s.mu_n,
        mu_n_expansion: s.mu_n_expansion,
        scaling: s.scale,
        sigma2n_sq: s.sigma2n,
        replications: records.len(),
        r_effective: z.len(),
        skipped,
        z: z_stats,
        mean_c_n,
        stderr_c_n,
        mean_two_path_ratio,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field == "NA" || field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::InvalidArgument(format!("bad number {field:?} in records")))
}

/// One row per replication under [`RECORDS_HEADER`]. Undefined values are
/// written as `NA`; `ms` is empty when timings were not recorded.
pub fn write_records_csv<W: std::io::Write>(records: &[ReplicationRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record([
            r.index.to_string(),
            r.counts.edges.to_string(),
            r.counts.ordered_two_paths.to_string(),
            r.counts.triangles.to_string(),
            fmt_opt(r.c_n),
            fmt_opt(r.z),
            r.ms.map(|m| format!("{m:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_records_csv`]; `n` fills [`SubgraphCounts::n`].
pub fn read_records_csv<R: std::io::Read>(input: R, n: usize) -> Result<Vec<ReplicationRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(RECORDS_HEADER) {
        return Err(Error::InvalidArgument("unexpected records header".into()));
    }
    let int = |s: &str| -> Result<u128> {
        s.parse()
            .map_err(|_| Error::InvalidArgument(format!("bad integer {s:?} in records")))
    };
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let c_n = parse_opt(&row[4])?;
        out.push(ReplicationRecord {
            index: int(&row[0])? as u64,
            counts: SubgraphCounts {
                n,
                edges: int(&row[1])? as u64,
                ordered_two_paths: int(&row[2])?,
                triangles: int(&row[3])?,
            },
            c_n,
            z: parse_opt(&row[5])?,
            ms: parse_opt(&row[6])?,
            skip_reason: c_n
                .is_none()
                .then(|| "no 2-paths: C_n undefined".to_string()),
        });
    }
    Ok(out)
}

/// Python script drawing the z histogram against the standard normal
/// density and a normal QQ plot. It reads only the records CSV beside it.
pub fn write_plot_script(path: impl AsRef<Path>) -> Result<()> {
    let script = format!(
        r#"import csv
import math
import os
from statistics import NormalDist

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{RECORDS_FILE}")) as fh:
    z = sorted(float(row["z"]) for row in csv.DictReader(fh) if row["z"] != "NA")

fig, (ax_hist, ax_qq) = plt.subplots(1, 2, figsize=(10, 4))
ax_hist.hist(z, bins=40, density=True, alpha=0.6)
xs = [-4 + 8 * i / 400 for i in range(401)]
ax_hist.plot(xs, [math.exp(-x * x / 2) / math.sqrt(2 * math.pi) for x in xs])
ax_hist.set_xlabel("z")

m = len(z)
q = [NormalDist().inv_cdf((i + 0.5) / m) for i in range(m)]
ax_qq.scatter(q, z, s=4)
lo, hi = min(q[0], z[0]), max(q[-1], z[-1])
ax_qq.plot([lo, hi], [lo, hi])
ax_qq.set_xlabel("normal quantile")
ax_qq.set_ylabel("z")

fig.tight_layout()
fig.savefig(os.path.join(here, "z_plots.png"), dpi=120)
"#
    );
    fs::write(path, script)?;
    Ok(())
}

/// Writes `records.csv`, `summary.json` and, if asked, `plot_z.py` into
/// `dir`. Returns the written paths.
pub fn write_outputs(
    outcome: &ExperimentOutcome,
    dir: impl AsRef<Path>,
    plot_script: bool,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let records = dir.join(RECORDS_FILE);
    write_records_csv(&outcome.records, fs::File::create(&records)?)?;
    let summary = dir.join(SUMMARY_FILE);
    let mut json = serde_json::to_string_pretty(&outcome.summary)?;
    json.push('\n');
    fs::write(&summary, json)?;
    let mut written = vec![records, summary];
    if plot_script {
        let plot = dir.join(PLOT_FILE);
        write_plot_script(&plot)?;
        written.push(plot);
    }
    Ok(written)
}
