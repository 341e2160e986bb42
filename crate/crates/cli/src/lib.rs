//! Plumbing behind the `randsimplex` binary: experiment configs, suite
//! files, report documents, and the moment-table generator.

use randsimplex::exact::ball_simplex_moment;
use randsimplex::montecarlo::estimate_simplex_moment;
use randsimplex::{
    Ellipsoid, Family, IdentityParams, IdentityReport, RandomStream, VerifyPolicy,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// One verification experiment, as written in suite files and assembled
/// from `verify` flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub identity: String,
    pub d: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub semi_axes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<VerifyPolicy>,
}

impl ExperimentConfig {
    /// Field-level checks with messages naming the offending field; used to
    /// reject a suite entry before any sampling starts.
    pub fn validate(&self) -> Result<(), String> {
        randsimplex::montecarlo::canonical_identity(&self.identity)
            .map_err(|_| format!("field 'identity': unknown identity '{}'", self.identity))?;
        if self.semi_axes.len() != self.d {
            return Err(format!(
                "field 'semi_axes': length {} does not match d = {}",
                self.semi_axes.len(),
                self.d
            ));
        }
        if self.semi_axes.iter().any(|&a| !(a > 0.0)) {
            return Err("field 'semi_axes': entries must be positive".into());
        }
        if self.samples < 2 {
            return Err(format!("field 'samples': need at least 2, got {}", self.samples));
        }
        if self.workers == Some(0) {
            return Err("field 'workers': must be at least 1".into());
        }
        Ok(())
    }

    pub fn params(&self) -> IdentityParams {
        IdentityParams {
            d: self.d,
            k: self.k,
            p: self.p,
            semi_axes: self.semi_axes.clone(),
            rotation_seed: self.rotation_seed,
            family: self.family,
        }
    }

    pub fn run(&self, default_workers: usize) -> randsimplex::Result<IdentityReport> {
        let workers = self.workers.unwrap_or(default_workers).max(1);
        let policy = self.policy.unwrap_or_default();
        randsimplex::verify_identity(
            &self.identity,
            &self.params(),
            self.samples,
            self.seed,
            workers,
            &policy,
        )
    }
}

/// Suite file: a list of experiments run sequentially.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteFile {
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub results: Vec<IdentityReport>,
    pub summary: SuiteSummary,
}

/// Run-environment details, kept in a block separate from the numeric
/// report so golden-file comparisons can ignore it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub timestamp_unix: u64,
    pub tool_version: String,
    pub os: String,
    pub arch: String,
}

impl Meta {
    pub fn capture() -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Meta {
            timestamp_unix,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

/// Top-level output document: deterministic `report` plus volatile `meta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document<T> {
    pub report: T,
    pub meta: Meta,
}

impl<T: Serialize> Document<T> {
    pub fn new(report: T) -> Self {
        Document { report, meta: Meta::capture() }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

fn family_str(f: Family) -> &'static str {
    match f {
        Family::UniformBallIid => "uniform-ball-iid",
        Family::GaussianIid => "gaussian-iid",
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per identity report. Floats use the shortest round-trip
/// representation, so parsing the field back recovers the exact value.
pub fn reports_to_csv(reports: &[IdentityReport]) -> String {
    let mut out = String::from(
        "identity,d,k,p,semi_axes,rotation_seed,family,lhs_value,lhs_stderr,rhs_value,\
         rhs_stderr,z_score,ks_stat,ks_p_value,pass,heavy_tail,n,seed,workers\n",
    );
    for r in reports {
        let axes = r
            .params
            .semi_axes
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.identity,
            r.params.d,
            r.params.k,
            opt_f64(r.params.p),
            axes,
            r.params.rotation_seed.map(|s| s.to_string()).unwrap_or_default(),
            r.params.family.map(family_str).unwrap_or_default(),
            r.lhs.value(),
            r.lhs.stderr(),
            r.rhs.value(),
            r.rhs.stderr(),
            opt_f64(r.z_score),
            opt_f64(r.ks_stat),
            opt_f64(r.ks_p_value),
            r.pass,
            r.heavy_tail,
            r.n,
            r.seed,
            r.workers
        )
        .expect("string write");
    }
    out
}

/// Default worker count: the RANDSIMPLEX_WORKERS environment variable if
/// set, otherwise the machine's available parallelism.
pub fn default_workers() -> Result<usize, String> {
    match std::env::var("RANDSIMPLEX_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w >= 1)
            .ok_or_else(|| format!("RANDSIMPLEX_WORKERS: expected a positive integer, got '{v}'")),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Write to the given path, or stdout when no path is set.
pub fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// One row of the moment table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub d: usize,
    pub k: usize,
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// Closed form, present when the body is a ball (possibly scaled).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub n: u64,
    pub seed: u64,
}

/// Estimate simplex moments over a (d, k, p) grid. `semi_axes`, when set,
/// pins d to its length; otherwise each d uses the unit ball and the exact
/// column is filled from the closed form.
pub fn run_table(
    d_range: (usize, usize),
    k_range: (usize, usize),
    p_list: &[f64],
    semi_axes: Option<&[f64]>,
    n: u64,
    seed: u64,
    workers: usize,
) -> randsimplex::Result<Vec<TableRow>> {
    let (d_lo, d_hi) = d_range;
    if d_lo < 1 || d_lo > d_hi {
        return Err(randsimplex::Error::Validation(format!(
            "invalid d range {d_lo}..{d_hi}"
        )));
    }
    let (k_lo, k_hi) = k_range;
    if k_lo < 1 || k_lo > k_hi {
        return Err(randsimplex::Error::Validation(format!(
            "invalid k range {k_lo}..{k_hi}"
        )));
    }
    if p_list.is_empty() {
        return Err(randsimplex::Error::Validation("empty p list".into()));
    }
    if let Some(axes) = semi_axes {
        if axes.len() < d_lo || axes.len() > d_hi || d_lo != d_hi {
            return Err(randsimplex::Error::Validation(format!(
                "semi_axes length {} requires a single d equal to it",
                axes.len()
            )));
        }
    }
    let root = RandomStream::new(seed);
    let mut rows = Vec::new();
    let mut index = 0u64;
    for d in d_lo..=d_hi {
        let e = match semi_axes {
            Some(axes) => Ellipsoid::from_semi_axes(axes, None)?,
            None => Ellipsoid::unit_ball(d)?,
        };
        let ball_radius = {
            let axes = e.semi_axes();
            let r = axes[0];
            axes.iter().all(|&a| a == r).then_some(r)
        };
        for k in k_lo..=k_hi.min(d) {
            for &p in p_list {
                let est =
                    estimate_simplex_moment(&root.split(index), &e, k, p, n, workers)?;
                index += 1;
                let exact = match ball_radius {
                    Some(r) => {
                        Some(ball_simplex_moment(d, k, p)? * r.powf(p * k as f64))
                    }
                    None => None,
                };
                rows.push(TableRow {
                    d,
                    k,
                    p,
                    estimate: est.value,
                    stderr: est.stderr,
                    exact,
                    n,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn table_to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("d,k,p,estimate,stderr,exact,n,seed\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.d,
            r.k,
            r.p,
            r.estimate,
            r.stderr,
            r.exact.map(|x| x.to_string()).unwrap_or_default(),
            r.n,
            r.seed
        )
        .expect("string write");
    }
    out
}
