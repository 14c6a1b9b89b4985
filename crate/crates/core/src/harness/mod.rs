//! Experiment orchestration: configuration, per-level seeds, CSV output and
//! run manifests. The `gfflab` binary is a thin shell around [`run`].
//!
//! Each run writes `<subcommand>.csv` (plus optional rasters) and
//! `manifest.txt` into the output directory. The manifest records everything
//! needed to regenerate the tables bit for bit on the same build.

mod config;

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

pub use config::{parse_config, ExperimentConfig, StatsTest};
pub use crate::ensemble::{derive_seed, SEED_RULE};

use crate::crossing;
use crate::ensemble::{Ensemble, Stream};
use crate::error::{Error, Result};
use crate::excursions::{write_raster, Mode};
use crate::lattice::LatticeDomain;
use crate::minkowski;
use crate::spinmodel;
use crate::stats::{self, HEIGHT_GAP};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Sample,
    Decompose,
    Minkowski,
    Crossing,
    Spin,
    Stats,
    Markov,
    Conjecture,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::Sample,
        Subcommand::Decompose,
        Subcommand::Minkowski,
        Subcommand::Crossing,
        Subcommand::Spin,
        Subcommand::Stats,
        Subcommand::Markov,
        Subcommand::Conjecture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Sample => "sample",
            Subcommand::Decompose => "decompose",
            Subcommand::Minkowski => "minkowski",
            Subcommand::Crossing => "crossing",
            Subcommand::Spin => "spin",
            Subcommand::Stats => "stats",
            Subcommand::Markov => "markov",
            Subcommand::Conjecture => "conjecture",
        }
    }

    /// Column schema of the main table.
    pub fn csv_header(self) -> &'static str {
        match self {
            Subcommand::Sample => "n,replica,field_seed,vertices,mean,variance,min,max,f_name,pairing",
            Subcommand::Decompose => "n,replica,rank,sign,vertices,diameter,mass",
            Subcommand::Minkowski => minkowski::CSV_HEADER,
            Subcommand::Crossing => crossing::CSV_HEADER,
            Subcommand::Spin => spinmodel::CSV_HEADER,
            Subcommand::Stats => "n,test,quantity,value,se,threshold,passed",
            Subcommand::Markov => "n,probe,i,j,M,statistic,se,z,vertex_dirichlet,vertex_dirichlet_se,skipped",
            Subcommand::Conjecture => {
                "n,mode,M,statistic,se,target,relative_error,hole_statistic,hole_se,regions,holes"
            }
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Subcommand::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

/// Base seed of the ensemble at level `n`, so levels are independent.
pub fn level_seed(base: u64, n: u32) -> u64 {
    derive_seed(base, (1u64 << 32) | n as u64, Stream::Auxiliary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: Subcommand,
    pub config_echo: String,
    pub base_seed: u64,
    pub seed_rule: &'static str,
    pub version: &'static str,
    pub level_seeds: Vec<(u32, u64)>,
    pub wall_clock_seconds: f64,
    /// `(file name, data rows)`.
    pub row_counts: Vec<(String, usize)>,
    /// Human-readable results, one per line.
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "subcommand = {}", self.subcommand);
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "base_seed = {}", self.base_seed);
        let _ = writeln!(s, "seed_rule = {}", self.seed_rule);
        let levels: Vec<String> = self.level_seeds.iter().map(|(n, seed)| format!("{n}:{seed}")).collect();
        let _ = writeln!(s, "level_seeds = {}", levels.join(", "));
        let _ = writeln!(s, "wall_clock_seconds = {:.3}", self.wall_clock_seconds);
        for (file, rows) in &self.row_counts {
            let _ = writeln!(s, "rows {file} = {rows}");
        }
        let _ = writeln!(s, "status = {}", if self.failures.is_empty() { "pass" } else { "fail" });
        for line in &self.summary {
            let _ = writeln!(s, "summary: {line}");
        }
        for line in &self.failures {
            let _ = writeln!(s, "failure: {line}");
        }
        s.push_str("\n# configuration\n");
        s.push_str(&self.config_echo);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.manifest.failures.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            exit::PASS
        } else {
            exit::ASSERTION
        }
    }
}

/// Exit code for an error returned by [`run`] or [`parse_config`].
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => exit::IO,
        _ => exit::CONFIG,
    }
}

/// Rows of the main table plus what to report.
#[derive(Default)]
struct Report {
    rows: Vec<String>,
    extra_files: Vec<(String, Vec<u8>)>,
    summary: Vec<String>,
    failures: Vec<String>,
}

pub fn run(config: &ExperimentConfig, subcommand: Subcommand) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut report = Report::default();
    for &n in &config.n_list {
        let seed = level_seed(config.seed, n);
        match subcommand {
            Subcommand::Crossing => crossing_level(config, n, seed, &mut report)?,
            _ => {
                let domain = Arc::new(LatticeDomain::build(&config.domain, n)?);
                let ens = Ensemble::new(domain, seed)?;
                match subcommand {
                    Subcommand::Sample => sample_level(config, &ens, &mut report),
                    Subcommand::Decompose => decompose_level(config, &ens, &mut report)?,
                    Subcommand::Minkowski => minkowski_level(config, &ens, &mut report)?,
                    Subcommand::Spin => spin_level(config, &ens, &mut report)?,
                    Subcommand::Stats => stats_level(config, &ens, &mut report)?,
                    Subcommand::Markov => markov_level(config, &ens, &mut report)?,
                    Subcommand::Conjecture => conjecture_level(config, &ens, &mut report)?,
                    Subcommand::Crossing => unreachable!(),
                }
            }
        }
    }
    if subcommand == Subcommand::Spin {
        spin_trend(&mut report);
    }

    fs::create_dir_all(&config.out)?;
    let mut files = Vec::new();
    let main = format!("{subcommand}.csv");
    let path = config.out.join(&main);
    let mut body = String::with_capacity(64 * report.rows.len());
    body.push_str(subcommand.csv_header());
    body.push('\n');
    for r in &report.rows {
        body.push_str(r);
        body.push('\n');
    }
    write_file(&path, body.as_bytes())?;
    files.push(path);
    let mut row_counts = vec![(main, report.rows.len())];
    for (name, bytes) in &report.extra_files {
        let path = config.out.join(name);
        write_file(&path, bytes)?;
        files.push(path);
        row_counts.push((name.clone(), 0));
    }

    let manifest = RunManifest {
        subcommand,
        config_echo: config.to_text(),
        base_seed: config.seed,
        seed_rule: SEED_RULE,
        version: VERSION,
        level_seeds: config.n_list.iter().map(|&n| (n, level_seed(config.seed, n))).collect(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        row_counts,
        summary: report.summary,
        failures: report.failures,
    };
    let path = config.out.join("manifest.txt");
    write_file(&path, manifest.to_text().as_bytes())?;
    files.push(path);
    Ok(RunOutcome { manifest, files })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(bytes)?;
    w.flush()?;
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

fn sample_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) {
    let n = ens.domain().level();
    let f = config.function.sample(ens.domain());
    for r in 0..config.samples as u64 {
        let field = ens.field(r);
        let w = field.values().iter().fold(stats::Welford::default(), |mut w, &x| {
            w.push(x);
            w
        });
        let (lo, hi) = field.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        report.rows.push(format!(
            "{n},{r},{},{},{},{},{lo},{hi},{},{}",
            derive_seed(ens.seed(), r, Stream::Field),
            w.count(),
            w.mean(),
            w.variance(),
            config.function.name(),
            field.pair(&f)
        ));
    }
    report.summary.push(format!("n={n}: {} fields on {} vertices", config.samples, ens.domain().num_interior()));
}

fn decompose_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let n = ens.domain().level();
    let mut worst = 0.0f64;
    let mut clusters = 0;
    for r in 0..config.samples as u64 {
        let rep = ens.replica(r);
        let dec = rep.decompose(config.mode);
        let rebuilt = dec.reconstruct(&rep.field)?;
        let scale = rep.field.values().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let err = rebuilt.values().iter().zip(rep.field.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err / scale);
        clusters += dec.len();
        for (k, c) in dec.clusters().iter().enumerate() {
            report.rows.push(format!("{n},{r},{},{},{},{},{}", k + 1, c.sign.value(), c.len(), c.diameter, c.mass));
        }
        if config.raster && r == 0 {
            let mut bytes = Vec::new();
            write_raster(&dec, &mut bytes)?;
            report.extra_files.push((format!("raster_n{n}.pgm"), bytes));
        }
    }
    report.summary.push(format!(
        "n={n}: {:.1} clusters per sample, max relative reconstruction error {worst:e}",
        clusters as f64 / config.samples as f64
    ));
    if worst > 1e-12 {
        report.failures.push(format!("n={n}: reconstruction error {worst:e} exceeds 1e-12"));
    }
    Ok(())
}

fn minkowski_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let domain = ens.domain();
    let n = domain.level();
    let h = domain.mesh();
    let radii: Vec<f64> = config.radii.iter().map(|r| r * h).collect();
    let f = config.function.sample(domain);
    let (mut lo, mut hi, mut skipped) = (f64::INFINITY, 0.0f64, 0);
    for r in 0..config.samples as u64 {
        let rep = ens.replica(r);
        let dec = rep.decompose(config.mode);
        for (k, c) in dec.clusters().iter().take(config.clusters).enumerate() {
            let rows = match minkowski::gauge_ratio(c, &rep.field, &radii, &f) {
                Ok(rows) => rows,
                Err(Error::ZeroMass) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            for row in rows.iter().filter(|row| row.resolution == minkowski::Resolution::Window) {
                lo = lo.min(row.ratio);
                hi = hi.max(row.ratio);
            }
            let mut buf = Vec::new();
            minkowski::write_csv_rows(&mut buf, n, k + 1, &rows)?;
            report.rows.extend(String::from_utf8_lossy(&buf).lines().map(str::to_owned));
        }
    }
    if hi > 0.0 {
        report.summary.push(format!("n={n}: in-window ratios span [{lo:.4}, {hi:.4}] (factor {:.3})", hi / lo));
    } else {
        report.summary.push(format!("n={n}: no radius inside the resolution window"));
    }
    if skipped > 0 {
        report.summary.push(format!("n={n}: {skipped} clusters with zero field mass skipped"));
    }
    Ok(())
}

fn crossing_level(config: &ExperimentConfig, n: u32, seed: u64, report: &mut Report) -> Result<()> {
    let rows = crossing::continuity_scan(&config.a_grid, &config.b_grid, &[n], config.samples, seed)?;
    let mut buf = Vec::new();
    crossing::write_csv(&mut buf, &rows)?;
    report.rows.extend(String::from_utf8_lossy(&buf).lines().skip(1).map(str::to_owned));
    for r in &rows {
        if r.spec.a == r.spec.b && r.estimate.successes != r.estimate.samples {
            report.failures.push(format!("n={n}: p_hat({a},{a}) = {} != 1", r.estimate.p_hat, a = r.spec.a));
        }
    }
    // Same replicas for every b, so the counts must be monotone exactly.
    for x in &rows {
        for y in &rows {
            if x.spec.a == y.spec.a && x.spec.b < y.spec.b && x.estimate.successes < y.estimate.successes {
                report.failures.push(format!(
                    "n={n}: crossings increase from b={} to b={} at a={}",
                    x.spec.b, y.spec.b, x.spec.a
                ));
            }
        }
    }
    report
        .summary
        .push(format!("n={n}: max |p_hat(a,b) - p_hat(a,b')| = {:.4}", crossing::max_shift_difference(&rows, n)));
    Ok(())
}

fn spin_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let n = ens.domain().level();
    let f = config.function.sample(ens.domain());
    let est = spinmodel::spin_discrepancy(ens, &f, config.samples)?;
    let exact = if ens.domain().num_interior() <= config.exact_max_vertices {
        Some(spinmodel::spin_discrepancy_exact(ens.green(), &f)?)
    } else {
        None
    };
    let mut buf = Vec::new();
    spinmodel::write_csv_row(&mut buf, n, config.function.name(), &est, exact)?;
    report.rows.push(String::from_utf8_lossy(&buf).trim_end().to_owned());
    match exact {
        Some(x) => {
            let z = if est.se > 0.0 { (est.mean - x) / est.se } else { 0.0 };
            report.summary.push(format!("n={n}: discrepancy {:.6} +- {:.6}, closed form {x:.6} (z = {z:.2})", est.mean, est.se));
            if z.abs() > 3.0 {
                report.failures.push(format!("n={n}: Monte Carlo discrepancy {z:.2} s.e. from the closed form"));
            }
        }
        None => report.summary.push(format!("n={n}: discrepancy {:.6} +- {:.6}", est.mean, est.se)),
    }
    Ok(())
}

fn spin_trend(report: &mut Report) {
    let values: Vec<f64> = report.rows.iter().filter_map(|r| r.split(',').nth(3)?.parse().ok()).collect();
    if values.len() > 1 {
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        report.summary.push(format!("discrepancy decreasing across levels: {decreasing}"));
    }
}

struct StatsRows<'a> {
    n: u32,
    test: StatsTest,
    rows: &'a mut Vec<String>,
}

impl StatsRows<'_> {
    fn push(&mut self, quantity: &str, value: f64, se: Option<f64>, threshold: Option<f64>, passed: Option<bool>) {
        let passed = passed.map_or(String::new(), |p| p.to_string());
        self.rows.push(format!("{},{},{quantity},{value},{},{},{passed}", self.n, self.test, opt(se), opt(threshold)));
    }
}

fn stats_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let n = ens.domain().level();
    let test = config.test;
    let mut out = StatsRows { n, test, rows: &mut report.rows };
    let f = config.function.sample(ens.domain());
    let ok = match test {
        StatsTest::L2Identity => {
            let r = stats::l2_identity_check(ens, &f, &config.ranks, config.samples)?;
            out.push("lhs", r.lhs.mean, Some(r.lhs.se), None, None);
            out.push("rhs", r.rhs.mean, Some(r.rhs.se), None, None);
            let diff_ok = r.difference.mean.abs() <= 3.0 * r.pooled_se;
            out.push("difference", r.difference.mean, Some(r.difference.se), Some(3.0 * r.pooled_se), Some(diff_ok));
            out.push("max_linear_gap", r.max_linear_gap, None, Some(1e-10), Some(r.max_linear_gap <= 1e-10));
            report.summary.push(format!("n={n}: lhs - rhs = {:.3e} (pooled s.e. {:.3e})", r.difference.mean, r.pooled_se));
            r.passed()
        }
        StatsTest::MomentInequality => {
            let r = stats::moment_inequality_check(ens, &f, &config.ranks, config.q, config.samples)?;
            out.push("lhs", r.lhs.mean, Some(r.lhs.se), None, None);
            out.push("rhs", r.rhs.mean, Some(r.rhs.se), None, None);
            out.push("difference", r.lhs.mean - r.rhs.mean, Some(r.pooled_se), Some(-3.0 * r.pooled_se), Some(r.passed()));
            report.summary.push(format!("n={n}: q={} lhs {:.4e} vs rhs {:.4e}", r.q, r.lhs.mean, r.rhs.mean));
            r.passed()
        }
        StatsTest::SignIndependence => {
            let r = stats::sign_independence_test(ens, config.top_k, config.samples, config.corrupt)?;
            let t = Some(r.threshold);
            for (k, m) in r.means.iter().enumerate() {
                out.push(&format!("mean_{}", k + 1), *m, None, t, Some(m.abs() <= r.threshold));
            }
            for ((j, k), c) in &r.pair_correlations {
                out.push(&format!("corr_{}_{}", j + 1, k + 1), *c, None, t, Some(c.abs() <= r.threshold));
            }
            for (k, c) in r.diameter_correlations.iter().enumerate() {
                out.push(&format!("corr_diameter_{}", k + 1), *c, None, t, Some(c.abs() <= r.threshold));
            }
            for (k, c) in r.mass_correlations.iter().enumerate() {
                out.push(&format!("corr_mass_{}", k + 1), *c, None, None, None);
            }
            report.summary.push(format!(
                "n={n}: {} samples used, {} skipped, threshold {:.4}{}",
                r.used,
                r.skipped,
                r.threshold,
                if r.corrupted { ", corrupted null" } else { "" }
            ));
            r.passed()
        }
        StatsTest::HeightGap => {
            let r = stats::height_gap_statistic(ens, config.mode, config.min_hole_vertices, config.samples)?;
            let ok = !r.insufficient_regions() && r.relative_error() <= 0.2;
            out.push("statistic", r.statistic.mean, Some(r.statistic.se), Some(0.2 * r.target), Some(ok));
            out.push("hole_statistic", r.hole_statistic.mean, Some(r.hole_statistic.se), None, None);
            out.push("target", r.target, None, None, None);
            report.summary.push(format!(
                "n={n}: statistic {:.4} +- {:.4} vs {:.4} ({:.1}% off) over {} regions",
                r.statistic.mean,
                r.statistic.se,
                r.target,
                100.0 * r.relative_error(),
                r.regions
            ));
            ok
        }
        StatsTest::TailNorm => {
            let domain = ens.domain();
            let nv = domain.num_interior();
            let full = stats::tail_norm(ens.green(), &vec![true; nv])?;
            out.push("full", full, None, None, None);
            let (origin, _, _) = domain.grid_box();
            let mut blocks = config.blocks.clone();
            blocks.sort_unstable_by(|a, b| b.cmp(a));
            blocks.dedup();
            let mut prev = full;
            let mut ok = true;
            for s in blocks {
                let s = s as i32;
                let mask: Vec<bool> = (0..nv)
                    .map(|v| {
                        let site = domain.site(v);
                        (site.i - origin.i).rem_euclid(s) != 0 && (site.j - origin.j).rem_euclid(s) != 0
                    })
                    .collect();
                let value = stats::tail_norm(ens.green(), &mask)?;
                let step = value < prev || (value == 0.0 && prev == 0.0);
                ok &= step;
                out.push(&format!("block_{s}"), value, None, Some(prev), Some(step));
                prev = value;
            }
            let empty = stats::tail_norm(ens.green(), &vec![false; nv])?;
            out.push("empty", empty, None, None, Some(empty == 0.0));
            report.summary.push(format!("n={n}: tail norms strictly decreasing with block size: {ok}"));
            ok && empty == 0.0
        }
    };
    if !ok {
        report.failures.push(format!("n={n}: {test} failed"));
    }
    Ok(())
}

fn markov_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let domain = ens.domain();
    let n = domain.level();
    let length = config.path_length.unwrap_or(1 << (n - 1));
    let path = stats::straight_path(domain, length)?;
    let probes = stats::default_probes(domain)?;
    let r = stats::markov_check(ens, &path, &probes, config.samples)?;
    for (k, p) in r.probes.iter().enumerate() {
        let site = domain.site(p.vertex);
        report.rows.push(format!(
            "{n},{},{},{},{},{},{},{},{},{},{}",
            k + 1,
            site.i,
            site.j,
            r.samples,
            p.statistic.mean,
            p.statistic.se,
            p.z(),
            p.vertex_dirichlet.mean,
            p.vertex_dirichlet.se,
            p.skipped
        ));
    }
    let zs: Vec<String> = r.probes.iter().map(|p| format!("{:.2}", p.z())).collect();
    report.summary.push(format!("n={n}: z = [{}], {:.1} clusters hit per sample", zs.join(", "), r.mean_hits));
    if !r.passed() {
        report.failures.push(format!("n={n}: Markov statistic outside 3 s.e."));
    }
    Ok(())
}

fn conjecture_level(config: &ExperimentConfig, ens: &Ensemble, report: &mut Report) -> Result<()> {
    let n = ens.domain().level();
    let mut stat = [0.0; 2];
    for (slot, mode) in [Mode::Metric, Mode::Discrete].into_iter().enumerate() {
        let r = stats::height_gap_statistic(ens, mode, config.min_hole_vertices, config.samples)?;
        stat[slot] = r.statistic.mean;
        let name = if mode == Mode::Metric { "metric" } else { "discrete" };
        report.rows.push(format!(
            "{n},{name},{},{},{},{},{},{},{},{},{}",
            r.samples,
            r.statistic.mean,
            r.statistic.se,
            r.target,
            r.relative_error(),
            r.hole_statistic.mean,
            r.hole_statistic.se,
            r.regions,
            r.holes
        ));
    }
    report.summary.push(format!(
        "n={n}: metric {:.4} (2 lambda = {:.4}), discrete {:.4} (lambda = {:.4}), ratio {:.3}",
        stat[0],
        HEIGHT_GAP.two_lambda,
        stat[1],
        HEIGHT_GAP.lambda,
        stat[0] / stat[1]
    ));
    Ok(())
}
