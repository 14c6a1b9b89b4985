//! Line-based experiment configuration.
//!
//! ```text
//! # comment
//! domain = square(side=2, center=0,0)
//! n = 6
//! samples = 200
//! seed = 7
//!
//! [crossing]
//! a_grid = 0.2, 0.3
//! b_grid = 0.5, 0.6
//! ```
//!
//! One `key = value` per line; `[section]` headers scope the keys that follow.
//! Blank lines and `#` comments are ignored. Every problem is reported with
//! its line number, not just the first.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{ConfigError, Error, Result};
use crate::excursions::Mode;
use crate::functions::TestFunction;
use crate::lattice::DomainShape;
use crate::stats::ClusterSet;

/// Which statistic `stats` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsTest {
    L2Identity,
    MomentInequality,
    SignIndependence,
    HeightGap,
    TailNorm,
}

impl StatsTest {
    pub const ALL: [StatsTest; 5] = [
        StatsTest::L2Identity,
        StatsTest::MomentInequality,
        StatsTest::SignIndependence,
        StatsTest::HeightGap,
        StatsTest::TailNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatsTest::L2Identity => "l2-identity",
            StatsTest::MomentInequality => "moment-inequality",
            StatsTest::SignIndependence => "sign-independence",
            StatsTest::HeightGap => "height-gap",
            StatsTest::TailNorm => "tail-norm",
        }
    }
}

impl fmt::Display for StatsTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatsTest {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        StatsTest::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<_> = StatsTest::ALL.iter().map(|t| t.name()).collect();
            format!("unknown test `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub domain: DomainShape,
    /// Level of single-level commands; also the default level list.
    pub n: u32,
    pub n_list: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub function: TestFunction,
    pub mode: Mode,
    pub raster: bool,
    pub a_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub test: StatsTest,
    pub top_k: usize,
    pub ranks: ClusterSet,
    pub q: u32,
    pub corrupt: bool,
    pub min_hole_vertices: usize,
    /// Radii in mesh units.
    pub radii: Vec<f64>,
    pub clusters: usize,
    /// Largest vertex count for which the quadratic closed form is evaluated.
    pub exact_max_vertices: usize,
    pub path_length: Option<usize>,
    /// Subdomain block sides (lattice units) for the tail norm.
    pub blocks: Vec<u32>,
}

impl ExperimentConfig {
    /// Defaults for everything but the domain and the level.
    pub fn with_defaults(domain: DomainShape, n: u32) -> Self {
        ExperimentConfig {
            domain,
            n,
            n_list: vec![n],
            samples: 100,
            seed: 0,
            out: PathBuf::from("out"),
            function: TestFunction::One,
            mode: Mode::Metric,
            raster: false,
            a_grid: vec![0.2, 0.3, 0.4],
            b_grid: vec![0.5, 0.6, 0.7],
            test: StatsTest::L2Identity,
            top_k: 8,
            ranks: ClusterSet::Ranks(vec![0]),
            q: 2,
            corrupt: false,
            min_hole_vertices: 16,
            radii: vec![2.0, 4.0, 8.0],
            clusters: 1,
            exact_max_vertices: 5000,
            path_length: None,
            blocks: vec![16, 8, 4, 2],
        }
    }

    /// Canonical text form; parses back to the same configuration.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let ints = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let ranks = match &self.ranks {
            ClusterSet::All => "all".to_string(),
            ClusterSet::Ranks(r) => r.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(", "),
        };
        let mode = match self.mode {
            Mode::Metric => "metric",
            Mode::Discrete => "discrete",
        };
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        put("domain", self.domain.to_string());
        put("n", self.n.to_string());
        put("n_list", ints(&self.n_list));
        put("samples", self.samples.to_string());
        put("seed", self.seed.to_string());
        put("out", self.out.display().to_string());
        put("f", self.function.name().to_string());
        put("mode", mode.to_string());
        put("raster", self.raster.to_string());
        s.push_str("\n[crossing]\n");
        s.push_str(&format!("a_grid = {}\nb_grid = {}\n", list(&self.a_grid), list(&self.b_grid)));
        s.push_str("\n[stats]\n");
        s.push_str(&format!(
            "test = {}\nk = {}\nranks = {}\nq = {}\ncorrupt = {}\nmin_hole_vertices = {}\nblocks = {}\n",
            self.test,
            self.top_k,
            ranks,
            self.q,
            self.corrupt,
            self.min_hole_vertices,
            ints(&self.blocks)
        ));
        s.push_str("\n[minkowski]\n");
        s.push_str(&format!("radii = {}\nclusters = {}\n", list(&self.radii), self.clusters));
        s.push_str("\n[spin]\n");
        s.push_str(&format!("exact_max_vertices = {}\n", self.exact_max_vertices));
        if let Some(p) = self.path_length {
            s.push_str(&format!("\n[markov]\npath_length = {p}\n"));
        }
        s
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("", &["domain", "n", "n_list", "samples", "seed", "out", "f", "mode", "raster"]),
    ("crossing", &["a_grid", "b_grid"]),
    ("stats", &["test", "k", "ranks", "q", "corrupt", "min_hole_vertices", "blocks"]),
    ("minkowski", &["radii", "clusters"]),
    ("spin", &["exact_max_vertices"]),
    ("markov", &["path_length"]),
];

struct Entry {
    value: String,
    line: usize,
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), message: message.into() }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| format!("cannot parse `{x}`")))
        .collect()
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

/// Parse and validate. On failure every problem found is returned.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut errors = Vec::new();
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            match name.strip_suffix(']') {
                Some(name) if KEYS.iter().any(|(s, _)| *s == name.trim() && !s.is_empty()) => {
                    section = name.trim().to_string();
                }
                Some(name) => errors.push(err(line, format!("unknown section [{}]", name.trim()))),
                None => errors.push(err(line, "unterminated section header")),
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(err(line, format!("expected `key = value`, got `{content}`")));
            continue;
        };
        let key = key.trim();
        let allowed = KEYS.iter().find(|(s, _)| *s == section).map_or(&[][..], |(_, k)| *k);
        if !allowed.contains(&key) {
            let scope = if section.is_empty() { "top level".to_string() } else { format!("section [{section}]") };
            errors.push(err(line, format!("unknown key `{key}` in {scope}")));
            continue;
        }
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        if let Some(prev) = entries.get(&full) {
            errors.push(err(line, format!("duplicate key `{full}` on lines {} and {line}", prev.line)));
            continue;
        }
        entries.insert(full, Entry { value: value.trim().to_string(), line });
    }

    let domain = match entries.get("domain") {
        None => {
            errors.push(ConfigError { line: None, message: "missing required key `domain`".into() });
            None
        }
        Some(e) => match e.value.parse::<DomainShape>() {
            Ok(d) => Some(d),
            Err(x) => {
                errors.push(err(e.line, format!("domain: {x}")));
                None
            }
        },
    };
    let level = |e: &Entry, v: u32, errors: &mut Vec<ConfigError>| {
        if !(2..=12).contains(&v) {
            errors.push(err(e.line, format!("n = {v} out of range (2..=12)")));
        }
    };
    let n = match entries.get("n") {
        None => {
            errors.push(ConfigError { line: None, message: "missing required key `n`".into() });
            None
        }
        Some(e) => match e.value.parse::<u32>() {
            Ok(v) => {
                level(e, v, &mut errors);
                Some(v)
            }
            Err(_) => {
                errors.push(err(e.line, format!("n: expected an integer, got `{}`", e.value)));
                None
            }
        },
    };

    let mut cfg = ExperimentConfig::with_defaults(domain.clone().unwrap_or_else(DomainShape::standard_square), n.unwrap_or(2));
    {
        let mut field = |key: &str, apply: &mut dyn FnMut(&str) -> std::result::Result<(), String>| {
            if let Some(e) = entries.get(key) {
                if let Err(m) = apply(&e.value) {
                    errors.push(err(e.line, format!("{key}: {m}")));
                }
            }
        };
        let positive = |x: usize, what: &str| if x >= 1 { Ok(()) } else { Err(format!("{what} must be at least 1")) };
        let unit = |v: &[f64]| {
            if v.is_empty() {
                Err("empty list".to_string())
            } else if let Some(x) = v.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                Err(format!("{x} outside (0, 1)"))
            } else {
                Ok(())
            }
        };

        field("n_list", &mut |s| {
            let v: Vec<u32> = parse_list(s)?;
            if v.is_empty() {
                return Err("empty list".into());
            }
            if let Some(x) = v.iter().find(|x| !(2..=12).contains(*x)) {
                return Err(format!("level {x} out of range (2..=12)"));
            }
            cfg.n_list = v;
            Ok(())
        });
        if !entries.contains_key("n_list") {
            cfg.n_list = vec![cfg.n];
        }
        field("samples", &mut |s| {
            let v: usize = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            positive(v, "samples")?;
            cfg.samples = v;
            Ok(())
        });
        field("seed", &mut |s| {
            cfg.seed = s.parse().map_err(|_| format!("expected an unsigned 64-bit integer, got `{s}`"))?;
            Ok(())
        });
        field("out", &mut |s| {
            if s.is_empty() {
                return Err("empty path".into());
            }
            cfg.out = PathBuf::from(s);
            Ok(())
        });
        field("f", &mut |s| {
            cfg.function = s.parse().map_err(|e: Error| e.to_string())?;
            Ok(())
        });
        field("mode", &mut |s| {
            cfg.mode = match s {
                "metric" => Mode::Metric,
                "discrete" => Mode::Discrete,
                _ => return Err(format!("expected metric or discrete, got `{s}`")),
            };
            Ok(())
        });
        field("raster", &mut |s| {
            cfg.raster = parse_bool(s)?;
            Ok(())
        });
        field("crossing.a_grid", &mut |s| {
            cfg.a_grid = parse_list(s)?;
            unit(&cfg.a_grid)
        });
        field("crossing.b_grid", &mut |s| {
            cfg.b_grid = parse_list(s)?;
            unit(&cfg.b_grid)
        });
        field("stats.test", &mut |s| {
            cfg.test = s.parse()?;
            Ok(())
        });
        field("stats.k", &mut |s| {
            let v: usize = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            if v < 2 {
                return Err("K must be at least 2".into());
            }
            cfg.top_k = v;
            Ok(())
        });
        field("stats.ranks", &mut |s| {
            cfg.ranks = if s == "all" {
                ClusterSet::All
            } else {
                let v: Vec<usize> = parse_list(s)?;
                if v.contains(&0) {
                    return Err("ranks start at 1".into());
                }
                ClusterSet::Ranks(v.into_iter().map(|k| k - 1).collect())
            };
            Ok(())
        });
        field("stats.q", &mut |s| {
            let v: u32 = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            if v < 1 {
                return Err("q must be at least 1".into());
            }
            cfg.q = v;
            Ok(())
        });
        field("stats.corrupt", &mut |s| {
            cfg.corrupt = parse_bool(s)?;
            Ok(())
        });
        field("stats.min_hole_vertices", &mut |s| {
            let v: usize = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            if v < 4 {
                return Err("must be at least 4".into());
            }
            cfg.min_hole_vertices = v;
            Ok(())
        });
        field("stats.blocks", &mut |s| {
            let v: Vec<u32> = parse_list(s)?;
            if v.is_empty() || v.iter().any(|&b| b < 2) {
                return Err("block sides must be at least 2".into());
            }
            cfg.blocks = v;
            Ok(())
        });
        field("minkowski.radii", &mut |s| {
            let v: Vec<f64> = parse_list(s)?;
            if v.is_empty() || v.iter().any(|&r| !(r > 0.0)) {
                return Err("radii (in mesh units) must be positive".into());
            }
            cfg.radii = v;
            Ok(())
        });
        field("minkowski.clusters", &mut |s| {
            let v: usize = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            positive(v, "clusters")?;
            cfg.clusters = v;
            Ok(())
        });
        field("spin.exact_max_vertices", &mut |s| {
            cfg.exact_max_vertices = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            Ok(())
        });
        field("markov.path_length", &mut |s| {
            let v: usize = s.parse().map_err(|_| format!("expected an integer, got `{s}`"))?;
            positive(v, "path_length")?;
            cfg.path_length = Some(v);
            Ok(())
        });
    }

    if errors.is_empty() {
        Ok(cfg)
    } else {
        errors.sort_by_key(|e| e.line.unwrap_or(usize::MAX));
        Err(Error::Config(errors))
    }
}
