use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use effnoise::{Channel, CodeDefinition, StabilizerCode};

#[derive(Debug, Parser)]
#[command(name = "effnoise", version, about = "Effective logical noise of stabilizer-encoded qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Per-syndrome and mean logical channels over a p-grid.
    Channel,
    /// Lifetime bound p_crit of logical GHZ states.
    Lifetime,
    /// Negativity of noisy logical GHZ states versus N.
    Negativity,
    /// Critical rates of generalized Shor codes.
    Concat,
    /// Validate built-in codes and code-definition files.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    White,
    Phase,
    Custom,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Codes, comma separated: `repetition`, `ghz`, `cluster-ring`, `trivial`, optionally `name:m`.
    #[arg(long, global = true)]
    pub code: Option<String>,
    /// Code sizes, comma separated.
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Inner GHZ block sizes for `concat`.
    #[arg(long, global = true)]
    pub m1: Option<String>,
    /// Outer repetition sizes for `concat`.
    #[arg(long, global = true)]
    pub m2: Option<String>,
    #[arg(long, value_enum, global = true)]
    pub noise: Option<NoiseKind>,
    /// Channel `l0,l1,l2,l3` for `--noise custom`.
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// `start:stop:count`.
    #[arg(long = "p-grid", global = true)]
    pub p_grid: Option<String>,
    /// Single noise parameter (used by `negativity`).
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// System sizes: `4`, `2,3,4` or ranges such as `2-100`.
    #[arg(long = "n-grid", global = true)]
    pub n_grid: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON run configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON code-definition file; may be repeated.
    #[arg(long = "code-file", global = true)]
    pub code_file: Vec<PathBuf>,
}

/// A list given either as a JSON array or as the flag string syntax.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ListOrString<T> {
    List(Vec<T>),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridOrString {
    Grid(GridSpec),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub code: Option<ListOrString<String>>,
    pub m: Option<ListOrString<usize>>,
    pub m1: Option<ListOrString<usize>>,
    pub m2: Option<ListOrString<usize>>,
    pub noise: Option<NoiseKind>,
    pub lambda: Option<[f64; 4]>,
    pub p_grid: Option<GridOrString>,
    pub p: Option<f64>,
    pub n_grid: Option<ListOrString<usize>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub code_files: Vec<PathBuf>,
}

/// Usage and configuration problems; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSelector {
    Builtin { name: String, m: Option<usize> },
    File(CodeDefinition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl PGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub codes: Vec<CodeSelector>,
    pub m: Option<Vec<usize>>,
    pub m1: Option<Vec<usize>>,
    pub m2: Option<Vec<usize>>,
    pub noise: NoiseKind,
    pub lambda: Option<Channel>,
    pub p_grid: Option<PGrid>,
    pub p: Option<f64>,
    pub n_grid: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(path) => read_config(path)?,
            None => ConfigFile::default(),
        };
        let base = args.config.as_deref().and_then(Path::parent).unwrap_or(Path::new(""));

        let mut codes = match (&args.code, &file.code) {
            (Some(s), _) => parse_code_list(s)?,
            (None, Some(ListOrString::Text(s))) => parse_code_list(s)?,
            (None, Some(ListOrString::List(v))) => v.iter().map(|s| parse_code(s)).collect::<anyhow::Result<_>>()?,
            (None, None) => Vec::new(),
        };
        let code_files: Vec<PathBuf> = if args.code_file.is_empty() {
            file.code_files.iter().map(|p| base.join(p)).collect()
        } else {
            args.code_file.clone()
        };
        for path in &code_files {
            codes.push(CodeSelector::File(read_code_file(path)?));
        }

        let noise = args.noise.or(file.noise).unwrap_or(NoiseKind::White);
        let lambda = match (&args.lambda, file.lambda) {
            (Some(s), _) => Some(parse_lambda(s)?),
            (None, Some(l)) => Some(Channel::new(l).map_err(|e| usage(format!("lambda: {e}")))?),
            (None, None) => None,
        };
        if noise == NoiseKind::Custom && lambda.is_none() {
            bail!(usage("--noise custom needs --lambda l0,l1,l2,l3"));
        }
        if noise != NoiseKind::Custom && lambda.is_some() {
            bail!(usage("--lambda is only meaningful with --noise custom"));
        }

        let p_grid = match (&args.p_grid, &file.p_grid) {
            (Some(s), _) => Some(parse_p_grid(s)?),
            (None, Some(GridOrString::Text(s))) => Some(parse_p_grid(s)?),
            (None, Some(GridOrString::Grid(g))) => Some(check_grid(g.start, g.stop, g.count)?),
            (None, None) => None,
        };
        let p = args.p.or(file.p);
        if let Some(p) = p {
            if !(0.0..=1.0).contains(&p) {
                bail!(usage(format!("p = {p} outside [0, 1]")));
            }
        }
        let tol = args.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                bail!(usage(format!("tolerance must be positive, got {t}")));
            }
        }
        let jobs = args.jobs.or(file.jobs);
        if jobs == Some(0) {
            bail!(usage("--jobs must be at least 1"));
        }

        Ok(Settings {
            codes,
            m: pick_usize_list("m", &args.m, &file.m, parse_usize_list)?,
            m1: pick_usize_list("m1", &args.m1, &file.m1, parse_usize_list)?,
            m2: pick_usize_list("m2", &args.m2, &file.m2, parse_usize_list)?,
            noise,
            lambda,
            p_grid,
            p,
            n_grid: pick_usize_list("n-grid", &args.n_grid, &file.n_grid, parse_n_grid)?,
            tol,
            out: args.out.clone().or(file.out.map(|o| base.join(o))),
            jobs,
        })
    }
}

fn read_config(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        usage(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn read_code_file(path: &Path) -> anyhow::Result<CodeDefinition> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read code file {}: {e}", path.display())))?;
    CodeDefinition::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn pick_usize_list(
    name: &str,
    flag: &Option<String>,
    file: &Option<ListOrString<usize>>,
    parse: fn(&str) -> anyhow::Result<Vec<usize>>,
) -> anyhow::Result<Option<Vec<usize>>> {
    let list = match (flag, file) {
        (Some(s), _) => parse(s)?,
        (None, Some(ListOrString::Text(s))) => parse(s)?,
        (None, Some(ListOrString::List(v))) => v.clone(),
        (None, None) => return Ok(None),
    };
    if list.is_empty() {
        bail!(usage(format!("{name} list is empty")));
    }
    Ok(Some(list))
}

pub fn parse_code(s: &str) -> anyhow::Result<CodeSelector> {
    let s = s.trim();
    let (name, m) = match s.split_once(':') {
        Some((name, m)) => {
            let m = m
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad code size in {s:?}")))?;
            (name.trim(), Some(m))
        }
        None => (s, None),
    };
    let canonical = match name {
        "repetition" | "rep" => "repetition",
        "ghz" => "ghz",
        "cluster-ring" | "cluster_ring" | "cr" => "cluster-ring",
        "trivial" | "none" => "trivial",
        other => bail!(usage(format!("unknown code {other:?}"))),
    };
    Ok(CodeSelector::Builtin {
        name: canonical.to_string(),
        m,
    })
}

pub fn parse_code_list(s: &str) -> anyhow::Result<Vec<CodeSelector>> {
    let out = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_code)
        .collect::<anyhow::Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!(usage("--code list is empty"));
    }
    Ok(out)
}

pub fn parse_usize_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("expected a non-negative integer, got {t:?}")))
        })
        .collect()
}

/// Comma list of integers and inclusive ranges `lo-hi`.
pub fn parse_n_grid(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| usage(format!("bad range {part:?}")))?;
                let hi: usize = hi.trim().parse().map_err(|_| usage(format!("bad range {part:?}")))?;
                if lo > hi {
                    bail!(usage(format!("empty range {part:?}")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| usage(format!("bad system size {part:?}")))?),
        }
    }
    Ok(out)
}

pub fn parse_p_grid(s: &str) -> anyhow::Result<PGrid> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!(usage(format!("--p-grid expects start:stop:count, got {s:?}")));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| usage(format!("bad grid start in {s:?}")))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| usage(format!("bad grid stop in {s:?}")))?;
    let count: usize = parts[2].trim().parse().map_err(|_| usage(format!("bad grid count in {s:?}")))?;
    check_grid(start, stop, count)
}

fn check_grid(start: f64, stop: f64, count: usize) -> anyhow::Result<PGrid> {
    if count == 0 {
        bail!(usage("p-grid must have at least one point"));
    }
    if !(0.0 <= start && start <= stop && stop <= 1.0) {
        bail!(usage(format!("p-grid needs 0 <= start <= stop <= 1, got {start}:{stop}")));
    }
    Ok(PGrid { start, stop, count })
}

pub fn parse_lambda(s: &str) -> anyhow::Result<Channel> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad lambda entry {t:?}"))))
        .collect::<anyhow::Result<_>>()?;
    let arr: [f64; 4] = values
        .try_into()
        .map_err(|_| usage("--lambda needs exactly four values"))?;
    Channel::new(arr).map_err(|e| usage(format!("lambda: {e}")))
}

impl CodeSelector {
    /// Instantiates the selected code for each size in `ms` (or the fixed size).
    pub fn instantiate(&self, ms: &[usize]) -> anyhow::Result<Vec<StabilizerCode>> {
        match self {
            CodeSelector::Builtin { name, m: Some(m) } => Ok(vec![StabilizerCode::builtin(name, *m)?]),
            CodeSelector::Builtin { name, m: None } if name == "trivial" => Ok(vec![StabilizerCode::trivial()]),
            CodeSelector::Builtin { name, m: None } => ms
                .iter()
                .map(|&m| StabilizerCode::builtin(name, m).map_err(Into::into))
                .collect(),
            CodeSelector::File(def) => Ok(vec![def.to_code().context(def.label.clone())?]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_grid_syntax() {
        assert_eq!(parse_n_grid("4").unwrap(), vec![4]);
        assert_eq!(parse_n_grid("2,3, 5-7").unwrap(), vec![2, 3, 5, 6, 7]);
        assert!(parse_n_grid("7-5").is_err());
        assert!(parse_n_grid("a").is_err());
        assert!(parse_n_grid("").unwrap().is_empty());
    }

    #[test]
    fn p_grid_syntax() {
        let g = parse_p_grid("0:1:101").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 101);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[100], 1.0);
        assert_eq!(parse_p_grid("0.5:0.5:1").unwrap().points(), vec![0.5]);
        assert!(parse_p_grid("0.5:0.2:3").is_err());
        assert!(parse_p_grid("0:1.5:3").is_err());
        assert!(parse_p_grid("0:1:0").is_err());
        assert!(parse_p_grid("0:1").is_err());
    }

    #[test]
    fn code_syntax() {
        assert_eq!(
            parse_code("ghz:5").unwrap(),
            CodeSelector::Builtin {
                name: "ghz".into(),
                m: Some(5)
            }
        );
        assert_eq!(parse_code_list("rep,cr").unwrap().len(), 2);
        assert!(parse_code("steane").is_err());
        assert!(parse_code("ghz:x").is_err());
    }

    #[test]
    fn lambda_syntax() {
        assert_eq!(parse_lambda("0.7,0.1,0.1,0.1").unwrap().lambdas(), [0.7, 0.1, 0.1, 0.1]);
        assert!(parse_lambda("0.7,0.1,0.1").is_err());
        assert!(parse_lambda("0.7,0.1,0.1,0.2").is_err());
    }
}
