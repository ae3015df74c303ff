//! Flags, `--config` overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use roundclique::bounds::BoundKind;
use roundclique::cliquealg::Variant;
use roundclique::matchdecomp::MAX_CANONICAL_K;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "ROUNDCLIQUE_OUT_DIR";

/// Bad arguments; reported with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Parser)]
#[command(name = "roundclique", version, about = "Bounded-round clique queries on G(n,1/2): simulations, bounds and certificates")]
pub struct Cli {
    /// JSON object whose fields override the flags of the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run query algorithms against seeded oracles.
    Simulate(SimulateArgs),
    /// Tabulate (and optionally plot) the closed-form bound curves.
    Bounds(BoundsArgs),
    /// Check the structural matching lemmas on random instances.
    Verify(VerifyArgs),
    /// Phase 1 + phase 2 certificate for the restricted three-round problem.
    Optimize(OptimizeArgs),
    /// Multi-start bounds for the unrestricted three-round problem.
    Table1(Table1Args),
    /// Write or audit a transcript file.
    Transcript(TranscriptArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Bounds(_) => "bounds",
            Command::Verify(_) => "verify",
            Command::Optimize(_) => "optimize",
            Command::Table1(_) => "table1",
            Command::Transcript(_) => "transcript",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Comma-separated list of greedy, one_round, two_small, two_large, three_round.
    #[arg(long, value_delimiter = ',', default_value = "three_round")]
    pub variant: Vec<Variant>,
    #[arg(long, default_value_t = 65536)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Number of seeds; seeds are base_seed, base_seed+1, ...
    #[arg(long, default_value_t = 30)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    /// `lo:hi:step` or a comma-separated list.
    #[arg(long, default_value = "1.0:1.995:0.005")]
    pub grid: String,
    /// Round count for the `prior_*` kinds.
    #[arg(long, default_value_t = 3)]
    pub rounds: u32,
    /// Kinds to emit (default: all).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Vec<BoundKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG line chart here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    /// `|E⁻| ≤ ½|V_M||V_M⁻|` on random graphs.
    Unmatched,
    /// Free-edge lemmas on random round-labeled cliques.
    FreeEdges,
    All,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Instances per battery.
    #[arg(long, default_value_t = 200)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Battery::All)]
    pub battery: Battery,
    /// Vertex count of the random graphs (even).
    #[arg(long, default_value_t = 12)]
    pub graph_n: usize,
    /// Size of the round-labeled cliques (even).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Additive slack is slack_c / k where the lemmas drop linear terms.
    #[arg(long, default_value_t = 4.0)]
    pub slack_c: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 0.1)]
    pub slack: f64,
    /// Smallest box edge (default: slack / L3).
    #[arg(long)]
    pub eps_target: Option<f64>,
    #[arg(long, default_value_t = 0.125)]
    pub eps0: f64,
    #[arg(long, default_value_t = 100_000)]
    pub audit_samples: u64,
    #[arg(long, default_value_t = 1)]
    pub audit_seed: u64,
    /// δ values for the extra runs started beside γ(δ) (empty: none).
    #[arg(long, value_delimiter = ',', default_value = "1.0,1.2,1.4,1.6,1.8,2.0")]
    pub probe_deltas: Vec<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub probe_edge: f64,
    /// JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of surviving box centers.
    #[arg(long)]
    pub survivors: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Args {
    /// Comma-separated list (`a,b,...,z` expands an arithmetic progression)
    /// or `lo:hi:step`.
    #[arg(long, default_value = "1.0,1.1,...,1.9")]
    pub deltas: String,
    #[arg(long, default_value_t = 0.05)]
    pub net_eps: f64,
    /// Add the `m1' <= s2/2 + d2` constraint.
    #[arg(long)]
    pub enforce_cap: bool,
    #[arg(long, default_value_t = 10)]
    pub refine_top: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the full results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptAction {
    /// Run one algorithm and write its transcript.
    Dump,
    /// Parse a transcript file and audit it against its schedule and oracle.
    Audit,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptArgs {
    #[arg(value_enum)]
    pub action: TranscriptAction,
    #[arg(long, default_value = "three_round")]
    pub variant: Variant,
    /// Ignored by `audit`, which takes n from the file.
    #[arg(long, default_value_t = 1024)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Transcript to audit.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Transcript file (`dump`) or JSON audit report (`audit`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Keys that only say where to write; they are left out of the echoed
/// configuration so that the same run written elsewhere is byte-identical.
const PATH_KEYS: [&str; 5] = ["out", "plot", "survivors", "json", "input"];

/// The validated configuration echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub threads: Option<usize>,
    pub args: Value,
}

impl RunConfig {
    pub fn new<A: Serialize>(command: &'static str, threads: Option<usize>, args: &A) -> Self {
        let mut v = serde_json::to_value(args).expect("arguments serialize");
        if let Value::Object(m) = &mut v {
            for k in PATH_KEYS {
                if k != "input" || command != "transcript" {
                    m.remove(k);
                }
            }
        }
        RunConfig { command, threads, args: v }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Reads a `--config` file as a JSON object.
pub fn load_overrides(path: &Path) -> anyhow::Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => usage(format!("{}: config must be a JSON object", path.display())),
        Err(e) => usage(format!("{}: {e}", path.display())),
    }
}

/// Applies `overrides` on top of the parsed flags. `command` must match the
/// subcommand if present; `threads` is returned separately.
pub fn apply_overrides<A>(args: &A, command: &str, overrides: &Map<String, Value>) -> anyhow::Result<(A, Option<usize>)>
where
    A: Serialize + for<'de> Deserialize<'de>,
{
    let mut v = serde_json::to_value(args)?;
    let obj = v.as_object_mut().expect("arguments are a struct");
    let mut threads = None;
    for (k, val) in overrides {
        match k.as_str() {
            "command" => {
                if val.as_str() != Some(command) {
                    return usage(format!("config is for command {val}, not `{command}`"));
                }
            }
            "threads" => match val.as_u64() {
                Some(t) => threads = Some(t as usize),
                None if val.is_null() => {}
                None => return usage("config: threads must be a non-negative integer"),
            },
            _ => {
                if !obj.contains_key(k) {
                    return usage(format!("config: unknown field `{k}` for `{command}`"));
                }
                obj.insert(k.clone(), val.clone());
            }
        }
    }
    let a = serde_json::from_value(v).map_err(|e| UsageError(format!("config: {e}")))?;
    Ok((a, threads))
}

/// Output path: the flag if given, else `$ROUNDCLIQUE_OUT_DIR/<default>`,
/// else `./<default>`.
pub fn output_path(flag: &Option<PathBuf>, default: &str) -> PathBuf {
    match flag {
        Some(p) => p.clone(),
        None => match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d).join(default),
            _ => PathBuf::from(default),
        },
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn parse_f64(s: &str) -> anyhow::Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => usage(format!("not a number: `{s}`")),
    }
}

/// Parses `lo:hi:step`, `a,b,c` or `a,b,...,z`. Grid points are
/// `lo + i·step` rounded to 12 decimals.
pub fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return usage(format!("grid `{s}` is not lo:hi:step"));
        }
        let (lo, hi, step) = (parse_f64(p[0])?, parse_f64(p[1])?, parse_f64(p[2])?);
        if step <= 0.0 || hi < lo {
            return usage(format!("grid `{s}` needs step > 0 and hi >= lo"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as u64 + 1;
        if count > 10_000_000 {
            return usage(format!("grid `{s}` has {count} points"));
        }
        return Ok((0..count).map(|i| round12(lo + i as f64 * step)).collect());
    }
    let tokens: Vec<&str> = s.split(',').map(str::trim).collect();
    let mut out: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "..." {
            if out.len() < 2 || i + 1 >= tokens.len() {
                return usage(format!("`...` in `{s}` needs two values before and one after"));
            }
            let step = out[out.len() - 1] - out[out.len() - 2];
            let end = parse_f64(tokens[i + 1])?;
            if step <= 0.0 || end < out[out.len() - 1] {
                return usage(format!("`{s}` is not an increasing progression"));
            }
            let start = out[out.len() - 2];
            let first = out.len() - 2;
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            out.truncate(first);
            out.extend((0..count).map(|j| round12(start + j as f64 * step)));
            if (out[out.len() - 1] - end).abs() > 1e-9 {
                return usage(format!("`{end}` is not on the progression in `{s}`"));
            }
            i += 2;
        } else {
            out.push(parse_f64(tokens[i])?);
            i += 1;
        }
    }
    Ok(out)
}

impl SimulateArgs {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.variant.is_empty() {
            return usage("simulate: no variant given");
        }
        if !(2..=(1u64 << 24)).contains(&self.n) {
            return usage(format!("simulate: n = {} outside [2, 2^24]", self.n));
        }
        for v in &self.variant {
            if let Err(e) = v.check_delta(self.delta) {
                return usage(format!("simulate: {e}"));
            }
        }
        if self.seeds > 1_000_000 {
            return usage("simulate: at most 10^6 seeds");
        }
        Ok(())
    }
}

impl BoundsArgs {
    pub fn deltas(&self) -> anyhow::Result<Vec<f64>> {
        let d = parse_grid(&self.grid)?;
        if let Some(x) = d.iter().find(|x| !(1.0..2.0).contains(*x)) {
            return usage(format!("bounds: delta = {x} outside [1, 2)"));
        }
        if self.rounds == 0 {
            return usage("bounds: rounds must be >= 1");
        }
        Ok(d)
    }

    pub fn kinds(&self) -> Vec<BoundKind> {
        if self.kinds.is_empty() {
            BoundKind::ALL.to_vec()
        } else {
            self.kinds.clone()
        }
    }
}

impl VerifyArgs {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.graph_n % 2 == 1 || !(2..=64).contains(&self.graph_n) {
            return usage(format!("verify: graph_n = {} must be even and in [2, 64]", self.graph_n));
        }
        if self.k % 2 == 1 || !(2..=MAX_CANONICAL_K).contains(&self.k) {
            return usage(format!("verify: k = {} must be even and in [2, {MAX_CANONICAL_K}]", self.k));
        }
        if !(self.slack_c >= 0.0 && self.slack_c.is_finite()) {
            return usage("verify: slack_c must be a non-negative number");
        }
        if self.instances > 1_000_000 {
            return usage("verify: at most 10^6 instances");
        }
        Ok(())
    }
}

impl OptimizeArgs {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.slack > 0.0 && self.slack <= 1.0) {
            return usage(format!("optimize: slack = {} outside (0, 1]", self.slack));
        }
        if let Some(e) = self.eps_target {
            if !(e > 0.0 && e <= self.eps0) {
                return usage(format!("optimize: eps_target = {e} outside (0, eps0]"));
            }
        }
        if !(self.eps0 > 0.0 && self.eps0 <= 0.5) {
            return usage(format!("optimize: eps0 = {} outside (0, 1/2]", self.eps0));
        }
        if let Some(d) = self.probe_deltas.iter().find(|d| !(1.0..=2.0).contains(*d)) {
            return usage(format!("optimize: probe delta {d} outside [1, 2]"));
        }
        if !(self.probe_edge > 0.0 && self.probe_edge <= 0.5) {
            return usage("optimize: probe_edge outside (0, 1/2]");
        }
        Ok(())
    }
}

impl Table1Args {
    pub fn deltas(&self) -> anyhow::Result<Vec<f64>> {
        let d = parse_grid(&self.deltas)?;
        if let Some(x) = d.iter().find(|x| !(1.0..2.0).contains(*x)) {
            return usage(format!("table1: delta = {x} outside [1, 2)"));
        }
        if !(self.net_eps > 0.0 && self.net_eps <= 0.25) {
            return usage(format!("table1: net_eps = {} outside (0, 1/4]", self.net_eps));
        }
        Ok(d)
    }
}

impl TranscriptArgs {
    pub fn validate(&self) -> anyhow::Result<()> {
        match self.action {
            TranscriptAction::Dump => {
                if !(2..=(1u64 << 24)).contains(&self.n) {
                    return usage(format!("transcript: n = {} outside [2, 2^24]", self.n));
                }
            }
            TranscriptAction::Audit => {
                if self.input.is_none() {
                    return usage("transcript audit: --input is required");
                }
            }
        }
        if let Err(e) = self.variant.check_delta(self.delta) {
            return usage(format!("transcript: {e}"));
        }
        Ok(())
    }
}
