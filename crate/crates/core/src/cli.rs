//! Command-line front end.
//!
//! Every machine-readable output carries the full [`RunConfig`] and the
//! SHA-256 of the instance file. JSON outputs keep wall-clock data under a
//! separate `timings` key, so two runs with the same config differ only
//! there. CSV outputs start with `#` comment lines holding the same
//! provenance.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bb::{self, orbit_score, BbParams, BbState, Certificate, Outcome};
use crate::dnn::{self, NbParams, DEFAULT_LAMBDA_SCALE};
use crate::error::{Error, Result};
use crate::estimator::{self, EstParams};
use crate::instance::{self, BinarySolution, BqopInstance, DEFAULT_HISTOGRAM_BINS};
use crate::subproblem::{reduce, FixSets};
use crate::symmetry::{self, Orbit, DEFAULT_GROUP_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REFUTED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Output locations. Unset paths are not written.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Outputs {
    pub out: Option<PathBuf>,
    pub trace_csv: Option<PathBuf>,
    pub stats_csv: Option<PathBuf>,
    pub group_json: Option<PathBuf>,
    pub orbits_csv: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub values_csv: Option<PathBuf>,
}

/// Complete description of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub subcommand: String,
    pub instance: Option<PathBuf>,
    pub target: Option<i64>,
    pub lambda: Option<f64>,
    pub lambda_scale: f64,
    pub workers: usize,
    pub seeds: Vec<u64>,
    pub iso_pruning: bool,
    pub audit: bool,
    /// 1-based variable fixed to one before the orbit report or root bound.
    pub fix_one: Option<usize>,
    pub solution: Option<PathBuf>,
    pub samples: usize,
    pub optimum: Option<i64>,
    pub bins: usize,
    pub max_depth: Option<usize>,
    pub node_budget: Option<u64>,
    pub time_budget_secs: Option<f64>,
    pub group_cap: usize,
    pub resume: Option<PathBuf>,
    pub nb: NbParams,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: String::new(),
            instance: None,
            target: None,
            lambda: None,
            lambda_scale: DEFAULT_LAMBDA_SCALE,
            workers: 0,
            seeds: Vec::new(),
            iso_pruning: true,
            audit: false,
            fix_one: None,
            solution: None,
            samples: 10_000,
            optimum: None,
            bins: DEFAULT_HISTOGRAM_BINS,
            max_depth: None,
            node_budget: None,
            time_budget_secs: None,
            group_cap: DEFAULT_GROUP_CAP,
            resume: None,
            nb: NbParams::default(),
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn bb_params(&self) -> BbParams {
        BbParams {
            lambda_scale: self.lambda_scale,
            lambda: self.lambda,
            nb: self.nb,
            iso_pruning: self.iso_pruning,
            workers: self.workers,
            node_budget: self.node_budget,
            time_budget_secs: self.time_budget_secs,
            audit: self.audit,
            ..BbParams::default()
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "symbb",
    version,
    about = "Symmetry-aware branch and bound for cardinality-constrained BQOPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// QAPLIB .dat file or BQOP JSON.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Main output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run configuration; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LambdaArgs {
    /// Fixed penalty parameter λ.
    #[arg(long)]
    lambda: Option<f64>,
    /// λ = scale / ‖C‖_F per subproblem when --lambda is not given.
    #[arg(long)]
    lambda_scale: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a rank-one QAPLIB instance to BQOP JSON.
    Convert {
        #[command(flatten)]
        common: Common,
    },
    /// Automorphism group and orbit report.
    Symmetry {
        #[command(flatten)]
        common: Common,
        /// Fix this 1-based variable to one and report scored orbits.
        #[arg(long)]
        fix_one: Option<usize>,
        #[arg(long)]
        group_json: Option<PathBuf>,
        #[arg(long)]
        orbits_csv: Option<PathBuf>,
        /// Abort when the group has more elements.
        #[arg(long)]
        group_cap: Option<usize>,
    },
    /// Lag-DNN bound of the subproblem with one variable fixed to one.
    BoundRoot {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lambda: LambdaArgs,
        /// 1-based variable fixed to one (default 1).
        #[arg(long)]
        fix_one: Option<usize>,
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// Prove or refute a target lower bound.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        target: Option<i64>,
        #[arg(long)]
        no_isomorphism_pruning: bool,
        /// Worker threads; 0 uses all cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Save resumable state after every level.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        stats_csv: Option<PathBuf>,
        #[arg(long)]
        node_budget: Option<u64>,
        #[arg(long)]
        time_budget: Option<f64>,
        /// Check every decision by enumeration (small instances only).
        #[arg(long)]
        audit: bool,
    },
    /// Estimate the enumeration tree size by sampling.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        target: Option<i64>,
        /// Comma-separated seeds, one estimate each.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        stats_csv: Option<PathBuf>,
    },
    /// Histogram of scaled objective values of random feasible points.
    SampleDist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        /// Reference optimum for the scaling.
        #[arg(long)]
        optimum: Option<i64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        bins: Option<usize>,
        /// Also write every sampled value.
        #[arg(long)]
        values_csv: Option<PathBuf>,
    },
    /// Orbit of a solution under the automorphism group.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Bitstring or 1-based support indices.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        group_cap: Option<usize>,
    },
}

/// Parses `argv` (program name first), runs, and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match config_from(cli.command).and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn config_from(cmd: Command) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let common = match cmd {
        Command::Convert { common } => {
            c.subcommand = "convert".into();
            common
        }
        Command::Symmetry {
            common,
            fix_one,
            group_json,
            orbits_csv,
            group_cap,
        } => {
            c.subcommand = "symmetry".into();
            c.fix_one = fix_one;
            c.outputs.group_json = group_json;
            c.outputs.orbits_csv = orbits_csv;
            if let Some(cap) = group_cap {
                c.group_cap = cap;
            }
            common
        }
        Command::BoundRoot {
            common,
            lambda,
            fix_one,
            trace_csv,
        } => {
            c.subcommand = "bound-root".into();
            apply_lambda(&mut c, lambda);
            c.fix_one = Some(fix_one.unwrap_or(1));
            c.outputs.trace_csv = trace_csv;
            common
        }
        Command::Solve {
            common,
            lambda,
            target,
            no_isomorphism_pruning,
            workers,
            checkpoint,
            resume,
            stats_csv,
            node_budget,
            time_budget,
            audit,
        } => {
            c.subcommand = "solve".into();
            apply_lambda(&mut c, lambda);
            c.target = target;
            c.iso_pruning = !no_isomorphism_pruning;
            c.workers = workers.unwrap_or(0);
            c.outputs.checkpoint = checkpoint;
            c.resume = resume;
            c.outputs.stats_csv = stats_csv;
            c.node_budget = node_budget;
            c.time_budget_secs = time_budget;
            c.audit = audit;
            common
        }
        Command::Estimate {
            common,
            lambda,
            target,
            seeds,
            workers,
            max_depth,
            stats_csv,
        } => {
            c.subcommand = "estimate".into();
            apply_lambda(&mut c, lambda);
            c.target = target;
            c.seeds = if seeds.is_empty() { vec![0] } else { seeds };
            c.workers = workers.unwrap_or(0);
            c.max_depth = max_depth;
            c.outputs.stats_csv = stats_csv;
            c.iso_pruning = false;
            common
        }
        Command::SampleDist {
            common,
            samples,
            optimum,
            seed,
            bins,
            values_csv,
        } => {
            c.subcommand = "sample-dist".into();
            if let Some(s) = samples {
                c.samples = s;
            }
            c.optimum = optimum;
            c.seeds = vec![seed.unwrap_or(0)];
            if let Some(b) = bins {
                c.bins = b;
            }
            c.outputs.values_csv = values_csv;
            common
        }
        Command::Expand {
            common,
            solution,
            group_cap,
        } => {
            c.subcommand = "expand".into();
            c.solution = solution;
            if let Some(cap) = group_cap {
                c.group_cap = cap;
            }
            common
        }
    };
    c.instance = common.instance;
    c.outputs.out = common.out;
    match common.config {
        Some(path) => merge_config(c, &path),
        None => Ok(c),
    }
}

fn apply_lambda(c: &mut RunConfig, l: LambdaArgs) {
    c.lambda = l.lambda;
    if let Some(s) = l.lambda_scale {
        c.lambda_scale = s;
    }
}

/// Overlays the fields present in `path` (a bare config or any output
/// file embedding one under `config`).
fn merge_config(c: RunConfig, path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let mut file: Value = serde_json::from_str(&text)?;
    if let Some(inner) = file.get_mut("config") {
        file = inner.take();
    }
    let Value::Object(overrides) = file else {
        return Err(Error::InvalidArgument(format!(
            "{}: config must be a JSON object",
            path.display()
        )));
    };
    if let Some(sub) = overrides.get("subcommand").and_then(Value::as_str) {
        if sub != c.subcommand {
            return Err(Error::InvalidArgument(format!(
                "config is for `{sub}`, not `{}`",
                c.subcommand
            )));
        }
    }
    let mut base = serde_json::to_value(&c)?;
    merge_json(&mut base, Value::Object(overrides));
    Ok(serde_json::from_value(base)?)
}

fn merge_json(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Loaded instance with the hash of its file.
pub struct Loaded {
    pub inst: BqopInstance,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a QAPLIB file (converted on the fly) or BQOP JSON, bare or as
/// written by `convert`.
pub fn load_instance(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path)?;
    let sha256 = sha256_hex(&bytes);
    let text = String::from_utf8_lossy(&bytes);
    let is_json =
        path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let inst = if is_json {
        let mut v: Value = serde_json::from_str(&text)?;
        if let Some(inner) = v.get_mut("instance") {
            v = inner.take();
        }
        serde_json::from_value(v)?
    } else {
        instance::qap_to_bqop(&instance::parse_qaplib(&text)?)?
    };
    Ok(Loaded { inst, sha256 })
}

fn require<T: Clone>(v: &Option<T>, flag: &str, sub: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::InvalidArgument(format!("`{sub}` needs --{flag}")))
}

fn envelope(
    cfg: &RunConfig,
    sha: &str,
    complete: bool,
    key: &str,
    result: Value,
    timings: Value,
) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("complete".into(), Value::Bool(complete));
    obj.insert(
        "config".into(),
        serde_json::to_value(cfg).unwrap_or(Value::Null),
    );
    obj.insert("instance_sha256".into(), Value::String(sha.into()));
    obj.insert(key.into(), result);
    obj.insert("timings".into(), timings);
    Value::Object(obj)
}

/// Writes through a temporary sibling so readers never see a torn file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// CSV with `#` provenance lines; `body` writes the table.
fn write_csv(
    path: &Path,
    cfg: &RunConfig,
    sha: &str,
    body: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# config: {}", serde_json::to_string(cfg)?)?;
    writeln!(buf, "# instance_sha256: {sha}")?;
    body(&mut buf)?;
    write_atomic(path, &buf)
}

fn execute(cfg: &RunConfig) -> Result<i32> {
    let sub = cfg.subcommand.as_str();
    let path = require(&cfg.instance, "instance", sub)?;
    let loaded = load_instance(&path)?;
    match sub {
        "convert" => convert(cfg, &loaded),
        "symmetry" => symmetry_report(cfg, &loaded),
        "bound-root" => bound_root(cfg, &loaded),
        "solve" => solve(cfg, &loaded),
        "estimate" => estimate(cfg, &loaded),
        "sample-dist" => sample_dist(cfg, &loaded),
        "expand" => expand(cfg, &loaded),
        other => Err(Error::InvalidArgument(format!(
            "unknown subcommand `{other}`"
        ))),
    }
}

fn convert(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let v = envelope(
        cfg,
        &l.sha256,
        true,
        "instance",
        serde_json::to_value(&l.inst)?,
        json!({}),
    );
    match &cfg.outputs.out {
        Some(p) => write_json(p, &v)?,
        None => println!("{}", serde_json::to_string_pretty(&v)?),
    }
    println!("n: {}, m: {}", l.inst.n(), l.inst.m());
    Ok(EXIT_OK)
}

fn fixed_one(inst: &BqopInstance, k: usize) -> Result<FixSets> {
    if k == 0 || k > inst.n() {
        return Err(Error::InvalidArgument(format!(
            "--fix-one {k} outside 1..={}",
            inst.n()
        )));
    }
    FixSets::new(inst.n(), vec![], vec![k - 1])
}

fn symmetry_report(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let start = Instant::now();
    let group = symmetry::automorphisms(l.inst.b(), cfg.group_cap)?;
    println!("group order: {}", group.order());
    let mut subgroup_order = None;
    let (orbits, labels, scores): (Vec<Orbit>, Vec<usize>, Option<Vec<bb::Score>>) =
        match cfg.fix_one {
            None => (
                group.orbit_partition().to_vec(),
                (0..l.inst.n()).collect(),
                None,
            ),
            Some(k) => {
                let sub = reduce(&l.inst, &fixed_one(&l.inst, k)?);
                let sg = sub.subgroup(cfg.group_cap)?;
                subgroup_order = Some(sg.order());
                let mut scored: Vec<(bb::Score, Orbit)> = sg
                    .orbit_partition()
                    .iter()
                    .map(|o| (orbit_score(&sub, o.representative()), o.clone()))
                    .collect();
                scored.sort_by(|(sa, oa), (sb, ob)| {
                    sb.cmp(sa)
                        .then(oa.representative().cmp(&ob.representative()))
                });
                let (s, o): (Vec<_>, Vec<_>) = scored.into_iter().unzip();
                (o, sub.fix.free.clone(), Some(s))
            }
        };
    println!("orbits: {}", orbits.len());
    let seconds = start.elapsed().as_secs_f64();
    if let Some(p) = &cfg.outputs.group_json {
        let v = envelope(
            cfg,
            &l.sha256,
            true,
            "group",
            serde_json::from_str(&group.to_json()?)?,
            json!({ "seconds": seconds }),
        );
        write_json(p, &v)?;
    }
    if let Some(p) = &cfg.outputs.orbits_csv {
        let f: Option<Vec<f64>> = scores
            .as_ref()
            .map(|s| s.iter().map(|x| x.to_f64()).collect());
        write_csv(p, cfg, &l.sha256, |w| {
            symmetry::write_orbit_csv(w, &orbits, &labels, f.as_deref())
        })?;
    }
    if let Some(p) = &cfg.outputs.out {
        let rows: Vec<Value> = orbits
            .iter()
            .enumerate()
            .map(|(k, o)| {
                let members: Vec<usize> = o.members().iter().map(|&i| labels[i] + 1).collect();
                let mut row = json!({ "members": members, "size": o.len() });
                if let Some(s) = &scores {
                    row["score_num"] = json!(s[k].num.to_string());
                    row["score_den"] = json!(s[k].den.to_string());
                    row["score"] = json!(s[k].to_f64());
                    row["score_ceil"] = json!(s[k].ceil().to_string());
                }
                row
            })
            .collect();
        let result = json!({
            "group_order": group.order(),
            "fix_one": cfg.fix_one,
            "subgroup_order": subgroup_order,
            "orbit_count": orbits.len(),
            "orbits": rows,
        });
        write_json(
            p,
            &envelope(
                cfg,
                &l.sha256,
                true,
                "result",
                result,
                json!({ "seconds": seconds }),
            ),
        )?;
    }
    Ok(EXIT_OK)
}

fn bound_root(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let start = Instant::now();
    let k = cfg.fix_one.unwrap_or(1);
    let sub = reduce(&l.inst, &fixed_one(&l.inst, k)?);
    let lambda = match cfg.lambda {
        Some(v) => v,
        None => dnn::default_lambda(&sub, cfg.lambda_scale)?,
    };
    let prob = dnn::assemble(&sub, lambda)?;
    println!("free variables: {}, lambda: {lambda}", sub.n_free());
    let res = dnn::nb_bound_observed(&prob, None, &cfg.nb, &mut |r| {
        println!(
            "iter {}: y = {:.6}, a = {:.6}, b = {:.6}, g = {:.6e}, apg = {}",
            r.iter,
            r.y + sub.offset as f64,
            r.a + sub.offset as f64,
            r.b + sub.offset as f64,
            r.g,
            r.apg_iterations
        );
    });
    let seconds = start.elapsed().as_secs_f64();
    println!("lower bound: {} ({:?})", res.lb_integer, res.status);
    if let Some(p) = &cfg.outputs.trace_csv {
        write_csv(p, cfg, &l.sha256, |w| dnn::write_trace_csv(w, &res.trace))?;
    }
    if let Some(p) = &cfg.outputs.out {
        let result = json!({
            "fix_one": k,
            "lambda": lambda,
            "offset": sub.offset,
            "a": res.a,
            "b": res.b,
            "lower_bound": res.lb_integer,
            "status": res.status,
            "iterations": res.iterations,
            "apg_iterations": res.apg_iterations,
        });
        write_json(
            p,
            &envelope(
                cfg,
                &l.sha256,
                true,
                "result",
                result,
                json!({ "seconds": seconds }),
            ),
        )?;
    }
    Ok(EXIT_OK)
}

fn state_envelope(cfg: &RunConfig, sha: &str, state: &BbState) -> Result<Value> {
    Ok(envelope(
        cfg,
        sha,
        false,
        "state",
        serde_json::to_value(state)?,
        json!({}),
    ))
}

fn load_state(path: &Path, sha: &str, target: i64) -> Result<BbState> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let saved = v.get("instance_sha256").and_then(Value::as_str);
    if saved != Some(sha) {
        return Err(Error::InvalidArgument(format!(
            "{} was written for a different instance",
            path.display()
        )));
    }
    let state: BbState =
        serde_json::from_value(v.get("state").cloned().ok_or_else(|| {
            Error::InvalidArgument(format!("{} holds no state", path.display()))
        })?)?;
    if state.target != target {
        return Err(Error::InvalidArgument(format!(
            "checkpoint target {} differs from --target {target}",
            state.target
        )));
    }
    Ok(state)
}

fn certificate_json(cert: &Certificate) -> Result<(Value, Value)> {
    let mut v = serde_json::to_value(cert)?;
    let timings = v
        .as_object_mut()
        .and_then(|o| o.remove("timings"))
        .unwrap_or(Value::Null);
    Ok((v, timings))
}

fn solve(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let target = require(&cfg.target, "target", "solve")?;
    let params = cfg.bb_params();
    let state = match &cfg.resume {
        Some(p) => load_state(p, &l.sha256, target)?,
        None => BbState::new(&l.inst, target),
    };
    let mut on_level = |s: &BbState| -> Result<()> {
        let last = s.stats.last();
        println!(
            "depth {}: frontier {}, nodes {}, bound calls {}",
            s.depth,
            s.frontier.len(),
            s.node_count(),
            s.bound_calls
        );
        if let (Some(p), Some(_)) = (&cfg.outputs.checkpoint, last) {
            write_json(p, &state_envelope(cfg, &l.sha256, s)?)?;
        }
        Ok(())
    };
    let (cert, state) = bb::solve_from(&l.inst, state, &params, &mut on_level)?;
    let complete = !matches!(cert.outcome, Outcome::Inconclusive { .. });
    if let Some(p) = &cfg.outputs.checkpoint {
        write_json(p, &state_envelope(cfg, &l.sha256, &state)?)?;
    }
    if let Some(p) = &cfg.outputs.stats_csv {
        write_csv(p, cfg, &l.sha256, |w| {
            bb::write_stats_csv(w, &cert.depth_stats)
        })?;
    }
    let (result, timings) = certificate_json(&cert)?;
    if let Some(p) = &cfg.outputs.out {
        write_json(
            p,
            &envelope(cfg, &l.sha256, complete, "certificate", result, timings),
        )?;
    }
    println!(
        "nodes: {}, bound calls: {}",
        cert.node_count, cert.bound_calls
    );
    if let Some(a) = &cert.audit {
        println!("audit: {} checks, {} failures", a.checks, a.failures.len());
    }
    Ok(match &cert.outcome {
        Outcome::Proved => {
            println!("outcome: proved, optimum >= {target}");
            EXIT_OK
        }
        Outcome::Refuted { value, .. } => {
            println!("outcome: refuted, found value {value} < {target}");
            EXIT_REFUTED
        }
        Outcome::Inconclusive { reason } => {
            println!("outcome: inconclusive ({reason})");
            EXIT_INCONCLUSIVE
        }
    })
}

#[derive(Serialize)]
struct DepthRow {
    seed: u64,
    depth: usize,
    width: u64,
    sampled: u64,
    branched: u64,
    estimated: f64,
    exact: bool,
}

fn estimate(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let target = require(&cfg.target, "target", "estimate")?;
    let params = EstParams {
        bb: cfg.bb_params(),
        max_depth: cfg.max_depth,
        ..EstParams::default()
    };
    let mut reports = Vec::new();
    for &seed in &cfg.seeds {
        let r = estimator::estimate(&l.inst, target, &params, seed)?;
        println!(
            "seed {seed}: estimated nodes {:.1}, evaluated {}",
            r.estimated_total_nodes, r.evaluated_nodes
        );
        reports.push(r);
    }
    let (min, mean, max) = estimator::summarize(&reports).unwrap_or((0.0, 0.0, 0.0));
    println!("estimated nodes min/mean/max: {min:.1}/{mean:.1}/{max:.1}");
    let truncated = reports.iter().any(|r| r.truncated);
    if let Some(p) = &cfg.outputs.stats_csv {
        write_csv(p, cfg, &l.sha256, |w| {
            let mut csv = csv::Writer::from_writer(w);
            for r in &reports {
                for d in &r.depths {
                    csv.serialize(DepthRow {
                        seed: r.seed,
                        depth: d.depth,
                        width: d.width,
                        sampled: d.sampled,
                        branched: d.branched,
                        estimated: d.estimated,
                        exact: d.exact,
                    })?;
                }
            }
            csv.flush()?;
            Ok(())
        })?;
    }
    if let Some(p) = &cfg.outputs.out {
        let mut stripped = Vec::new();
        let mut timings = Vec::new();
        for r in &reports {
            let mut v = serde_json::to_value(r)?;
            if let Some(o) = v.as_object_mut() {
                timings.push(json!({
                    "seed": r.seed,
                    "mean_bound_seconds": o.remove("mean_bound_seconds"),
                    "estimated_seconds": o.remove("estimated_seconds"),
                }));
            }
            stripped.push(v);
        }
        let result = json!({
            "reports": stripped,
            "summary": { "min": min, "mean": mean, "max": max },
        });
        write_json(
            p,
            &envelope(
                cfg,
                &l.sha256,
                !truncated,
                "result",
                result,
                Value::Array(timings),
            ),
        )?;
    }
    Ok(if truncated {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

fn sample_dist(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let optimum = require(&cfg.optimum, "optimum", "sample-dist")?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let dist = instance::sample_scaled_distribution(&l.inst, cfg.samples, optimum, seed)?;
    let hist = instance::Histogram::from_values(&dist.values, cfg.bins);
    println!(
        "samples: {}, mean scaled value: {}",
        dist.values.len(),
        dist.mean
    );
    if let Some(p) = &cfg.outputs.out {
        let edges = hist.bin_edges();
        write_csv(p, cfg, &l.sha256, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["bin", "lo", "hi", "count"])?;
            for (k, c) in hist.counts.iter().enumerate() {
                csv.write_record([
                    k.to_string(),
                    edges[k].to_string(),
                    edges[k + 1].to_string(),
                    c.to_string(),
                ])?;
            }
            csv.flush()?;
            Ok(())
        })?;
    }
    if let Some(p) = &cfg.outputs.values_csv {
        write_csv(p, cfg, &l.sha256, |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["sample", "scaled"])?;
            for (k, v) in dist.values.iter().enumerate() {
                csv.write_record([k.to_string(), v.to_string()])?;
            }
            csv.flush()?;
            Ok(())
        })?;
    }
    Ok(EXIT_OK)
}

fn expand(cfg: &RunConfig, l: &Loaded) -> Result<i32> {
    let path = require(&cfg.solution, "solution", "expand")?;
    let x = BinarySolution::parse(&fs::read_to_string(path)?, l.inst.n())?;
    let start = Instant::now();
    let group = symmetry::automorphisms(l.inst.b(), cfg.group_cap)?;
    let sols = symmetry::expand_solution(&group, &x)?;
    let mut values = sols
        .iter()
        .map(|s| instance::objective(&l.inst, s))
        .collect::<Result<Vec<i64>>>()?;
    values.sort_unstable();
    values.dedup();
    println!("group order: {}", group.order());
    println!("distinct solutions: {}", sols.len());
    println!("objective values: {values:?}");
    if let Some(p) = &cfg.outputs.out {
        let result = json!({
            "group_order": group.order(),
            "distinct_solutions": sols.len(),
            "objective_values": values,
            "solutions": sols.iter().map(|s| s.support().iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let seconds = start.elapsed().as_secs_f64();
        write_json(
            p,
            &envelope(
                cfg,
                &l.sha256,
                true,
                "result",
                result,
                json!({ "seconds": seconds }),
            ),
        )?;
    }
    Ok(EXIT_OK)
}
