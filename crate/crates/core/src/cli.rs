//! The `pagen` command line and its run configs.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytics::{degree_dist_pmf, fk_mean_exact, neighbor_degree_dist_pmf, FkSampler};
use crate::error::{Error, Result};
use crate::graph::{ModelTag, PaGraph};
use crate::growth::{generate, generate_conditional, generate_coupled};
use crate::localview::{ball_distribution, compare, BallDistribution, BallKind, BallSource, ComparisonReport};
use crate::params::ModelParams;
use crate::rng::{par_chunks, SeedSpec};
use crate::subgraph::{count_inj_host, estimate_t_hat_mc, t_hat_quadrature, GraphHost, SubgraphPattern};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Node cap for limit trees sampled by `analyze balls`.
const BALL_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "pagen", version, about = "Preferential-attachment graphs and their local limit")]
pub struct Cli {
    /// Worker threads for ensemble work.
    #[arg(long, global = true, env = "PAGEN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow one graph and write its edge list plus a JSON sidecar.
    Generate(RunArgs),
    /// Statistics on graphs and on the limit.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisKind {
    Degrees,
    Pmf,
    Balls,
    Coupling,
    Subgraph,
    Fk,
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// Degree histogram of a graph (`--input`, or grown from the flags).
    Degrees(RunArgs),
    /// Limiting degree pmf, or with `--neighbor` the older-neighbor pmf.
    Pmf(RunArgs),
    /// TV distance between r-ball classes of a graph and of limit trees.
    Balls(RunArgs),
    /// Coupled sequential/independent pairs and their disagreement.
    Coupling(RunArgs),
    /// Pattern counts against the limiting frequency.
    Subgraph(RunArgs),
    /// Draws of the F_k limit.
    Fk(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Independent,
    Conditional,
    Sequential,
    Polya,
}

impl From<ModelArg> for ModelTag {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Independent => ModelTag::Independent,
            ModelArg::Conditional => ModelTag::Conditional,
            ModelArg::Sequential => ModelTag::Sequential,
            ModelArg::Polya => ModelTag::Polya,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Hat,
    Plain,
}

/// Flags shared by every command; each command reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ball radius.
    #[arg(long)]
    pub r: Option<usize>,
    /// Roots and trees for `balls`, pairs for `coupling`, draws otherwise.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Vertex index for `fk`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Horizon for `fk`.
    #[arg(long)]
    pub ell: Option<usize>,
    /// Edge-list TSV to analyze instead of growing a graph.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Pattern JSON for `subgraph`.
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// Edge list fixing vertices 1..=m+1 of the conditional model.
    #[arg(long)]
    pub seed_graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub neighbor: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Earlier sidecar or config JSON; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved parameters of one run. Written into every sidecar, and
/// accepted back through `--config`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub model: Option<ModelTag>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub r: Option<usize>,
    pub samples: Option<usize>,
    pub kmax: Option<usize>,
    pub k: Option<usize>,
    pub ell: Option<usize>,
    pub input: Option<PathBuf>,
    pub pattern: Option<PathBuf>,
    pub seed_graph: Option<PathBuf>,
    pub kind: Option<KindArg>,
    pub neighbor: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Flags over the `--config` file, if any.
    pub fn resolve(command: &str, args: &RunArgs) -> Result<Self> {
        let base = match &args.config {
            Some(path) => Self::load(path)?,
            None => RunConfig::default(),
        };
        Ok(RunConfig {
            command: command.to_string(),
            model: args.model.map(ModelTag::from).or(base.model),
            n: args.n.or(base.n),
            m: args.m.or(base.m),
            alpha: args.alpha.or(base.alpha),
            seed: args.seed.or(base.seed),
            r: args.r.or(base.r),
            samples: args.samples.or(base.samples),
            kmax: args.kmax.or(base.kmax),
            k: args.k.or(base.k),
            ell: args.ell.or(base.ell),
            input: args.input.clone().or(base.input),
            pattern: args.pattern.clone().or(base.pattern),
            seed_graph: args.seed_graph.clone().or(base.seed_graph),
            kind: args.kind.or(base.kind),
            neighbor: args.neighbor || base.neighbor,
            out: args.out.clone().or(base.out),
            format: args.format.unwrap_or(base.format),
        })
    }

    /// Reads a sidecar (`{"config": ...}`) or a bare config object.
    pub fn load(path: &Path) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let inner = value.get("config").cloned().unwrap_or(value);
        serde_json::from_value(inner).map_err(|e| Error::invalid(format!("bad config {}: {e}", path.display())))
    }

    fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::invalid(format!("--{name} is required")))
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(Self::need(self.m, "m")?, self.alpha.unwrap_or(0.0))
    }

    fn samples(&self, default: usize) -> Result<usize> {
        match self.samples.unwrap_or(default) {
            0 => Err(Error::invalid("--samples must be at least 1")),
            s => Ok(s),
        }
    }

    /// Seed in use, drawn from entropy on first need and then pinned.
    fn seed(&mut self) -> u64 {
        *self.seed.get_or_insert_with(|| SeedSpec::from_entropy().master_seed)
    }

    fn kind(&self) -> BallKind {
        match self.kind {
            Some(KindArg::Plain) => BallKind::Plain,
            _ => BallKind::Hat,
        }
    }
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    wall_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges_per_second: Option<f64>,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_sidecar(config: &RunConfig, wall: f64, edges: Option<usize>) -> Result<()> {
    let side = Sidecar {
        config,
        wall_time_secs: wall,
        edges,
        edges_per_second: edges.map(|e| if wall > 0.0 { e as f64 / wall } else { f64::INFINITY }),
    };
    match &config.out {
        Some(out) => {
            let f = BufWriter::new(File::create(sidecar_path(out))?);
            serde_json::to_writer_pretty(f, &side)?;
        }
        None => eprintln!("{}", serde_json::to_string(&side)?),
    }
    Ok(())
}

fn open_out(config: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &config.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_graph(path: &Path) -> Result<PaGraph> {
    PaGraph::read_tsv(BufReader::new(File::open(path)?))
}

/// The graph under analysis: `--input`, or grown from the model flags.
fn obtain_graph(config: &mut RunConfig) -> Result<PaGraph> {
    if let Some(path) = &config.input {
        return read_graph(path);
    }
    let params = config.params()?;
    let n = RunConfig::need(config.n, "n")?;
    let model = config.model.unwrap_or(ModelTag::Sequential);
    let seed = SeedSpec::new(config.seed());
    let mut rng = seed.rng();
    let g = match (&config.seed_graph, model) {
        (Some(path), ModelTag::Conditional) => {
            let start = read_graph(path)?;
            generate_conditional(&params, n, &mut rng, Some(&start))?
        }
        (Some(_), _) => return Err(Error::invalid("--seed-graph applies to the conditional model only")),
        _ => generate(model, &params, n, &mut rng)?,
    };
    Ok(g.with_seed(seed))
}

pub fn cmd_generate(config: &mut RunConfig) -> Result<()> {
    config.params()?.check_graph_model()?;
    RunConfig::need(config.n, "n")?;
    config.seed();
    config.alpha.get_or_insert(0.0);
    if config.model.is_none() {
        config.model = Some(ModelTag::Sequential);
    }
    let started = Instant::now();
    let g = obtain_graph(config)?;
    let wall = started.elapsed().as_secs_f64();
    g.write_tsv(open_out(config)?)?;
    write_sidecar(config, wall, Some(g.edge_count()))
}

fn write_pairs<W: Write + ?Sized>(out: &mut W, rows: &[(&str, String)]) -> Result<()> {
    writeln!(out, "key\tvalue")?;
    for (k, v) in rows {
        writeln!(out, "{k}\t{v}")?;
    }
    Ok(())
}

fn emit(config: &RunConfig, json: serde_json::Value, tsv: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut out = open_out(config)?;
    match config.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &json)?;
            writeln!(out)?;
        }
        Format::Tsv => tsv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_analyze(kind: AnalysisKind, config: &mut RunConfig) -> Result<()> {
    let started = Instant::now();
    match kind {
        AnalysisKind::Degrees => analyze_degrees(config)?,
        AnalysisKind::Pmf => analyze_pmf(config)?,
        AnalysisKind::Balls => analyze_balls(config)?,
        AnalysisKind::Coupling => analyze_coupling(config)?,
        AnalysisKind::Subgraph => analyze_subgraph(config)?,
        AnalysisKind::Fk => analyze_fk(config)?,
    }
    if config.out.is_some() {
        write_sidecar(config, started.elapsed().as_secs_f64(), None)?;
    }
    Ok(())
}

fn analyze_degrees(config: &mut RunConfig) -> Result<()> {
    let g = obtain_graph(config)?;
    let hist = g.degree_histogram();
    let rows: Vec<(usize, u64)> = hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, &c)| (d, c)).collect();
    let json = serde_json::json!({"n": g.n(), "histogram": rows});
    emit(config, json, |out| {
        writeln!(out, "degree\tcount")?;
        for (d, c) in &rows {
            writeln!(out, "{d}\t{c}")?;
        }
        Ok(())
    })
}

fn analyze_pmf(config: &mut RunConfig) -> Result<()> {
    let params = config.params()?;
    let kmax = config.kmax.unwrap_or(50);
    let pmf = if config.neighbor {
        neighbor_degree_dist_pmf(&params, kmax)
    } else {
        degree_dist_pmf(&params, kmax)
    };
    emit(config, serde_json::to_value(&pmf)?, |out| pmf.write_tsv(out))
}

/// Ball classes of `samples` uniform roots of `graph` and of `samples`
/// limit trees, in fixed-size chunks on the thread pool.
pub fn compare_balls(
    graph: &PaGraph,
    kind: BallKind,
    r: usize,
    samples: usize,
    seed: u64,
) -> Result<(ComparisonReport, BallDistribution, BallDistribution)> {
    const CHUNK: usize = 2_000;
    let adjacency = graph.adjacency();
    let params = *graph.params();
    let merge = |parts: Vec<Result<BallDistribution>>| -> Result<BallDistribution> {
        let mut all = BallDistribution::default();
        for p in parts {
            all.merge(p?);
        }
        Ok(all)
    };
    let from_graph = merge(par_chunks(seed, samples, CHUNK, |rng, len| {
        ball_distribution(BallSource::Graph { graph, adjacency: &adjacency, kind }, r, len, rng)
    }))?;
    let from_limit = merge(par_chunks(seed ^ 0x9e37_79b9_7f4a_7c15, samples, CHUNK, |rng, len| {
        ball_distribution(BallSource::Limit { params: &params, max_nodes: BALL_MAX_NODES }, r, len, rng)
    }))?;
    Ok((compare(&from_graph, &from_limit), from_graph, from_limit))
}

fn analyze_balls(config: &mut RunConfig) -> Result<()> {
    let r = config.r.unwrap_or(1);
    let samples = config.samples(10_000)?;
    let g = obtain_graph(config)?;
    let seed = config.seed();
    let (report, _, limit) = compare_balls(&g, config.kind(), r, samples, seed)?;
    let json = serde_json::json!({"r": r, "n": g.n(), "report": report, "limit_classes": limit.counts.len()});
    emit(config, json, |out| {
        write_pairs(
            out,
            &[
                ("r", r.to_string()),
                ("n", g.n().to_string()),
                ("tv", report.tv.to_string()),
                ("samples_graph", report.n_samples_a.to_string()),
                ("samples_limit", report.n_samples_b.to_string()),
                ("excluded_truncated", report.excluded_truncated.to_string()),
            ],
        )
    })
}

fn analyze_coupling(config: &mut RunConfig) -> Result<()> {
    let params = config.params()?;
    let n = RunConfig::need(config.n, "n")?;
    let pairs = config.samples(1)?;
    let seed = config.seed();
    let results = par_chunks(seed, pairs, 1, |rng, _| generate_coupled(&params, n, rng));
    let mut rows = Vec::with_capacity(pairs);
    let mut reports = Vec::with_capacity(pairs);
    for (i, r) in results.into_iter().enumerate() {
        let pair = r?;
        rows.push((
            i + 1,
            pair.discrepancies.len(),
            pair.received_mismatch_fraction(n.div_ceil(2)),
            pair.approximate,
        ));
        reports.push(pair.report_json());
    }
    let json = serde_json::json!({"seed": seed, "pairs": reports});
    emit(config, json, |out| {
        writeln!(out, "pair\tdiscrepant_vertices\tlate_mismatch_fraction\tapproximate")?;
        for (i, d, f, a) in &rows {
            writeln!(out, "{i}\t{d}\t{f}\t{a}")?;
        }
        Ok(())
    })
}

fn analyze_subgraph(config: &mut RunConfig) -> Result<()> {
    let path = config
        .pattern
        .clone()
        .ok_or_else(|| Error::invalid("--pattern is required"))?;
    let value: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(&path)?))?;
    let pattern = SubgraphPattern::from_json(&value)?;
    let g = obtain_graph(config)?;
    let params = *g.params();
    let count = count_inj_host(&pattern, &GraphHost::new(&g));
    let per_vertex = count as f64 / g.n() as f64;
    let samples = config.samples(100_000)?;
    let mut rng = SeedSpec::new(config.seed()).stream(1).rng();
    let mc = estimate_t_hat_mc(&pattern, &params, samples, &mut rng)?;
    let quad = if pattern.vertex_count() <= 3 {
        Some(t_hat_quadrature(&pattern, &params)?)
    } else {
        None
    };
    let json = serde_json::json!({
        "pattern": pattern.to_json(),
        "n": g.n(),
        "count_inj": count.to_string(),
        "count_per_vertex": per_vertex,
        "monte_carlo": mc,
        "quadrature": quad,
    });
    emit(config, json, |out| {
        let mut rows = vec![
            ("n", g.n().to_string()),
            ("count_inj", count.to_string()),
            ("count_per_vertex", per_vertex.to_string()),
            ("t_hat_mc", mc.estimate.to_string()),
            ("t_hat_mc_se", mc.std_error.to_string()),
            ("mc_excluded", mc.excluded.to_string()),
        ];
        if let Some(q) = quad {
            rows.push(("t_hat_quadrature", q.to_string()));
        }
        write_pairs(out, &rows)
    })
}

fn analyze_fk(config: &mut RunConfig) -> Result<()> {
    let params = config.params()?;
    let k = RunConfig::need(config.k, "k")?;
    let ell = config.ell.unwrap_or(100_000);
    let samples = config.samples(10_000)?;
    let seed = config.seed();
    let sampler = FkSampler::new(&params, k, ell, FkSampler::DEFAULT_WINDOW)?;
    let parts = par_chunks(seed, samples, 10_000, |rng, len| {
        (0..len).map(|_| sampler.sample_log(rng)).collect::<Vec<f64>>()
    });
    let logs: Vec<f64> = parts.into_iter().flatten().collect();
    let t = logs.len() as f64;
    let mean = logs.iter().map(|l| l.exp()).sum::<f64>() / t;
    let log_mean = logs.iter().sum::<f64>() / t;
    let log_sd = (logs.iter().map(|l| (l - log_mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0)).sqrt();
    let exact = fk_mean_exact(&params, k, ell)?;
    let json = serde_json::json!({
        "k": k, "ell": ell, "samples": samples,
        "mean": mean, "exact_mean": exact, "log_mean": log_mean, "log_sd": log_sd,
    });
    emit(config, json, |out| {
        write_pairs(
            out,
            &[
                ("k", k.to_string()),
                ("ell", ell.to_string()),
                ("samples", samples.to_string()),
                ("mean", mean.to_string()),
                ("exact_mean", exact.to_string()),
                ("log_mean", log_mean.to_string()),
                ("log_sd", log_sd.to_string()),
            ],
        )
    })
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("pagen: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        // Fails only if a pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match cli.command {
        Command::Generate(args) => cmd_generate(&mut RunConfig::resolve("generate", &args)?),
        Command::Analyze { what } => {
            let (kind, args) = match &what {
                Analysis::Degrees(a) => (AnalysisKind::Degrees, a),
                Analysis::Pmf(a) => (AnalysisKind::Pmf, a),
                Analysis::Balls(a) => (AnalysisKind::Balls, a),
                Analysis::Coupling(a) => (AnalysisKind::Coupling, a),
                Analysis::Subgraph(a) => (AnalysisKind::Subgraph, a),
                Analysis::Fk(a) => (AnalysisKind::Fk, a),
            };
            let name = serde_json::to_value(kind)?;
            let mut config = RunConfig::resolve(&format!("analyze {}", name.as_str().unwrap_or("")), args)?;
            cmd_analyze(kind, &mut config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generate_flags() {
        let cli = Cli::try_parse_from(["pagen", "generate", "--model", "polya", "--n", "10", "--m", "2", "--seed", "7"]).unwrap();
        let Command::Generate(args) = cli.command else { panic!() };
        let c = RunConfig::resolve("generate", &args).unwrap();
        assert_eq!(c.model, Some(ModelTag::Polya));
        assert_eq!((c.n, c.m, c.seed), (Some(10), Some(2), Some(7)));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let base = RunConfig {
            command: "generate".into(),
            n: Some(50),
            m: Some(3),
            seed: Some(1),
            ..Default::default()
        };
        std::fs::write(&path, serde_json::json!({"config": base}).to_string()).unwrap();
        let args = RunArgs {
            n: Some(60),
            config: Some(path),
            ..Default::default()
        };
        let c = RunConfig::resolve("generate", &args).unwrap();
        assert_eq!((c.n, c.m, c.seed), (Some(60), Some(3), Some(1)));
    }

    fn run_ok(args: &[&str]) {
        let mut full = vec!["pagen"];
        full.extend_from_slice(args);
        assert_eq!(run(full), EXIT_OK, "{args:?}");
    }

    fn p(path: &Path) -> &str {
        path.to_str().unwrap()
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["pagen", "analyze", "pmf", "--m", "2", "--alpha", "1"]), EXIT_VALIDATION);
        assert_eq!(run(["pagen", "generate", "--model", "polya", "--n", "100", "--m", "3", "--alpha", "1", "--seed", "1"]), EXIT_VALIDATION);
        assert_eq!(run(["pagen", "generate", "--model", "sequential", "--n", "100", "--m", "1"]), EXIT_VALIDATION);
        assert_eq!(run(["pagen", "analyze", "fk", "--m", "2"]), EXIT_VALIDATION);
        assert!(Cli::try_parse_from(["pagen", "frobnicate"]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("none.tsv");
        assert_eq!(run(["pagen", "analyze", "degrees", "--input", p(&missing)]), EXIT_RUNTIME);
    }

    #[test]
    fn generate_is_byte_identical_for_a_fixed_seed() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
        for out in [&a, &b] {
            run_ok(&["generate", "--model", "polya", "--n", "1000", "--m", "2", "--alpha", "0", "--seed", "7", "--out", p(out)]);
        }
        let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(ta, tb);
        let text = String::from_utf8(ta).unwrap();
        assert!(text.starts_with("# pa-graph n=1000 m=2 alpha=0 model=polya seed=7\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 999);
        let side: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("a.tsv.json")).unwrap()).unwrap();
        assert_eq!(side["config"]["seed"], 7);
        assert_eq!(side["edges"], 1998);
        assert!(side["edges_per_second"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn sidecar_reproduces_the_run() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("g.tsv");
        run_ok(&["generate", "--model", "sequential", "--n", "500", "--m", "3", "--alpha", "0.25", "--out", p(&first)]);
        let side = dir.path().join("g.tsv.json");
        let again = dir.path().join("h.tsv");
        run_ok(&["generate", "--config", p(&side), "--out", p(&again)]);
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn pmf_table_has_closed_form_values() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("pmf.tsv");
        run_ok(&["analyze", "pmf", "--m", "2", "--alpha", "0", "--kmax", "3", "--out", p(&out)]);
        let text = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<(usize, f64)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let (k, v) = l.split_once('\t').unwrap();
                (k.parse().unwrap(), v.parse().unwrap())
            })
            .collect();
        let want = [(2, 0.5), (3, 0.2), (4, 0.1), (5, 4.0 / 70.0)];
        assert_eq!(rows.len(), want.len());
        for ((k, v), (wk, wv)) in rows.iter().zip(want) {
            assert_eq!(*k, wk);
            assert!((v - wv).abs() < 1e-12, "k={k}: {v}");
        }
        assert!(dir.path().join("pmf.tsv.json").exists());
    }

    #[test]
    fn balls_at_radius_zero_have_no_distance() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("balls.json");
        run_ok(&["analyze", "balls", "--m", "2", "--n", "300", "--r", "0", "--samples", "200", "--seed", "3", "--format", "json", "--out", p(&out)]);
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        assert_eq!(v["report"]["tv"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn degree_histogram_sums_to_n() {
        let dir = tempfile::tempdir().unwrap();
        let (g, out) = (dir.path().join("g.tsv"), dir.path().join("deg.tsv"));
        run_ok(&["generate", "--model", "independent", "--n", "2000", "--m", "2", "--seed", "5", "--out", p(&g)]);
        run_ok(&["analyze", "degrees", "--input", p(&g), "--out", p(&out)]);
        let total: u64 = std::fs::read_to_string(&out)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split('\t').nth(1).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 2000);
    }

    #[test]
    fn remaining_analyses_run() {
        let dir = tempfile::tempdir().unwrap();
        let pat = dir.path().join("edge.json");
        std::fs::write(&pat, r#"{"vertices": 2, "edges": [[1, 2, 1]], "root": 1, "excess": {"1": 1, "2": 2}}"#).unwrap();
        let out = dir.path().join("sub.tsv");
        run_ok(&["analyze", "subgraph", "--m", "2", "--n", "2000", "--seed", "1", "--samples", "2000", "--pattern", p(&pat), "--out", p(&out)]);
        assert!(std::fs::read_to_string(&out).unwrap().contains("t_hat_quadrature"));

        let out = dir.path().join("coupling.tsv");
        run_ok(&["analyze", "coupling", "--m", "2", "--n", "200", "--alpha", "0.3", "--samples", "3", "--seed", "2", "--out", p(&out)]);
        assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 4);

        let out = dir.path().join("fk.json");
        run_ok(&["--threads", "1", "analyze", "fk", "--m", "2", "--k", "50", "--ell", "10000", "--samples", "1000", "--seed", "4", "--format", "json", "--out", p(&out)]);
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        assert!((v["mean"].as_f64().unwrap() - v["exact_mean"].as_f64().unwrap()).abs() < 0.1);
    }
}
