//! `hq`: build, certify and experiment with secant intersection graphs of
//! Hermitian unitals.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hq_core::blocks::{
    alon_parameters, auto_delta, block_trials, concentration_experiment, delta_star, margin_bracket_real,
    quantitative_bound, theorem2_margin, ReplacementGraph, UnionCount,
};
use hq_core::certificate::{real, TOOLKIT_VERSION};
use hq_core::certify::{adversarial_color_check, read_coloring, theorem1_bound, theorem1_certificate, write_coloring};
use hq_core::field::prime_power;
use hq_core::intersection::{verify_k4_structure, verify_srg, K4Mode};
use hq_core::search::{anneal_restarts, random_coloring_stats, Schedule, TriangleIndex, SEARCH_MAX_Q};
use hq_core::triangles::{verify_nbhd_decomposition, verify_no_k4_in_family, TriangleFamily};
use hq_core::{Certificate, IntersectionGraph, Outcome};

/// Exhaustive commands stop here (|V(H_9)| = 5913).
const MAX_EXHAUSTIVE_Q: u32 = 9;
/// Above this q, K4 checks sample instead of enumerating.
const MAX_K4_EXHAUSTIVE_Q: u32 = 4;

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_ERROR: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hq", version, about = "Verification toolkit for Hermitian unital intersection graphs")]
struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, env = "HQ_OUT_DIR", default_value = "hq-out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build H_q and export the unital, the graph and its parameter check.
    Build {
        #[arg(long, value_parser = parse_q)]
        q: u32,
    },
    /// Run every structural check and the lower-bound certificate for q.
    Certify {
        #[arg(long, value_parser = parse_q)]
        q: u32,
        /// Only evaluate the closed-form bound (any prime power q).
        #[arg(long)]
        formula_only: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// K4 samples when q is too large for exhaustive enumeration.
        #[arg(long, default_value_t = 20_000)]
        k4_samples: u64,
    },
    /// Random block construction experiments and the size estimate for q.
    Simulate {
        #[arg(long, value_parser = parse_q, default_value = "4")]
        q: u32,
        /// Replacement graph: edge, c5, petersen, path4 or an edge-list file.
        #[arg(long = "F", default_value = "edge")]
        f: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Concentration tolerance, or `auto` for just under the largest admissible value.
        #[arg(long, default_value = "auto", value_parser = parse_delta)]
        delta: Delta,
        /// Use the parameters of Alon's graph G_k instead of a concrete F.
        #[arg(long)]
        alon_k: Option<u32>,
        /// Sampled (vertex, clique, class) triples per concentration run.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Count the union bound exactly instead of by n q^7.
        #[arg(long)]
        exact_count: bool,
    },
    /// Anneal edge colourings to minimise monochromatic family triangles.
    Search {
        #[arg(long, value_parser = parse_q)]
        q: u32,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        steps: u64,
        #[arg(long, default_value_t = 4)]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Uniform random colourings for the baseline fraction.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 2.0)]
        t0: f64,
        #[arg(long, default_value_t = 0.05)]
        t_end: f64,
        /// Recount the objective after this many accepted moves.
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        revalidate: u64,
    },
    /// Count monochromatic family triangles of a colouring file.
    CheckColoring {
        #[arg(long, value_parser = parse_q)]
        q: u32,
        #[arg(long)]
        coloring: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Delta {
    Auto,
    #[serde(untagged)]
    Value(f64),
}

impl Delta {
    fn resolve(self, alpha: f64) -> f64 {
        match self {
            Delta::Auto => auto_delta(alpha),
            Delta::Value(d) => d,
        }
    }
}

fn parse_q(s: &str) -> Result<u32, String> {
    let q: u64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    match prime_power(q) {
        Some(_) if q <= u32::MAX as u64 => Ok(q as u32),
        _ => Err("q must be a prime power".into()),
    }
}

fn parse_delta(s: &str) -> Result<Delta, String> {
    if s == "auto" {
        return Ok(Delta::Auto);
    }
    let d: f64 = s.parse().map_err(|_| format!("`{s}` is neither a number nor `auto`"))?;
    if !(0.0..1.0).contains(&d) {
        return Err("delta must lie in [0, 1)".into());
    }
    Ok(Delta::Value(d))
}

/// Accepts plain integers and forms like `1e7`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("`{s}` is not a whole non-negative count"));
    }
    Ok(x as u64)
}

/// Provenance stored in every JSON artifact.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: &'static str,
    q: Option<u32>,
    f: Option<String>,
    seed: Option<u64>,
    trials: Option<u64>,
    delta: Option<Delta>,
    flags: Value,
    out: PathBuf,
    threads: Option<usize>,
    version: &'static str,
}

impl RunConfig {
    fn new(cli: &Cli, command: &'static str) -> Self {
        RunConfig {
            command,
            q: None,
            f: None,
            seed: None,
            trials: None,
            delta: None,
            flags: json!({}),
            out: cli.out.clone(),
            threads: cli.threads,
            version: TOOLKIT_VERSION,
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<(String, String)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        self.written.push((name.to_string(), hex::encode(Sha256::digest(body.as_bytes()))));
        Ok(())
    }

    /// Merges this run's files into `manifest.json`, keyed by file name.
    fn write_manifest(&self, config: &RunConfig) -> Result<()> {
        if self.written.is_empty() {
            return Ok(());
        }
        let path = self.dir.join("manifest.json");
        let mut files = fs::read_to_string(&path)
            .ok()
            .and_then(|s| serde_json::from_str::<Value>(&s).ok())
            .and_then(|v| v.get("files").and_then(Value::as_object).cloned())
            .unwrap_or_default();
        for (name, digest) in &self.written {
            files.insert(name.clone(), json!({ "sha256": digest, "command": config.command }));
        }
        let body = json!({ "version": TOOLKIT_VERSION, "files": files });
        fs::write(&path, serde_json::to_string_pretty(&body)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    fn json(&mut self, name: &str, config: &RunConfig, mut body: Value) -> Result<()> {
        body["config"] = serde_json::to_value(config)?;
        self.text(name, &(serde_json::to_string_pretty(&body)? + "\n"))?;
        self.write_manifest(config)
    }
}

fn exit_for(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Pass => 0,
        Outcome::Fail => EXIT_FAIL,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn require_exhaustive(q: u32) -> Result<()> {
    if q > MAX_EXHAUSTIVE_Q {
        bail!("q = {q} is above {MAX_EXHAUSTIVE_Q}; exhaustive commands are limited to q <= {MAX_EXHAUSTIVE_Q}");
    }
    Ok(())
}

fn k4_mode(q: u32, seed: u64, samples: u64) -> K4Mode {
    if q <= MAX_K4_EXHAUSTIVE_Q {
        K4Mode::Exhaustive
    } else {
        K4Mode::Sampled { seed, count: samples }
    }
}

fn overall(certs: &[Certificate]) -> Outcome {
    certs.iter().fold(Outcome::Pass, |acc, c| acc.combine(c.outcome))
}

fn cmd_build(cli: &Cli, q: u32) -> Result<Outcome> {
    require_exhaustive(q)?;
    let mut config = RunConfig::new(cli, "build");
    config.q = Some(q);
    let g = IntersectionGraph::new(q)?;
    let mut out = Artifacts::new(&cli.out)?;
    out.text(&format!("unital-q{q}.txt"), &g.unital().export_text())?;
    out.text(&format!("hq-q{q}.edges"), &g.graph().to_edge_list())?;
    out.text(&format!("hq-q{q}.g6"), &(g.graph().to_graph6() + "\n"))?;
    let k4 = verify_k4_structure(&g, k4_mode(q, 0, 20_000));
    let cert = verify_srg(&g).with_k4(&k4).to_certificate();
    println!("built H_{q}: {} vertices, {} edges", g.n(), g.graph().m());
    print!("{}", cert.to_text());
    let outcome = cert.outcome;
    out.json(&format!("srg-q{q}.json"), &config, json!({ "certificate": cert, "k4": k4 }))?;
    Ok(outcome)
}

fn cmd_certify(cli: &Cli, q: u32, formula_only: bool, seed: u64, k4_samples: u64) -> Result<Outcome> {
    let mut config = RunConfig::new(cli, "certify");
    config.q = Some(q);
    config.seed = Some(seed);
    config.flags = json!({ "formula_only": formula_only, "k4_samples": k4_samples });
    let mut out = Artifacts::new(&cli.out)?;
    let name = format!("certify-q{q}.json");
    let mut certs = Vec::new();
    let finish = |certs: &Vec<Certificate>, out: &mut Artifacts| -> Result<Outcome> {
        let outcome = overall(certs);
        out.json(&name, &config, json!({ "outcome": outcome, "certificates": certs }))?;
        Ok(outcome)
    };

    if !formula_only {
        require_exhaustive(q)?;
        let g = IntersectionGraph::new(q)?;
        let mode = k4_mode(q, seed, k4_samples);
        let k4 = verify_k4_structure(&g, mode);
        let srg = verify_srg(&g).with_k4(&k4).to_certificate();
        let fam = TriangleFamily::build(&g)?;
        let family = Certificate::new("family-size")
            .param("q", q as u64)
            .param("brute_force_checked", fam.explicit().is_some())
            .quantity("family_size", fam.total());
        let no_k4 = verify_no_k4_in_family(&fam, mode);
        // every vertex for small q, a fixed stride otherwise
        let stride = if q <= MAX_K4_EXHAUSTIVE_Q { 1 } else { (g.n() / 32).max(1) };
        let nbhd = (0..g.n())
            .step_by(stride)
            .map(|v| verify_nbhd_decomposition(&fam, v))
            .find(|c| !c.passed())
            .unwrap_or_else(|| {
                Certificate::new("neighbourhood-decomposition")
                    .param("q", q as u64)
                    .param("vertex_stride", stride as u64)
                    .quantity("vertices_checked", g.n().div_ceil(stride) as u64)
            });
        for cert in [srg, k4, family, no_k4, nbhd] {
            let failed = cert.outcome == Outcome::Fail;
            if failed {
                eprintln!("check failed:\n{}", cert.to_text());
            }
            certs.push(cert);
            if failed {
                return finish(&certs, &mut out);
            }
        }
    }
    let t1 = theorem1_certificate(q as u64);
    for c in certs.iter().chain([&t1]) {
        println!("{}: {}", c.claim, c.outcome.as_str());
    }
    println!("margin: {}", theorem1_bound(q as u64));
    certs.push(t1);
    finish(&certs, &mut out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cli: &Cli,
    q: u32,
    f_name: &str,
    seed: u64,
    trials: u64,
    delta: Delta,
    alon_k: Option<u32>,
    samples: usize,
    exact_count: bool,
) -> Result<Outcome> {
    let mut config = RunConfig::new(cli, "simulate");
    config.seed = Some(seed);
    config.trials = Some(trials);
    config.delta = Some(delta);
    config.flags = json!({ "alon_k": alon_k, "samples": samples, "exact_count": exact_count });
    let count = if exact_count { UnionCount::Exact } else { UnionCount::Compact };
    let mut out = Artifacts::new(&cli.out)?;

    if let Some(k) = alon_k {
        let params = alon_parameters(k)?;
        if !params.valid {
            bail!("Alon's G_{k} has max-cut ratio {:.4}, not below 2/3", params.ratio);
        }
        let d = delta.resolve(params.ratio);
        let star = delta_star(params.ratio);
        let n = params.n.to_string().parse::<f64>()?;
        let m = params.m.to_string().parse::<f64>()?;
        let bound = quantitative_bound(n, m, d, count);
        let bracket = margin_bracket_real(params.ratio, d);
        let outcome = if bracket > 0.0 { Outcome::Pass } else { Outcome::Fail };
        println!("Alon G_{k}: n = 2^{}, m = {}, max-cut ratio <= {:.4}", 3 * k, params.m, params.ratio);
        println!("delta = {d:.6} (largest admissible {star:.6}), margin bracket {bracket:.3e}");
        println!("least q ~ 2^{:.2}; f(2,3,4) <= 2^{:.2}", bound.q_log2, bound.f_log2);
        let body = json!({
            "outcome": outcome,
            "alon": params,
            "delta": real(d),
            "delta_star": real(star),
            "bracket": real(bracket),
            "bound": bound,
        });
        out.json(&format!("simulate-alon-k{k}.json"), &config, body)?;
        return Ok(outcome);
    }

    require_exhaustive(q)?;
    config.q = Some(q);
    config.f = Some(f_name.to_string());
    let f = ReplacementGraph::lookup(f_name)?;
    let g = IntersectionGraph::new(q)?;
    let report = block_trials(&g, &f, seed, trials)?;
    let k4 = Certificate::new("block-instances-k4-free")
        .param("q", q as u64)
        .param("F", f.name.as_str())
        .param("trials", trials)
        .quantity("k4_free_instances", report.k4_free.iter().filter(|&&x| x).count() as u64)
        .quantity("survival_mean", real(report.survival_mean))
        .quantity("survival_expected", real(report.survival_expected))
        .outcome(if report.all_k4_free() && report.clique_triangle_free.iter().all(|&x| x) {
            Outcome::Pass
        } else {
            Outcome::Fail
        });
    let d = delta.resolve(*f.alpha.numer() as f64 / *f.alpha.denom() as f64);
    let conc = concentration_experiment(&g, &f, samples, trials, if d.is_finite() { d } else { 0.0 }, seed)?;
    let margin = match theorem2_margin(q as u64, &f, d) {
        Ok(cert) => cert,
        Err(e) => Certificate::new("block-construction-margin")
            .param("q", q as u64)
            .param("F", f.name.as_str())
            .quantity("alpha", hq_core::certificate::rational(&f.alpha))
            .note(e.to_string())
            .outcome(Outcome::Inconclusive),
    };
    let quant = f.valid_for_construction().then(|| quantitative_bound(f.n() as f64, f.m() as f64, d, count));
    println!(
        "{trials} instances of H_{q}* with F = {}: K4-free {}/{trials}, survival {:.4} (expected {:.4})",
        f.name,
        report.k4_free.iter().filter(|&&x| x).count(),
        report.survival_mean,
        report.survival_expected
    );
    println!(
        "class count mean {:.4} (expected {:.4}){}",
        conc.mean,
        conc.expectation,
        if conc.degenerate { ", below one vertex per class" } else { "" }
    );
    for n in &margin.notes {
        println!("margin: {n}");
    }
    let certs = vec![k4, margin];
    let outcome = overall(&certs);
    let body = json!({
        "outcome": outcome,
        "certificates": certs,
        "instances": report,
        "concentration": conc,
        "quantitative": quant,
    });
    out.json(&format!("simulate-q{q}-{}.json", sanitize(&f.name)), &config, body)?;
    Ok(outcome)
}

fn sanitize(name: &str) -> String {
    let base = Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    base.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    cli: &Cli,
    q: u32,
    steps: u64,
    restarts: u64,
    seed: u64,
    trials: u64,
    t0: f64,
    t_end: f64,
    revalidate: u64,
) -> Result<Outcome> {
    if q > SEARCH_MAX_Q {
        bail!("search supports q <= {SEARCH_MAX_Q}");
    }
    let schedule = Schedule::geometric(steps, t0, t_end);
    let mut config = RunConfig::new(cli, "search");
    config.q = Some(q);
    config.seed = Some(seed);
    config.trials = Some(trials);
    config.flags = json!({ "steps": steps, "restarts": restarts, "schedule": schedule, "revalidate": revalidate });
    let g = IntersectionGraph::new(q)?;
    let fam = TriangleFamily::build(&g)?;
    let index = TriangleIndex::build(&fam)?;
    let runs = anneal_restarts(&fam, &index, schedule, seed, restarts.max(1), revalidate)?;
    let best = &runs[0];
    let stats = if trials >= 2 { Some(random_coloring_stats(&fam, trials, seed)?) } else { None };
    let bound = theorem1_bound(q as u64);
    let mut out = Artifacts::new(&cli.out)?;
    out.text(&format!("search-q{q}.coloring"), &write_coloring(q, &best.best.coloring))?;
    println!(
        "best objective {} of {} family triangles (seed {}), proven lower bound {bound}",
        best.best.objective,
        fam.total(),
        best.seed
    );
    if let Some(s) = &stats {
        println!("uniform random colourings: fraction {:.5} +- {:.5}", s.mean, s.stderr);
    }
    let body = json!({
        "outcome": Outcome::Pass,
        "family_size": fam.total(),
        "lower_bound": bound.to_string(),
        "best_objective": best.best.objective,
        "best_seed": best.seed,
        "best_fraction": real(best.best.objective as f64 / fam.total() as f64),
        "runs": runs.iter().map(|r| r.summary()).collect::<Vec<_>>(),
        "random": stats,
        "exploratory": q == 3,
    });
    out.json(&format!("search-q{q}.json"), &config, body)?;
    Ok(Outcome::Pass)
}

fn cmd_check_coloring(cli: &Cli, q: u32, path: &Path) -> Result<Outcome> {
    require_exhaustive(q)?;
    let mut config = RunConfig::new(cli, "check-coloring");
    config.q = Some(q);
    config.flags = json!({ "coloring": path });
    let g = IntersectionGraph::new(q)?;
    let fam = TriangleFamily::build(&g)?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (file_q, coloring) = read_coloring(&text, g.graph())?;
    if file_q != q {
        bail!("colouring file is for q = {file_q}, not {q}");
    }
    let cert = adversarial_color_check(&fam, &coloring)?;
    print!("{}", cert.to_text());
    let outcome = cert.outcome;
    let mut out = Artifacts::new(&cli.out)?;
    out.json(&format!("check-coloring-q{q}.json"), &config, json!({ "certificate": cert }))?;
    Ok(outcome)
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Build { q } => cmd_build(cli, *q),
        Command::Certify { q, formula_only, seed, k4_samples } => {
            cmd_certify(cli, *q, *formula_only, *seed, *k4_samples)
        }
        Command::Simulate { q, f, seed, trials, delta, alon_k, samples, exact_count } => {
            cmd_simulate(cli, *q, f, *seed, *trials, *delta, *alon_k, *samples, *exact_count)
        }
        Command::Search { q, steps, restarts, seed, trials, t0, t_end, revalidate } => {
            cmd_search(cli, *q, *steps, *restarts, *seed, *trials, *t0, *t_end, *revalidate)
        }
        Command::CheckColoring { q, coloring } => cmd_check_coloring(cli, *q, coloring),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(exit_for(outcome)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
