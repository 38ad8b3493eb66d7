//! Random block construction: every maximal clique of `H_q` is replaced by a
//! random blowup of a triangle-free graph `F`, together with the arithmetic
//! that bounds how large `q` must be for the construction to work.

use std::path::Path;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificate::{rational, real, Certificate, Outcome};
use crate::certify::{maxcut_exact, CertifyError, MaxCut};
use crate::field::prime_power;
use crate::graph::{Graph, GraphError};
use crate::intersection::{formulas::vertices, IntersectionGraph};

#[derive(Debug, Error)]
pub enum BlockError {
    #[error("unknown replacement graph `{0}` (known: edge, c5, petersen, path4)")]
    UnknownGraph(String),
    #[error("replacement graph contains a triangle")]
    NotTriangleFree,
    #[error("replacement graph has no edges")]
    NoEdges,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("blowup has {0} vertices; exhaustive search allows at most {max}", max = EXHAUSTIVE_BLOWUP_MAX)]
    BlowupTooLarge(usize),
    #[error("max-cut ratio {0} is not below 2/3; the construction does not apply")]
    AlphaTooLarge(String),
    #[error("Alon graphs need k >= 1 and k not divisible by 3 (got {0})")]
    AlonK(u32),
    #[error("need at least {need} trials, got {got}")]
    Trials { need: u64, got: u64 },
}

/// Triangle-free graph `F` with its exact max-cut ratio.
#[derive(Clone, Debug)]
pub struct ReplacementGraph {
    pub name: String,
    pub graph: Graph,
    pub maxcut: MaxCut,
    pub alpha: Ratio<u64>,
}

impl ReplacementGraph {
    pub fn new(name: impl Into<String>, graph: Graph) -> Result<Self, BlockError> {
        if graph.m() == 0 {
            return Err(BlockError::NoEdges);
        }
        if !graph.is_triangle_free() {
            return Err(BlockError::NotTriangleFree);
        }
        let maxcut = maxcut_exact(&graph)?;
        let alpha = Ratio::new(maxcut.size, graph.m() as u64);
        Ok(ReplacementGraph { name: name.into(), graph, maxcut, alpha })
    }

    pub fn registry(name: &str) -> Result<Self, BlockError> {
        let graph = match name {
            "edge" => Graph::complete(2),
            "c5" => Graph::cycle(5),
            "petersen" => Graph::petersen(),
            "path4" => Graph::path(4),
            other => return Err(BlockError::UnknownGraph(other.to_string())),
        };
        Self::new(name, graph)
    }

    /// Registry name, or else a path to an edge-list file.
    pub fn lookup(name_or_path: &str) -> Result<Self, BlockError> {
        match Self::registry(name_or_path) {
            Err(BlockError::UnknownGraph(_)) if Path::new(name_or_path).exists() => {
                let text = std::fs::read_to_string(name_or_path)?;
                Self::new(name_or_path, Graph::from_edge_list(&text)?)
            }
            other => other,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn valid_for_construction(&self) -> bool {
        self.alpha < Ratio::new(2, 3)
    }

    /// Probability that a given edge of `H_q` survives: `2m/n^2`.
    pub fn survival_probability(&self) -> f64 {
        2.0 * self.m() as f64 / (self.n() as f64).powi(2)
    }

    /// Expected `|V_i(C) ∩ N*(v)|`: `2m(q+1)/n^3`.
    pub fn class_expectation(&self, q: u32) -> f64 {
        2.0 * self.m() as f64 * (q as f64 + 1.0) / (self.n() as f64).powi(3)
    }
}

/// `F[t]`: vertex `x` of `F` becomes `x*t .. x*t+t`.
pub fn blowup(f: &Graph, t: usize) -> Graph {
    assert!(t >= 1, "blowup factor must be positive");
    let edges = f.edges().iter().flat_map(|&(x, y)| {
        (0..t).flat_map(move |i| (0..t).map(move |j| ((x as usize * t + i) as u32, (y as usize * t + j) as u32)))
    });
    Graph::from_edges(f.n() * t, edges).expect("blowup edges are valid")
}

pub const EXHAUSTIVE_BLOWUP_MAX: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupMode {
    Exhaustive,
    Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupMinimum {
    /// Least number of monochromatic edges over vertex colourings of `F[t]`.
    pub min: Ratio<u64>,
    /// Least count over colourings constant on each blowup class
    /// (exhaustive mode only).
    pub corner_min: Option<u64>,
}

impl BlowupMinimum {
    pub fn attained_at_corner(&self) -> bool {
        self.corner_min.is_some_and(|c| Ratio::from_integer(c) == self.min)
    }
}

/// Fewest monochromatic edges in a vertex 2-colouring of `F[t]`. Formula
/// mode returns `(1-alpha) m t^2`.
pub fn min_mono_blowup(f: &ReplacementGraph, t: usize, mode: BlowupMode) -> Result<BlowupMinimum, BlockError> {
    let t2 = (t * t) as u64;
    match mode {
        BlowupMode::Formula => {
            let m = f.m() as u64;
            Ok(BlowupMinimum { min: (Ratio::from_integer(1) - f.alpha) * m * t2, corner_min: None })
        }
        BlowupMode::Exhaustive => {
            let nt = f.n() * t;
            if nt > EXHAUSTIVE_BLOWUP_MAX {
                return Err(BlockError::BlowupTooLarge(nt));
            }
            let big = blowup(&f.graph, t);
            let min = big.m() as u64 - maxcut_exact(&big)?.size;
            let corner = t2 * (f.m() as u64 - maxcut_exact(&f.graph)?.size);
            Ok(BlowupMinimum { min: Ratio::from_integer(min), corner_min: Some(corner) })
        }
    }
}

/// `X_{w,C}` for vertex `w` in clique `c`: uniform on `0..n`, a pure
/// function of the seed and the pair.
pub fn block_value(seed: u64, clique: u32, vertex: u32, n: usize) -> u32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((clique as u64) << 32 | vertex as u64);
    rng.random_range(0..n as u32)
}

/// One value per (vertex, clique through it).
#[derive(Clone, Debug)]
pub struct BlockAssignment {
    pub seed: u64,
    /// `values[w * (q+1) + j]` belongs to the `j`-th clique of `w` in
    /// [`IntersectionGraph::vertex_cliques`] order.
    values: Vec<u32>,
    per_vertex: usize,
}

impl BlockAssignment {
    pub fn draw(g: &IntersectionGraph, n: usize, seed: u64) -> Self {
        let per_vertex = g.q() as usize + 1;
        let values = (0..g.n())
            .into_par_iter()
            .flat_map_iter(|w| {
                g.vertex_cliques(w).iter().map(move |&c| block_value(seed, c, w as u32, n)).collect::<Vec<_>>()
            })
            .collect();
        BlockAssignment { seed, values, per_vertex }
    }

    pub fn get(&self, g: &IntersectionGraph, w: usize, clique: u32) -> u32 {
        let j = g.vertex_cliques(w).iter().position(|&c| c == clique).expect("vertex lies in clique");
        self.values[w * self.per_vertex + j]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

/// `H_q*`: the edges of `H_q` whose endpoints land on an edge of `F`.
#[derive(Debug)]
pub struct StarGraph {
    pub graph: Graph,
    pub assignment: BlockAssignment,
    /// Surviving base edge ids, ascending.
    pub kept: Vec<u32>,
}

pub fn random_block(g: &IntersectionGraph, f: &ReplacementGraph, seed: u64) -> StarGraph {
    let assignment = BlockAssignment::draw(g, f.n(), seed);
    let base = g.graph();
    let kept: Vec<u32> = (0..base.m())
        .filter(|&e| {
            let (u, w) = base.edge(e);
            let c = g.edge_point_by_id(e);
            let xu = assignment.get(g, u as usize, c);
            let xw = assignment.get(g, w as usize, c);
            f.graph.has_edge(xu as usize, xw as usize)
        })
        .map(|e| e as u32)
        .collect();
    let graph = Graph::from_edges(base.n(), kept.iter().map(|&e| base.edge(e as usize))).expect("subgraph edges");
    StarGraph { graph, assignment, kept }
}

impl StarGraph {
    /// No surviving triangle lies inside a single clique of `H_q`.
    pub fn no_clique_triangle(&self, g: &IntersectionGraph) -> bool {
        let mut ok = true;
        self.graph.for_each_triangle(|a, b, c| {
            let p = g.edge_point(a as usize, b as usize);
            if p.is_some() && p == g.edge_point(a as usize, c as usize) {
                ok = false;
            }
        });
        ok
    }

    /// Every surviving edge is an edge of `H_q`.
    pub fn is_subgraph_of(&self, g: &IntersectionGraph) -> bool {
        self.graph.edges().iter().all(|&(u, v)| g.graph().has_edge(u as usize, v as usize))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockTrialReport {
    pub q: u32,
    pub f: String,
    pub seeds: Vec<u64>,
    pub base_edges: usize,
    pub kept_edges: Vec<usize>,
    pub k4_free: Vec<bool>,
    pub clique_triangle_free: Vec<bool>,
    pub survival_expected: f64,
    pub survival_mean: f64,
    pub survival_stderr: f64,
}

impl BlockTrialReport {
    pub fn all_k4_free(&self) -> bool {
        self.k4_free.iter().all(|&x| x)
    }

    pub fn survival_within(&self, sigmas: f64) -> bool {
        (self.survival_mean - self.survival_expected).abs() <= sigmas * self.survival_stderr
    }
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Builds `trials` instances (seeds `seed, seed+1, ...`), scanning each for
/// K4s and clique triangles.
pub fn block_trials(
    g: &IntersectionGraph,
    f: &ReplacementGraph,
    seed: u64,
    trials: u64,
) -> Result<BlockTrialReport, BlockError> {
    if trials < 2 {
        return Err(BlockError::Trials { need: 2, got: trials });
    }
    let seeds: Vec<u64> = (0..trials).map(|i| seed.wrapping_add(i)).collect();
    let rows: Vec<(usize, bool, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let star = random_block(g, f, s);
            (star.kept.len(), star.graph.find_k4().is_none(), star.no_clique_triangle(g) && star.is_subgraph_of(g))
        })
        .collect();
    let base_edges = g.graph().m();
    let rates: Vec<f64> = rows.iter().map(|r| r.0 as f64 / base_edges as f64).collect();
    let (survival_mean, survival_stderr) = mean_and_stderr(&rates);
    Ok(BlockTrialReport {
        q: g.q(),
        f: f.name.clone(),
        seeds,
        base_edges,
        kept_edges: rows.iter().map(|r| r.0).collect(),
        k4_free: rows.iter().map(|r| r.1).collect(),
        clique_triangle_free: rows.iter().map(|r| r.2).collect(),
        survival_expected: f.survival_probability(),
        survival_mean,
        survival_stderr,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub q: u32,
    pub f: String,
    pub samples: usize,
    pub trials: u64,
    pub delta: f64,
    pub expectation: f64,
    pub mean: f64,
    /// Standard error of the mean, using per-instance averages as the
    /// independent units.
    pub stderr: f64,
    pub in_window_fraction: f64,
    /// The expectation is below one vertex, so concentration cannot show.
    pub degenerate: bool,
}

impl ConcentrationReport {
    pub fn mean_within(&self, sigmas: f64) -> bool {
        (self.mean - self.expectation).abs() <= sigmas * self.stderr
    }
}

/// Samples `(v, spanning clique at point p, class i)` triples and measures
/// how many members `w` of the clique keep their edge to `v` and land in
/// class `i` of the clique at `p`, across independent instances.
pub fn concentration_experiment(
    g: &IntersectionGraph,
    f: &ReplacementGraph,
    samples: usize,
    trials: u64,
    delta: f64,
    seed: u64,
) -> Result<ConcentrationReport, BlockError> {
    if trials < 2 {
        return Err(BlockError::Trials { need: 2, got: trials });
    }
    let unital = g.unital();
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<(u32, u32, u32)> = (0..samples)
        .map(|_| {
            let v = rng.random_range(0..g.n() as u32);
            let on = unital.secant_points(v as usize);
            let p = loop {
                let p = rng.random_range(0..unital.num_points() as u32);
                if !on.contains(&p) {
                    break p;
                }
            };
            (v, p, rng.random_range(0..n as u32))
        })
        .collect();
    let expectation = f.class_expectation(g.q());
    let per_trial: Vec<(f64, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let inst = seed.wrapping_add(1).wrapping_add(t);
            let mut total = 0u64;
            let mut inside = 0usize;
            for &(v, p, i) in &picks {
                let mut count = 0u64;
                for &x in unital.secant_points(v as usize) {
                    let w = unital.secant_through(p, x);
                    let alive =
                        f.graph.has_edge(block_value(inst, x, v, n) as usize, block_value(inst, x, w, n) as usize);
                    if alive && block_value(inst, p, w, n) == i {
                        count += 1;
                    }
                }
                total += count;
                let c = count as f64;
                if c >= (1.0 - delta) * expectation && c <= (1.0 + delta) * expectation {
                    inside += 1;
                }
            }
            (total as f64 / samples.max(1) as f64, inside)
        })
        .collect();
    let means: Vec<f64> = per_trial.iter().map(|r| r.0).collect();
    let (mean, stderr) = mean_and_stderr(&means);
    let inside: usize = per_trial.iter().map(|r| r.1).sum();
    Ok(ConcentrationReport {
        q: g.q(),
        f: f.name.clone(),
        samples,
        trials,
        delta,
        expectation,
        mean,
        stderr,
        in_window_fraction: inside as f64 / (samples as f64 * trials as f64),
        degenerate: expectation < 1.0,
    })
}

/// McDiarmid tail bound `2 exp(-2 delta^2 E^2 / sum c_i^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub ln: f64,
}

impl TailBound {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn log2(&self) -> f64 {
        self.ln / std::f64::consts::LN_2
    }
}

pub fn mcdiarmid_bound(expectation: f64, c: &[f64], delta: f64) -> TailBound {
    assert!(expectation > 0.0 && c.iter().all(|&x| x > 0.0), "expectation and differences must be positive");
    let sum_sq: f64 = c.iter().map(|x| x * x).sum();
    TailBound { ln: std::f64::consts::LN_2 - 2.0 * delta * delta * expectation * expectation / sum_sq }
}

/// The blowup lemma's closed form `2 exp(-8 delta^2 m^2 (q+1) / (3 n^6))`.
pub fn blowup_tail(n: f64, m: f64, q: f64, delta: f64) -> TailBound {
    TailBound { ln: std::f64::consts::LN_2 - 8.0 * delta * delta * m * m * (q + 1.0) / (3.0 * n.powi(6)) }
}

/// Same bound through [`mcdiarmid_bound`] with `3(q+1)` unit differences.
pub fn blowup_tail_via_mcdiarmid(n: f64, m: f64, q: f64, delta: f64) -> TailBound {
    let expectation = 2.0 * m * (q + 1.0) / n.powi(3);
    mcdiarmid_bound(expectation, &vec![1.0; 3 * (q as usize + 1)], delta)
}

/// `(1-alpha)(1-delta)^2 - (1+delta)^2/3`, with the delta-free part summed
/// exactly first so the boundary `alpha = 2/3, delta = 0` gives exactly zero.
pub fn margin_bracket(alpha: Ratio<u64>, delta: f64) -> f64 {
    let a = Ratio::new(*alpha.numer() as i128, *alpha.denom() as i128);
    let base = Ratio::from_integer(1) - a - Ratio::new(1, 3);
    let base = *base.numer() as f64 / *base.denom() as f64;
    let one_minus_alpha = 1.0 - alpha_f64(alpha);
    base + one_minus_alpha * (delta * delta - 2.0 * delta) - (delta * delta + 2.0 * delta) / 3.0
}

/// Bracket for an irrational or estimated `alpha`.
pub fn margin_bracket_real(alpha: f64, delta: f64) -> f64 {
    (1.0 - alpha) * (1.0 - delta).powi(2) - (1.0 + delta).powi(2) / 3.0
}

fn alpha_f64(alpha: Ratio<u64>) -> f64 {
    *alpha.numer() as f64 / *alpha.denom() as f64
}

/// Largest delta keeping the bracket positive: `(1-r)/(1+r)` with
/// `r = sqrt(1/(3(1-alpha)))`.
pub fn delta_star(alpha: f64) -> f64 {
    let r = (1.0 / (3.0 * (1.0 - alpha))).sqrt();
    (1.0 - r) / (1.0 + r)
}

/// Tolerance used when none is given: just inside `delta_star`, since the
/// required `q` shrinks as `delta` grows.
pub fn auto_delta(alpha: f64) -> f64 {
    delta_star(alpha) * (1.0 - 1e-9)
}

/// The final lower bound on monochromatic triangles in `H_q*`:
/// `(1/2) |V| m (q^3-q) E^2 [bracket]` with `E = 2m(q+1)/n^3`.
pub fn theorem2_margin_value(q: u64, n: usize, m: usize, alpha: Ratio<u64>, delta: f64) -> f64 {
    let e = 2.0 * m as f64 * (q as f64 + 1.0) / (n as f64).powi(3);
    0.5 * vertices(q) as f64 * m as f64 * (q.pow(3) - q) as f64 * e * e * margin_bracket(alpha, delta)
}

pub fn theorem2_margin(q: u64, f: &ReplacementGraph, delta: f64) -> Result<Certificate, BlockError> {
    if !f.valid_for_construction() {
        return Err(BlockError::AlphaTooLarge(format!("{}/{}", f.alpha.numer(), f.alpha.denom())));
    }
    let margin = theorem2_margin_value(q, f.n(), f.m(), f.alpha, delta);
    let star = delta_star(alpha_f64(f.alpha));
    let cert = Certificate::new("block-construction-margin")
        .param("q", q)
        .param("F", f.name.as_str())
        .param("delta", real(delta))
        .quantity("alpha", rational(&f.alpha))
        .quantity("n", f.n() as u64)
        .quantity("m", f.m() as u64)
        .quantity("bracket", real(margin_bracket(f.alpha, delta)))
        .quantity("delta_star", real(star))
        .margin(real(margin))
        .note("valid only on instances where every class count is within (1 +- delta) of its expectation");
    Ok(if margin > 0.0 { cert.outcome(Outcome::Pass) } else { cert.outcome(Outcome::Fail) })
}

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn decimal_u128<S: serde::Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Parameters of Alon's triangle-free graph `G_k`.
#[derive(Clone, Debug, Serialize)]
pub struct AlonParams {
    pub k: u32,
    #[serde(serialize_with = "decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "decimal")]
    pub m: BigUint,
    pub maxcut_upper: f64,
    pub ratio: f64,
    pub valid: bool,
}

pub fn alon_parameters(k: u32) -> Result<AlonParams, BlockError> {
    if k == 0 || k.is_multiple_of(3) || k > 60 {
        return Err(BlockError::AlonK(k));
    }
    let n = BigUint::from(1u8) << (3 * k);
    let half = BigUint::from(1u8) << (k - 1);
    let inner = &half * (&half - 1u8);
    let m = &n * &inner / 2u8;
    let kf = k as f64;
    let upper = 0.25
        * 2f64.powf(3.0 * kf)
        * (2f64.powf(kf - 1.0) * (2f64.powf(kf - 1.0) - 1.0) + 9.0 * 2f64.powf(kf) + 3.0 * 2f64.powf(kf / 2.0) + 0.25);
    let m_f = 0.5 * 2f64.powf(3.0 * kf) * 2f64.powf(kf - 1.0) * (2f64.powf(kf - 1.0) - 1.0);
    let ratio = if m_f > 0.0 { upper / m_f } else { f64::INFINITY };
    Ok(AlonParams { k, n, m, maxcut_upper: upper, ratio, valid: ratio < 2.0 / 3.0 })
}

pub fn smallest_valid_alon_k() -> u32 {
    (1..=60).filter(|k| k % 3 != 0).find(|&k| alon_parameters(k).map(|a| a.valid).unwrap_or(false)).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnionCount {
    /// `7 ln(nq)` in the exponent, as printed with the union bound.
    Compact,
    /// `ln(n (q^4-q^3+q^2)(q^3-q))` with the `(q+1)` rate.
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantBound {
    pub delta: f64,
    pub count: UnionCount,
    /// Real root of the positivity condition.
    pub q_real_log2: f64,
    /// Least prime power at or above the root.
    #[serde(serialize_with = "decimal_u128")]
    pub q: u128,
    pub q_log2: f64,
    /// `q^4 - q^3 + q^2`.
    #[serde(serialize_with = "decimal")]
    pub f_bound: BigUint,
    pub f_log2: f64,
}

/// Exponent of the failure probability, `ln 2 - rate*q + ln(count)`, as a
/// function of `x = ln q`. The construction works where this is negative.
fn failure_exponent(x: f64, n: f64, a: f64, count: UnionCount) -> f64 {
    let q = x.exp();
    match count {
        UnionCount::Compact => std::f64::consts::LN_2 - a * q + 7.0 * (n.ln() + x),
        UnionCount::Exact => {
            let verts = 4.0 * x + (1.0 - 1.0 / q + 1.0 / (q * q)).ln();
            let cliques = 3.0 * x + (1.0 - 1.0 / (q * q)).ln();
            std::f64::consts::LN_2 - a * (q + 1.0) + n.ln() + verts + cliques
        }
    }
}

/// Least prime power `q` making the union bound succeed for `F` with `n`
/// vertices, `m` edges and tolerance `delta`.
pub fn quantitative_bound(n: f64, m: f64, delta: f64, count: UnionCount) -> QuantBound {
    let a = 8.0 * delta * delta * m * m / (3.0 * n.powi(6));
    let h = |x: f64| failure_exponent(x, n, a, count);
    // h rises until x = ln(7/a) and falls after it; the root lies beyond
    let ln2 = std::f64::consts::LN_2;
    let mut lo = (7.0 / a).ln().max(ln2);
    let mut hi = lo + 1.0;
    if h(lo) < 0.0 {
        lo = ln2;
        hi = ln2;
    }
    while h(hi) >= 0.0 {
        hi += hi - lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let q_real = hi.exp();
    let q = next_prime_power(q_real.ceil() as u128);
    let qb = BigUint::from(q);
    let f_bound = qb.pow(4u32) - qb.pow(3u32) + qb.pow(2u32);
    QuantBound {
        delta,
        count,
        q_real_log2: hi / std::f64::consts::LN_2,
        q,
        q_log2: (q as f64).log2(),
        f_log2: big_log2(&f_bound),
        f_bound,
    }
}

pub fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let top: BigUint = x >> (bits - 64);
    (top.iter_u64_digits().next().unwrap() as f64).log2() + (bits - 64) as f64
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let (mut a, mut b, mut r) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = if r >= m - a { r - (m - a) } else { r + a };
        }
        a = if a >= m - a { a - (m - a) } else { a + a };
        b >>= 1;
    }
    r
}

fn powmod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller-Rabin with the first 20 prime bases; deterministic below 2^81
/// and overwhelmingly reliable above.
pub fn is_probable_prime(n: u128) -> bool {
    const BASES: [u128; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn integer_root(n: u128, k: u32) -> u128 {
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u128;
    while r > 0 && r.checked_pow(k).is_none_or(|p| p > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|p| p <= n) {
        r += 1;
    }
    r
}

pub fn is_prime_power(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    if let Ok(small) = u64::try_from(n) {
        if small < 1 << 32 {
            return prime_power(small).is_some();
        }
    }
    if is_probable_prime(n) {
        return true;
    }
    (2..128).any(|k| {
        let r = integer_root(n, k);
        r >= 2 && r.pow(k) == n && is_probable_prime(r)
    })
}

pub fn next_prime_power(from: u128) -> u128 {
    (from.max(2)..).find(|&x| is_prime_power(x)).unwrap()
}
