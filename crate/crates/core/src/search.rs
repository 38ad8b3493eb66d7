//! Local search for edge colourings of `H_q` with few monochromatic
//! non-degenerate triangles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certify::{goodman_count, seeded_coloring, theorem1_bound, CertifyError, EdgeColoring};
use crate::triangles::TriangleFamily;

/// Largest `q` for which the per-edge triangle index is built.
pub const SEARCH_MAX_Q: u32 = 7;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search supports q <= {SEARCH_MAX_Q}, got {0}")]
    TooLarge(u32),
    #[error("incremental objective {incremental} disagrees with recount {recount}")]
    Drift { incremental: u64, recount: u64 },
    #[error("objective {found} is below the proven lower bound {bound}")]
    BelowBound { found: u64, bound: String },
    #[error("need at least 2 trials, got {0}")]
    Trials(u64),
    #[error("triangle index has {found} triangles, family has {expected}")]
    IndexSize { found: u64, expected: u64 },
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// Non-degenerate triangles as edge-id triples, with a per-edge incidence
/// list.
#[derive(Debug)]
pub struct TriangleIndex {
    triangles: Vec<[u32; 3]>,
    start: Vec<u32>,
    on_edge: Vec<u32>,
}

impl TriangleIndex {
    pub fn build(fam: &TriangleFamily<'_>) -> Result<Self, SearchError> {
        if fam.q() > SEARCH_MAX_Q {
            return Err(SearchError::TooLarge(fam.q()));
        }
        let g = fam.graph().graph();
        let id = |a: u32, b: u32| g.edge_id(a as usize, b as usize).expect("clique pair is an edge") as u32;
        let mut triangles = Vec::with_capacity(fam.total() as usize);
        for v in 0..g.n() {
            let vv = v as u32;
            fam.for_each_spanning_clique(v, |_, members| {
                for (i, &a) in members.iter().enumerate() {
                    for &b in &members[i + 1..] {
                        if vv < a && vv < b {
                            triangles.push([id(vv, a), id(vv, b), id(a, b)]);
                        }
                    }
                }
            });
        }
        if triangles.len() as u64 != fam.total() {
            return Err(SearchError::IndexSize { found: triangles.len() as u64, expected: fam.total() });
        }
        let m = g.m();
        let mut start = vec![0u32; m + 1];
        for t in &triangles {
            for &e in t {
                start[e as usize + 1] += 1;
            }
        }
        for e in 0..m {
            start[e + 1] += start[e];
        }
        let mut fill = start.clone();
        let mut on_edge = vec![0u32; triangles.len() * 3];
        for (i, t) in triangles.iter().enumerate() {
            for &e in t {
                on_edge[fill[e as usize] as usize] = i as u32;
                fill[e as usize] += 1;
            }
        }
        Ok(TriangleIndex { triangles, start, on_edge })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles_on(&self, e: usize) -> impl Iterator<Item = [u32; 3]> + '_ {
        self.on_edge[self.start[e] as usize..self.start[e + 1] as usize].iter().map(|&t| self.triangles[t as usize])
    }

    /// The other two edges of each triangle on `e`.
    fn partners(&self, e: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.triangles_on(e).map(move |t| {
            let mut others = t.iter().map(|&x| x as usize).filter(|&x| x != e);
            (others.next().unwrap(), others.next().unwrap())
        })
    }

    pub fn count_mono(&self, coloring: &EdgeColoring<'_>) -> u64 {
        self.triangles
            .iter()
            .filter(|t| {
                let c = coloring.is_blue(t[0] as usize);
                c == coloring.is_blue(t[1] as usize) && c == coloring.is_blue(t[2] as usize)
            })
            .count() as u64
    }
}

/// Change in the monochromatic count of one triangle when edge `x` flips,
/// given the colours of `x` and its two partners.
fn contribution(x: bool, y: bool, z: bool) -> i32 {
    match (y == z, x == y) {
        (false, _) => 0,
        (true, true) => -1,
        (true, false) => 1,
    }
}

#[derive(Clone, Debug)]
pub struct SearchState<'g> {
    pub coloring: EdgeColoring<'g>,
    pub objective: u64,
    delta: Vec<i32>,
}

impl<'g> SearchState<'g> {
    pub fn new(index: &TriangleIndex, coloring: EdgeColoring<'g>) -> Self {
        let delta = (0..coloring.len())
            .map(|e| {
                let x = coloring.is_blue(e);
                index.partners(e).map(|(f, g)| contribution(x, coloring.is_blue(f), coloring.is_blue(g))).sum()
            })
            .collect();
        let objective = index.count_mono(&coloring);
        SearchState { coloring, objective, delta }
    }

    /// Exact change in the objective if edge `e` were flipped.
    pub fn flip_delta(&self, e: usize) -> i64 {
        self.delta[e] as i64
    }

    pub fn flip(&mut self, index: &TriangleIndex, e: usize) {
        let c = &mut self.coloring;
        for (f, g) in index.partners(e) {
            let (x, y, z) = (c.is_blue(e), c.is_blue(f), c.is_blue(g));
            self.delta[f] -= contribution(y, x, z);
            self.delta[g] -= contribution(z, x, y);
            self.delta[f] += contribution(y, !x, z);
            self.delta[g] += contribution(z, !x, y);
        }
        self.objective = (self.objective as i64 + self.delta[e] as i64) as u64;
        self.delta[e] = -self.delta[e];
        c.flip(e);
    }

    /// Lowest-id edge among those with the most negative delta.
    fn best_move(&self) -> Option<usize> {
        let (e, &d) = self.delta.iter().enumerate().min_by_key(|&(e, &d)| (d, e))?;
        (d < 0).then_some(e)
    }
}

/// Geometric cooling from `t0`, multiplying by `cooling` after every step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub t0: f64,
    pub cooling: f64,
    pub steps: u64,
}

impl Schedule {
    /// Cools from `t0` to `t_end` over `steps` steps.
    pub fn geometric(steps: u64, t0: f64, t_end: f64) -> Self {
        let cooling = if steps == 0 { 1.0 } else { (t_end / t0).powf(1.0 / steps as f64) };
        Schedule { t0, cooling, steps }
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::geometric(1_000_000, 2.0, 0.05)
    }
}

#[derive(Clone, Debug)]
pub struct AnnealResult<'g> {
    pub seed: u64,
    pub initial_objective: u64,
    pub best: SearchState<'g>,
    pub accepted: u64,
    pub revalidations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnealSummary {
    pub seed: u64,
    pub initial_objective: u64,
    pub best_objective: u64,
    pub accepted: u64,
    pub revalidations: u64,
}

impl AnnealResult<'_> {
    pub fn summary(&self) -> AnnealSummary {
        AnnealSummary {
            seed: self.seed,
            initial_objective: self.initial_objective,
            best_objective: self.best.objective,
            accepted: self.accepted,
            revalidations: self.revalidations,
        }
    }
}

fn revalidate(fam: &TriangleFamily<'_>, state: &SearchState<'_>) -> Result<(), SearchError> {
    let recount = goodman_count(fam, &state.coloring)?.monochromatic;
    if recount != state.objective {
        return Err(SearchError::Drift { incremental: state.objective, recount });
    }
    Ok(())
}

fn check_bound(fam: &TriangleFamily<'_>, objective: u64) -> Result<(), SearchError> {
    let bound = theorem1_bound(fam.q() as u64);
    if bound > num_rational::Ratio::from_integer(0) && num_rational::Ratio::from_integer(objective as i128) < bound {
        return Err(SearchError::BelowBound { found: objective, bound: bound.to_string() });
    }
    Ok(())
}

/// Simulated annealing over single-edge flips from a uniform random start,
/// followed by a greedy descent from the best colouring seen. The objective
/// is recounted every `revalidate_every` accepted moves.
pub fn anneal<'g>(
    fam: &TriangleFamily<'g>,
    index: &TriangleIndex,
    schedule: Schedule,
    seed: u64,
    revalidate_every: u64,
) -> Result<AnnealResult<'g>, SearchError> {
    let graph = fam.graph().graph();
    let mut state = SearchState::new(index, seeded_coloring(graph, seed, 0));
    let initial_objective = state.objective;
    let mut best = state.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let m = graph.m();
    let (mut accepted, mut revalidations) = (0u64, 0u64);
    let mut temp = schedule.t0;
    for _ in 0..schedule.steps {
        if m == 0 {
            break;
        }
        let e = rng.random_range(0..m);
        let d = state.flip_delta(e);
        if d <= 0 || rng.random::<f64>() < (-(d as f64) / temp).exp() {
            state.flip(index, e);
            accepted += 1;
            if state.objective < best.objective {
                best.coloring.clone_from(&state.coloring);
                best.objective = state.objective;
            }
            if revalidate_every > 0 && accepted % revalidate_every == 0 {
                revalidate(fam, &state)?;
                revalidations += 1;
            }
        }
        temp *= schedule.cooling;
    }
    if schedule.steps > 0 {
        best = SearchState::new(index, best.coloring);
        while let Some(e) = best.best_move() {
            best.flip(index, e);
        }
    }
    revalidate(fam, &best)?;
    check_bound(fam, best.objective)?;
    Ok(AnnealResult { seed, initial_objective, best, accepted, revalidations: revalidations + 1 })
}

/// Independent restarts with seeds `seed, seed+1, ...`; the best result
/// (lowest objective, then lowest seed) comes first.
pub fn anneal_restarts<'g>(
    fam: &TriangleFamily<'g>,
    index: &TriangleIndex,
    schedule: Schedule,
    seed: u64,
    restarts: u64,
    revalidate_every: u64,
) -> Result<Vec<AnnealResult<'g>>, SearchError> {
    let mut runs = (0..restarts)
        .into_par_iter()
        .map(|r| anneal(fam, index, schedule, seed.wrapping_add(r), revalidate_every))
        .collect::<Result<Vec<_>, _>>()?;
    runs.sort_by_key(|r| (r.best.objective, r.seed));
    Ok(runs)
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomStats {
    pub trials: u64,
    pub mean: f64,
    pub stderr: f64,
}

impl RandomStats {
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }
}

/// Monochromatic fraction of the family under uniform random colourings.
pub fn random_coloring_stats(fam: &TriangleFamily<'_>, trials: u64, seed: u64) -> Result<RandomStats, SearchError> {
    if trials < 2 {
        return Err(SearchError::Trials(trials));
    }
    let graph = fam.graph().graph();
    let fractions = (0..trials)
        .into_par_iter()
        .map(|t| {
            let c = seeded_coloring(graph, seed, t);
            Ok(goodman_count(fam, &c)?.monochromatic as f64 / fam.total() as f64)
        })
        .collect::<Result<Vec<f64>, SearchError>>()?;
    let (mean, stderr) = crate::blocks::mean_and_stderr(&fractions);
    Ok(RandomStats { trials, mean, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::Color;
    use crate::intersection::IntersectionGraph;

    #[test]
    fn all_red_delta_is_minus_edge_triangles() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let index = TriangleIndex::build(&fam).unwrap();
        let state = SearchState::new(&index, EdgeColoring::monochrome(g.graph(), Color::Red));
        assert_eq!(state.objective, 3024);
        for e in 0..g.graph().m() {
            assert_eq!(state.flip_delta(e), -(index.triangles_on(e).count() as i64));
            assert_eq!(state.flip_delta(e), -9);
        }
    }

    #[test]
    fn double_flip_is_identity() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let index = TriangleIndex::build(&fam).unwrap();
        let mut s = SearchState::new(&index, seeded_coloring(g.graph(), 5, 0));
        let before = s.clone();
        s.flip(&index, 17);
        s.flip(&index, 17);
        assert_eq!(s.objective, before.objective);
        assert_eq!(s.coloring, before.coloring);
        assert_eq!(s.delta, before.delta);
    }

    #[test]
    fn zero_steps_returns_start() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let index = TriangleIndex::build(&fam).unwrap();
        let sched = Schedule::geometric(0, 1.0, 0.1);
        let r = anneal(&fam, &index, sched, 9, 0).unwrap();
        assert_eq!(r.best.coloring, seeded_coloring(g.graph(), 9, 0));
        assert_eq!(r.best.objective, r.initial_objective);
    }

    #[test]
    fn anneal_is_reproducible_and_improves() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let index = TriangleIndex::build(&fam).unwrap();
        let sched = Schedule::geometric(20_000, 1.0, 0.05);
        let a = anneal(&fam, &index, sched, 3, 5000).unwrap();
        let b = anneal(&fam, &index, sched, 3, 5000).unwrap();
        assert_eq!(a.best.coloring, b.best.coloring);
        assert!(a.best.objective < a.initial_objective);
    }

    #[test]
    fn stats_need_two_trials() {
        let g = IntersectionGraph::new(2).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        assert!(matches!(random_coloring_stats(&fam, 1, 0), Err(SearchError::Trials(1))));
        let s = random_coloring_stats(&fam, 200, 0).unwrap();
        assert!(s.within(0.25, 4.0));
    }
}
