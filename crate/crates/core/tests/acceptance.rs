//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the run
//! exits non-zero if any fails. Pass criterion numbers as arguments to run
//! a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hq_core::blocks::{
    alon_parameters, auto_delta, block_trials, concentration_experiment, min_mono_blowup, quantitative_bound,
    smallest_valid_alon_k, BlowupMode, ReplacementGraph, UnionCount,
};
use hq_core::certify::{
    direct_mono, goodman_count, goodman_count_all_triangles, seeded_coloring, theorem1_bound, theorem1_certificate,
    theorem1_fraction, EdgeColoring,
};
use hq_core::geometry::UnitalIncidence;
use hq_core::intersection::{formulas, verify_k4_structure, verify_srg, K4Mode};
use hq_core::search::{anneal_restarts, random_coloring_stats, Schedule, SearchState, TriangleIndex};
use hq_core::triangles::{verify_no_k4_in_family, TriangleFamily};
use hq_core::{Graph, IntersectionGraph, Outcome};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn c1_unital_cardinality() -> Check {
    let start = Instant::now();
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        let u = UnitalIncidence::new(q).map_err(|e| e.to_string())?;
        let q64 = q as u64;
        ensure(u.num_points() as u64 == q64.pow(3) + 1, format!("q={q}: {} points", u.num_points()))?;
        ensure(u.num_secants() as u64 == formulas::vertices(q64), format!("q={q}: {} secants", u.num_secants()))?;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("q in {{2,3,4,5,7,8,9}} exact, {:.2?}", start.elapsed()))
}

fn c2_srg() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    for q in [3u32, 4] {
        let g = IntersectionGraph::new(q).map_err(|e| e.to_string())?;
        let k4 = verify_k4_structure(&g, K4Mode::Exhaustive);
        let r = verify_srg(&g).with_k4(&k4);
        ensure(r.passed(), format!("q={q}: {r:?}"))?;
        let q64 = q as u64;
        ensure(
            r.lambda_observed.iter().eq([formulas::lambda(q64) as u32].iter())
                && r.mu_observed.iter().eq([formulas::mu(q64) as u32].iter()),
            format!("q={q}: lambda {:?} mu {:?}", r.lambda_observed, r.mu_observed),
        )?;
        detail.push(format!("H{q}: n={} lambda={:?} mu={:?}", r.n, r.lambda_observed, r.mu_observed));
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{}, {:.2?}", detail.join("; "), start.elapsed()))
}

fn c3_k4_structure() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    for q in [3u32, 4] {
        let g = IntersectionGraph::new(q).map_err(|e| e.to_string())?;
        let clique = verify_k4_structure(&g, K4Mode::Exhaustive);
        ensure(clique.passed(), format!("q={q}: {}", clique.to_text()))?;
        let fam = TriangleFamily::build(&g).map_err(|e| e.to_string())?;
        let degenerate = verify_no_k4_in_family(&fam, K4Mode::Exhaustive);
        ensure(degenerate.passed(), format!("q={q}: {}", degenerate.to_text()))?;
        // independent pass: three of the four secants share a unital point
        let unital = g.unital();
        let mut bad = 0u64;
        g.graph().for_each_k4(|k| {
            let concurrent = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]].iter().any(|t| {
                let a = unital.secant_points(k[t[0]] as usize);
                a.iter().any(|p| {
                    unital.secant_points(k[t[1]] as usize).contains(p)
                        && unital.secant_points(k[t[2]] as usize).contains(p)
                })
            });
            bad += u64::from(!concurrent);
            true
        });
        ensure(bad == 0, format!("q={q}: {bad} K4s without three concurrent secants"))?;
        detail.push(format!("H{q}: {} K4s", clique.quantities["k4_count"]));
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{}, zero counterexamples, {:.2?}", detail.join("; "), start.elapsed()))
}

/// Classifies every triangle from the raw secant point sets.
fn brute_nondegenerate(g: &IntersectionGraph) -> u64 {
    let unital = g.unital();
    let graph = g.graph();
    let meet = |a: usize, b: usize| {
        let pa = unital.secant_points(a);
        unital.secant_points(b).iter().copied().find(|p| pa.contains(p))
    };
    let n = graph.n();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            let Some(x) = meet(a, b) else { continue };
            for c in b + 1..n {
                let (Some(y), Some(z)) = (meet(a, c), meet(b, c)) else { continue };
                if x != y && x != z && y != z {
                    count += 1;
                }
            }
        }
    }
    count
}

fn c4_triangle_family() -> Check {
    let mut detail = Vec::new();
    for (q, want) in [(3u32, 3024u64), (4, 41600)] {
        let g = IntersectionGraph::new(q).map_err(|e| e.to_string())?;
        let fam = TriangleFamily::build(&g).map_err(|e| e.to_string())?;
        let brute = brute_nondegenerate(&g);
        ensure(
            fam.total() == want && hq_core::triangles::formulas::total(q as u64) == want && brute == want,
            format!("q={q}: formula {} brute {brute}", fam.total()),
        )?;
        detail.push(format!("|T{q}|={want}"));
    }
    Ok(format!("{} by formula and brute force", detail.join(", ")))
}

fn brute_mono_all(c: &EdgeColoring<'_>) -> u64 {
    let g = c.graph();
    let n = g.n();
    let col = |a: usize, b: usize| c.is_blue(g.edge_id(a, b).unwrap());
    let mut mono = 0;
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for x in b + 1..n {
                if g.has_edge(a, x) && g.has_edge(b, x) {
                    let k = col(a, b);
                    if k == col(a, x) && k == col(b, x) {
                        mono += 1;
                    }
                }
            }
        }
    }
    mono
}

fn c5_goodman() -> Check {
    for q in [3u32, 4] {
        let g = IntersectionGraph::new(q).map_err(|e| e.to_string())?;
        let fam = TriangleFamily::build(&g).map_err(|e| e.to_string())?;
        let list: Vec<[u32; 3]> = fam.explicit().unwrap().iter().map(|t| t.vertices).collect();
        for s in 0..100 {
            let c = seeded_coloring(g.graph(), 1000 + q as u64, s);
            let formula = goodman_count(&fam, &c).map_err(|e| e.to_string())?.monochromatic;
            let direct = direct_mono(&c, list.iter().copied());
            ensure(formula == direct, format!("q={q} coloring {s}: {formula} vs {direct}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100 {
        let n = rng.random_range(3..=100usize);
        let p: f64 = rng.random_range(0.05..0.9);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let c = EdgeColoring::random(&g, &mut rng);
        let formula = goodman_count_all_triangles(&c).map_err(|e| e.to_string())?;
        let brute = brute_mono_all(&c);
        ensure(formula == brute, format!("random graph {i} (n={n}): {formula} vs {brute}"))?;
    }
    Ok("200 family colourings on H3/H4 and 100 random graphs agree exactly".into())
}

fn c6_theorem1() -> Check {
    let c4 = theorem1_certificate(4);
    let c3 = theorem1_certificate(3);
    ensure(theorem1_bound(4) == Ratio::from_integer(4160), format!("L(4) = {}", theorem1_bound(4)))?;
    ensure(c4.outcome == Outcome::Pass, "q=4 not pass")?;
    ensure(theorem1_bound(3) == Ratio::from_integer(0), format!("L(3) = {}", theorem1_bound(3)))?;
    ensure(c3.outcome == Outcome::Inconclusive, "q=3 not inconclusive")?;
    Ok("L(4)=4160 pass, L(3)=0 inconclusive".into())
}

fn c7_fraction() -> Check {
    let qs = [4u64, 5, 7, 8, 9];
    let fr: Vec<Ratio<i128>> = qs.iter().map(|&q| theorem1_fraction(q)).collect();
    let shown: Vec<String> = qs.iter().zip(&fr).map(|(q, f)| format!("q={q}:{f}")).collect();
    let mut problems = Vec::new();
    if !fr.windows(2).all(|w| w[0] < w[1]) {
        problems.push("not strictly increasing".to_string());
    }
    if fr.iter().any(|f| *f >= Ratio::new(1, 4)) {
        problems.push("reaches 1/4".to_string());
    }
    if fr[4] <= Ratio::new(1, 5) {
        problems.push(format!("L(9)/|T9| = {} does not exceed 0.2", fr[4]));
    }
    let mut mc = Vec::new();
    for (q, trials) in [(3u32, 10_000u64), (4, 1_000)] {
        let g = IntersectionGraph::new(q).map_err(|e| e.to_string())?;
        let fam = TriangleFamily::build(&g).map_err(|e| e.to_string())?;
        let s = random_coloring_stats(&fam, trials, 2024).map_err(|e| e.to_string())?;
        if !s.within(0.25, 3.0) {
            problems.push(format!("q={q}: random mean {} stderr {}", s.mean, s.stderr));
        }
        mc.push(format!("q={q} mean {:.5}+-{:.5}", s.mean, s.stderr));
    }
    let detail = format!("fractions [{}]; {}", shown.join(", "), mc.join(", "));
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn c8_blowup() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    for name in ["c5", "path4", "edge"] {
        let f = ReplacementGraph::registry(name).map_err(|e| e.to_string())?;
        for t in [1usize, 2] {
            let ex = min_mono_blowup(&f, t, BlowupMode::Exhaustive).map_err(|e| e.to_string())?;
            let formula = min_mono_blowup(&f, t, BlowupMode::Formula).map_err(|e| e.to_string())?;
            ensure(ex.min == formula.min, format!("{name} t={t}: {} vs {}", ex.min, formula.min))?;
            ensure(ex.attained_at_corner(), format!("{name} t={t}: minimum not at a corner"))?;
            detail.push(format!("{name}[{t}]={}", ex.min));
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(detail.join(" "))
}

fn c9_random_block() -> Check {
    let g = IntersectionGraph::new(4).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for name in ["edge", "c5"] {
        let f = ReplacementGraph::registry(name).map_err(|e| e.to_string())?;
        let r = block_trials(&g, &f, 9000, 100).map_err(|e| e.to_string())?;
        ensure(r.all_k4_free(), format!("{name}: K4 found"))?;
        ensure(r.clique_triangle_free.iter().all(|&x| x), format!("{name}: triangle inside a clique"))?;
        ensure(
            r.survival_within(3.0),
            format!("{name}: survival {} vs {} (stderr {})", r.survival_mean, r.survival_expected, r.survival_stderr),
        )?;
        let c = concentration_experiment(&g, &f, 200, 100, 0.5, 9100).map_err(|e| e.to_string())?;
        ensure(
            c.mean_within(3.0),
            format!("{name}: class mean {} vs {} (stderr {})", c.mean, c.expectation, c.stderr),
        )?;
        detail.push(format!(
            "{name}: survival {:.4} (exp {:.4}), class mean {:.4} (exp {:.4})",
            r.survival_mean, r.survival_expected, c.mean, c.expectation
        ));
    }
    Ok(detail.join("; "))
}

fn c10_quantitative() -> Check {
    let start = Instant::now();
    let a7 = alon_parameters(7).map_err(|e| e.to_string())?;
    let k = smallest_valid_alon_k();
    let n = (1u64 << 21) as f64;
    let m = (63u64 << 26) as f64;
    let delta = auto_delta(a7.ratio);
    let b = quantitative_bound(n, m, delta, UnionCount::Compact);
    let elapsed = start.elapsed();
    let detail = format!(
        "k_min={k}, ratio={:.4}, delta={delta:.5}, q~2^{:.2}, f-bound~2^{:.2}, {elapsed:.2?}",
        a7.ratio, b.q_log2, b.f_log2
    );
    let mut problems = Vec::new();
    if k != 7 {
        problems.push(format!("smallest valid k is {k}"));
    }
    if (b.q_log2 - 70.0).abs() > 4.0 {
        problems.push(format!("q off 2^70 by 2^{:.1}", b.q_log2 - 70.0));
    }
    if (b.f_log2 - 280.0).abs() > 16.0 {
        problems.push(format!("f-bound off 2^280 by 2^{:.1}", b.f_log2 - 280.0));
    }
    if elapsed > Duration::from_secs(1) {
        problems.push("slower than 1s".into());
    }
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn c11_search() -> Check {
    let g = IntersectionGraph::new(4).map_err(|e| e.to_string())?;
    let fam = TriangleFamily::build(&g).map_err(|e| e.to_string())?;
    let index = TriangleIndex::build(&fam).map_err(|e| e.to_string())?;
    let sched = Schedule::geometric(1_000_000, 2.0, 0.05);
    let runs = anneal_restarts(&fam, &index, sched, 11, 32, 250_000).map_err(|e| e.to_string())?;
    let best = runs.iter().map(|r| r.best.objective).min().unwrap();
    ensure(runs.len() == 32 && best >= 4160, format!("best objective {best}"))?;

    let g3 = IntersectionGraph::new(3).map_err(|e| e.to_string())?;
    let fam3 = TriangleFamily::build(&g3).map_err(|e| e.to_string())?;
    let index3 = TriangleIndex::build(&fam3).map_err(|e| e.to_string())?;
    let mut state = SearchState::new(&index3, seeded_coloring(g3.graph(), 5, 0));
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let m = g3.graph().m();
    for i in 0..100_000 {
        let e = rng.random_range(0..m);
        let predicted = state.objective as i64 + state.flip_delta(e);
        state.flip(&index3, e);
        let recount = index3.count_mono(&state.coloring) as i64;
        ensure(predicted == recount, format!("check {i}: predicted {predicted}, recount {recount}"))?;
        if i % 10_000 == 0 {
            let goodman = goodman_count(&fam3, &state.coloring).map_err(|e| e.to_string())?.monochromatic;
            ensure(goodman as i64 == recount, format!("check {i}: goodman {goodman}, recount {recount}"))?;
        }
    }
    Ok(format!("H4 best over 32x1e6 steps = {best} >= 4160; 1e5 delta checks on H3 exact"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("unital cardinality", c1_unital_cardinality),
        ("strongly regular parameters", c2_srg),
        ("K4 structure", c3_k4_structure),
        ("triangle family size", c4_triangle_family),
        ("Goodman identity", c5_goodman),
        ("quasi-Folkman bound", c6_theorem1),
        ("asymptotic fraction", c7_fraction),
        ("blowup lemma", c8_blowup),
        ("random block construction", c9_random_block),
        ("quantitative reproduction", c10_quantitative),
        ("search soundness", c11_search),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS criterion {number:>2} {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {number:>2} {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
