//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use graphsim::aligner::{align_models, maximal_greedy, reconstruct_shapes, MatchOptions};
use graphsim::codec::{log_binomial, model_length, shape_length, universal_int};
use graphsim::generators::{ba, er};
use graphsim::graph::NodeAlignment;
use graphsim::maxent::{
    binary_entropy, build_constraints_for, class_probabilities, data_length, fit, DEFAULT_MAX_ITER, DEFAULT_TOL,
    LOGIT_CLAMP,
};
use graphsim::model::{Model, StructureKind};
use graphsim::similarity::model_distance;
use graphsim::summarizer::{summarize, SummarizerConfig};
use rand::Rng;

use common::*;

const CODEC_STRUCTURES: usize = 10_000;
const CODEC_REL_TOL: f64 = 1e-9;
const UNIVERSAL_TOL: f64 = 1e-12;

const CLOSED_FORM_GRAPHS: u64 = 50;
const CLOSED_FORM_TOL: f64 = 1e-6;
const ORACLE_INSTANCES: usize = 20;
const ORACLE_PROB_TOL: f64 = 1e-4;
const RESIDUAL_TOL: f64 = 1e-6;

const RECOVERY_JACCARD: f64 = 0.8;
const RECOVERY_MIN_HITS: usize = 18;

const ER_MAX_STRUCTURES: usize = 1;
const ER_MAX_PCT: f64 = 1.0;
const BA_MIN_PCT: f64 = 1.0;

const NMD_PAIRS: usize = 50;

const GRID_MIN_RHO: f64 = 0.7;

const ROUND_TRIP_PAIRS: usize = 1000;

const MATCHING_INSTANCES: usize = 500;
const MATCHING_MAX_SIDE: usize = 6;

const SCALING_MAX_EXPONENT: f64 = 1.3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let took = t.elapsed();
    let in_time = took <= budget;
    let pass = o.pass && in_time;
    println!(
        "{} {name}: {} [{:.1}s of {}s]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn codec() -> Outcome {
    let mut rng = rng(101);
    let mut violations = 0;
    let mut worst_formula = 0.0f64;
    for i in 0..CODEC_STRUCTURES {
        let n = rng.gen_range(2..=1000);
        let kind = StructureKind::ALL[i % 4];
        let shape = random_structure(&mut rng, kind, n, 80).shape();
        let without = shape_length(&shape, n as u64, false).unwrap();
        let with = shape_length(&shape, n as u64, true).unwrap();
        if !(without.is_finite() && without >= 0.0 && with.is_finite() && with >= without) {
            violations += 1;
        }
        for (ids, got) in [(false, without), (true, with)] {
            worst_formula = worst_formula.max(relative_error(got, shape_length_oracle(&shape, n as u64, ids)));
        }
    }
    let mut order_gap = 0.0f64;
    for _ in 0..1000 {
        let count = rng.gen_range(0..15);
        let m = random_model(&mut rng, 400, count, &StructureKind::ALL, 30);
        let mut r = m.clone();
        r.structures.reverse();
        order_gap = order_gap.max(relative_error(model_length(&m, true).unwrap(), model_length(&r, true).unwrap()));
    }
    let mut worst_binom = 0.0f64;
    for n in 0..=1000u64 {
        for k in (0..=n).step_by(((n / 25) as usize).max(1)).chain([n]) {
            worst_binom = worst_binom.max(relative_error(log_binomial(n, k).unwrap(), log2_binomial_exact(n, k)));
        }
    }
    let c = C0.log2();
    let worst_univ = [(1u64, 0.0), (2, 1.0), (16, 7.0), (65536, 23.0)]
        .iter()
        .map(|&(n, logs)| (universal_int(n).unwrap() - (c + logs)).abs())
        .fold(0.0, f64::max);
    let pass = violations == 0
        && worst_formula <= CODEC_REL_TOL
        && order_gap <= CODEC_REL_TOL
        && worst_binom <= CODEC_REL_TOL
        && worst_univ <= UNIVERSAL_TOL;
    outcome(
        pass,
        format!(
            "{CODEC_STRUCTURES} structures, {violations} invariant violations, formula rel err {worst_formula:.1e}, \
             order rel err {order_gap:.1e}, log_binomial rel err {worst_binom:.1e} (tol {CODEC_REL_TOL:e}), \
             universal_int err {worst_univ:.1e} (tol {UNIVERSAL_TOL:e})"
        ),
    )
}

fn maxent() -> Outcome {
    let mut rng = rng(102);
    let mut worst_closed = 0.0f64;
    for i in 0..CLOSED_FORM_GRAPHS {
        let n = rng.gen_range(5..300);
        let p = rng.gen_range(0.005..0.6);
        let g = er(n, p, i).unwrap();
        let cs = build_constraints_for(&g, &[]).unwrap();
        let state = fit(&cs, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let want = pairs * binary_entropy(g.edge_count() as f64 / pairs);
        worst_closed = worst_closed.max((data_length(&cs, &state).unwrap() - want).abs());
    }
    let (mut compared, mut attempts, mut worst_prob, mut worst_res) = (0, 0, 0.0f64, 0.0f64);
    let sat = 1.0 / (1.0 + LOGIT_CLAMP.exp());
    while compared < ORACLE_INSTANCES && attempts < 5000 {
        attempts += 1;
        let count = rng.gen_range(1..=3);
        let (g, structures) = random_instance(&mut rng, 20, 0.4, count);
        let Some(oracle) = maxent_cell_oracle(&g, &structures) else { continue };
        let cs = build_constraints_for(&g, &structures).unwrap();
        let state = fit(&cs, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        for (r, x) in cs.regions.iter().zip(cs.residuals(&state.lambdas)) {
            // saturated regions stop at the clamp, `size * σ(-30)` away
            let floor = if r.target == 0 || r.target == r.size { r.size as f64 * sat } else { 0.0 };
            worst_res = worst_res.max(x.abs() - floor);
        }
        let lib = library_cell_probs(&cs, &class_probabilities(&cs, &state), &oracle);
        for (a, b) in lib.iter().zip(&oracle.probs) {
            worst_prob = worst_prob.max((a - b).abs());
        }
        compared += 1;
    }
    let pass = worst_closed <= CLOSED_FORM_TOL
        && compared == ORACLE_INSTANCES
        && worst_prob <= ORACLE_PROB_TOL
        && worst_res <= RESIDUAL_TOL;
    outcome(
        pass,
        format!(
            "closed form err {worst_closed:.1e} on {CLOSED_FORM_GRAPHS} graphs (tol {CLOSED_FORM_TOL:e}); \
             {compared} oracle instances, prob err {worst_prob:.1e} (tol {ORACLE_PROB_TOL:e}); \
             residual {worst_res:.1e} (tol {RESIDUAL_TOL:e})"
        ),
    )
}

fn recovery() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for spec in recovery_specs() {
        let hits = (0..RECOVERY_TRIALS)
            .filter(|&seed| recovery_trial(spec, seed) >= RECOVERY_JACCARD)
            .count();
        pass &= hits >= RECOVERY_MIN_HITS;
        parts.push(format!("{} {hits}/{RECOVERY_TRIALS}", spec.kind()));
    }
    outcome(
        pass,
        format!(
            "{} at n={RECOVERY_NODES}, noise p={RECOVERY_NOISE}, Jaccard >= {RECOVERY_JACCARD} in >= {RECOVERY_MIN_HITS}",
            parts.join(", ")
        ),
    )
}

fn er_ba() -> Outcome {
    let cfg = SummarizerConfig::default();
    let e = summarize(&er(10_000, 1e-3, 1).unwrap(), &cfg).unwrap();
    let b = summarize(&ba(10_000, 2, 1).unwrap(), &cfg).unwrap();
    let census = b.model.census();
    let only_stars = !b.model.structures.is_empty() && b.model.structures.iter().all(|s| s.kind() == StructureKind::Star);
    let pass = e.model.structures.len() <= ER_MAX_STRUCTURES
        && e.compression_pct <= ER_MAX_PCT
        && only_stars
        && b.compression_pct >= BA_MIN_PCT;
    outcome(
        pass,
        format!(
            "ER(1e4, 1e-3) {} structures, L% {:.2} (<= {ER_MAX_STRUCTURES}, <= {ER_MAX_PCT}); \
             BA(1e4, 2) census {census:?}, L% {:.2} (stars only, >= {BA_MIN_PCT})",
            e.model.structures.len(),
            e.compression_pct,
            b.compression_pct
        ),
    )
}

fn nmd_identities() -> Outcome {
    let mut rng = rng(105);
    let none = NodeAlignment::new();
    let opts = MatchOptions::default();
    let (mut identical, mut disjoint, mut clamp, mut asym) = (0, 0, 0, 0);
    for _ in 0..NMD_PAIRS {
        let c = rng.gen_range(1..10);
        let m = random_model(&mut rng, 300, c, &StructureKind::ALL, 25);
        identical += (model_distance(&m, &m, &none, opts).unwrap().value != 0.0) as usize;

        let (ca, cb) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let a = random_model(&mut rng, 300, ca, &[StructureKind::Clique, StructureKind::Star], 25);
        let b = random_model(&mut rng, 200, cb, &[StructureKind::Biclique, StructureKind::Starclique], 25);
        let r = model_distance(&a, &b, &none, opts).unwrap();
        disjoint += (r.value != 1.0) as usize;
        clamp += (r.clamped != (r.raw > 1.0)) as usize;

        let (n1, n2) = (rng.gen_range(30..400), rng.gen_range(30..400));
        let (c1, c2) = (rng.gen_range(1..10), rng.gen_range(1..10));
        let x = random_model(&mut rng, n1, c1, &StructureKind::ALL, 25);
        let y = random_model(&mut rng, n2, c2, &StructureKind::ALL, 25);
        let (p, q) = (model_distance(&x, &y, &none, opts).unwrap(), model_distance(&y, &x, &none, opts).unwrap());
        asym += ((p.value, p.raw, p.clamped) != (q.value, q.raw, q.clamped)) as usize;
        clamp += (p.clamped != (p.raw > 1.0) || !(0.0..=1.0).contains(&p.value)) as usize;
    }
    outcome(
        identical + disjoint + clamp + asym == 0,
        format!(
            "{NMD_PAIRS} cases each: identical != 0: {identical}, disjoint != 1: {disjoint}, \
             clamp flag or range wrong: {clamp}, asymmetric: {asym}"
        ),
    )
}

fn composition_grid() -> Outcome {
    let s = grid_stats();
    let pass = s.graphs == 45 && s.same_mean < s.diff_mean && s.rho_unmatched.abs() >= GRID_MIN_RHO;
    outcome(
        pass,
        format!(
            "{} graphs, n in {GRID_SIZES:?}, budget {GRID_BUDGET}: same-composition mean {:.3} < different {:.3}; \
             spearman vs unmatched structures {:.3} (|rho| >= {GRID_MIN_RHO}), vs matchable structures {:.3}, \
             vs kinds in one composition only {:.3} (not gated)",
            s.graphs, s.same_mean, s.diff_mean, s.rho_unmatched, s.rho_matchable, s.rho_kinds
        ),
    )
}

fn round_trip() -> Outcome {
    let mut rng = rng(107);
    let mut parities = [0usize; 4];
    let mut failures = 0;
    for t in 0..ROUND_TRIP_PAIRS {
        let n2 = rng.gen_range(10..80) / 2 * 2 + (t & 1);
        let n1 = n2 + rng.gen_range(0..60) / 2 * 2 + (t >> 1 & 1);
        parities[(n1 % 2) * 2 + n2 % 2] += 1;
        let (c1, c2) = (rng.gen_range(0..8), rng.gen_range(0..8));
        let a = random_model(&mut rng, n1, c1, &StructureKind::ALL, 20);
        let b = random_model(&mut rng, n2, c2, &StructureKind::ALL, 20);
        let al = align_models(&a, &b, &NodeAlignment::new(), MatchOptions::default()).unwrap();
        let (x, y): (&Model, &Model) = if al.swapped { (&b, &a) } else { (&a, &b) };
        let (back1, back2) = reconstruct_shapes(&al.common, &al.transform).unwrap();
        let order = |m: &Model, side: u8| {
            let mut o: Vec<usize> = al.matching.pairs.iter().map(|p| if side == 1 { p.0 } else { p.1 }).collect();
            o.extend(al.matching.unmatched(side, m.structures.len()));
            o.into_iter().map(|i| m.structures[i].shape()).collect::<Vec<_>>()
        };
        failures += (back1 != order(x, 1) || back2 != order(y, 2)) as usize;
    }
    outcome(
        failures == 0 && parities.iter().all(|&c| c > 0),
        format!("{ROUND_TRIP_PAIRS} pairs, {failures} mismatches, (n1, n2) parity counts {parities:?}"),
    )
}

fn matching_oracle() -> Outcome {
    let mut rng = rng(108);
    let (mut bad, mut optimal, mut worst, mut sum) = (0, 0, 0.0f64, 0.0);
    for _ in 0..MATCHING_INSTANCES {
        let (a, b) = small_model_pair(&mut rng, MATCHING_MAX_SIDE);
        let m = maximal_greedy(&a.structures, &b.structures, &NodeAlignment::new(), MatchOptions::default());
        let valid = m.validate(&a.structures, &b.structures).is_ok() && m.is_maximal(&a.structures, &b.structures);
        let mut pairs = m.pairs.clone();
        pairs.sort_unstable();
        let all = maximal_matchings(&a.structures, &b.structures);
        let objectives: Vec<f64> = all.iter().map(|p| matching_objective(&a, &b, p)).collect();
        let mine = matching_objective(&a, &b, &m.pairs);
        let within = objectives.iter().any(|o| (o - mine).abs() <= 1e-9 * mine);
        bad += (!valid || !all.contains(&pairs) || !within) as usize;
        let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = (mine - best) / best;
        worst = worst.max(gap);
        sum += gap;
        optimal += (gap <= 1e-12) as usize;
    }
    outcome(
        bad == 0,
        format!(
            "{MATCHING_INSTANCES} instances (<= {MATCHING_MAX_SIDE} per side), {bad} invalid or outside the \
             enumerated set; greedy optimal in {optimal}, objective gap mean {:.2}% worst {:.2}% (not gated)",
            100.0 * sum / MATCHING_INSTANCES as f64,
            100.0 * worst
        ),
    )
}

fn scaling() -> Outcome {
    let points: Vec<(f64, f64)> = SCALING_EDGES
        .iter()
        .map(|&m| {
            let (edges, secs) = scaling_point(m);
            (edges as f64, secs)
        })
        .collect();
    let slope = log_log_slope(&points);
    let times: Vec<String> = points.iter().map(|(m, t)| format!("{m:.0}:{t:.2}s")).collect();
    outcome(
        slope <= SCALING_MAX_EXPONENT,
        format!("wall time {}; exponent {slope:.3} (<= {SCALING_MAX_EXPONENT})", times.join(" ")),
    )
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        run("encoding", Duration::from_secs(10), codec),
        run("max-ent", Duration::from_secs(60), maxent),
        run("planted recovery", min(5), recovery),
        run("ER/BA behaviour", min(10), er_ba),
        run("NMD identities", min(2), nmd_identities),
        run("composition grid", min(30), composition_grid),
        run("transformation round trip", Duration::from_secs(30), round_trip),
        run("matching oracle", min(5), matching_oracle),
        run("scaling", min(30), scaling),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
