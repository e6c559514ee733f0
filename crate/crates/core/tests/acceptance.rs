//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. The full tai256c solve (criterion 7) runs only with
//! `SYMBB_EXTENDED=1`.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use symbb_core::bb::{orbit_score, solve_target, BbParams, Outcome};
use symbb_core::cli::load_instance;
use symbb_core::dnn::{self, NbParams};
use symbb_core::estimator::{estimate, summarize, EstParams};
use symbb_core::instance::{objective, BinarySolution, BqopInstance};
use symbb_core::matrix::IntMatrix;
use symbb_core::subproblem::{reduce, FixSets, LeafParams};
use symbb_core::symmetry::{automorphisms, expand_solution, DEFAULT_GROUP_CAP};

const GROUP_ORDER: usize = 2048;
const ORBIT_COUNT: usize = 44;
const SCORE_2_16_17_241: i128 = 52_655_297;
const SCORE_137: i128 = 52_481_773;
const ROOT_LB: f64 = 43_881_304.0;
const ROOT_LB_REL_TOL: f64 = 0.005;
const BEST_KNOWN: i64 = 44_759_294;
const EXPANDED_COUNT: usize = 1024;
const SOUNDNESS_INSTANCES: u64 = 200;
const ESTIMATOR_SEEDS: u64 = 20;
const ESTIMATOR_FACTOR: f64 = 2.0;
const CONE_MATRICES: usize = 50;
const CONE_ABS_TOL: f64 = 1e-6;
const DERIVATIVE_POINTS: usize = 20;
const DERIVATIVE_REL_TOL: f64 = 1e-3;
const EXTENDED_TARGET: i64 = 44_100_000;
const EXTENDED_NODES_ISO: f64 = 11_594.0;
const EXTENDED_NODES_NO_ISO: f64 = 23_510.0;
const EXTENDED_NODE_REL_TOL: f64 = 0.30;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn tai256c() -> BqopInstance {
    load_instance(&data("tai256c.dat"))
        .expect("data/tai256c.dat")
        .inst
}

type Verdict = (bool, String);

fn group_order(inst: &BqopInstance) -> Verdict {
    let t = Instant::now();
    let g = automorphisms(inst.b(), DEFAULT_GROUP_CAP).unwrap();
    let ok = g.order() == GROUP_ORDER && g.check_axioms();
    (
        ok,
        format!("order {} in {:.1} s", g.order(), t.elapsed().as_secs_f64()),
    )
}

fn orbit_table(inst: &BqopInstance) -> Verdict {
    let sub = reduce(inst, &FixSets::new(inst.n(), vec![], vec![0]).unwrap());
    let g = sub.subgroup(DEFAULT_GROUP_CAP).unwrap();
    let orbits = g.orbit_partition();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for o in orbits {
        *sizes.entry(o.len()).or_default() += 1;
    }
    let want_sizes: BTreeMap<usize, usize> = [(8, 21), (4, 21), (2, 1), (1, 1)].into();
    let score_of = |label: usize| {
        let r = sub.fix.free.iter().position(|&i| i == label - 1).unwrap();
        let o = orbits.iter().find(|o| o.members().contains(&r)).unwrap();
        let members: Vec<usize> = o.members().iter().map(|&k| sub.fix.free[k] + 1).collect();
        (members, orbit_score(&sub, o.representative()))
    };
    let (m2, s2) = score_of(2);
    let (m137, s137) = score_of(137);
    let ok = orbits.len() == ORBIT_COUNT
        && sizes == want_sizes
        && m2 == vec![2, 16, 17, 241]
        && m137 == vec![137]
        && s2.ceil() == SCORE_2_16_17_241
        && s137.ceil() == SCORE_137;
    (
        ok,
        format!(
            "{} orbits, sizes {:?}; {{2,16,17,241}} score {:.4} (ceil {}), {{137}} score {:.4} (ceil {}); \
             printed values are ceilings of the exact fill score, which counts fixed-to-free terms at weight p^2",
            orbits.len(),
            sizes,
            s2.to_f64(),
            s2.ceil(),
            s137.to_f64(),
            s137.ceil()
        ),
    )
}

fn root_bound(inst: &BqopInstance) -> Verdict {
    let t = Instant::now();
    let sub = reduce(inst, &FixSets::new(inst.n(), vec![], vec![0]).unwrap());
    let lambda = dnn::default_lambda(&sub, dnn::DEFAULT_LAMBDA_SCALE).unwrap();
    let prob = dnn::assemble(&sub, lambda).unwrap();
    let r = dnn::nb_bound(&prob, None, &NbParams::default());
    let lb = r.lb_integer as f64;
    let rel = (lb - ROOT_LB).abs() / ROOT_LB;
    let ok = rel <= ROOT_LB_REL_TOL && r.lb_integer <= BEST_KNOWN;
    (
        ok,
        format!(
            "lower bound {} ({:?}, {} NB steps, {} APG steps), {:.4}% from {ROOT_LB}, {:.0} s",
            r.lb_integer,
            r.status,
            r.iterations,
            r.apg_iterations,
            100.0 * rel,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn expansion(inst: &BqopInstance) -> Verdict {
    let text = std::fs::read_to_string(data("tai256c.sol")).expect("data/tai256c.sol");
    let x = BinarySolution::parse(&text, inst.n()).unwrap();
    let g = automorphisms(inst.b(), DEFAULT_GROUP_CAP).unwrap();
    let sols = expand_solution(&g, &x).unwrap();
    let values: std::collections::BTreeSet<i64> =
        sols.iter().map(|s| objective(inst, s).unwrap()).collect();
    let ok = sols.len() == EXPANDED_COUNT && values.len() == 1 && values.contains(&BEST_KNOWN);
    (
        ok,
        format!("{} distinct solutions, values {:?}", sols.len(), values),
    )
}

fn audited() -> BbParams {
    BbParams {
        leaf: LeafParams {
            threshold: 4,
            depth: 1,
        },
        audit: true,
        ..BbParams::default()
    }
}

fn soundness() -> Verdict {
    let params = audited();
    let (mut failures, mut checks) = (Vec::new(), 0u64);
    for seed in 0..SOUNDNESS_INSTANCES {
        let inst = common::planted(seed);
        let (opt, _) = common::brute_force(&inst);
        let proved = solve_target(&inst, opt, &params).unwrap();
        let refuted = solve_target(&inst, opt + 1, &params).unwrap();
        if proved.outcome != Outcome::Proved {
            failures.push(format!("seed {seed}: optimum not proved"));
        }
        match (&refuted.outcome, refuted.witness(inst.n())) {
            (Outcome::Refuted { value, .. }, Some(w))
                if objective(&inst, &w).ok() == Some(*value)
                    && w.count_ones() == inst.m()
                    && *value <= opt => {}
            _ => failures.push(format!(
                "seed {seed}: optimum + 1 not refuted by a valid witness"
            )),
        }
        for a in [proved.audit, refuted.audit].into_iter().flatten() {
            checks += a.checks;
            failures.extend(a.failures.into_iter().map(|f| format!("seed {seed}: {f}")));
        }
    }
    (
        failures.is_empty(),
        format!(
            "{SOUNDNESS_INSTANCES} instances, {checks} audited decisions, {} failures{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(" (first: {f})"))
                .unwrap_or_default()
        ),
    )
}

fn bumpy(n: usize, m: usize) -> BqopInstance {
    let b = IntMatrix::from_fn(n, |i, j| {
        if i == j {
            0
        } else {
            ((i * j + 3 * (i + j)) % 11) as i64
        }
    });
    BqopInstance::new(b, m).unwrap()
}

fn estimator() -> Verdict {
    let bb = BbParams {
        iso_pruning: false,
        audit: false,
        ..audited()
    };
    let mut exact_ok = true;
    for seed in 0..10 {
        let inst = common::planted(seed);
        let (opt, _) = common::brute_force(&inst);
        let exact = solve_target(&inst, opt, &bb).unwrap().node_count as f64;
        let p = EstParams {
            bb: bb.clone(),
            ..EstParams::default()
        };
        exact_ok &= estimate(&inst, opt, &p, seed)
            .unwrap()
            .estimated_total_nodes
            == exact;
    }
    let inst = bumpy(14, 6);
    let (opt, _) = common::brute_force(&inst);
    let exact = solve_target(&inst, opt, &bb).unwrap().node_count as f64;
    // the tree is small, so the width thresholds are scaled down with it
    let p = EstParams {
        width_threshold: 8,
        sample_trigger: 8,
        sample_size: 4,
        bb,
        max_depth: None,
    };
    let reports: Vec<_> = (0..ESTIMATOR_SEEDS)
        .map(|s| estimate(&inst, opt, &p, s).unwrap())
        .collect();
    let (min, mean, max) = summarize(&reports).unwrap();
    let ok = exact_ok && mean >= exact / ESTIMATOR_FACTOR && mean <= exact * ESTIMATOR_FACTOR;
    (
        ok,
        format!(
            "exact below threshold: {exact_ok}; {ESTIMATOR_SEEDS} seeds min/mean/max {min:.0}/{mean:.1}/{max:.0} vs exact {exact}"
        ),
    )
}

fn extended(inst: &BqopInstance) -> Option<Verdict> {
    if std::env::var("SYMBB_EXTENDED").as_deref() != Ok("1") {
        return None;
    }
    let on = solve_target(inst, EXTENDED_TARGET, &BbParams::default()).unwrap();
    let off = solve_target(
        inst,
        EXTENDED_TARGET,
        &BbParams {
            iso_pruning: false,
            ..BbParams::default()
        },
    )
    .unwrap();
    let near = |n: u64, want: f64| ((n as f64 - want).abs() / want) <= EXTENDED_NODE_REL_TOL;
    let ok = on.is_proved()
        && off.is_proved()
        && near(on.node_count, EXTENDED_NODES_ISO)
        && near(off.node_count, EXTENDED_NODES_NO_ISO);
    Some((
        ok,
        format!(
            "nodes {} (pruning on), {} (off)",
            on.node_count, off.node_count
        ),
    ))
}

fn cone_oracle() -> Verdict {
    let dist = common::dykstra_pairs(CONE_MATRICES, 11);
    let worst = dist.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let deriv = common::derivative_pairs(DERIVATIVE_POINTS, 3);
    let worst_rel = deriv
        .iter()
        .map(|(gp, fd)| (gp - fd).abs() / fd.abs().max(1e-12))
        .fold(0.0, f64::max);
    let ok = worst <= CONE_ABS_TOL
        && deriv.len() == DERIVATIVE_POINTS
        && worst_rel <= DERIVATIVE_REL_TOL;
    (
        ok,
        format!(
            "max |g - oracle| {worst:.2e} over {} matrices; max derivative rel. error {worst_rel:.2e} over {} points",
            dist.len(),
            deriv.len()
        ),
    )
}

fn report(k: u32, name: &str, v: Option<Verdict>, all: &mut bool) {
    match v {
        Some((ok, detail)) => {
            *all &= ok;
            println!(
                "criterion {k} [{name}]: {} - {detail}",
                if ok { "PASS" } else { "FAIL" }
            );
        }
        None => println!("criterion {k} [{name}]: SKIP - extended run, set SYMBB_EXTENDED=1"),
    }
}

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored
    let inst = tai256c();
    let mut all = true;
    report(1, "group order", Some(group_order(&inst)), &mut all);
    report(2, "orbit table", Some(orbit_table(&inst)), &mut all);
    report(3, "root bound", Some(root_bound(&inst)), &mut all);
    report(4, "solution expansion", Some(expansion(&inst)), &mut all);
    report(5, "soundness", Some(soundness()), &mut all);
    report(6, "estimator", Some(estimator()), &mut all);
    report(7, "full target runs", extended(&inst), &mut all);
    report(8, "cone distance oracle", Some(cone_oracle()), &mut all);
    if !all {
        std::process::exit(1);
    }
}
