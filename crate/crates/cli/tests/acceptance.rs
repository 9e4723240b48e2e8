//! Acceptance suite: one test per criterion. Each test writes a single
//! `criterion N: PASS|FAIL (...)` line straight to stderr so the line shows
//! up even when the harness captures output.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use atg::automaton::{ClockValuation, Configuration};
use atg::brg::{corner_point_view, explore, DEFAULT_VERTEX_CAP};
use atg::countdown::{cross_validate, default_w, reduce, CrossReport};
use atg::fixtures::{countdown_two_cycle, ex1, ex2};
use atg::mpg::{brute_force_solve, solve, verify, BRUTE_FORCE_LIMIT};
use atg::num::{rat, ratio};
use atg::pipeline::{
    epsilon_close, extract_boundary_strategy, reachable_regions, regional_constancy_probe, simple_time_probe,
    simulate, solve_average_time, transient_bound, PipelineError, PipelineOptions, Strategy,
};
use atg::random::{automaton, countdown_game, mean_payoff_game, AutomatonParams};
use atg::{Config, Owner, Rational, TimedGameAutomaton};
use num_rational::Ratio;
use num_traits::Zero;

fn report(n: u32, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    writeln!(std::io::stderr(), "criterion {n}: {verdict} ({detail})").unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn corner(a: &TimedGameAutomaton) -> Config {
    Configuration::new(0, ClockValuation::zero(a.clocks.len()))
}

fn random_automata(count: u64) -> Vec<TimedGameAutomaton> {
    let p = AutomatonParams { max_clocks: 2, max_bound: 2, max_locations: 4, max_actions: 3 };
    (0..count).map(|seed| automaton(seed, &p)).collect()
}

#[test]
fn criterion_1_mpg_oracle_equivalence() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for seed in 0..1000u64 {
        let g = mean_payoff_game(seed, 6, 12, 8);
        let s = solve(&g).expect("solver");
        let oracle = brute_force_solve(&g, BRUTE_FORCE_LIMIT).expect("small enough to enumerate");
        if s.values != oracle || !verify(&g, &s.values, &s.min_strategy, &s.max_strategy) {
            mismatches.push(seed);
        }
    }
    let t = start.elapsed();
    report(
        1,
        mismatches.is_empty() && within(t, 60),
        format!("1000 games, mismatched seeds {mismatches:?}, {:.1}s of 60s", t.as_secs_f64()),
    );
}

#[test]
fn criterion_2_regionally_constant_values() {
    let start = Instant::now();
    let o = PipelineOptions::default();
    let (mut regions, mut outside, mut failures) = (0, 0, Vec::new());
    for (seed, a) in random_automata(20).iter().enumerate() {
        for r in reachable_regions(a, &corner(a)) {
            match regional_constancy_probe::<i64>(a, &r, 3, &o) {
                Ok(values) => {
                    regions += 1;
                    if values.iter().any(|v| *v != values[0]) {
                        failures.push(format!("seed {seed} {}", r.render(a)));
                    }
                }
                Err(PipelineError::RegionOutsideS) => outside += 1,
                Err(e) => failures.push(format!("seed {seed} {}: {e}", r.render(a))),
            }
        }
    }
    let t = start.elapsed();
    report(
        2,
        failures.is_empty() && regions > 0 && within(t, 120),
        format!(
            "{regions} regions on 20 automata, {outside} outside S skipped, failures {failures:?}, {:.1}s of 120s",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_corner_point_view() {
    let mut bad = Vec::new();
    let mut vertices = 0;
    for (seed, a) in random_automata(20).iter().enumerate() {
        let g = explore(a, &corner(a), DEFAULT_VERTEX_CAP).expect("explores");
        vertices += g.vertex_count();
        let delays_natural = g.all_edges().all(|(_, e)| e.delay.is_integer() && e.delay >= Ratio::zero());
        let corners = g.vertices().iter().all(|q| q.state.valuation.is_corner());
        if !(delays_natural && corners && corner_point_view(&g) == Ok(true)) {
            bad.push(seed);
        }
    }
    report(3, bad.is_empty(), format!("{vertices} vertices on 20 automata, failing seeds {bad:?}"));
}

/// Starts used for the witness check: the corner plus a fractional point
/// in each location whose state zone admits it.
fn witness_starts(a: &TimedGameAutomaton) -> Vec<Config> {
    let mut out = vec![corner(a)];
    let n = a.clocks.len() as i64;
    let v = ClockValuation::from_values((0..n).map(|i| ratio(2 * i + 1, 2 * n + 3)).collect());
    for l in 0..a.locations.len() {
        let s = Configuration::new(l, v.clone());
        if a.check_state(&s).is_ok() {
            out.push(s);
        }
    }
    out
}

#[test]
fn criterion_4_edge_witnesses() {
    let mut instances: Vec<(TimedGameAutomaton, Config)> = Vec::new();
    for a in [ex1(), ex2()] {
        for s in [corner(&a), Configuration::new(0, ClockValuation::from_values(vec![ratio(1, 2)]))] {
            instances.push((a.clone(), s));
        }
    }
    for a in random_automata(20) {
        for s in witness_starts(&a) {
            instances.push((a.clone(), s));
        }
    }
    let (mut edges, mut bad) = (0usize, 0usize);
    for (a, s0) in &instances {
        let g = explore(a, s0, DEFAULT_VERTEX_CAP).expect("explores");
        for (v, e) in g.all_edges() {
            edges += 1;
            let s = &g.vertex(v).state;
            let w = e.witness;
            let lag = Ratio::from_integer(w.b) - s.clock(w.clock);
            let expected = if lag > Ratio::zero() { lag } else { Rational::zero() };
            let landed = s.shifted(e.delay);
            let on_boundary = e.delay.is_zero() || landed.clock(w.clock) == Ratio::from_integer(w.b);
            if e.delay != expected || !on_boundary || !e.via.clock.closure_contains(&landed.valuation) {
                bad += 1;
            }
        }
    }
    report(
        4,
        bad == 0 && edges > 0,
        format!("{edges} edges over {} instances, {bad} without a valid witness", instances.len()),
    );
}

#[test]
fn criterion_5_regionally_simple_time() {
    let o = PipelineOptions::default();
    let mut automata = vec![ex1(), ex2()];
    automata.extend(random_automata(10));
    let (mut fits, mut skipped, mut failures) = (0, 0, Vec::new());
    for (i, a) in automata.iter().enumerate() {
        for r in reachable_regions(a, &corner(a)) {
            if !r.in_state_zone(a) {
                skipped += 1;
                continue;
            }
            let rep = Configuration::new(r.location, r.clock.representatives::<i64>(3)[0].clone());
            let solved = match solve_average_time(a, &rep, &o) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("automaton {i} {}: {e}", r.render(a)));
                    continue;
                }
            };
            let mu = extract_boundary_strategy(&solved, Owner::Min);
            let chi = extract_boundary_strategy(&solved, Owner::Max);
            for n in [1, 2, 3, 5] {
                match simple_time_probe(&solved, &mu, &chi, &r, n, 3) {
                    Ok(_) => fits += 1,
                    Err(e) => failures.push(format!("automaton {i} {} n={n}: {e}", r.render(a))),
                }
            }
        }
    }
    report(
        5,
        failures.is_empty() && fits > 0,
        format!("{fits} fits, {skipped} regions outside S skipped, failures {failures:?}"),
    );
}

#[test]
fn criterion_6_epsilon_optimality() {
    let o = PipelineOptions::default();
    let eps: Rational = ratio(1, 100);
    let n = 10_000usize;
    let mut automata = vec![ex2()];
    automata.extend(random_automata(5));
    let mut lines = Vec::new();
    let mut pass = true;
    for (i, a) in automata.iter().enumerate() {
        let s0 = corner(a);
        let outcome = (|| -> Result<(Rational, Rational, Rational, Rational), PipelineError> {
            let s = solve_average_time(a, &s0, &o)?;
            let mu = extract_boundary_strategy(&s, Owner::Min);
            let chi = extract_boundary_strategy(&s, Owner::Max);
            let t0 = transient_bound(&s, &mu, &chi, s.brg.initial())?;
            let min_eps = Strategy::Epsilon(epsilon_close(&mu, eps)?);
            let max_eps = Strategy::Epsilon(epsilon_close(&chi, eps)?);
            let against_max = simulate(&s, &s0, &min_eps, &Strategy::Boundary(chi), n)?.average();
            let against_min = simulate(&s, &s0, &Strategy::Boundary(mu), &max_eps, n)?.average();
            Ok((s.value(), t0, against_max, against_min))
        })();
        match outcome {
            Ok((val, t0, min_avg, max_avg)) => {
                let slack = eps + t0 / Ratio::from_integer(n as i64);
                let ok = min_avg <= val + slack && max_avg >= val - slack;
                pass &= ok;
                lines.push(format!("#{i} val {val} T0 {t0} min-eps {min_avg} max-eps {max_avg} {}", if ok { "ok" } else { "VIOLATED" }));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("#{i} error: {e}"));
            }
        }
    }
    report(6, pass, lines.join("; "));
}

#[test]
fn criterion_7_countdown_cross_validation() {
    let start = Instant::now();
    let o = PipelineOptions::default();
    let mut structural = Vec::new();
    let mut bits = Vec::new();
    let mut rows = Vec::new();
    for seed in 0..20u64 {
        let g = countdown_game(seed, 4, 6);
        let w = default_w(&g);
        let a = reduce(&g, w).expect("reduces");
        if !a.validate().is_valid() || a.clocks.len() != 2 {
            structural.push(seed);
            continue;
        }
        match cross_validate(&g, w, &o) {
            Ok(r) => {
                bits.push(r.correspondence);
                rows.push(format!("{}:{}/{}", seed, r.comparison, r.winner));
            }
            Err(e) => {
                structural.push(seed);
                rows.push(format!("{seed}: {e}"));
            }
        }
    }
    let consistent = bits.windows(2).all(|w| w[0] == w[1]);
    let fixture = |b: u32| -> CrossReport { cross_validate(&countdown_two_cycle(b), 2, &o).expect("fixture solves") };
    let (win, loss) = (fixture(4), fixture(3));
    let opposite = (win.value == "2") != (loss.value == "2");
    let t = start.elapsed();
    let holds = bits.iter().filter(|b| **b).count();
    report(
        7,
        structural.is_empty() && bits.len() == 20 && consistent && opposite && within(t, 300),
        format!(
            "structural failures {structural:?}; correspondence holds on {holds}/{} (consistent: {consistent}); \
             B0=4 value {} winner {}, B0=3 value {} winner {} (opposite sides: {opposite}); [{}]; {:.1}s of 300s",
            bits.len(),
            win.value,
            win.winner,
            loss.value,
            loss.winner,
            rows.join(" "),
            t.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_golden_values() {
    let o = PipelineOptions::default();
    let half: Config = Configuration::new(0, ClockValuation::from_values(vec![ratio(1, 2)]));
    let v1 = solve_average_time(&ex1(), &corner(&ex1()), &o).unwrap().value();
    let v1_half = solve_average_time(&ex1(), &half, &o).unwrap().value();
    let s2 = solve_average_time(&ex2(), &corner(&ex2()), &o).unwrap();
    let oracle = brute_force_solve(&s2.game.game, BRUTE_FORCE_LIMIT).unwrap();
    let oracle_value = oracle[s2.brg.initial()] / Ratio::from_integer(s2.game.scale);
    let pass = v1 == rat(1) && v1_half == rat(1) && s2.value() == rat(1) && oracle_value == rat(1);
    report(
        8,
        pass,
        format!("EX1 c=0 {v1}, EX1 c=1/2 {v1_half}, EX2 {} (brute force on its BRG image {oracle_value})", s2.value()),
    );
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_cli(args: &[String]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_atg")).args(args).output().expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_9_deterministic_cli_json() {
    let f = |s: &str| fixture(s);
    let mut suite: Vec<Vec<String>> = Vec::new();
    for name in ["ex1.json", "ex1_half.json", "ex2.json"] {
        suite.push(vec!["validate".into(), f(name)]);
        suite.push(vec!["solve".into(), f(name)]);
        suite.push(vec!["solve".into(), f(name), "--bound".into(), "1/2".into()]);
        suite.push(vec!["brg".into(), f(name)]);
        suite.push(vec!["simulate".into(), f(name), "--steps".into(), "50".into()]);
        suite.push(vec!["simulate".into(), f(name), "--steps".into(), "50".into(), "--eps".into(), "1/100".into()]);
    }
    for name in ["countdown_b4.json", "countdown_b3.json", "countdown_single.json"] {
        for sub in ["solve", "reduce", "cross-validate"] {
            suite.push(vec!["countdown".into(), sub.into(), f(name)]);
        }
    }
    suite.push(vec!["mpg".into(), "solve".into(), f("two_cycle.mpg.json")]);
    suite.push(vec!["mpg".into(), "brute".into(), f("two_cycle.mpg.json")]);
    suite.push(vec!["mpg".into(), "verify".into(), f("two_cycle.mpg.json"), "--solution".into(), f("two_cycle.solution.json")]);
    for cmd in [vec!["mpg", "solve"], vec!["mpg", "brute"], vec!["solve"], vec!["brg"], vec!["countdown", "cross-validate"]] {
        let mut args: Vec<String> = cmd.into_iter().map(String::from).collect();
        args.extend(["--seed".into(), "42".into()]);
        suite.push(args);
    }
    let mut differing = Vec::new();
    let mut failed = Vec::new();
    for args in &mut suite {
        args.extend(["--format".into(), "json".into()]);
        let (a, code_a) = run_cli(args);
        let (b, code_b) = run_cli(args);
        if code_a != 0 || code_b != 0 {
            failed.push(args.join(" "));
        }
        if a != b || a.is_empty() {
            differing.push(args.join(" "));
        }
    }
    report(
        9,
        differing.is_empty() && failed.is_empty(),
        format!("{} invocations run twice, differing {differing:?}, nonzero exit {failed:?}", suite.len()),
    );
}
