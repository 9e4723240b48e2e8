use std::fmt::Write as _;
use std::path::Path;

use atg::automaton::json::{automaton_to_json, parse_automaton, parse_state};
use atg::automaton::Configuration;
use atg::brg::{self, BrgConfig};
use atg::countdown::{self, dp_solve, parse_countdown, CountdownGame, CrossReport, Player};
use atg::mpg::{self, brute_force_solve, parse_game, MeanPayoffGame, SolutionFile, BRUTE_FORCE_LIMIT};
use atg::num::{parse_rational, render};
use atg::pipeline::{
    epsilon_close, extract_boundary_strategy, simulate, solve_average_time, strategy_json, transient_bound,
    PipelineOptions, Strategy, StrategyEntry,
};
use atg::random::{self, AutomatonParams};
use atg::{Owner, Rational, Solved, TimedGameAutomaton};
use serde::Serialize;

use crate::error::CliError;
use crate::{Cli, Command, CountdownCommand, EpsPlayer, Format, Global, MpgCommand};

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { file } => validate(g, file.as_deref()),
        Command::Solve { file, state, bound } => solve(g, file.as_deref(), state.as_deref(), bound.as_deref()),
        Command::Brg { file, state } => brg(g, file.as_deref(), state.as_deref()),
        Command::Simulate { file, state, start, eps, eps_player, steps } => simulate_cmd(
            g,
            file.as_deref(),
            state.as_deref(),
            start.as_deref(),
            eps.as_deref(),
            *eps_player,
            *steps,
        ),
        Command::Countdown(c) => countdown_cmd(g, c),
        Command::Mpg(c) => mpg_cmd(g, c),
    }
}

fn format(g: &Global, default: Format, dot: bool) -> Result<Format, CliError> {
    match g.format.unwrap_or(default) {
        Format::Dot if !dot => Err(CliError::Input("dot output is only available for `brg`".into())),
        f => Ok(f),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn need_seed(g: &Global, what: &str) -> Result<u64, CliError> {
    g.seed.ok_or_else(|| CliError::Input(format!("give a {what} file or --seed")))
}

fn load_automaton(g: &Global, file: Option<&Path>) -> Result<TimedGameAutomaton, CliError> {
    match file {
        Some(p) => parse_automaton(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => Ok(random::automaton(need_seed(g, "automaton")?, &AutomatonParams::default())),
    }
}

fn load_state(a: &TimedGameAutomaton, state: Option<&str>) -> Result<Configuration<i64>, CliError> {
    match state {
        Some(text) => parse_state(text, a).map_err(|e| CliError::Input(e.to_string())),
        None => a
            .initial
            .clone()
            .ok_or_else(|| CliError::Input("no --state given and the automaton has no initial state".into())),
    }
}

fn options(g: &Global) -> Result<PipelineOptions, CliError> {
    if g.cap == 0 {
        return Err(CliError::Input("--cap must be positive".into()));
    }
    let mut o = PipelineOptions { cap: g.cap, ..PipelineOptions::default() };
    o.solve.horizon = g.horizon;
    Ok(o)
}

fn rational(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Serialize)]
struct ValidateJson {
    valid: bool,
    violations: Vec<String>,
}

fn validate(g: &Global, file: Option<&Path>) -> Result<String, CliError> {
    let a = load_automaton(g, file)?;
    let report = a.validate();
    let out = match format(g, Format::Text, false)? {
        Format::Json => json(&ValidateJson {
            valid: report.is_valid(),
            violations: report.violations.iter().map(|v| v.to_string()).collect(),
        }),
        _ => format!("{}\n", report.to_string().trim_end()),
    };
    if report.is_valid() {
        Ok(out)
    } else {
        Err(CliError::Failed { output: out, message: "invalid automaton".into() })
    }
}

#[derive(Serialize)]
struct SolveJson {
    state: String,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decision: Option<&'static str>,
    brg_vertices: usize,
    brg_edges: usize,
    scale: i64,
    min_strategy: Vec<StrategyEntry>,
    max_strategy: Vec<StrategyEntry>,
}

fn solve_from(g: &Global, file: Option<&Path>, state: Option<&str>) -> Result<Solved, CliError> {
    let a = load_automaton(g, file)?;
    let s0 = load_state(&a, state)?;
    Ok(solve_average_time(&a, &s0, &options(g)?)?)
}

fn solve(g: &Global, file: Option<&Path>, state: Option<&str>, bound: Option<&str>) -> Result<String, CliError> {
    let fmt = format(g, Format::Text, false)?;
    let bound = bound.map(rational).transpose()?;
    let s = solve_from(g, file, state)?;
    let value = s.value();
    let decision = bound.map(|b| if value <= b { "YES" } else { "NO" });
    Ok(match fmt {
        Format::Json => json(&SolveJson {
            state: s.brg.vertex(s.brg.initial()).render(&s.automaton),
            value: render(&value),
            bound: bound.map(|b| render(&b)),
            decision,
            brg_vertices: s.brg.vertex_count(),
            brg_edges: s.brg.edge_count(),
            scale: s.game.scale,
            min_strategy: strategy_json(&s, &extract_boundary_strategy(&s, Owner::Min)),
            max_strategy: strategy_json(&s, &extract_boundary_strategy(&s, Owner::Max)),
        }),
        _ => {
            let mut out = format!("value = {}\n", render(&value));
            if let Some(d) = decision {
                writeln!(out, "{d}").unwrap();
            }
            out
        }
    })
}

fn brg(g: &Global, file: Option<&Path>, state: Option<&str>) -> Result<String, CliError> {
    let fmt = format(g, Format::Json, true)?;
    let a = load_automaton(g, file)?;
    let report = a.validate();
    if !report.is_valid() {
        return Err(CliError::Input(format!("invalid automaton\n{report}")));
    }
    let s0 = load_state(&a, state)?;
    a.check_state(&s0).map_err(|e| CliError::Input(e.to_string()))?;
    let graph = brg::explore(&a, &s0, options(g)?.cap).map_err(|e| CliError::from(atg::pipeline::PipelineError::from(e)))?;
    Ok(match fmt {
        Format::Json => json(&brg::to_json(&graph, &a)),
        Format::Dot => brg::to_dot(&graph, &a),
        Format::Text => {
            let mut out = format!("{} vertices, {} edges\n", graph.vertex_count(), graph.edge_count());
            for (v, q) in graph.vertices().iter().enumerate() {
                writeln!(out, "v{v}: {}", q.render(&a)).unwrap();
                for e in graph.edges(v) {
                    writeln!(
                        out,
                        "  -> v{} delay {} ({} {}) via {}",
                        e.target,
                        render(&e.delay),
                        a.actions[e.action].name,
                        match e.side {
                            brg::Side::Inf => "inf",
                            brg::Side::Sup => "sup",
                        },
                        e.via.render(&a)
                    )
                    .unwrap();
                }
            }
            out
        }
    })
}

#[derive(Serialize)]
struct SimulateJson {
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transient_bound: Option<String>,
    trace: atg::pipeline::TraceJson,
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    g: &Global,
    file: Option<&Path>,
    state: Option<&str>,
    start: Option<&str>,
    eps: Option<&str>,
    eps_player: EpsPlayer,
    steps: usize,
) -> Result<String, CliError> {
    let fmt = format(g, Format::Json, false)?;
    let eps = eps.map(rational).transpose()?;
    let s = solve_from(g, file, state)?;
    let start = match start {
        Some(text) => parse_state(text, &s.automaton).map_err(|e| CliError::Input(e.to_string()))?,
        None => s.initial.clone(),
    };
    let mu = extract_boundary_strategy(&s, Owner::Min);
    let chi = extract_boundary_strategy(&s, Owner::Max);
    let play = |base: &atg::pipeline::BoundaryStrategy<i64>, owner: EpsPlayer| -> Result<Strategy<i64>, CliError> {
        match eps {
            Some(e) if eps_player == owner || eps_player == EpsPlayer::Both => {
                Ok(Strategy::Epsilon(epsilon_close(base, e)?))
            }
            _ => Ok(Strategy::Boundary(base.clone())),
        }
    };
    let (min, max) = (play(&mu, EpsPlayer::Min)?, play(&chi, EpsPlayer::Max)?);
    let trace = simulate(&s, &start, &min, &max, steps)?;
    let transient = s
        .brg
        .find(&BrgConfig::initial(start.clone(), s.automaton.bound))
        .map(|v| transient_bound(&s, &mu, &chi, v))
        .transpose()?;
    Ok(match fmt {
        Format::Json => json(&SimulateJson {
            value: render(&s.value()),
            epsilon: eps.map(|e| render(&e)),
            transient_bound: transient.map(|t| render(&t)),
            trace: trace.to_json(&s),
        }),
        _ => format!(
            "average = {} after {} steps (value = {})\n",
            render(&trace.average()),
            trace.steps.len(),
            render(&s.value())
        ),
    })
}

fn load_countdown(g: &Global, file: Option<&Path>) -> Result<CountdownGame, CliError> {
    match file {
        Some(p) => parse_countdown(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => Ok(random::countdown_game(need_seed(g, "countdown")?, 4, 6)),
    }
}

#[derive(Serialize)]
struct CountdownJson {
    node: String,
    budget: u32,
    winner: Player,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_choice: Option<u32>,
}

fn countdown_cmd(g: &Global, c: &CountdownCommand) -> Result<String, CliError> {
    match c {
        CountdownCommand::Solve { file } => {
            let fmt = format(g, Format::Text, false)?;
            let game = load_countdown(g, file.as_deref())?;
            let table = dp_solve(&game);
            let (n, b) = (game.initial(), game.budget());
            Ok(match fmt {
                Format::Json => json(&CountdownJson {
                    node: game.nodes()[n].clone(),
                    budget: b,
                    winner: table.winner(n, b),
                    first_choice: table.winning_choice(n, b),
                }),
                _ => format!("{}\n", table.winner(n, b)),
            })
        }
        CountdownCommand::Reduce { file, w } => {
            format(g, Format::Json, false)?;
            let game = load_countdown(g, file.as_deref())?;
            let a = countdown::reduce(&game, w.unwrap_or_else(|| countdown::default_w(&game)))?;
            Ok(format!("{}\n", automaton_to_json(&a)))
        }
        CountdownCommand::CrossValidate { file, w } => {
            let fmt = format(g, Format::Json, false)?;
            let game = load_countdown(g, file.as_deref())?;
            let r: CrossReport =
                countdown::cross_validate(&game, w.unwrap_or_else(|| countdown::default_w(&game)), &options(g)?)?;
            Ok(match fmt {
                Format::Json => json(&r),
                _ => format!(
                    "value = {} ({} W = {}), dp winner = {}, correspondence = {}\n",
                    r.value, r.comparison, r.w, r.winner, r.correspondence
                ),
            })
        }
    }
}

fn load_game(g: &Global, file: Option<&Path>) -> Result<MeanPayoffGame<i64>, CliError> {
    match file {
        Some(p) => parse_game(&read(p)?).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => Ok(random::mean_payoff_game(need_seed(g, "game")?, 6, 12, 8)),
    }
}

#[derive(Serialize)]
struct MpgSolveJson {
    method: mpg::SolveMethod,
    horizon: u64,
    #[serde(flatten)]
    solution: SolutionFile,
}

#[derive(Serialize)]
struct VerifyJson {
    verified: bool,
    reason: String,
}

fn values_text(game: &MeanPayoffGame<i64>, file: &SolutionFile) -> String {
    let mut out = String::new();
    for v in &file.vertices {
        write!(out, "v{} ({}): {}", v.id, game.owner(v.id), v.value).unwrap();
        if let Some(e) = v.edge {
            write!(out, " via edge {e}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn mpg_cmd(g: &Global, c: &MpgCommand) -> Result<String, CliError> {
    let fmt = format(g, Format::Json, false)?;
    let opts = mpg::SolveOptions { horizon: g.horizon, ..mpg::SolveOptions::default() };
    let resource = |e: mpg::MpgError| CliError::Resource(e.to_string());
    match c {
        MpgCommand::Solve { file } => {
            let game = load_game(g, file.as_deref())?;
            let s = mpg::solve_with(&game, &opts).map_err(resource)?;
            let file = SolutionFile::new(&game, &s.values, Some((&s.min_strategy, &s.max_strategy)));
            Ok(match fmt {
                Format::Json => json(&MpgSolveJson { method: s.method, horizon: s.horizon, solution: file }),
                _ => values_text(&game, &file),
            })
        }
        MpgCommand::Brute { file } => {
            let game = load_game(g, file.as_deref())?;
            let values = brute_force_solve(&game, BRUTE_FORCE_LIMIT).map_err(resource)?;
            let file = SolutionFile::new(&game, &values, None);
            Ok(match fmt {
                Format::Json => json(&file),
                _ => values_text(&game, &file),
            })
        }
        MpgCommand::Verify { file, solution } => {
            let game = load_game(g, file.as_deref())?;
            let sol: SolutionFile = serde_json::from_str(&read(solution)?)
                .map_err(|e| CliError::Input(format!("{}: parse error: {e}", solution.display())))?;
            let (values, strategies) =
                sol.read(&game).map_err(|e| CliError::Input(format!("{}: {e}", solution.display())))?;
            let (verified, reason) = match strategies {
                Some((min, max)) => {
                    let ok = mpg::verify(&game, &values, &min, &max);
                    (ok, if ok { "strategies certify the values" } else { "one-player re-solves disagree with the values" })
                }
                None => {
                    let s = mpg::solve_with(&game, &opts).map_err(resource)?;
                    let ok = s.values == values;
                    (ok, if ok { "values match the solver" } else { "values differ from the solver" })
                }
            };
            let out = match fmt {
                Format::Json => json(&VerifyJson { verified, reason: reason.into() }),
                _ => format!("{}\n", if verified { "OK" } else { "FAIL" }),
            };
            if verified {
                Ok(out)
            } else {
                Err(CliError::Failed { output: out, message: reason.into() })
            }
        }
    }
}
