use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn atg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn validate_reports() {
    let ok = atg(&["validate", &fixture("ex1.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "valid\n");

    let gap = atg(&["validate", &fixture("missing_delta.json")]);
    assert_eq!(gap.status.code(), Some(1));
    assert!(stdout(&gap).contains("(l_max, a)"), "{}", stdout(&gap));

    let bad = atg(&["validate", &fixture("malformed.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("line 5 column"), "{}", stderr(&bad));

    let j = json(&atg(&["validate", &fixture("missing_delta.json"), "--format", "json"]));
    assert_eq!(j["valid"], false);
}

#[test]
fn solve_and_decide() {
    assert_eq!(stdout(&atg(&["solve", &fixture("ex1.json")])), "value = 1\n");
    let no = atg(&["solve", &fixture("ex1.json"), "--bound", "1/2"]);
    assert_eq!(stdout(&no), "value = 1\nNO\n");
    let yes = atg(&["solve", &fixture("ex1.json"), "--bound", "1"]);
    assert_eq!(stdout(&yes), "value = 1\nYES\n");
    assert_eq!(stdout(&atg(&["solve", &fixture("ex2.json")])), "value = 1\n");

    let j = json(&atg(&["solve", &fixture("ex2.json"), "--format", "json"]));
    assert_eq!(j["value"], "1");
    assert_eq!(j["min_strategy"][0]["action"], "a");
    let from_state = atg(&["solve", &fixture("ex1.json"), "--state", "l:c=1/2"]);
    assert_eq!(stdout(&from_state), "value = 1\n");
}

#[test]
fn solve_input_errors() {
    assert_eq!(atg(&["solve", &fixture("ex1.json"), "--state", "nowhere"]).status.code(), Some(1));
    assert_eq!(atg(&["solve", &fixture("ex1.json"), "--state", "l:c=5"]).status.code(), Some(1));
    assert_eq!(atg(&["solve", &fixture("ex1.json"), "--bound", "x"]).status.code(), Some(1));
    assert_eq!(atg(&["solve", &fixture("no_such_file.json")]).status.code(), Some(1));
    assert_eq!(atg(&["solve"]).status.code(), Some(1));
    assert_eq!(atg(&["solve", &fixture("ex1.json"), "--format", "dot"]).status.code(), Some(1));
}

#[test]
fn brg_dumps() {
    let corner = json(&atg(&["brg", &fixture("ex1.json")]));
    assert_eq!(corner["vertices"].as_array().unwrap().len(), 1);
    let half = json(&atg(&["brg", &fixture("ex1_half.json")]));
    assert_eq!(half["vertices"].as_array().unwrap().len(), 2);

    let dot = stdout(&atg(&["brg", &fixture("ex1_half.json"), "--format", "dot"]));
    assert!(dot.starts_with("digraph"));

    let guard = atg(&["brg", &fixture("ex1_half.json"), "--cap", "1"]);
    assert_eq!(guard.status.code(), Some(2));
    assert!(stderr(&guard).contains("explosion guard"));
}

#[test]
fn simulate_traces() {
    let j = json(&atg(&["simulate", &fixture("ex1.json"), "--steps", "10"]));
    assert_eq!(j["trace"]["average"], "1");
    assert_eq!(j["trace"]["steps"].as_array().unwrap().len(), 10);

    let j = json(&atg(&["simulate", &fixture("ex2.json"), "--steps", "1000", "--eps", "0.01"]));
    let parse = |v: &serde_json::Value| atg::num::parse_rational::<i64>(v.as_str().unwrap()).unwrap();
    let (avg, val, t0) = (parse(&j["trace"]["average"]), parse(&j["value"]), parse(&j["transient_bound"]));
    let slack = atg::num::ratio::<i64>(1, 100) + t0 / 1000;
    assert!(avg <= val + slack && avg >= val - slack);

    let undefined = atg(&["simulate", &fixture("ex2.json"), "--start", "l_max:c=3/2", "--steps", "3"]);
    assert_eq!(undefined.status.code(), Some(2));
    assert!(stderr(&undefined).contains("strategy undefined"));

    assert_eq!(atg(&["simulate", &fixture("ex2.json"), "--eps", "0"]).status.code(), Some(1));
}

#[test]
fn countdown_commands() {
    assert_eq!(stdout(&atg(&["countdown", "solve", &fixture("countdown_b4.json")])), "player 1\n");
    assert_eq!(stdout(&atg(&["countdown", "solve", &fixture("countdown_b3.json")])), "player 2\n");

    let reduced = stdout(&atg(&["countdown", "reduce", &fixture("countdown_b4.json")]));
    let a = atg::automaton::json::parse_automaton(&reduced).unwrap();
    assert_eq!(a.clocks, vec!["b".to_string(), "c".to_string()]);
    assert!(a.validate().is_valid());

    let r = json(&atg(&["countdown", "cross-validate", &fixture("countdown_b4.json")]));
    assert_eq!(r["winner"], "player 1");
    assert_eq!(r["w"], 2);
    assert!(r["value"].is_string());
    let r = json(&atg(&["countdown", "cross-validate", &fixture("countdown_b3.json")]));
    assert_eq!(r["winner"], "player 2");
}

#[test]
fn mpg_commands() {
    let j = json(&atg(&["mpg", "solve", &fixture("two_cycle.mpg.json")]));
    assert_eq!(j["vertices"][0]["value"], "2");
    assert_eq!(j["vertices"][1]["value"], "2");

    let ok = atg(&["mpg", "verify", &fixture("two_cycle.mpg.json"), "--solution", &fixture("two_cycle.solution.json"), "--format", "text"]);
    assert_eq!((stdout(&ok).as_str(), ok.status.code()), ("OK\n", Some(0)));
    let tampered =
        atg(&["mpg", "verify", &fixture("two_cycle.mpg.json"), "--solution", &fixture("two_cycle.tampered.json"), "--format", "text"]);
    assert_eq!((stdout(&tampered).as_str(), tampered.status.code()), ("FAIL\n", Some(1)));

    // The solver's own output verifies.
    let dir = std::env::temp_dir().join(format!("atg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sol = dir.join("seed42.json");
    let sol = sol.to_str().unwrap();
    assert!(atg(&["mpg", "solve", "--seed", "42", "--out", sol]).status.success());
    let verified = atg(&["mpg", "verify", "--seed", "42", "--solution", sol]);
    assert!(verified.status.success(), "{}", stderr(&verified));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn brute_matches_solve_on_seeds() {
    for seed in 40..50 {
        let s = seed.to_string();
        let solved = json(&atg(&["mpg", "solve", "--seed", &s]));
        let brute = json(&atg(&["mpg", "brute", "--seed", &s]));
        let values = |v: &serde_json::Value| {
            v["vertices"].as_array().unwrap().iter().map(|x| x["value"].clone()).collect::<Vec<_>>()
        };
        assert_eq!(values(&solved), values(&brute), "seed {seed}");
    }
}
