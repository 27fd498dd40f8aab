use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use weighted_young::exponent::{Classification, Rational};
use weighted_young_cli::record::{Outcome, RunRecord};
use weighted_young_cli::Index;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn wyoung(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wyoung")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn records(out: &Output) -> Vec<RunRecord> {
    // `--format json` prints one pretty document per scenario.
    serde_json::Deserializer::from_slice(&out.stdout)
        .into_iter::<RunRecord>()
        .collect::<Result<_, _>>()
        .expect("json records")
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("p = 2, 2, 2\nt = 1/2, 1/2, 1/2\n", 0),
        ("flavor = multiplication\ns = 0, 1, -2\n", 1),
        ("p = 4, 2, 2\nt = 1, 1, 1\n", 3),
    ];
    for (k, (text, code)) in cases.iter().enumerate() {
        let f = write(dir.path(), &format!("c{k}.scn"), text);
        let out = wyoung(&["check", "--scenario", &f, "--format", "json"]);
        assert_eq!(out.status.code(), Some(*code), "{text}");
        let rec = &records(&out)[0];
        let Outcome::Check { verdict, binding } = &rec.outcome else { panic!() };
        match code {
            0 => {
                let trace = &verdict.trace;
                assert!(trace.get("strict_trigger[t0=d*R(p)]").unwrap().satisfied);
                let crit = trace.get("critical_sum[t]").unwrap();
                assert!(crit.strictness_required && crit.satisfied);
            }
            1 => assert!(verdict.cites("pair[s1+s2]") && binding.iter().any(|b| b == "pair[s0+s2]")),
            _ => assert_eq!(binding, &["young_upper[p]"]),
        }
    }
}

#[test]
fn malformed_scenarios_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["t1 = 0.5\n", "colour = red\n", "t1 = 1\nt1 = 1\n", "kind = probe\n", "p = 2, 2\n"] {
        let f = write(dir.path(), "bad.scn", text);
        let out = wyoung(&["check", "--scenario", &f]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    assert_eq!(wyoung(&["check", "--scenario", "/nonexistent.scn"]).status.code(), Some(2));
    assert_eq!(wyoung(&["check"]).status.code(), Some(2));
}

#[test]
fn probe_csv_and_exit_codes() {
    let f = scenarios().join("necessity-slope.scn");
    let out = wyoung(&["probe", "--scenario", f.to_str().unwrap(), "--format", "csv"]);
    // The critical tuple is witnessed; the batch reports the largest code.
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().take(14).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(first.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers, vec!["probe", "permutation", "scale", "value", "fitted_slope", "predicted_slope"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 13);
    let slope: f64 = rows[0][4].parse().unwrap();
    assert!((slope - 0.25).abs() <= 0.03);

    let f = scenarios().join("translation.scn");
    let out = wyoung(&["probe", "--scenario", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let Outcome::Probe { reports, .. } = &records(&out)[0].outcome else { panic!() };
    assert!((reports[0].fitted_slope + 1.0).abs() <= 0.05);

    let f = scenarios().join("sweeps.scn");
    assert_eq!(wyoung(&["probe", "--scenario", f.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn resolution_guard_names_the_offending_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.scn", "kind = probe\nprobe = gaussian\ngrid_l = 4\ngrid_n = 256\n");
    let out = wyoung(&["probe", "--scenario", &f, "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let Outcome::Error { message, .. } = &records(&out)[0].outcome else { panic!() };
    assert!(message.contains("alpha"), "{message}");
    // Probing an unbounded tuple with the sweep is a precondition error.
    let f = write(dir.path(), "s.scn", "kind = probe\nprobe = sweep\nt = 0, 1, -2\n");
    assert_eq!(wyoung(&["probe", "--scenario", &f]).status.code(), Some(2));
}

#[test]
fn out_dir_holds_records_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let f = scenarios().join("checks.scn");
    let out = wyoung(&["check", "--scenario", f.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let index: Index = serde_json::from_str(&std::fs::read_to_string(out_dir.join("index.json")).unwrap()).unwrap();
    assert_eq!(index.runs.len(), 3);
    assert_eq!(index.exit_code, 3);
    for entry in &index.runs {
        let rec: RunRecord = serde_json::from_str(&std::fs::read_to_string(out_dir.join(&entry.json)).unwrap()).unwrap();
        assert_eq!(rec.exit_code, entry.exit_code);
        assert!(std::fs::read_to_string(out_dir.join(&entry.csv)).unwrap().starts_with("id,lhs,relation"));
    }
}

#[test]
fn records_are_deterministic_and_round_trip() {
    let f = scenarios().join("decomposition.scn");
    let args = ["verify-lemmas", "--scenario", f.to_str().unwrap(), "--format", "json", "--seed", "11"];
    let a = records(&wyoung(&args)).remove(0);
    let b = records(&wyoung(&args)).remove(0);
    let (a0, b0) = (a.without_timings(), b.without_timings());
    assert_eq!(serde_json::to_string(&a0).unwrap(), serde_json::to_string(&b0).unwrap());
    assert_eq!(a.scenario.seed, 11);

    let f = scenarios().join("translation.scn");
    let out = wyoung(&["probe", "--scenario", f.to_str().unwrap(), "--format", "json", "--grid-n", "8192", "--grid-L", "1024"]);
    for rec in records(&out) {
        assert_eq!(rec.scenario.grid_n, Some(8192));
        assert_eq!(rec.probe_config.unwrap().translation_grid.half_width(), 1024.0);
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

fn sweep_rows(text: &str) -> Vec<(Vec<Rational>, Classification)> {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.scn", text);
    let out = wyoung(&["sweep", "--scenario", &f, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let Outcome::Sweep { rows, .. } = &records(&out)[0].outcome else { panic!() };
    rows.iter().map(|r| (r.params.t.iter().map(|w| w.value()).collect(), r.classification)).collect()
}

const QUARTERS: &str = "sweep_values = -1, -3/4, -1/2, -1/4, 0, 1/4, 1/2, 3/4, 1\n";

#[test]
fn sweep_recovers_the_admissible_polytope() {
    let zero = Rational::from_integer(0);
    let half = Rational::new(1, 2);
    let rows = sweep_rows(&format!("p = 2, 2, 2\n{QUARTERS}"));
    assert_eq!(rows.len(), 729);
    for (t, class) in &rows {
        let pairs = t[0] + t[1] >= zero && t[0] + t[2] >= zero && t[1] + t[2] >= zero;
        let sum = t[0] + t[1] + t[2];
        let strict = t.iter().any(|w| *w == half);
        let bounded = pairs && (sum > half || (sum == half && !strict));
        assert_eq!(*class == Classification::Bounded, bounded, "{t:?}");
    }
    // Classical exponents: the polytope of pairwise sums.
    for (t, class) in sweep_rows(&format!("p = 2, 1, 2\n{QUARTERS}")) {
        let pairs = t[0] + t[1] >= zero && t[0] + t[2] >= zero && t[1] + t[2] >= zero;
        assert_eq!(class == Classification::Bounded, pairs, "{t:?}");
    }
}

#[test]
fn one_point_sweep_matches_check() {
    let dir = tempfile::tempdir().unwrap();
    let base = "p = 2, 2, 2\nt = 1/2, 1/2, 0\n";
    let f = write(dir.path(), "c.scn", base);
    let check = records(&wyoung(&["check", "--scenario", &f, "--format", "json"])).remove(0);
    let Outcome::Check { verdict, binding } = check.outcome else { panic!() };
    let f = write(dir.path(), "s.scn", &format!("{base}sweep_values = 0\nsweep_slots = 2\n"));
    let sweep = records(&wyoung(&["sweep", "--scenario", &f, "--format", "json"])).remove(0);
    let Outcome::Sweep { rows, .. } = sweep.outcome else { panic!() };
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].classification, verdict.classification);
    assert_eq!(rows[0].binding, binding);
}

#[test]
fn sweep_row_cap_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.scn", &format!("row_cap = 500\n{QUARTERS}"));
    assert_eq!(wyoung(&["sweep", "--scenario", &f]).status.code(), Some(2));
}

#[test]
fn batch_names_must_be_unique() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "b.scn", "name = a\n---\nname = a\n");
    assert_eq!(wyoung(&["check", "--scenario", &f]).status.code(), Some(2));
}
