use std::path::Path;
use std::process::Command;

fn deloc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_deloc")).args(args).output().expect("binary runs")
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn every_subcommand_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[(&str, &[&str], &[&str])] = &[
        ("transitive", &["--graph", "hypercube:4", "--trials", "50"], &[]),
        ("product", &["--graph", "cycle:8", "--base", "path:3", "--rule", "strong", "--trials", "20"], &[]),
        ("gaussian", &["--n", "10,30", "--trials", "20"], &["gaussian.csv"]),
        ("qe", &["--graph", "complete:30", "--trials", "30"], &[]),
        ("deloc", &["--graph", "gaussian:40", "--trials", "40", "--repeats", "2"], &["exceedance.csv", "concentration.csv"]),
        ("lift", &["--n", "30", "--repeats", "2", "--trials", "20"], &["density.csv", "region.json", "balls.json", "lifts.csv"]),
        ("spectrum", &["--graph", "cycle:12", "--window", "0:2.5"], &["eigenvalues.csv"]),
    ];
    for (cmd, args, sidecars) in runs {
        let out = dir.path().join(format!("{cmd}.json"));
        let mut full = vec![*cmd];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", out.to_str().unwrap()]);
        let res = deloc(&full);
        assert!(res.status.success(), "{cmd}: {}", String::from_utf8_lossy(&res.stderr));
        let r = report(&out);
        assert_eq!(r["command"], *cmd);
        assert!(r["claims"].as_array().is_some_and(|c| !c.is_empty()), "{cmd}");
        for s in *sidecars {
            assert!(dir.path().join(format!("{cmd}.{s}")).exists(), "{cmd}.{s}");
        }
    }
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    assert!(deloc(&["transitive", "--graph", "cycle:20", "--trials", "30", "--seed", "9", "--out", first.to_str().unwrap()]).status.success());
    assert!(deloc(&["replay", first.to_str().unwrap(), "--out", second.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn graphs_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("c5.txt");
    std::fs::write(&edges, "# pentagon\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let table = dir.path().join("z4.csv");
    let mut csv = Vec::new();
    let z4 = deloc::graph::GroupTable::cyclic(4).unwrap().with_weights(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
    deloc::graph::write_group_table(&z4, &mut csv).unwrap();
    std::fs::write(&table, csv).unwrap();
    for source in [format!("file:{}", edges.display()), format!("cayley:{}", table.display())] {
        let res = deloc(&["spectrum", "--graph", &source]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let r: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
        assert_eq!(r["results"]["spectral_radius"].as_f64().unwrap().round(), 2.0);
    }
}

#[test]
fn bad_input_exits_with_an_error() {
    let res = deloc(&["lift", "--base", "cycle:5"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("error"));
    assert!(!deloc(&["transitive", "--graph", "nonsense:3"]).status.success());
}
