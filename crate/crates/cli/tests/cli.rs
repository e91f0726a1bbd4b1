use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-sb"))
        .args(args)
        .env_remove("LATTICE_SB_MAX_ELEMENTS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_m3() {
    let out = ok(&["check", "--name", "M3"]);
    assert_eq!(field(&out, "modular"), "true");
    assert_eq!(field(&out, "distributive"), "false");
    assert_eq!(field(&out, "geometric"), "true");
    assert_eq!(field(&out, "whitney"), "[1,3,1]");
}

#[test]
fn check_n5() {
    let out = ok(&["check", "--name", "N5"]);
    assert_eq!(field(&out, "jordan_dedekind"), "false");
    assert_eq!(field(&out, "modular"), "false");
}

#[test]
fn check_powerset() {
    let out = ok(&["check", "--powerset", "3"]);
    for key in [
        "lattice_valid",
        "jordan_dedekind",
        "modular",
        "distributive",
        "geometric",
    ] {
        assert_eq!(field(&out, key), "true", "{key}");
    }
    assert_eq!(field(&out, "height"), "3");
    assert_eq!(field(&out, "whitney"), "[1,3,3,1]");
}

#[test]
fn check_rejects_non_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bowtie.json",
        r#"{"elements":["0","a","b","c","d","1"],
            "covers":[[0,1],[0,2],[1,3],[1,4],[2,3],[2,4],[3,5],[4,5]]}"#,
    );
    let out = run(&["check", "--lattice", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`a`") && err.contains("`b`"), "{err}");
}

#[test]
fn check_needs_one_source() {
    assert_eq!(run(&["check"]).status.code(), Some(2));
    assert_eq!(
        run(&["check", "--name", "M3", "--powerset", "2"])
            .status
            .code(),
        Some(2)
    );
}

fn csv_cell(csv: &str, row: usize, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    lines
        .nth(row)
        .unwrap()
        .split(',')
        .nth(i)
        .unwrap()
        .to_string()
}

#[test]
fn bounds_examples() {
    let csv = ok(&[
        "bounds",
        "--projective",
        "-q",
        "2",
        "-n",
        "4",
        "-d",
        "4",
        "--window",
        "2",
        "2",
    ]);
    assert_eq!(csv_cell(&csv, 0, "lsb"), "7");
    let csv = ok(&["bounds", "--powerset", "-n", "7", "-d", "3"]);
    assert_eq!(csv_cell(&csv, 0, "lsb"), "32");
    let csv = ok(&["bounds", "--projective", "-q", "2", "-n", "3", "-d", "1"]);
    assert_eq!(csv_cell(&csv, 0, "lsb"), "16");
}

#[test]
fn bounds_csv_is_byte_stable() {
    let args = [
        "bounds",
        "--projective",
        "-q",
        "2",
        "--n-min",
        "2",
        "--n-max",
        "4",
        "--d-min",
        "1",
        "--d-max",
        "4",
        "--oracle",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("family,q,n,d,m,M,lsb,lsb_log2,gv_lower,gv_lower_log2,oracle_max\n"));
}

#[test]
fn fig5_default_and_single_row() {
    let csv = ok(&["fig5"]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 17);
    let logs: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(logs.windows(2).all(|w| w[0] < w[1]));
    let one = ok(&["fig5", "-n", "9"]);
    assert_eq!(one.lines().count(), 2);
    assert!(one.lines().nth(1).unwrap().starts_with("9,"));
}

#[test]
fn fig5_overlay_passes_through() {
    let dir = tempfile::tempdir().unwrap();
    let overlay = write(
        dir.path(),
        "pub.csv",
        "label,n,log2_size\nEtzSilb,13,30.9\n",
    );
    let out_dir = dir.path().join("out");
    ok(&[
        "fig5",
        "--overlay",
        &overlay,
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    let copied = fs::read_to_string(out_dir.join("fig5_overlay.csv")).unwrap();
    assert!(copied.lines().any(|l| l == "EtzSilb,13,30.9"), "{copied}");
    let script = fs::read_to_string(out_dir.join("fig5.gp")).unwrap();
    assert!(script.contains("fig5_overlay.csv") && script.contains("EtzSilb"));
    assert_eq!(
        fs::read_to_string(out_dir.join("fig5.csv")).unwrap(),
        ok(&["fig5"])
    );
}

#[test]
fn fig5_rejects_malformed_overlay() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "label,n\nA,1\n",
        "label,n,log2_size\nA,x,3\n",
        "label,n,log2_size\nA,4\n",
    ] {
        let overlay = write(dir.path(), "bad.csv", body);
        assert_eq!(
            run(&["fig5", "--overlay", &overlay]).status.code(),
            Some(2),
            "{body}"
        );
    }
}

const EXAMPLE: &str = "# two planes in F_2^3\nq=2 n=3\n100/010\n010/101\n";

#[test]
fn scheme_puncture_drops_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "s.txt", EXAMPLE);
    let out = ok(&["scheme", "mindist", "--file", &file]);
    assert_eq!(field(&out, "d"), "2");
    let out = ok(&["scheme", "puncture", "--file", &file, "-w", "010/001"]);
    assert!(out.lines().any(|l| l == "d: 2 → 0 (drop 2)"), "{out}");
    let out = ok(&["scheme", "puncture", "--file", &file, "-w", "I"]);
    assert!(out.contains("d unchanged"), "{out}");
}

#[test]
fn scheme_puncture_project_lands_one_level_down() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "s.txt", "q=2 n=3\n100/001\n010/001\n");
    for extra in [&[][..], &["--seed", "11"][..]] {
        let mut args = vec![
            "scheme",
            "puncture-project",
            "--file",
            &file,
            "-w",
            "100/001",
        ];
        args.extend_from_slice(extra);
        let out = ok(&args);
        let images: Vec<&str> = out.lines().filter(|l| l.contains(" -> ")).collect();
        assert_eq!(images.len(), 2);
        assert!(images.iter().all(|l| l.ends_with("(height 1)")), "{out}");
        assert!(field(&out, "chooser").starts_with(if extra.is_empty() {
            "least-id"
        } else {
            "seeded(seed=11)"
        }));
    }
}

#[test]
fn scheme_singleton_mindist_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "s.txt", "0110\n");
    let out = run(&["scheme", "mindist", "--file", &file]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undefined minimum distance"));
}

#[test]
fn scheme_binary_code_transform() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.txt", "00000\n11100\n00111\n11011\n");
    let out = ok(&["scheme", "mindist", "--file", &file, "--as-code"]);
    assert!(
        out.contains("injective=true isometric=true pairs=6"),
        "{out}"
    );
    assert_eq!(field(&out, "d"), "3");
}

fn search_json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn search_examples() {
    let v = search_json(&["search", "--projective", "-q", "2", "-n", "2", "-d", "2"]);
    assert_eq!(v["best_size"], 3);
    assert_eq!(v["proven_optimal"], true);
    assert_eq!(v["sandwich"]["result"], "PASS");
    assert_eq!(v["scheme"].as_array().unwrap().len(), 3);
    let v = search_json(&["search", "--powerset", "3", "-d", "3"]);
    assert_eq!(v["best_size"], 2);
    let v = search_json(&["search", "--name", "L2", "-d", "1"]);
    assert_eq!(v["best_size"], 7);
}

#[test]
fn search_budget_exhaustion_is_inconclusive() {
    let out = run(&[
        "search",
        "--projective",
        "-n",
        "4",
        "-d",
        "2",
        "--budget-nodes",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["proven_optimal"], false);
}

#[test]
fn probe_reports_gap() {
    let v = search_json(&["probe", "-n", "4", "-l", "2", "-d", "4", "--workers", "2"]);
    assert_eq!(v["bound"], "7");
    assert_eq!(v["optimum"], 5);
    assert_eq!(v["gap"], "2");
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for source in [
        &["--name", "L2"][..],
        &["--projective", "-n", "3"][..],
        &["--powerset", "3"][..],
    ] {
        let first = dir.path().join("a.json");
        let second = dir.path().join("b.json");
        let mut args = vec!["export-json"];
        args.extend_from_slice(source);
        args.extend(["-o", first.to_str().unwrap()]);
        ok(&args);
        ok(&[
            "export-json",
            "--lattice",
            first.to_str().unwrap(),
            "-o",
            second.to_str().unwrap(),
        ]);
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    }
}

#[test]
fn dot_export() {
    let dot = ok(&["export-dot", "--name", "M3"]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches(" -> ").count(), 6);
}
