use std::path::Path;
use std::process::{Command, Output};

fn caputo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caputo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parses CSV output into a header and numeric rows.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn stderr_value(out: &Output, key: &str) -> f64 {
    stderr(out)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap()
        .parse()
        .unwrap()
}

const SEXTIC_FORCING: &str = "61.89965716638242*t^3.5 + t^6";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SPRING: &str = "[problem]\nalpha = 1.9\na = 0\nb = 20\ncoeff_x = 1\ndamping = 1\nforcing = cos(t)\nic0 = 0\nic1 = 1\n[approx]\nN = 50\n";

#[test]
fn help_lists_every_flag() {
    let expected: [(&str, &[&str]); 4] = [
        ("deriv", &["--expr", "--alpha", "--a", "--b", "--side", "--m", "--N", "--grid", "--exact-beta", "--out"]),
        ("solve", &["--config", "--alpha", "--forcing", "--coeffs", "--damping", "--ic", "--N", "--grid", "--out", "--reference", "--print-config"]),
        ("convergence", &["--sweep", "--values", "--expr", "--config", "--exact-beta", "--grid"]),
        ("compare", &["--expr", "--alpha", "--dt", "--m", "--N", "--exact-beta", "--out"]),
    ];
    for (cmd, flags) in expected {
        let out = caputo(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd} --help failed");
        let text = stdout(&out);
        for flag in flags {
            assert!(text.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
    assert!(caputo(&["--help"]).status.success());
}

#[test]
fn deriv_error_stays_below_the_bound() {
    let out = caputo(&["deriv", "--expr", "t^6", "--alpha", "1.5", "--m", "1", "--N", "50", "--a", "0", "--b", "1"]);
    assert!(out.status.success());
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["t", "approx", "direct_quadrature", "abs_error", "bound"]);
    assert_eq!(rows.len(), 100);
    for row in rows {
        assert!(row[3] <= row[4], "t = {}: {} > {}", row[0], row[3], row[4]);
    }
}

#[test]
fn deriv_of_a_line_is_zero_above_order_one() {
    let out = caputo(&["deriv", "--expr", "t", "--alpha", "1.5"]);
    let (header, rows) = csv(&stdout(&out));
    let approx = column(&header, "approx");
    assert!(rows.iter().all(|r| r[approx] == 0.0));
}

#[test]
fn deriv_right_side_exact_column() {
    let out = caputo(&["deriv", "--expr", "(1-t)^6", "--side", "right", "--alpha", "2.5", "--m", "1", "--N", "50", "--exact-beta", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = csv(&stdout(&out));
    let exact = column(&header, "exact");
    let approx = column(&header, "approx");
    let bound = column(&header, "bound");
    // 6!/Γ(4.5) = 720 / (3.5 · 2.5 · 1.5 · 0.5 · √π)
    let c = 720.0 / (3.5 * 2.5 * 1.5 * 0.5 * std::f64::consts::PI.sqrt());
    for r in &rows {
        let want = c * (1.0 - r[0]).powf(3.5);
        assert!((r[exact] - want).abs() < 1e-10 * want.max(1.0));
        assert!((r[approx] - r[exact]).abs() <= r[bound]);
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(caputo(&["deriv", "--expr", "t +", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(caputo(&["deriv", "--expr", "t", "--alpha", "2"]).status.code(), Some(2));
    assert_eq!(caputo(&["frobnicate"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.cfg", "[problem]\nalpha = 1.5\nforcing = t\nmass = 2\n");
    let out = caputo(&["solve", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key `mass`"));
    assert_eq!(caputo(&["solve", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
    // numeric: 1/t cannot be evaluated at the anchor
    assert_eq!(caputo(&["deriv", "--expr", "1/t", "--alpha", "0.5", "--m", "0", "--N", "5"]).status.code(), Some(3));
    // solver: the forcing blows up inside the interval
    let out = caputo(&["solve", "--alpha", "0.5", "--forcing", "1/(t-0.5)", "--N", "5"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn solve_sextic_problem_against_the_exact_solution() {
    let out = caputo(&["solve", "--alpha", "2.5", "--coeffs", "1,0,0", "--forcing", SEXTIC_FORCING, "--N", "50", "--reference", "t^6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let err = stderr_value(&out, "l2_error_vs_reference");
    // Regression value of the verified N = 50 run is 9.4297711514e-3.
    assert!(err < 9.5e-3, "{err}");
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["t", "x"]);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0], [0.0, 0.0]);
}

#[test]
fn solve_spring_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spring.cfg", SPRING);
    let csv_path = dir.path().join("x.csv");
    let out = caputo(&["solve", "--config", &cfg, "--derivatives", "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let (header, rows) = csv(&std::fs::read_to_string(csv_path).unwrap());
    assert_eq!(header, ["t", "x", "xp"]);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[99][0], 20.0);
    assert_eq!(rows[0][2], 1.0);
}

#[test]
fn zero_problem_gives_a_zero_column() {
    let out = caputo(&["solve", "--alpha", "2.5", "--forcing", "0"]);
    let (_, rows) = csv(&stdout(&out));
    assert!(rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn config_round_trips_through_print_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spring.cfg", SPRING);
    let first = stdout(&caputo(&["solve", "--config", &cfg, "--epsilon-start", "1e-7", "--print-config"]));
    let echoed = write(dir.path(), "echo.cfg", &first);
    let second = stdout(&caputo(&["solve", "--config", &echoed, "--print-config"]));
    assert_eq!(first, second);
    assert!(first.contains("epsilon_start = 1e-7"));
    // Solving from either file gives the same bytes.
    let a = caputo(&["solve", "--config", &cfg, "--epsilon-start", "1e-7"]);
    let b = caputo(&["solve", "--config", &echoed]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn convergence_reproduces_the_successive_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "spring.cfg", SPRING);
    let out = caputo(&["convergence", "--sweep", "N", "--values", "8,50", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N\tsuccessive_error");
    let value = |line: &str| line.split('\t').nth(1).unwrap().parse::<f64>().unwrap();
    let (e8, e50) = (value(lines[1]), value(lines[2]));
    assert!(e8 / 0.054485696738145 < 3.0 && 0.054485696738145 / e8 < 3.0, "{e8}");
    assert!(e50 / 0.001770846453709 < 3.0 && 0.001770846453709 / e50 < 3.0, "{e50}");
    assert!(lines[3].starts_with("slope(successive_error)\t"));
}

#[test]
fn convergence_over_n_decreases_and_single_values_have_no_slope() {
    let out = caputo(&["convergence", "--sweep", "N", "--values", "10,15,25,50", "--expr", "t^6", "--alpha", "1.5", "--m", "1", "--exact-beta", "7"]);
    let text = stdout(&out);
    let errors: Vec<f64> = text
        .lines()
        .skip(1)
        .take(4)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(text.contains("slope(l2_error)"));

    let out = caputo(&["convergence", "--sweep", "N", "--values", "10", "--expr", "t^6", "--alpha", "1.5"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains("slope"));

    let out = caputo(&["convergence", "--sweep", "m", "--values", "1,2,3", "--expr", "t^6", "--alpha", "1.5", "--exact-beta", "7"]);
    assert!(out.status.success());
    assert!(!stdout(&out).contains("slope"));
}

#[test]
fn compare_columns_and_refinement() {
    let out = caputo(&["compare", "--expr", "t^6", "--alpha", "1.5", "--dt", "0.01", "--exact-beta", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(header, ["t", "expansion", "sousa", "exact"]);
    assert_eq!(rows.len(), 100);
    assert!((rows[99][0] - 0.99).abs() < 1e-12);
    let coarse = stderr_value(&out, "l2_error_sousa");
    assert!(coarse.is_finite());

    let fine = caputo(&["compare", "--expr", "t^6", "--alpha", "1.5", "--dt", "0.005", "--exact-beta", "7"]);
    let (_, fine_rows) = csv(&stdout(&fine));
    // Compare on the shared coarse nodes: every other fine node.
    let shared = |rows: &[Vec<f64>], stride: usize| -> f64 {
        rows.iter()
            .step_by(stride)
            .take(100)
            .map(|r| (r[2] - r[3]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    assert!(shared(&fine_rows, 2) < shared(&rows, 1));

    let out = caputo(&["compare", "--expr", "4.5", "--alpha", "1.5", "--exact-beta", "1"]);
    assert_eq!(out.status.code(), Some(2), "beta must exceed n");
    let out = caputo(&["compare", "--expr", "4.5", "--alpha", "1.5"]);
    let (_, rows) = csv(&stdout(&out));
    assert!(rows.iter().all(|r| r[1] == 0.0 && r[2] == 0.0));
    assert_eq!(caputo(&["compare", "--expr", "t^6", "--alpha", "2.5"]).status.code(), Some(2));
    assert_eq!(caputo(&["compare", "--expr", "t^6", "--alpha", "1.5", "--dt", "0.3"]).status.code(), Some(2));
}

#[test]
fn csv_is_deterministic_and_locale_free() {
    let args = ["deriv", "--expr", "sin(2*t)*exp(t)", "--alpha", "0.7", "--m", "2", "--N", "30", "--grid", "40"];
    let first = caputo(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_caputo"))
        .args(args)
        .env("LC_ALL", "de_DE.UTF-8")
        .env("LANG", "de_DE.UTF-8")
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.len(), 17, "{field}");
            assert_eq!(mantissa.matches('.').count(), 1);
        }
    }
}
