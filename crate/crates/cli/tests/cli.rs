use serde_json::Value;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lab(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_specflow-lab"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let r = lab(dir, args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).expect("summary on stdout is JSON")
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

// |∫₀¹ e^{2πi h}| for h = slope·x + Σ jumps, summed piece by piece in closed form.
fn linear_slice_integral(slope: f64, jumps: &[(f64, f64)]) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend(jumps.iter().map(|j| j.0));
    cuts.push(1.0);
    let (mut re, mut im) = (0.0, 0.0);
    let mut lift = 0.0;
    for (i, w) in cuts.windows(2).enumerate() {
        if i > 0 {
            lift += jumps[i - 1].1;
        }
        // ∫_a^b e^{2πi(sx + c)} dx = (e^{2πi(sb + c)} − e^{2πi(sa + c)}) / (2πis)
        let k = 2.0 * PI * slope;
        let (pb, pa) = (2.0 * PI * (slope * w[1] + lift), 2.0 * PI * (slope * w[0] + lift));
        let (dr, di) = (pb.cos() - pa.cos(), pb.sin() - pa.sin());
        re += di / k;
        im -= dr / k;
    }
    re.hypot(im)
}

#[test]
fn exp_sum_from_config_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "e.json",
        r#"{"operation": "exp-sum", "params": {"slice": {"slope": 7.0, "jumps": [{"at": 0.4, "size": 0.3}]}}}"#,
    );
    let s = ok(tmp.path(), &["exp-sum", "--config", &cfg]);
    assert_eq!(s["pass"], true);
    let (h, rows) = table(&tmp.path().join("exp-sum.csv"));
    assert_eq!(rows.len(), 1);
    let get = |n: &str| rows[0][col(&h, n)].parse::<f64>().unwrap();
    let exact = linear_slice_integral(7.0, &[(0.4, 0.3)]);
    assert!((get("value") - exact).abs() <= get("quad_error") + 1e-12, "{} vs {exact}", get("value"));
    // One interior jump plus the seam (7.3 is not an integer), constant derivative.
    assert_eq!(get("discontinuities"), 2.0);
    assert!((get("bound") - 2.0 / (PI * 7.0)).abs() < 1e-14);
    assert!(exact <= get("bound"));
}

#[test]
fn yoccoz_tables_satisfy_growth_conditions() {
    let tmp = TempDir::new().unwrap();
    let s = ok(tmp.path(), &["yoccoz", "--gamma", "linear", "--levels", "3"]);
    let big = |v: &Value| -> Vec<u128> { v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect() };
    let q = big(&s["results"]["q"]);
    let r = big(&s["results"]["r"]);
    let gamma = |n: usize| (n + 1) as u128;
    for n in 1..=3 {
        assert!(4 * gamma(n - 1) * gamma(n) * q[n] <= r[n], "left condition at {n}");
        assert!(4 * gamma(n) * gamma(n) * r[n] <= q[n + 1], "right condition at {n}");
    }
    for v in s["results"]["verdicts"].as_array().unwrap() {
        assert_eq!(v["left"], true);
        assert_eq!(v["right"], true);
    }
    let (h, rows) = table(&tmp.path().join("yoccoz.csv"));
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[col(&h, "q_n")].parse::<u128>().unwrap(), q[i + 1]);
        assert_eq!(row[col(&h, "r_n")].parse::<u128>().unwrap(), r[i + 1]);
    }
}

#[test]
fn convergents_of_golden_mean_are_fibonacci() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["convergents", "--terms", "30"]);
    let (h, rows) = table(&tmp.path().join("convergents.csv"));
    assert_eq!(rows.len(), 31);
    let (mut f0, mut f1) = (0u64, 1u64);
    for row in &rows[1..] {
        (f0, f1) = (f1, f0 + f1);
        assert_eq!(row[col(&h, "p_n")].parse::<u64>().unwrap(), f0);
        assert_eq!(row[col(&h, "q_n")].parse::<u64>().unwrap(), f1);
        assert_eq!(row[col(&h, "lower_ok")], "true");
        assert_eq!(row[col(&h, "upper_ok")], "true");
    }
}

#[test]
fn ratner_witness_rows_meet_their_checks() {
    let tmp = TempDir::new().unwrap();
    let s = ok(tmp.path(), &["ratner-witness", "--pairs", "100", "--eps", "0.1"]);
    let res = &s["results"];
    let num = |k: &str| res[k].as_f64().unwrap();
    let (c1, c2, p0, p1, kappa, eps) = (num("c1"), num("c2"), num("p0"), num("p1"), num("kappa"), num("eps_used"));
    let segments = num("s");
    assert!(eps < 0.1 && res["eps_requested"] == 0.1);
    let (h, rows) = table(&tmp.path().join("ratner-witness.csv"));
    assert_eq!(rows.len(), 100);
    for row in &rows {
        let f = |n: &str| row[col(&h, n)].parse::<f64>().unwrap();
        let (d, m, l, p) = (f("d"), f("m"), f("l"), f("p"));
        assert_eq!(row[col(&h, "valid")], "true");
        assert!(m >= c1 / d && m <= 3.0 * segments * c2 / d + 2.0);
        assert!(l / m >= kappa);
        assert!(p0 <= p.abs() && p.abs() <= p1);
        assert!(f("good_fraction") > 1.0 - eps);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let args = ["correlate", "--samples", "600", "--times", "1,10", "--seed", "9"];
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let d = tmp.path().join(format!("t{}", outputs.len()));
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        ok(&d, &a);
        outputs.push((fs::read(d.join("correlate.csv")).unwrap(), fs::read(d.join("correlate.json")).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let d = tmp.path().join("other-seed");
    ok(&d, &["correlate", "--samples", "600", "--times", "1,10", "--seed", "10"]);
    assert_ne!(fs::read(d.join("correlate.csv")).unwrap(), outputs[0].0);
}

#[test]
fn flags_override_config_and_run_dispatches() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"operation": "convergents", "params": {"terms": 5}, "seed": 3, "output": {"stem": "cf"}}"#,
    );
    let a = ok(&tmp.path().join("a"), &["run", "--config", &cfg]);
    assert_eq!(table(&tmp.path().join("a/cf.csv")).1.len(), 6);
    assert_eq!(a["operation"], "convergents");

    let b = ok(&tmp.path().join("b"), &["convergents", "--config", &cfg, "--terms", "8"]);
    assert_eq!(table(&tmp.path().join("b/cf.csv")).1.len(), 9);
    assert_eq!(b["inputs"]["params"]["terms"], 8);
    assert_ne!(a["config_hash"], b["config_hash"]);

    // The hash ignores where output goes.
    let c = ok(&tmp.path().join("c"), &["run", "--config", &cfg]);
    assert_eq!(a["config_hash"], c["config_hash"]);
}

#[test]
fn invalid_input_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        (r#"{"operation": "convergents", "colour": 1}"#, vec!["run"]),
        (r#"{"operation": "convergents", "params": {"depth": 3}}"#, vec!["run"]),
        (r#"{"operation": "convergents"}"#, vec!["yoccoz"]),
        (r#"{"operation": "no-such-thing"}"#, vec!["run"]),
        (r#"{}"#, vec!["run"]),
        (r#"{"operation": "exp-sum"}"#, vec!["exp-sum", "--theta", "100"]),
    ];
    for (i, (body, args)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("bad{i}.json"), body);
        let mut a = args.clone();
        a.extend(["--config", &cfg]);
        let r = lab(tmp.path(), &a);
        assert_eq!(r.code, 2, "{body}: {}", r.stderr);
        assert!(r.stderr.contains("invalid input"), "{}", r.stderr);
    }
    assert_eq!(lab(tmp.path(), &["convergents", "--terms", "many"]).code, 2);
}

#[test]
fn found_relation_exits_1() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "r.json",
        r#"{"rotation": {"alpha": {"kind": "constant", "params": {"value": 1}},
                         "beta": {"kind": "constant", "params": {"value": 1}}, "precision_bits": 128}}"#,
    );
    let r = lab(tmp.path(), &["ergodicity", "--config", &cfg, "--k-max", "5"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    let s: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(s["pass"], false);
    let res = &s["results"];
    assert_eq!(res["verdict"], "relation");
    assert_eq!((res["k"].as_i64().unwrap() + res["l"].as_i64().unwrap(), res["m"].as_i64().unwrap()), (0, 0));
    assert_eq!(res["k"].as_i64().unwrap().abs(), 1);
}

#[test]
fn exhausted_precision_exits_3() {
    let tmp = TempDir::new().unwrap();
    let r = lab(tmp.path(), &["birkhoff", "--precision-bits", "16", "--m-max", "100000"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("insufficient precision"));
}

#[test]
fn plot_script_names_the_csv_columns() {
    let tmp = TempDir::new().unwrap();
    ok(tmp.path(), &["flow", "--times", "0,1,2", "--plot-script"]);
    let gp = fs::read_to_string(tmp.path().join("flow.gp")).unwrap();
    assert!(gp.contains("'flow.csv'"));
    let (h, rows) = table(&tmp.path().join("flow.csv"));
    assert_eq!(rows.len(), 3);
    assert!(gp.contains(&format!("set xlabel '{}'", h[0])));
}
