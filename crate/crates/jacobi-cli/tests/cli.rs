use std::process::{Command, Output};

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn info_reports_genus_gaps_and_sigma_weight() {
    let o = jacobi(&["info", "3", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("genus         3"));
    assert!(text.contains("gaps          1, 2, 5"));
    assert!(text.contains("sigma weight  -5"));

    let v: serde_json::Value = serde_json::from_slice(&jacobi(&["info", "2", "3", "--format", "json"]).stdout).unwrap();
    assert_eq!(v["genus"], 1);
    assert_eq!(v["gaps"], serde_json::json!([1]));
    assert_eq!(v["sigma_weight"], -1);
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(jacobi(&["info", "4", "6"]).status.code(), Some(2));
    assert_eq!(jacobi(&["formulas", "3", "4", "2"]).status.code(), Some(2));
    assert_eq!(jacobi(&["formulas", "6", "7", "1"]).status.code(), Some(2));
    assert_eq!(jacobi(&["expand", "3", "4", "--order", "3"]).status.code(), Some(2));
    assert_eq!(jacobi(&["hyper-demo", "3"]).status.code(), Some(2));
    assert_eq!(jacobi(&["roundtrip", "/nonexistent/curve.txt"]).status.code(), Some(2));
    assert_eq!(jacobi(&["info"]).status.code(), Some(2));
}

#[test]
fn golden_checks_pass() {
    for (n, s, m) in [("3", "4", "1"), ("4", "7", "1")] {
        let o = jacobi(&["formulas", n, s, m, "--check-golden"]);
        assert_eq!(o.status.code(), Some(0), "({n},{s})");
        assert!(stdout(&o).ends_with("golden: PASS\n"));
    }
}

#[test]
fn json_formulas_parse_and_are_written_to_the_output_file() {
    let path = std::env::temp_dir().join(format!("jacobi-formulas-{}.json", std::process::id()));
    let o = jacobi(&["formulas", "5", "9", "1", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["functions"].as_array().unwrap().len(), 4);
    for key in ["n", "s", "m", "genus", "gaps"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for f in v["functions"].as_array().unwrap() {
        assert!(f["weight"].is_u64());
        for t in f["terms"].as_array().unwrap() {
            assert!(t["monomial"]["j"].is_u64() && t["monomial"]["i"].is_u64());
            for sym in t["coefficient"]["symbols"].as_array().unwrap() {
                let kind = sym["kind"].as_str().unwrap();
                assert!(["zeta", "wp2", "wp3", "wp4", "wp5"].contains(&kind), "{kind}");
                assert!(sym["rational"].is_string());
            }
        }
    }
}

#[test]
fn roundtrip_and_demo_are_deterministic() {
    let path = std::env::temp_dir().join(format!("jacobi-curve-{}.txt", std::process::id()));
    std::fs::write(&path, "n = 3\ns = 5\nlambda.1 = 1/4\nlambda.4 = -0.3\nlambda.7 = 2/5\nlambda.10 = 0.1\nlambda.15 = -1/3\n").unwrap();
    let args = ["roundtrip", path.to_str().unwrap(), "--seed", "9", "--count", "4"];
    let (a, b) = (jacobi(&args), jacobi(&args));
    std::fs::remove_file(&path).ok();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);

    let (c, d) = (jacobi(&["hyper-demo", "1", "--seed", "2"]), jacobi(&["hyper-demo", "1", "--seed", "2"]));
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn roundtrip_reads_a_divisor_file() {
    let dir = std::env::temp_dir();
    let curve = dir.join(format!("jacobi-g1-{}.txt", std::process::id()));
    let divisor = dir.join(format!("jacobi-d1-{}.json", std::process::id()));
    // y² = x³ − x + 1/2 through (1, ±1/√2).
    std::fs::write(&curve, "n = 2\ns = 3\nlambda.4 = -1\nlambda.6 = 1/2\n").unwrap();
    std::fs::write(&divisor, format!("[[1.0, 0.0, {}, 0.0]]", std::f64::consts::FRAC_1_SQRT_2)).unwrap();
    let o = jacobi(&["roundtrip", curve.to_str().unwrap(), "--divisor", divisor.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&divisor, "[[1.0, 0.0, 3.0, 0.0]]").unwrap();
    let o = jacobi(&["roundtrip", curve.to_str().unwrap(), "--divisor", divisor.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_file(&curve).ok();
    std::fs::remove_file(&divisor).ok();
}

#[test]
fn unreachable_tolerance_exits_with_one() {
    let o = jacobi(&["hyper-demo", "2", "--count", "2", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
