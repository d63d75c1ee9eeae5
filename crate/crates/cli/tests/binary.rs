use std::process::{Command, Output};

use hwroots::{eval_point, parse, Complex64};

fn hwroots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwroots"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// `(value, multiplicity)` pairs from the text layout `z1 ≃ 2.36523-0.69160i`.
fn parse_text(out: &str) -> Vec<(Complex64, usize)> {
    out.lines()
        .map(|line| {
            let rest = line.split_once('≃').expect("root line").1.trim();
            let (value, mult) = match rest.split_once("(multiplicity ") {
                Some((v, m)) => (v.trim(), m.trim_end_matches(')').parse().unwrap()),
                None => (rest, 1),
            };
            let v = eval_point(&parse(value).unwrap(), Complex64::new(0.0, 0.0)).unwrap();
            (v, mult)
        })
        .collect()
}

fn parse_json(out: &str) -> (serde_json::Value, Vec<(Complex64, usize)>) {
    let v: serde_json::Value = serde_json::from_str(out).unwrap();
    let roots = v["roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let z = Complex64::new(r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap());
            (z, r["multiplicity"].as_u64().unwrap() as usize)
        })
        .collect();
    (v, roots)
}

fn contains_all(got: &[(Complex64, usize)], want: &[(Complex64, usize)], tol: f64) -> bool {
    got.len() == want.len()
        && want
            .iter()
            .all(|(w, m)| got.iter().any(|(g, n)| (g - w).norm() <= tol && n == m))
}

#[test]
fn cubic_from_the_command_line() {
    let o = hwroots(&[
        "solve",
        "--expr",
        "(z-2)*(z-3)*(z-5)",
        "--y",
        "2",
        "--count",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let want = [
        (Complex64::new(5.26953, 0.0), 1),
        (Complex64::new(2.36523, 0.69160), 1),
        (Complex64::new(2.36523, -0.69160), 1),
    ];
    let got = parse_text(&stdout(&o));
    assert!(contains_all(&got, &want, 1e-4), "{got:?}");
    assert!(stdout(&o).starts_with("z1 ≃ "));
}

#[test]
fn rational_from_the_command_line() {
    let o = hwroots(&[
        "solve",
        "--rational",
        "(z-2)*(z-3)",
        "(z-5)*(z-1)",
        "--y",
        "2",
        "--count",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let want = [
        (Complex64::new(6.37228, 0.0), 1),
        (Complex64::new(0.62771, 0.0), 1),
    ];
    assert!(contains_all(&parse_text(&stdout(&o)), &want, 1e-4));
}

#[test]
fn zero_count_is_a_usage_error() {
    let o = hwroots(&["solve", "--expr", "sin(z)", "--y", "0.5", "--count", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--count"), "{err}");
    assert!(err.contains("expression grammar"), "{err}");
}

#[test]
fn malformed_flags_exit_with_one() {
    assert_eq!(hwroots(&["solve", "--y", "2"]).status.code(), Some(1));
    assert_eq!(
        hwroots(&["solve", "--expr", "z", "--y", "2", "--order", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hwroots(&["solve", "--expr", "2z", "--y", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hwroots(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_residuals_reproduce() {
    let src = "sin(z)+exp(sin(z))/sqrt(1+tanh(z))";
    let o = hwroots(&[
        "solve", "--expr", src, "--y", "1/2", "--count", "4", "--format", "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (v, roots) = parse_json(&stdout(&o));
    assert_eq!(v["config"]["expr"], src);
    assert_eq!(v["config"]["count"], 4);
    let f = parse(src).unwrap();
    for (r, (z, _)) in v["roots"].as_array().unwrap().iter().zip(&roots) {
        let fresh = (eval_point(&f, *z).unwrap() - 0.5).norm();
        let reported = r["residual"].as_f64().unwrap();
        assert!((fresh - reported).abs() <= 1e-12, "{fresh} vs {reported}");
        assert!(r["order_found"].as_u64().unwrap() >= 1);
    }
}

#[test]
fn text_and_json_agree() {
    for args in [
        vec!["solve", "--expr", "z^3-4*z^2+5*z", "--y", "2"],
        vec!["solve", "--expr", "sin(z)", "--y", "0.5", "--count", "3"],
        vec!["solve", "--rational", "z^2+1", "z-3", "--y", "1+i"],
    ] {
        let text = hwroots(&args);
        let mut json_args = args.clone();
        json_args.extend(["--format", "json"]);
        let json = hwroots(&json_args);
        assert_eq!(text.status.code(), json.status.code());
        let a = parse_text(&stdout(&text));
        let (_, b) = parse_json(&stdout(&json));
        assert!(contains_all(&a, &b, 1e-5), "{a:?} vs {b:?}");
    }
}

#[test]
fn double_root_is_clustered() {
    let o = hwroots(&["solve", "--expr", "z^3-4*z^2+5*z", "--y", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let got = parse_text(&stdout(&o));
    let want = [(Complex64::new(1.0, 0.0), 2), (Complex64::new(2.0, 0.0), 1)];
    assert!(contains_all(&got, &want, 1e-3), "{got:?}");
}

#[test]
fn hw_then_gmap_returns_y() {
    let o = hwroots(&[
        "hw",
        "--param",
        "0.1*sin(z)",
        "--y",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (re, im) = (
        v["value"]["re"].as_f64().unwrap(),
        v["value"]["im"].as_f64().unwrap(),
    );
    let z = format!("{re:e}+{im:e}i");
    let g = hwroots(&[
        "gmap",
        "--param",
        "0.1*sin(z)",
        "--z",
        &z,
        "--format",
        "json",
    ]);
    let w: serde_json::Value = serde_json::from_str(&stdout(&g)).unwrap();
    let back = Complex64::new(
        w["value"]["re"].as_f64().unwrap(),
        w["value"]["im"].as_f64().unwrap(),
    );
    assert!((back - 1.0).norm() < 1e-9, "{back}");
}
