use std::process::Command;

fn cghz(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cghz")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn eval_prints_csv() {
    let (code, out, _) = cghz(&["eval", "fidelity", "--N", "2", "--m", "1", "--p", "0.9"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "quantity,N,m,p,engine,value,error\nfidelity,2,1,0.9,analytic,8.5750000000000004e-1,\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(cghz(&["eval", "coherence", "--N", "2", "--m", "1", "--p", "2"]).0, 1);
    assert_eq!(cghz(&["bogus"]).0, 1);
    assert_eq!(cghz(&["--version"]).0, 0);
    let (code, _, err) = cghz(&["--engine", "oracle", "eval", "fisher", "--N", "4", "--m", "4", "--p", "0.9"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn all_engines_agree() {
    let (code, out, _) = cghz(&["--engine", "all", "eval", "negativity", "--N", "3", "--m", "2", "--p", "0.7"]);
    assert_eq!(code, 0, "{out}");
    let d: f64 = out.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(d < 1e-10);
}

#[test]
fn sweep_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let (code, _, err) = cghz(&[
            "--out",
            path.to_str().unwrap(),
            "sweep",
            "fisher",
            "--N",
            "2..30",
            "--m",
            "1,3",
            "--p",
            "0.8,0.9",
            "--fit",
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn synthesize_round_trips_through_parser() {
    let (code, out, err) = cghz(&["synthesize", "--N", "3", "--m", "2", "--verify"]);
    assert_eq!(code, 0, "{err}");
    let parsed = cghz::circuits::Circuit::parse(&out).unwrap();
    assert_eq!(parsed.export(), out);
    assert!(err.contains("fidelity=1.0000000000"), "{err}");
}

#[test]
fn random_compare_is_seeded() {
    let args = ["--seed", "5", "random-compare", "--m", "2", "--samples", "30", "--p", "0.9"];
    let (c1, a, s1) = cghz(&args);
    let (c2, b, _) = cghz(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(s1.contains("exceed=0"), "{s1}");
    assert_eq!(a.lines().count(), 31);
}

#[test]
fn json_output() {
    let (code, out, _) = cghz(&["--json", "--seed", "3", "synthesize", "--N", "2", "--m", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["records"]["ms_count"], 3);
}
