use std::process::Command;

fn bsscl(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bsscl")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn scl_prints_the_fraction_first() {
    let (code, out, _) = bsscl(&["scl", "--M", "2", "--L", "3", "atAT"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("1/12"));
}

#[test]
fn piece_solver_from_an_infeasible_bound() {
    let (code, out, _) = bsscl(&["scl", "--M", "2", "--L", "3", "at^2At^-2", "--solver", "pieces", "--max-turns", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("5/24"));
    assert!(out.contains("at most 4 turns"));
}

#[test]
fn exit_codes() {
    let (code, out, _) = bsscl(&["scl", "--M", "2", "--L", "3", "t"]);
    assert_eq!(code, 3);
    assert!(out.starts_with("scl undefined/infinite: nonzero t-homology"));
    let (code, _, err) = bsscl(&["scl", "--M", "2", "--L", "3", "atxAT"]);
    assert_eq!(code, 2);
    assert!(err.contains("syntax error"));
    let (code, _, _) = bsscl(&["scl", "--M", "0", "--L", "3", "atAT"]);
    assert_eq!(code, 2);
    let (code, _, _) = bsscl(&["scl", "--M", "2", "--L", "3", "atAT", "--solver", "block", "--max-dv", "2"]);
    assert_eq!(code, 4);
    let (code, _, _) = bsscl(&["bogus"]);
    assert_eq!(code, 2);
}

#[test]
fn env_ceiling_applies() {
    let out = Command::new(env!("CARGO_BIN_EXE_bsscl"))
        .args(["scl", "--M", "2", "--L", "3", "atAT", "--solver", "block"])
        .env("BS_SCL_MAX_CUTS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn negative_parameters_parse() {
    let (code, out, _) = bsscl(&["scl", "--M", "2", "--L", "-3", "atAT"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn json_schema_and_round_trip() {
    let args = ["scl", "--M", "2", "--L", "3", "atAT + a^2 + 2 taTA", "--json", "--no-timing"];
    let (code, out, _) = bsscl(&args);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["group", "chain", "rho", "Dv", "scl", "solver", "lp", "dropped_elliptic", "extremal", "timing_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["group"]["M"], 2);
    assert_eq!(v["lp"]["vars"].as_u64().map(|x| x > 0), Some(true));
    assert_eq!(v["dropped_elliptic"][0]["power"], 2);
    // Emitted chain parses back to the same chain.
    let chain = v["chain"].as_str().unwrap();
    let (_, again, _) = bsscl(&["scl", "--M", "2", "--L", "3", chain, "--json", "--no-timing"]);
    let w: serde_json::Value = serde_json::from_str(&again).unwrap();
    assert_eq!(w["chain"], v["chain"]);
    assert_eq!(w["scl"], v["scl"]);
    // Identical runs give identical bytes.
    assert_eq!(bsscl(&args).1, out);
}

#[test]
fn formula_command() {
    let (code, out, _) = bsscl(&["formula", "--M", "4", "--L", "6", "eg2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "19/48 (exact; condition d>=5/4 holds)\n");
    let (_, out, _) = bsscl(&["formula", "--M", "6", "--L", "9", "eg1", "--k", "3"]);
    assert_eq!(out, "0 (exact)\n");
    let (_, out, _) = bsscl(&["formula", "--M", "2", "--L", "3", "eg2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["validity"], "conditional");
    assert_eq!(v["lower"]["den"], 4);
    let (code, _, _) = bsscl(&["formula", "--M", "2", "--L", "3", "eg9"]);
    assert_eq!(code, 2);
}

#[test]
fn sweep_command() {
    let (code, out, _) = bsscl(&["sweep", "--m", "2", "--l", "3", "--d", "2..6", "at^2At^-1 + T", "--no-timing"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("d,M,L,num,den,solver,vars,pivots,millis"));
    for (line, d) in lines.zip(2..) {
        let f: Vec<&str> = line.split(',').collect();
        let expect = bsscl::Rational::new(1.into(), 2.into()) - bsscl::Rational::new(5.into(), (24 * d).into());
        assert_eq!(f[0], d.to_string());
        assert_eq!((f[3], f[4]), (expect.numer().to_string().as_str(), expect.denom().to_string().as_str()));
    }
}

#[test]
fn certify_command() {
    let costs = data("eg3.json");
    let (code, out, _) = bsscl(&["certify", "--M", "2", "--L", "3", "at^2At^-2", "--costs", &costs, "--bound", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("lower bound 5/24 certified up to bound 4"));
    let (code, out, _) = bsscl(&["certify", "--M", "4", "--L", "6", "at^2At^-1 + T", "--costs", "builtin:eg2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("lower bound 19/48"));
}

#[test]
fn extremal_command() {
    let (code, out, _) = bsscl(&["extremal", "--M", "2", "--L", "3", "atAT"]);
    assert_eq!(code, 0);
    assert!(out.contains("sufficient check: inconclusive"));
    assert!(out.contains("extremal: unknown"));
    let (code, out, _) = bsscl(&["extremal", "--M", "2", "--L", "3", "atAT + taTA", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["extremal"]["status"], "not_reduced");
}
