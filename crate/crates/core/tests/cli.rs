use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name]
        .iter()
        .collect();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchkit"))
        .args(args)
        .env_remove("MATCHKIT_MAX_EDGES")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["ex1.market", "ex2.market", "m69.market", "m69b.market"] {
        let out = run(&["validate", &fixture(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert!(stdout(&out).contains("path independence: holds for every agent"));
    }
}

#[test]
fn validate_rejects_non_substitutable_market() {
    let dir = std::env::temp_dir().join(format!("matchkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.market");
    // f1 takes w1 from {w1 w2} but drops it from {w1}.
    std::fs::write(
        &path,
        "market many-to-many\nfirms: f1\nworkers: w1 w2\n\
         choice f1:\n  {} -> {}\n  {w1} -> {}\n  {w2} -> {w2}\n  {w1 w2} -> {w1}\n\
         pref w1: {f1} > {}\npref w2: {f1} > {}\n",
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not substitutable"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_example_four() {
    let out = run(&[
        "classify",
        &fixture("m69b.market"),
        "--match",
        "f1:w2 w3; f2:w1 w3; f3:w1 w2 w3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = |short: &str| {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(short))
            .unwrap_or_else(|| panic!("no {short} row in\n{text}"))
            .split_whitespace()
            .find(|w| *w == "yes" || *w == "no")
            .unwrap()
            .to_string()
    };
    assert_eq!(row("I"), "yes");
    assert_eq!(row("C"), "yes");
    assert_eq!(row("QW"), "yes");
    assert_eq!(row("QF"), "no");
    assert_eq!(row("S"), "no");
}

#[test]
fn verify_fixture_reports_strict_inclusions() {
    let out = run(&["verify", &fixture("m69.market")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("SW^QW == QW: HOLDS"), "{text}");
    assert!(text.contains("QW ⊆ I∩C^QW: HOLDS (strict"), "{text}");
    assert!(text.contains("C == S: NOT APPLICABLE"), "{text}");
}

#[test]
fn verify_generated_many_to_one_corpus() {
    let out = run(&[
        "verify",
        "--gen",
        "--seed",
        "1",
        "--count",
        "50",
        "--mode",
        "m21",
        "--theorems",
        "m21",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains("FAILS"), "{text}");
    assert_eq!(
        text.lines().filter(|l| l.contains("HOLDS")).count(),
        6,
        "{text}"
    );
}

#[test]
fn verify_tsv_has_header_and_one_row_per_theorem() {
    let out = run(&["verify", "--tsv", &fixture("m69.market")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("theorem\tmode\tstatement\tstatus\tmarkets\tmarket\tmatching")
    );
    assert_eq!(lines.count(), 12);
}

#[test]
fn blocking_pair_witness_refuses_non_blocking_pair() {
    let out = run(&[
        "witness",
        &fixture("ex1.market"),
        "--match",
        "f:w",
        "--kind",
        "blocking-pair",
        "--pair",
        "f,w",
    ]);
    // (f, w) cannot block: f prefers nobody, so the construction is refused.
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_for_worker_quasi_violation() {
    let out = run(&[
        "witness",
        &fixture("m69.market"),
        "--match",
        "f1:w2 w3; f2:w1 w3; f3:w1 w2",
        "--kind",
        "qw-violation",
        "--worker",
        "w1",
        "--set",
        "f1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("coalition    {f1 w1}"), "{text}");
    assert!(text.contains("verified     yes"), "{text}");
}

#[test]
fn gen_output_parses_back() {
    let out = run(&[
        "gen",
        "--seed",
        "9",
        "--mode",
        "m2m",
        "--strategy",
        "subset",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let market = matchkit::parse_market(&text).unwrap();
    assert_eq!(matchkit::serialize_market(&market), text);
    assert_eq!(
        stdout(&run(&[
            "gen",
            "--seed",
            "9",
            "--mode",
            "m2m",
            "--strategy",
            "subset"
        ])),
        text
    );
}

#[test]
fn errors_and_usage_have_distinct_exit_codes() {
    assert_eq!(
        run(&["validate", "/nonexistent/x.market"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--theorems", "nope", &fixture("m69.market")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["classify", &fixture("m69.market"), "--match", "f1:w9"])
            .status
            .code(),
        Some(1)
    );
}
