use std::io::Write;

use rlc_cli::{run, ErrorRecord, Record};
use rlc_core::sweep::SweepReport;

fn rlc(args: &[&str]) -> (i32, String) {
    run(std::iter::once("rlc").chain(args.iter().copied()))
}

fn record(args: &[&str]) -> Record {
    let (code, out) = rlc(args);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).expect("record JSON")
}

fn json_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn pb_binomial_example() {
    let rec = record(&["pb-binomial", "--p", "0.1,0.2"]);
    let r = &rec.reports["binomial"];
    let primary = r
        .corollary_bounds
        .iter()
        .find(|b| b.name == "binomial_primary")
        .unwrap();
    assert!((primary.raw - 0.0034602076).abs() < 1e-9);
    assert!((r.oracle_tv.unwrap().upper - 0.003391).abs() < 1e-6);
    assert_eq!(r.dominated, Some(true));
}

#[test]
fn matroid_partition_example() {
    let rec = record(&["matroid", "--partition", "2:1,2:1", "--m", "1"]);
    assert_eq!(rec.profile, [1.0, 4.0, 4.0, 0.0, 0.0]);
    let r = &rec.reports["binomial"];
    assert_eq!(r.details["p"], 0.4);
    assert!((r.oracle_tv.unwrap().upper - 0.3088).abs() < 1e-12);
    assert_eq!(r.dominated, Some(true));
    assert!(rec.certificates["mason"].holds);
    assert!(rec.reports["partition_half"].reason.is_some());
}

#[test]
fn matroid_from_sets_and_uniform() {
    let sets = json_file("[[], [0], [1], [2], [0, 1], [0, 2], [1, 2]]");
    let rec = record(&["matroid", "--sets", sets.path().to_str().unwrap(), "--m", "1"]);
    assert_eq!(rec.profile, [1.0, 3.0, 3.0, 0.0]);
    let uni = record(&["matroid", "--uniform", "3,2", "--m", "1"]);
    assert_eq!(uni.profile, rec.profile);
    let not_matroid = json_file("[[], [0], [1], [2], [0, 1]]");
    let (code, out) = rlc(&["matroid", "--sets", not_matroid.path().to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn verify_example() {
    let (code, out) = rlc(&["verify", "--suite", "dominance", "--n", "500", "--seed", "7"]);
    assert_eq!(code, 0);
    let s: SweepReport = serde_json::from_str(&out).unwrap();
    assert_eq!((s.instances, s.dominance_passes), (500, 500));
    assert!(s.dominance_failures.is_empty());
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let seq = rlc(&["verify", "--suite", "all", "--n", "20", "--seed", "3", "--sequential"]);
    let par = rlc(&["verify", "--suite", "all", "--n", "20", "--seed", "3"]);
    assert_eq!(seq, par);
    assert_eq!(seq.0, 0);
}

#[test]
fn identical_argv_gives_identical_bytes() {
    for args in [
        &["verify", "--suite", "gamma", "--n", "30", "--seed", "11"][..],
        &["compound", "poisson", "--lambda", "3", "--severity", "0.7,0.3"],
        &["iv", "--box", "0.1,0.2", "--format", "csv"],
    ] {
        assert_eq!(rlc(args), rlc(args));
    }
    let a = rlc(&["verify", "--n", "30", "--seed", "1"]);
    let b = rlc(&["verify", "--n", "30", "--seed", "2"]);
    assert_ne!(a.1, b.1);
}

#[test]
fn json_round_trips() {
    let cases: [&[&str]; 8] = [
        &["pb-poisson", "--p", "0.05,0.1,0.02"],
        &["sum-geometric", "--pmf", "0.9,0.1", "--pmf", "0.8,0.15,0.05"],
        &["iv", "--cube", "3,1"],
        &["iv", "--ball", "2"],
        &["compound", "poisson", "--lambda", "3", "--severity", "0.7,0.3"],
        &["gamma", "--a", "2,2", "--b", "1,1"],
        &["gamma", "--a", "1,1", "--b", "1,1.1", "--case", "ii", "--z", "1"],
        &["expapprox", "--density", "builtin:tilted"],
    ];
    for args in cases {
        let (code, out) = rlc(args);
        assert_eq!(code, 0, "{args:?}: {out}");
        let rec: Record = serde_json::from_str(&out).unwrap();
        let again = rlc_cli::emit::canonical_json(&rec) + "\n";
        assert_eq!(again, out, "{args:?}");
    }
}

#[test]
fn compound_geometric_from_file() {
    let count = json_file(r#"{"offset": 1, "masses": [0.6, 0.3, 0.1]}"#);
    let rec = record(&[
        "compound",
        "geometric",
        "--count",
        count.path().to_str().unwrap(),
        "--p",
        "0.3",
    ]);
    assert_eq!(rec.reports["geometric"].dominated, Some(true));
}

#[test]
fn exit_code_two_when_theorem_does_not_apply() {
    let count = json_file("[0.2, 0.8]");
    let (code, out) = rlc(&[
        "compound",
        "geometric",
        "--count",
        count.path().to_str().unwrap(),
        "--p",
        "0.3",
    ]);
    assert_eq!(code, 2, "{out}");
    let rec: Record = serde_json::from_str(&out).unwrap();
    assert!(rec.reports["geometric"].reason.is_some());
    assert!(rec.reports["geometric"].oracle_tv.is_some());

    let (code, out) = rlc(&["expapprox", "--density", "builtin:half-normal"]);
    assert_eq!(code, 2);
    let err: ErrorRecord = serde_json::from_str(&out).unwrap();
    assert_eq!(err.kind, "not_applicable");

    let (code, _) = rlc(&["compound", "poisson", "--lambda", "1", "--severity", "0.5,0.3,0.2"]);
    assert_eq!(code, 2);
    let (code, _) = rlc(&["gamma", "--a", "2,1", "--b", "1,2"]);
    assert_eq!(code, 2);
}

#[test]
fn exit_code_one_on_bad_input() {
    let bad: [&[&str]; 7] = [
        &["pb-binomial", "--p", "0.1,abc"],
        &["pb-binomial", "--p", "1.5"],
        &["no-such-command"],
        &["pb-binomial", "--p", "0.1", "--bogus"],
        &[
            "compound",
            "geometric",
            "--count",
            "/nonexistent/file.json",
            "--p",
            "0.3",
        ],
        &["gamma", "--a", "2", "--b", "1,1"],
        &["expapprox", "--density", "builtin:nope"],
    ];
    for args in bad {
        let (code, out) = rlc(args);
        assert_eq!(code, 1, "{args:?}: {out}");
    }
    assert_eq!(rlc(&["--help"]).0, 0);
}

#[test]
fn csv_and_table_formats() {
    let (code, csv) = rlc(&["gamma", "--a", "2,2", "--b", "1,1", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "report,bound,raw,clamped,claimed,oracle_tv_lower,oracle_tv_upper,dominated"
    );
    assert!(lines.all(|l| l.starts_with("case_i,")));
    let (code, table) = rlc(&["verify", "--n", "10", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(table.lines().next().unwrap().starts_with("suite"));
}
