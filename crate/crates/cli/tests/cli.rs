use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn vdck(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdck"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
        .unwrap_or_else(|| panic!("no {key} in report:\n{report}"))
}

/// `phi_3(n)` as a reduced `num/den` string.
fn radical_inverse_3(mut n: u64) -> String {
    if n == 0 {
        return "0".into();
    }
    let (mut num, mut den) = (0u64, 1u64);
    while n > 0 {
        num = num * 3 + n % 3;
        den *= 3;
        n /= 3;
    }
    while num % 3 == 0 {
        num /= 3;
        den /= 3;
    }
    format!("{num}/{den}")
}

#[test]
fn gen_first_column_is_radical_inverse() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &[
            "gen",
            "--theta",
            "paperfolding",
            "--p",
            "3",
            "--N",
            "81",
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(tmp.path().join("o/points.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,x1,x2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 81);
    for (n, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], n.to_string());
        assert_eq!(cols[1], radical_inverse_3(n as u64), "row {n}");
    }
}

#[test]
fn gen_zero_points_writes_header_only() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(&["gen", "--N", "0", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read_to_string(tmp.path().join("o/points.csv")).unwrap(),
        "n,x1,x2\n"
    );
}

#[test]
fn gen_spans_several_chunks_with_one_header() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(&["gen", "--N", "9000", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(tmp.path().join("o/points.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9001);
    assert_eq!(csv.matches("n,x1").count(), 1);
    assert!(csv.lines().last().unwrap().starts_with("8999,"));
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["gen", "--p", "4"][..],
        &["gen", "--dim", "4"],
        &["gen", "--theta", "golden"],
        &["gen", "--theta", "rational:1,/,0"],
        &["gen", "--threads", "0"],
        &["lowerbound", "--m", "100"],
        &["lowerbound", "--m", "100", "--deficiency", "3"],
        &["verify", "hankel", "--theta", "file:missing.txt"],
        &["nonsense"],
    ] {
        assert_eq!(code(&vdck(args, tmp.path())), 2, "{args:?}");
    }
}

#[test]
fn exhausted_horizon_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &[
            "verify",
            "tvalue",
            "--t",
            "3",
            "--m-max",
            "80",
            "--horizon",
            "100",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 3);
    let out = vdck(
        &["growth", "--k-max", "12", "--deficiency", "3", "--out", "g"],
        tmp.path(),
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn falsifications_exit_4() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &["verify", "deficiency", "--r-max", "32", "--max-degree", "3"],
        tmp.path(),
    );
    assert_eq!(code(&out), 4);
    let report = stdout(&out);
    assert_eq!(value(&report, "status"), "FAIL");
    assert!(value(&report, "violation_witness").contains("deg=4"));

    let out = vdck(&["verify", "admissible", "--d", "4"], tmp.path());
    assert_eq!(code(&out), 4);
    assert_eq!(value(&stdout(&out), "witness"), "k=0 n=1");

    let out = vdck(
        &["verify", "tvalue", "--t", "2", "--m-max", "12"],
        tmp.path(),
    );
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_deficiency_paperfolding() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(&["verify", "deficiency", "--r-max", "512"], tmp.path());
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert_eq!(value(&report, "status"), "PASS");
    assert_eq!(value(&report, "max_certified_degree"), "4");
    assert_eq!(value(&report, "d_hat"), "3");
    assert_eq!(value(&report, "rational_collapse"), "none");
}

#[test]
fn verify_deficiency_with_brute_search() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &["verify", "deficiency", "--r-max", "16", "--degq-max", "4"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    assert_eq!(value(&stdout(&out), "brute_exponent"), "-4");
}

#[test]
fn verify_tvalue_table() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &["verify", "tvalue", "--m-max", "27", "--t", "3"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    for m in 1..=27 {
        assert_eq!(value(&report, &format!("m_{m}")), "ok");
    }
}

#[test]
fn verify_hankel_rational_fixture() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &["verify", "hankel", "--theta", "rational:1,/,X+2"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert_eq!(value(&report, "regular_sizes"), "1");
    assert_eq!(value(&report, "convergent_degrees"), "1");
}

#[test]
fn verify_hankel_reads_series_file() {
    let tmp = TempDir::new().unwrap();
    // 1/(X - 1) = sum_{i >= 1} X^{-i}
    let series = format!("3 1 {}", vec!["1"; 64].join(" "));
    fs::write(tmp.path().join("theta.txt"), series).unwrap();
    let out = vdck(
        &[
            "verify",
            "hankel",
            "--theta",
            "file:theta.txt",
            "--m-max",
            "16",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    assert_eq!(value(&stdout(&out), "regular_sizes"), "1");
    let out = vdck(
        &["verify", "hankel", "--theta", "file:theta.txt", "--p", "5"],
        tmp.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_admissible_and_correspondence_pass() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(&["verify", "admissible", "--deficiency", "3"], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(value(&stdout(&out), "d"), "6");
    let out = vdck(
        &[
            "verify",
            "admissible",
            "--d",
            "6",
            "--mode",
            "exhaustive",
            "--m",
            "5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let out = vdck(
        &["verify", "correspondence", "--samples", "2000"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert_eq!(value(&report, "checked"), "2729");
    assert_eq!(value(&report, "first_mismatch"), "none");
}

#[test]
fn lowerbound_m96_writes_report_and_intervals() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(&["lowerbound", "--m", "96", "--out", "lb"], tmp.path());
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert_eq!(value(&report, "resolved_deficiency"), "3");
    assert_eq!(value(&report, "v"), "12");
    assert_eq!(value(&report, "deficit_negative"), "true");
    assert_eq!(value(&report, "net_property_failures"), "0");
    assert_eq!(value(&report, "admissibility_failures"), "0");
    let stored = fs::read_to_string(tmp.path().join("lb/lowerbound_m96.txt")).unwrap();
    assert_eq!(stored, report);
    let csv = fs::read_to_string(tmp.path().join("lb/intervals_m96.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("j1,j2,j3,k1,k2,k3,order,count,contribution")
    );
    let rows = csv.lines().count() - 1;
    assert_eq!(value(&report, "intervals"), rows.to_string());
}

#[test]
fn lowerbound_m192_minimal_order_triples() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &[
            "lowerbound",
            "--m",
            "192",
            "--deficiency",
            "3",
            "--out",
            "lb",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let report = stdout(&out);
    assert_eq!(value(&report, "min_empty_order"), "201");
    assert_eq!(value(&report, "triples_lower_bound"), "4");
    let triples: usize = value(&report, "triples_at_min_order").parse().unwrap();
    assert!(triples >= 4);
}

#[test]
fn growth_tables() {
    let tmp = TempDir::new().unwrap();
    let out = vdck(
        &["growth", "--k-max", "7", "--out", "missing/nested"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let dir = tmp.path().join("missing/nested");
    let csv = fs::read_to_string(dir.join("growth.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,N,Dstar_num,Dstar_den,NDstar");
    assert_eq!(lines.len(), 8);
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], (k + 1).to_string());
        assert_eq!(cols[1], 3u64.pow(k as u32 + 1).to_string());
        let num: u128 = cols[2].parse().unwrap();
        let den: u128 = cols[3].parse().unwrap();
        assert!(num > 0 && num < den);
    }
    assert!(dir.join("growth_fit.txt").exists());

    let out = vdck(
        &[
            "growth",
            "--k-max",
            "1",
            "--deficiency",
            "3",
            "--out",
            "one",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(tmp.path().join("one/growth.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn json_mirrors_text_report() {
    let tmp = TempDir::new().unwrap();
    let text = stdout(&vdck(
        &["verify", "hankel", "--theta", "rational:X,/,X^2+1"],
        tmp.path(),
    ));
    let json = stdout(&vdck(
        &[
            "verify",
            "hankel",
            "--theta",
            "rational:X,/,X^2+1",
            "--format",
            "json",
        ],
        tmp.path(),
    ));
    let doc: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&json).unwrap();
    let pairs: Vec<(String, String)> = text
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(": ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect();
    assert_eq!(doc.len(), pairs.len());
    for (k, v) in pairs {
        assert_eq!(doc[&k], serde_json::Value::String(v));
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let a = vdck(
        &[
            "lowerbound",
            "--m",
            "96",
            "--deficiency",
            "3",
            "--out",
            "a",
            "--threads",
            "1",
        ],
        tmp.path(),
    );
    let b = vdck(
        &[
            "lowerbound",
            "--m",
            "96",
            "--deficiency",
            "3",
            "--out",
            "b",
            "--threads",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let strip = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| {
                !l.starts_with("out:")
                    && !l.starts_with("threads:")
                    && !l.starts_with("intervals_csv:")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    let csv = |d: &str| fs::read(tmp.path().join(d).join("intervals_m96.csv")).unwrap();
    assert_eq!(csv("a"), csv("b"));

    let g1 = vdck(
        &["gen", "--N", "500", "--out", "g1", "--threads", "1"],
        tmp.path(),
    );
    let g2 = vdck(&["gen", "--N", "500", "--out", "g2"], tmp.path());
    assert_eq!(code(&g1), 0);
    assert_eq!(code(&g2), 0);
    assert_eq!(
        fs::read(tmp.path().join("g1/points.csv")).unwrap(),
        fs::read(tmp.path().join("g2/points.csv")).unwrap()
    );
}
