use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let path = scratch(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn pentagon() -> String {
    let mut s = String::from("5 2\n");
    for i in 0..5 {
        s += &format!("{i} 0\n");
    }
    for i in 0..5 {
        for j in i + 1..5 {
            let outer = (j - i) % 5 == 1 || (j - i) % 5 == 4;
            s += &format!("{i} {j} {}\n", if outer { "red" } else { "blue" });
        }
    }
    s
}

#[test]
fn gen_ehd_is_eight_by_eight() {
    let o = qslab(&["gen", "ehd", "--n", "3", "--k", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "8 8 3");
    assert_eq!(lines.len(), 1 + 8 + 16);
    assert!(lines[1..9]
        .iter()
        .all(|l| l.len() == 8 && l.chars().filter(|&c| c == '1').count() == 3));
}

#[test]
fn gen_writes_to_out_file() {
    let out = scratch("gadget.txt");
    let o = qslab(&["gen", "gadget", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains('*'));
    let check = qslab(&["check", "two-tally", out.to_str().unwrap(), "--k", "2"]);
    assert!(check.status.success(), "{}", stdout(&check));
}

#[test]
fn run_threshold_distance_example() {
    let z = write("z.txt", "0000\n0011\n0101\n");
    let o = qslab(&[
        "run",
        "threshold-distance",
        "--sets",
        &z,
        "--x",
        "0011",
        "--y",
        "0101",
        "--k",
        "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("2, queries="), "{text}");

    let o = qslab(&[
        "run",
        "threshold-distance",
        "--sets",
        &z,
        "--x",
        "0011",
        "--y",
        "0101",
        "--k",
        "1",
    ]);
    assert!(stdout(&o).starts_with("⊥, queries="));
}

#[test]
fn set_files_may_be_matrices() {
    let z = write("z_matrix.txt", "3 4\n0000\n0011\n0101\n");
    let o = qslab(&[
        "run",
        "threshold-distance",
        "--sets",
        &z,
        "--x",
        "0000",
        "--y",
        "0101",
        "--k",
        "3",
    ]);
    assert!(stdout(&o).starts_with("2, queries="));
}

#[test]
fn transcript_lists_every_query() {
    let o = qslab(&["run", "eq-gt", "--n", "100", "--i", "30", "--j", "70", "--transcript"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("1, queries="));
    let q: usize = head.rsplit('=').next().unwrap().parse().unwrap();
    assert_eq!(lines.count(), q);
}

#[test]
fn runs_are_deterministic_per_seed() {
    let z = write(
        "z_many.txt",
        "000000\n000011\n001100\n110000\n111111\n101010\n010101\n111000\n",
    );
    let args = |seed: &'static str| {
        qslab(&[
            "run",
            "threshold-distance",
            "--sets",
            &z,
            "--x",
            "000011",
            "--y",
            "001100",
            "--k",
            "4",
            "--transcript",
            "--seed",
            seed,
        ])
    };
    assert_eq!(stdout(&args("5")), stdout(&args("5")));
    assert!(stdout(&args("5")).starts_with("4, queries="));
}

#[test]
fn domain_errors_exit_one() {
    let o = qslab(&["gen", "equality", "--n", "40"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let z = write("z_small.txt", "0000\n0011\n");
    let o = qslab(&[
        "run",
        "threshold-distance",
        "--sets",
        &z,
        "--x",
        "1111",
        "--y",
        "0011",
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qslab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qslab(&["gen", "ehd", "--n", "3"]).status.code(), Some(1));
    assert_eq!(qslab(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_exits_two() {
    let host = scratch("ehd6.txt");
    assert!(
        qslab(&["gen", "ehd", "--n", "6", "--k", "1", "--out", host.to_str().unwrap()])
            .status
            .success()
    );
    let o = qslab(&["analyze", host.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_reports_structure() {
    let m = scratch("eq4.txt");
    qslab(&["gen", "equality", "--n", "4", "--out", m.to_str().unwrap()]);
    let text = stdout(&qslab(&["analyze", m.to_str().unwrap()]));
    assert!(text.contains("shape: 16x16"));
    assert!(text.contains("vc_dimension: 1"));
    assert!(text.contains("blocky: yes (16 blocks)"));

    let csv = stdout(&qslab(&["analyze", m.to_str().unwrap(), "--csv"]));
    assert_eq!(
        csv.lines().next(),
        Some("rows,cols,ones,vc,max_gt,max_negated_gt,blocky_labels")
    );
    assert!(csv.lines().nth(1).unwrap().starts_with("16,16,16,1,"));
}

#[test]
fn invariance_counterexample_is_four_strings() {
    let gt = write(
        "gt_labeled.txt",
        "4 4 2\n1111\n0111\n0011\n0001\n00\n01\n10\n11\n00\n01\n10\n11\n",
    );
    let o = qslab(&["check", "invariance", &gt]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.len() == 2));

    let ehd = scratch("ehd4.txt");
    qslab(&["gen", "ehd", "--n", "4", "--k", "2", "--out", ehd.to_str().unwrap()]);
    assert!(qslab(&["check", "invariance", ehd.to_str().unwrap()]).status.success());
}

#[test]
fn domino_type_prints_the_type() {
    let text = stdout(&qslab(&["domino", "type", "--x", "0011", "--y", "0101"]));
    assert!(text.contains("00=1"));
    assert!(text.contains("11=1"));
}

#[test]
fn partition_is_valid() {
    let z = write("z_part.txt", "00000000\n00001111\n11110000\n11111111\n00110011\n");
    let o = qslab(&["check", "partition", &z, "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("valid: true"));
}

#[test]
fn k23_absent_at_distance_one_present_at_two() {
    let k23 = write("k23.txt", "2 3\n111\n111\n");
    let ehd = scratch("ehd5_1.txt");
    qslab(&["gen", "ehd", "--n", "5", "--k", "1", "--out", ehd.to_str().unwrap()]);
    let o = qslab(&["check", "pattern", ehd.to_str().unwrap(), &k23, "--distinct"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NONE\n");

    let ehd2 = scratch("ehd5_2.txt");
    qslab(&["gen", "ehd", "--n", "5", "--k", "2", "--out", ehd2.to_str().unwrap()]);
    let o = qslab(&["check", "pattern", ehd2.to_str().unwrap(), &k23, "--distinct"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("rows: "));
}

#[test]
fn sweep_csv_header_and_rows() {
    let o = qslab(&[
        "sweep", "--n", "64", "--d", "32,64", "--k", "1,2", "--trials", "100", "--seed", "9",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,d,k,max_queries,mean_queries,seed");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("64,32,1,"));
    assert!(lines[4].starts_with("64,64,2,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",9")));
    let again = qslab(&[
        "sweep", "--n", "64", "--d", "32,64", "--k", "1,2", "--trials", "100", "--seed", "9",
    ]);
    assert_eq!(text, stdout(&again));
}

#[test]
fn ramsey_find_pentagon_is_none() {
    let c = write("pentagon.txt", &pentagon());
    let o = qslab(&["ramsey", "find", &c, "--sigma", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "NONE\n");
    assert_eq!(stdout(&qslab(&["ramsey", "find", &c, "--sigma", "2"])), "0 1\n");
}

#[test]
fn ramsey_find_in_monochromatic_k6() {
    let mut s = String::from("6 2\n");
    for i in 0..6 {
        s += &format!("{i} a\n");
        for j in i + 1..6 {
            s += &format!("{i} {j} x\n");
        }
    }
    let c = write("k6.txt", &s);
    assert_eq!(stdout(&qslab(&["ramsey", "find", &c, "--sigma", "4"])), "0 1 2 3\n");
}

#[test]
fn reduce_search_and_verify_round_trip() {
    let target = scratch("ehd2_1.txt");
    qslab(&["gen", "ehd", "--n", "2", "--k", "1", "--out", target.to_str().unwrap()]);
    let witness = scratch("w.txt");
    let o = qslab(&[
        "reduce",
        "search",
        target.to_str().unwrap(),
        "--c",
        "1",
        "--out",
        witness.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&witness).unwrap();
    assert!(text.starts_with("witness 1 "));
    let v = qslab(&["reduce", "verify", target.to_str().unwrap(), witness.to_str().unwrap()]);
    assert!(v.status.success());
    assert_eq!(stdout(&v), "valid\n");

    let f = text.lines().next().unwrap().rsplit(' ').next().unwrap().to_string();
    let flipped: String = f.chars().map(|c| if c == '0' { '1' } else { '0' }).collect();
    let bad = write(
        "w_bad.txt",
        &text.replacen(&format!("witness 1 {f}"), &format!("witness 1 {flipped}"), 1),
    );
    let v = qslab(&["reduce", "verify", target.to_str().unwrap(), &bad]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(stdout(&v), "invalid\n");
}

#[test]
fn reduce_search_reports_none() {
    let target = scratch("ehd3_1.txt");
    qslab(&["gen", "ehd", "--n", "3", "--k", "1", "--out", target.to_str().unwrap()]);
    let o = qslab(&["reduce", "search", target.to_str().unwrap(), "--c", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "NONE\n");
}

#[test]
fn accept_subset_prints_table() {
    let o = qslab(&["accept", "--only", "4,6"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("[PASS] 4."));
    assert!(lines[1].starts_with("[PASS] 6."));
    assert_eq!(lines[2], "2 of 2 criteria passed");
    assert_eq!(qslab(&["accept", "--only", "10"]).status.code(), Some(1));
}
