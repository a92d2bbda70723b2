use univoque::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("univoque").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn stdout_of(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

#[test]
fn greedy_expansion_of_one() {
    let out = stdout_of(&[
        "expand", "--x", "1", "--q", "3/2", "--mode", "greedy", "--depth", "9",
    ]);
    assert_eq!(out, "101000001\n");
}

#[test]
fn quasi_greedy_and_period_detection() {
    let out = stdout_of(&[
        "expand",
        "--x",
        "0",
        "--q",
        "3/2",
        "--mode",
        "quasi-greedy",
        "--depth",
        "5",
    ]);
    assert_eq!(out, "00000\n");
    let out = stdout_of(&[
        "expand",
        "--x",
        "1/3",
        "--q",
        "2",
        "--periodic",
        "--depth",
        "50",
    ]);
    assert_eq!(out, "(01)\n");
    let out = stdout_of(&[
        "expand",
        "--x",
        "1",
        "--q",
        "3/2",
        "--periodic",
        "--depth",
        "200",
    ]);
    assert_eq!(out, "none\n");
}

#[test]
fn q_m_root_printout() {
    let out = stdout_of(&["dimension", "qm", "--m", "2"]);
    assert!(out.starts_with("2.4142135"), "{out}");
}

#[test]
fn unique_sequence_in_base_two() {
    assert_eq!(
        stdout_of(&["classify", "unique", "--seq", "(01)", "--alpha", "(1)"]),
        "Yes\n"
    );
}

#[test]
fn classify_json_lines() {
    let out = stdout_of(&[
        "classify", "greedy", "--seq", "(10)", "--alpha", "(10)", "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["verdict"], "No");
    assert_eq!(v["witness_index"], 2);
    assert_eq!(v["condition"], "tail-not-below-alpha");
}

#[test]
fn classify_against_computed_alpha() {
    let out = stdout_of(&[
        "classify",
        "quasi-greedy",
        "--seq",
        "100(10)",
        "--alpha-of",
        "9/5",
        "--alpha-len",
        "40",
    ]);
    assert_eq!(out, "Yes\n");
    let out = stdout_of(&["classify", "v", "--seq", "100(10)", "--alpha-of", "9/5"]);
    assert_eq!(out, "No n=1 conjugate-tail-above-alpha\n");
}

#[test]
fn closure_outside_j() {
    assert_eq!(
        stdout_of(&["classify", "outside-j", "--x", "3/2", "--m", "2"]),
        "Yes 2(1)\n"
    );
    assert!(stdout_of(&["classify", "outside-j", "--x", "1/2", "--m", "2"]).starts_with("No"));
}

#[test]
fn counting_and_enumeration() {
    assert_eq!(
        stdout_of(&["count", "--x", "1/2", "--q", "2", "--depth", "10"]),
        "2\n"
    );
    assert_eq!(
        stdout_of(&["enumerate", "--x", "1/2", "--q", "2", "--depth", "3"]),
        "011\n100\n"
    );
    let out = stdout_of(&[
        "enumerate",
        "--x",
        "1",
        "--q",
        "3/2",
        "--depth",
        "4",
        "--json",
        "--cap",
        "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["prefixes"], serde_json::json!(["0101", "0110"]));
    assert_eq!(v["overflow"], true);
}

#[test]
fn dimension_outputs() {
    let out = stdout_of(&[
        "dimension",
        "g",
        "--alpha-period",
        "10",
        "--q",
        "2",
        "--places",
        "8",
    ]);
    assert_eq!(out, "0.69424191\n");
    let out = stdout_of(&["dimension", "i", "--q", "19/10", "--json"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["inputs"]["N"], 2);
    assert!(v["t_root"]["lo"].as_str().unwrap().contains('/'));
    assert_eq!(
        stdout_of(&[
            "dimension",
            "bound",
            "--q",
            "3/2",
            "--blocks",
            "1",
            "--n",
            "3",
            "--places",
            "6"
        ]),
        "0.569837\n"
    );
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["expand", "--x", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("--q"));
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["expand", "--x", "5", "--q", "3/2"]);
    assert_eq!(code, 1);
    assert!(err.contains("outside"), "{err}");
    let (code, _, _) = run(&["dimension", "i", "--q", "1.5"]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["scan", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--config"));
}

#[test]
fn selftest_passes() {
    let out = stdout_of(&["selftest"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn scan_flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    let pgm = dir.path().join("out.pgm");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            "width = 3\nheight = 2\ndepth = 8\noutput = {}\n",
            pgm.display()
        ),
    )
    .unwrap();
    stdout_of(&["scan", "--config", cfg.to_str().unwrap()]);
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
    stdout_of(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--width",
        "4",
        "--format",
        "csv",
        "--output",
        csv.to_str().unwrap(),
        "--values",
        "exact",
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("0,19/10,UniqueCertified"));
}
