use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use clap::Parser;
use lmmse_cli::config::{default_ns, default_ps, parse_list, resolve, threads_from_env, Args};
use lmmse_cli::csv_io::{format_float, parse_csv, write_records};
use lmmse_cli::svg::render_svg_string;
use lmmse_cli::CliError;
use lmmse_core::experiment::run_sweep;
use lmmse_core::{CovarianceRule, EstimatorMode, RecordFlags, ScenarioId, SweepRecord};

const BIN: &str = env!("CARGO_BIN_EXE_lmmse-mismatch");

fn args(list: &[&str]) -> Args {
    Args::try_parse_from(std::iter::once("lmmse-mismatch").chain(list.iter().copied())).unwrap()
}

fn is_usage(r: Result<impl std::fmt::Debug, CliError>) -> bool {
    matches!(r, Err(CliError::Usage(_)))
}

fn small_records(scenario: &str) -> Vec<SweepRecord> {
    let cfg = resolve(&args(&["--scenario", scenario, "--ps", "3,6", "--n", "2:2:10", "--replicates", "8"])).unwrap();
    run_sweep(&cfg).unwrap()
}

fn sample_record() -> SweepRecord {
    SweepRecord {
        scenario: ScenarioId::S1,
        p: 30,
        p_s: 10,
        n: 10,
        replicates: 100,
        mode: EstimatorMode::Conditional,
        empirical_mse: 8437.138925792793,
        stderr: 1234.5,
        analytic_mse: Some(f64::INFINITY),
        baseline_mse: Some(0.1 + 0.2),
        gamma: Some(f64::INFINITY),
        flags: RecordFlags { near_interpolation: true, ..Default::default() },
        seed: u64::MAX,
        error: None,
    }
}

fn to_csv(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_records(records, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn list_expansion() {
    assert_eq!(parse_list("5,10,30").unwrap(), vec![5, 10, 30]);
    assert_eq!(parse_list("2:2:90").unwrap().len(), 45);
    assert_eq!(parse_list("3:6").unwrap(), vec![3, 4, 5, 6]);
    assert_eq!(parse_list("1, 4:3:10 ,2").unwrap(), vec![1, 4, 7, 10, 2]);
    assert_eq!(parse_list("2:5:3").unwrap(), vec![2]);
    for bad in ["", "5,", "a", "1:0:5", "5:1", "1:2:3:4", "-3", "1.5"] {
        assert!(is_usage(parse_list(bad)), "{bad:?}");
    }
}

#[test]
fn grid_from_flags() {
    let cfg = resolve(&args(&["--ps", "5,10,30", "--n", "2:2:90"])).unwrap();
    assert_eq!(cfg.p_s_values.len() * cfg.n_values.len(), 3 * 45);
}

#[test]
fn presets() {
    let s1 = resolve(&args(&["--scenario", "s1"])).unwrap();
    assert_eq!((s1.p, s1.replicates), (30, 100));
    assert_eq!((s1.noise_variance, s1.assumed_noise_variance), (0.25, 0.0));
    assert_eq!(s1.covariance, CovarianceRule::Identity);
    assert_eq!(s1.mode, EstimatorMode::Conditional);
    assert_eq!(s1.p_s_values, vec![5, 10, 20, 29, 30]);
    assert_eq!(s1.n_values, (1..=45).map(|k| 2 * k).collect::<Vec<_>>());

    assert_eq!(resolve(&args(&["--scenario", "s2"])).unwrap().noise_variance, 30.0);
    assert_eq!(resolve(&args(&["--scenario", "s3"])).unwrap().covariance, CovarianceRule::Randomized);
    let s4 = resolve(&args(&["--scenario", "s4"])).unwrap();
    assert_eq!((s4.noise_variance, s4.assumed_noise_variance), (0.25, 0.25));
}

#[test]
fn overrides() {
    let cfg = resolve(&args(&["--replicates", "7", "--seed", "9", "--mode", "draw", "--rcond", "1e-10", "--crn"])).unwrap();
    assert_eq!((cfg.replicates, cfg.seed, cfg.mode), (7, 9, EstimatorMode::Draw));
    assert_eq!(cfg.rcond, Some(1e-10));
    assert!(cfg.common_random_numbers);

    let cfg = resolve(&args(&["--p", "12"])).unwrap();
    assert_eq!(cfg.p_s_values, default_ps(12));
    assert_eq!(cfg.n_values, default_ns(12));
    assert_eq!(default_ps(30), vec![5, 10, 20, 29, 30]);
    assert_eq!(default_ps(1), vec![1]);

    assert_eq!(resolve(&args(&["--scenario", "s2", "--p", "12"])).unwrap().noise_variance, 12.0);
    let s4 = resolve(&args(&["--scenario", "s4", "--sigma-v2", "2"])).unwrap();
    assert_eq!((s4.noise_variance, s4.assumed_noise_variance), (2.0, 2.0));
    let s4 = resolve(&args(&["--scenario", "s4", "--sigma-v2", "2", "--sigma-z2", "2"])).unwrap();
    assert_eq!(s4.assumed_noise_variance, 2.0);
    let custom = resolve(&args(&["--scenario", "custom", "--sigma-z2", "0.7", "--kx", "randomized"])).unwrap();
    assert_eq!(custom.assumed_noise_variance, 0.7);
    assert_eq!(custom.covariance, CovarianceRule::Randomized);
    assert!(resolve(&args(&["--scenario", "s1", "--sigma-z2", "0"])).is_ok());
    assert!(resolve(&args(&["--scenario", "s3", "--kx", "randomized"])).is_ok());
}

#[test]
fn contradictions_are_usage_errors() {
    for list in [
        &["--scenario", "s1", "--sigma-z2", "0.25"][..],
        &["--scenario", "s2", "--sigma-z2", "1"],
        &["--scenario", "s4", "--sigma-z2", "0"],
        &["--scenario", "s4", "--sigma-v2", "1", "--sigma-z2", "0.25"],
        &["--scenario", "s3", "--kx", "identity"],
        &["--scenario", "s1", "--kx", "randomized"],
        &["--ps", "31"],
        &["--ps", "0"],
        &["--p", "0"],
        &["--replicates", "0"],
        &["--sigma-v2=-1"],
        &["--rcond=-1"],
        &["--n", "0,4"],
    ] {
        assert!(is_usage(resolve(&args(list))), "{list:?}");
    }
    assert!(Args::try_parse_from(["x", "--scenario", "s5"]).is_err());
    assert!(Args::try_parse_from(["x", "--mode", "exact"]).is_err());
}

#[test]
fn thread_variable() {
    assert_eq!(threads_from_env(None).unwrap(), None);
    assert_eq!(threads_from_env(Some("0")).unwrap(), None);
    assert_eq!(threads_from_env(Some(" 3 ")).unwrap(), Some(3));
    assert!(is_usage(threads_from_env(Some("many"))));
}

#[test]
fn csv_layout() {
    let text = to_csv(&[sample_record()]);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,p,p_S,n,M,mode,empirical_mse,stderr,analytic_mse,baseline_mse,gamma,flags,seed"
    );
    assert_eq!(
        lines.next().unwrap(),
        "s1,30,10,10,100,conditional,8.4371389257927931e3,1.2345000000000000e3,inf,3.0000000000000004e-1,inf,near-interpolation,18446744073709551615"
    );
    assert!(text.ends_with('\n'));
}

#[test]
fn empirical_only_when_closed_form_does_not_apply() {
    let records = small_records("s4");
    let parsed = parse_csv(to_csv(&records).as_bytes()).unwrap();
    assert!(parsed.iter().all(|r| r.analytic_mse.is_none()));
    for line in to_csv(&records).lines().skip(1) {
        assert_eq!(line.split(',').nth(8), Some(""));
    }
}

fn same_bits(a: Option<f64>, b: Option<f64>) -> bool {
    a.map(f64::to_bits) == b.map(f64::to_bits)
}

#[test]
fn csv_round_trip_is_exact() {
    let mut records = small_records("s1");
    records.push(sample_record());
    let mut failed = sample_record();
    failed.empirical_mse = f64::NAN;
    failed.stderr = f64::NAN;
    failed.analytic_mse = None;
    failed.baseline_mse = Some(-0.0);
    failed.gamma = Some(1.0 / 3.0);
    failed.flags = RecordFlags { failed: true, degenerate_stderr: true, ..Default::default() };
    failed.mode = EstimatorMode::Draw;
    failed.scenario = ScenarioId::Custom;
    records.push(failed);

    let parsed = parse_csv(to_csv(&records).as_bytes()).unwrap();
    assert_eq!(parsed.len(), records.len());
    for (a, b) in records.iter().zip(&parsed) {
        assert_eq!(
            (a.scenario, a.p, a.p_s, a.n, a.replicates, a.mode, a.flags, a.seed),
            (b.scenario, b.p, b.p_s, b.n, b.replicates, b.mode, b.flags, b.seed)
        );
        assert_eq!(a.empirical_mse.to_bits(), b.empirical_mse.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        assert!(same_bits(a.analytic_mse, b.analytic_mse));
        assert!(same_bits(a.baseline_mse, b.baseline_mse));
        assert!(same_bits(a.gamma, b.gamma));
    }
    assert_eq!(to_csv(&parsed), to_csv(&records));
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    let text = to_csv(&[sample_record()]).replace("conditional", "guess");
    assert!(parse_csv(text.as_bytes()).is_err());
}

fn parse_svg(text: &str) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(text).expect("well-formed XML");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc
}

#[test]
fn svg_is_well_formed() {
    let text = render_svg_string(&small_records("s1")).unwrap();
    let doc = parse_svg(&text);
    let series = doc.descendants().filter(|n| n.attribute("class") == Some("series")).count();
    assert_eq!(series, 2);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("baseline")).count(), 1);
    let legend = doc.descendants().find(|n| n.attribute("class") == Some("legend")).unwrap();
    let labels: Vec<&str> = legend.descendants().filter_map(|n| n.text()).collect();
    assert!(labels.contains(&"p_S = 3") && labels.contains(&"p_S = 6"));
}

#[test]
fn svg_single_cell_and_empty_input() {
    let cfg = resolve(&args(&["--ps", "4", "--n", "9", "--replicates", "3"])).unwrap();
    let records: Vec<SweepRecord> = run_sweep(&cfg).unwrap().into_iter().filter(|r| !r.is_baseline()).collect();
    assert_eq!(records.len(), 1);
    let text = render_svg_string(&records).unwrap();
    let doc = parse_svg(&text);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("empirical")).count(), 1);
    assert!(is_usage(render_svg_string(&[])));
}

#[test]
fn svg_clips_infinite_values() {
    let text = render_svg_string(&[sample_record()]).unwrap();
    let doc = parse_svg(&text);
    assert!(doc.descendants().any(|n| n.attribute("class") == Some("clip")));
}

#[test]
fn svg_tooltips_repeat_csv_values() {
    let records = small_records("s1");
    let csv_text = to_csv(&records);
    let mut csv_values: HashMap<(String, usize), Vec<String>> = HashMap::new();
    for line in csv_text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let label = if f[11].contains("baseline") { "full LMMSE".to_string() } else { format!("p_S = {}", f[2]) };
        csv_values.entry((label, f[3].parse().unwrap())).or_default().extend([f[6].to_string(), f[8].to_string()]);
    }
    let svg_text = render_svg_string(&records).unwrap();
    let doc = parse_svg(&svg_text);
    let mut checked = 0;
    for title in doc.descendants().filter(|n| n.has_tag_name("title") && n.parent().unwrap().tag_name().name() != "svg") {
        let text = title.text().unwrap();
        let (head, value) = text.rsplit_once(' ').unwrap();
        let (label, rest) = head.split_once(", n=").unwrap();
        let n: usize = rest.split(':').next().unwrap().parse().unwrap();
        assert!(csv_values[&(label.to_string(), n)].iter().any(|v| v == value), "{text}");
        checked += 1;
    }
    assert!(checked >= records.len());
    assert_eq!(format_float(f64::INFINITY), "inf");
}

fn run_bin(args: &[&str], dir: &Path, threads: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(dir).env_remove("LMMSE_THREADS");
    if let Some(t) = threads {
        cmd.env("LMMSE_THREADS", t);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

const SMALL: [&str; 6] = ["--ps", "3,6", "--n", "2:2:12", "--replicates", "10"];

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (code, stderr) = run_bin(&[], d, None);
    assert_eq!(code, 1);
    assert!(stderr.contains("Usage"));
    assert_eq!(run_bin(&["--help"], d, None).0, 0);
    assert_eq!(run_bin(&["--version"], d, None).0, 0);
    assert_eq!(run_bin(&["--bogus"], d, None).0, 1);
    assert_eq!(run_bin(&["--scenario", "s4", "--sigma-z2", "0"], d, None).0, 1);
    assert_eq!(run_bin(&["--n", "4:x"], d, None).0, 1);

    let mut a = SMALL.to_vec();
    a.extend(["--out-csv", "out.csv"]);
    assert_eq!(run_bin(&a, d, Some("lots")).0, 1);

    let mut a = SMALL.to_vec();
    a.extend(["--out-csv", "missing/dir/out.csv"]);
    assert_eq!(run_bin(&a, d, None).0, 2);

    let mut a = SMALL.to_vec();
    a.extend(["--out-csv", "out.csv", "--out-svg", "fig.svg"]);
    assert_eq!(run_bin(&a, d, None).0, 0);
    assert!(d.join("out.csv").exists() && d.join("fig.svg").exists() && d.join("out.csv.manifest").exists());
}

#[test]
fn csv_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut outputs = Vec::new();
    for (i, threads) in [None, Some("1"), Some("3"), Some("0")].into_iter().enumerate() {
        let name = format!("run{i}.csv");
        let mut a = SMALL.to_vec();
        a.extend(["--scenario", "s3", "--out-csv", &name]);
        assert_eq!(run_bin(&a, d, threads).0, 0);
        outputs.push(std::fs::read(d.join(&name)).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn manifest_echoes_config_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut a = SMALL.to_vec();
    a.extend(["--scenario", "s4", "--seed", "77", "--out-csv", "out.csv"]);
    assert_eq!(run_bin(&a, d, Some("2")).0, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out.csv.manifest")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 77);
    assert_eq!(manifest["threads"], 2);
    assert_eq!(manifest["config"]["scenario"], "s4");
    assert_eq!(manifest["config"]["assumed_noise_variance"], 0.25);
    assert_eq!(manifest["config"]["replicates"], 10);
    let records = parse_csv(std::fs::File::open(d.join("out.csv")).unwrap()).unwrap();
    let cells = manifest["cells"].as_array().unwrap();
    assert_eq!(cells.len(), records.len());
    for (c, r) in cells.iter().zip(&records) {
        assert_eq!(c["seed"].as_u64(), Some(r.seed));
        assert_eq!(c["p_s"].as_u64(), Some(r.p_s as u64));
        assert_eq!(c["n"].as_u64(), Some(r.n as u64));
    }
}

#[test]
fn stdout_when_no_csv_path() {
    let out = Command::new(BIN).args(SMALL).output().unwrap();
    assert!(out.status.success());
    let records = parse_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 6 + 2 * 6);
}
