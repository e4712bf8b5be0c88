use std::path::Path;
use std::process::{Command, Output};

fn gonosomal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonosomal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let svg = dir.path().join("orbit.svg");
    let out = gonosomal(&[
        "simulate",
        "--initial",
        "0,0.5,0.5,0",
        "--steps",
        "100",
        "--arith",
        "exact",
        "--out",
        path(&csv),
        "--svg",
        path(&svg),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // exact orbits hit the bit cap well before 100 steps
    assert!(String::from_utf8_lossy(&out.stderr).contains("ExactCapExceeded"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("m,x,y,u,v,alpha,beta,dist"));
    assert_eq!(rows.next(), Some("0,0,1/2,1/2,0,,,1"));
    assert!(rows.next().unwrap().starts_with("1,1/4,1/4,1/4,1/4,,,"));
    assert!(rows
        .next()
        .unwrap()
        .starts_with("2,3/16,13/48,19/48,7/48,13/9,7/19,"));
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<?xml") && plot.trim_end().ends_with("</svg>"));
    assert!(!plot.contains("href") && !plot.contains("http://www.w3.org/1999/xlink"));
}

#[test]
fn fixed_point_orbit_is_constant() {
    let out = gonosomal(&["simulate", "--initial", "1/2,0,1/2,0", "--steps", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 22);
    for (m, row) in text.lines().skip(1).enumerate() {
        let tail = if m < 2 { ",,,0.0" } else { ",0.0,0.0,0.0" };
        assert_eq!(row, format!("{m},0.5,0.0,0.5,0.0{tail}"));
    }
}

#[test]
fn invalid_inputs_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &["simulate", "--initial", "0,0,0.5,0.5"],
        &["simulate", "--initial", "0.2,0.2,0.2"],
        &[
            "simulate",
            "--initial",
            "1/3,1/3,1/3,1/3",
            "--arith",
            "exact",
        ],
        &["sweep", "--eps", "-1"],
        &["verify", "--suite", "nonsense"],
    ];
    for args in cases {
        let out = gonosomal(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = gonosomal(&["simulate", "--initial", "0,0,0.5,0.5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateSex"));
}

#[test]
fn sweep_is_worker_independent_and_plots_the_slice() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("heat.svg");
    let base = ["sweep", "--grid", "6", "--eps", "1e-3"];
    let one = gonosomal(
        &[
            &base[..],
            &["--workers", "1", "--out", path(&a), "--svg", path(&svg)],
        ]
        .concat(),
    );
    let many = gonosomal(&[&base[..], &["--workers", "8", "--out", path(&b)]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(many.status.code(), Some(0));
    let csv = std::fs::read(&a).unwrap();
    assert_eq!(csv, std::fs::read(&b).unwrap());
    let text = String::from_utf8(csv).unwrap();
    // C(9, 3) lattice points minus the 14 on the excluded boundary set
    assert_eq!(text.lines().count(), 1 + 84 - 14);
    assert!(text.contains("\n3,0,3,0,0.5,0.0,0.5,0.0,0,0.0,Converged\n"));
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.contains("slice y = 0.5(1-x-u)"));
}

#[test]
fn verify_reports_are_reproducible() {
    let args = [
        "verify",
        "--samples",
        "40",
        "--seed",
        "9",
        "--arith",
        "exact",
    ];
    let first = gonosomal(&args);
    let second = gonosomal(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let report = String::from_utf8(first.stdout).unwrap();
    assert_eq!(report.matches("[[check]]").count(), 10);
    assert!(report.contains("arithmetic = \"exact\""));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "arith = \"exact\"\n[simulate]\ninitial = \"0,1/2,1/2,0\"\nsteps = 2\n",
    )
    .unwrap();
    let out = gonosomal(&["simulate", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("\n1,1/4,1/4,1/4,1/4,"));
    let out = gonosomal(&[
        "simulate",
        "--config",
        path(&cfg),
        "--arith",
        "f64",
        "--steps",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(2), Some("1,0.25,0.25,0.25,0.25,,,1.0"));
}

#[test]
fn analyze_names_one_nonhyperbolic_point() {
    let out = gonosomal(&["analyze", "--steps", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: toml::Value = toml::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(doc["fixed_points"]["distinct"].as_integer(), Some(1));
    let point = &doc["fixed_points"]["points"][0];
    assert_eq!(point["classification"].as_str(), Some("Nonhyperbolic"));
    let eig = doc["reduced"]["eigenvalues"].as_array().unwrap();
    assert_eq!(eig[0][0].as_float(), Some(1.0));
    assert_eq!(eig[1][0].as_float(), Some(-0.5));
    assert!(doc["decay"]["fit"]["rms_residual"].as_float().is_some());
}
