use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-bound"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn robust-bound")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn squares_bounds_print_the_closed_form_margin() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "bounds", "--dist", "squares", "--norm", "linf", "--eps", "0.05", "--out", "r",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0.539894228"), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("r/bounds.csv")).unwrap();
    assert!(csv.starts_with("# robust-bound "));
    assert!(csv.lines().next().unwrap().contains("seed: 0"));
}

#[test]
fn sweep_writes_one_row_per_radius_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "sweep",
            "--dist",
            "moons",
            "--sigma",
            "0.3",
            "--grid=-2,-1.75,0.0390625,0.03125,128,128",
            "--norm",
            "linf",
            "--eps",
            "0,0.05,0.1,0.15",
            "--out",
            out,
        ]
    };
    for out in ["a", "b"] {
        let o = run(dir.path(), &args(out));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir.path().join("a/sweep.csv")).unwrap();
    let b = fs::read(dir.path().join("b/sweep.csv")).unwrap();
    let text = String::from_utf8(a.clone()).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 5, "header + 4 rows:\n{text}");
    // only the --out value differs between the runs
    let strip = |v: &[u8]| {
        String::from_utf8_lossy(v)
            .lines()
            .skip(1)
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let usage = run(dir.path(), &["sweep", "--dist", "squares"]);
    assert_eq!(usage.status.code(), Some(2));
    let bad_value = run(dir.path(), &["bounds", "--dist", "squares", "--eps", "-1"]);
    assert_eq!(bad_value.status.code(), Some(2));
    // a grid too small for the moons leaks most of their mass
    let numeric = run(
        dir.path(),
        &[
            "bayes-error",
            "--dist",
            "moons",
            "--sigma",
            "0.3",
            "--grid=0,0,0.01,0.01,50,50",
        ],
    );
    assert_eq!(
        numeric.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&numeric.stderr)
    );
    let io = run(
        dir.path(),
        &["bayes-error", "--dist", "kde", "--samples", "missing.csv"],
    );
    assert_eq!(io.status.code(), Some(4));
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# squares at a small radius\ndist = squares\neps = 0.05\nout = from-config\n",
    )
    .unwrap();
    let o = run(
        dir.path(),
        &["bounds", "--config", "run.cfg", "--out", "from-cli"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("from-cli/bounds.csv").exists());
    assert!(!dir.path().join("from-config").exists());
    assert!(stdout(&o).contains("0.539894228"));
}

#[test]
fn density_directory_round_trips_through_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["density", "squares", "--out", "d"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        dir.path(),
        &["bayes-error", "--dist", "file", "--density-dir", "d"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0.25"), "{}", stdout(&o));
}

#[test]
fn sampling_and_correctness_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "sample", "--n", "500", "--sigma", "0.3", "--seed", "3", "--out", "s",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        dir.path(),
        &[
            "correctness",
            "alg2",
            "--input",
            "s/samples.csv",
            "--theta",
            "0",
            "--dist",
            "moons",
            "--sigma",
            "0.3",
            "--grid=-2,-1.75,0.0390625,0.03125,128,128",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        dir.path(),
        &[
            "correctness",
            "alg1",
            "--test",
            "s/samples.csv",
            "--reference",
            "s/samples.csv",
            "--theta",
            "0.15",
            "--dist",
            "moons",
            "--sigma",
            "0.3",
            "--grid=-2,-1.75,0.0390625,0.03125,128,128",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn render_writes_svg_with_scale_metadata() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["density", "squares", "--out", "d"])
        .status
        .success());
    let o = run(
        dir.path(),
        &["render", "--input", "d/class_0.csv", "--output", "p.svg"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.contains("colormap=diverging-blue-white-red"));
}
