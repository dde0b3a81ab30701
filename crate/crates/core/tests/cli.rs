//! End-to-end runs of the `vnom` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vnom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vnom")).args(args).output().expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn generate(dir: &Path, extra: &[&str]) {
    let out_dir = dir.display().to_string();
    let mut args = vec!["generate", "--out", out_dir.as_str()];
    args.extend_from_slice(extra);
    let out = vnom(&args);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn generate_is_byte_identical_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    generate(a.path(), &["--preset", "medium-small", "--seed", "7"]);
    generate(b.path(), &["--preset", "medium-small", "--seed", "7"]);
    generate(c.path(), &["--preset", "medium-small", "--seed", "8"]);
    for f in ["graph.edges", "seeds.txt", "truth.txt", "params.toml"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_ne!(
        fs::read(a.path().join("graph.edges")).unwrap(),
        fs::read(c.path().join("graph.edges")).unwrap()
    );
}

#[test]
fn full_pipeline_for_every_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, &["--preset", "small-small", "--seed", "3"]);
    let graph = path(d, "graph.edges");
    let seeds = path(d, "seeds.txt");
    let params = path(d, "params.toml");
    let truth = path(d, "truth.txt");
    let noms = path(d, "noms.csv");
    let report = path(d, "report.csv");
    let schemes: [&[&str]; 5] = [
        &["--scheme", "lc", "--params", &params],
        &["--scheme", "lcs", "--params", &params, "--nmcmc", "5000"],
        &["--scheme", "lp", "--dim", "2", "--k", "2"],
        &["--scheme", "lep", "--dim", "2", "--max-k", "2", "--catalogue", "EII,VII"],
        &["--scheme", "random"],
    ];
    for extra in schemes {
        let mut args = vec!["nominate", "--graph", &graph, "--seeds", &seeds, "--out", &noms, "--seed", "1"];
        args.extend_from_slice(extra);
        let out = vnom(&args);
        assert!(out.status.success(), "{extra:?}: {}", stderr(&out));
        let text = fs::read_to_string(&noms).unwrap();
        assert_eq!(text.lines().count(), 1 + 10, "{extra:?}");
        let out = vnom(&["evaluate", "--nominations", &noms, "--truth", &truth, "--seeds", &seeds, "--out", &report]);
        assert!(out.status.success(), "{extra:?}: {}", stderr(&out));
        let report = fs::read_to_string(&report).unwrap();
        let ap: f64 = report.lines().next().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&ap));
        assert!(report.contains("# depth 4"));
    }
}

#[test]
fn evaluate_hand_case() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("noms.csv"), "rank,vertex,score,scheme\n1,0,3,lc\n2,1,2,lc\n3,2,1,lc\n").unwrap();
    fs::write(d.join("truth.txt"), "0 1\n1 2\n2 1\n").unwrap();
    let out = vnom(&["evaluate", "--nominations", &path(d, "noms.csv"), "--truth", &path(d, "truth.txt")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# average_precision 0.750000\n# depth 2\n"), "{text}");
    assert!(text.contains("2,0.500000"));
}

#[test]
fn evaluate_rejects_lists_that_miss_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("noms.csv"), "1,1,2\n2,2,1\n").unwrap();
    fs::write(d.join("truth.txt"), "0 1\n1 2\n2 1\n3 1\n").unwrap();
    fs::write(d.join("seeds.txt"), "0 1\n").unwrap();
    let out = vnom(&[
        "evaluate",
        "--nominations",
        &path(d, "noms.csv"),
        "--truth",
        &path(d, "truth.txt"),
        "--seeds",
        &path(d, "seeds.txt"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("vertex-mismatch"), "{}", stderr(&out));
}

#[test]
fn oversized_enumeration_exits_with_capacity_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("big.toml"),
        "k = 3\nblock_sizes = [14, 13, 13]\nbernoulli = [[0.5, 0.3, 0.3], [0.3, 0.5, 0.3], [0.3, 0.3, 0.5]]\n",
    )
    .unwrap();
    generate(d, &["--params", &path(d, "big.toml"), "--seed-counts", "1,0,0"]);
    let out = vnom(&[
        "nominate",
        "--scheme",
        "lc",
        "--graph",
        &path(d, "graph.edges"),
        "--seeds",
        &path(d, "seeds.txt"),
        "--params",
        &path(d, "params.toml"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("lcs"), "the message should point at the sampler: {}", stderr(&out));
}

#[test]
fn degenerate_chain_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("p.toml"), "k = 2\nblock_sizes = [3, 2]\nbernoulli = [[0.5, 0.2], [0.2, 0.5]]\n").unwrap();
    fs::write(d.join("g.edges"), "0 1\n1 2\n2 3\n3 4\n").unwrap();
    // both block-2 vertices are seeds, so every ambiguous vertex is in block 1
    fs::write(d.join("s.txt"), "3 2\n4 2\n").unwrap();
    let out = vnom(&[
        "nominate",
        "--scheme",
        "lcs",
        "--graph",
        &path(d, "g.edges"),
        "--seeds",
        &path(d, "s.txt"),
        "--params",
        &path(d, "p.toml"),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn unestimable_parameters_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, &["--preset", "small-small", "--seed", "2"]);
    fs::write(
        d.join("k3.toml"),
        "k = 3\nblock_sizes = [7, 3, 3]\nbernoulli = [[0.5, 0.3, 0.3], [0.3, 0.5, 0.3], [0.3, 0.3, 0.5]]\n",
    )
    .unwrap();
    let out = vnom(&[
        "nominate",
        "--scheme",
        "lcs",
        "--estimate-params",
        "--graph",
        &path(d, "graph.edges"),
        "--seeds",
        &path(d, "seeds.txt"),
        "--params",
        &path(d, "k3.toml"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unestimable-entry"), "{}", stderr(&out));
}

#[test]
fn bad_input_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.edges"), "0 0\n").unwrap();
    fs::write(d.join("s.txt"), "0 1\n").unwrap();
    let out = vnom(&["nominate", "--scheme", "random", "--graph", &path(d, "g.edges"), "--seeds", &path(d, "s.txt")]);
    assert_eq!(out.status.code(), Some(2));
    let out = vnom(&["nominate", "--scheme", "bogus", "--graph", &path(d, "g.edges"), "--seeds", &path(d, "s.txt")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, &["--preset", "small-small", "--seed", "4"]);
    let cfg = format!(
        "scheme = \"lcs\"\nnmcmc = 4000\nseed = 5\ngraph = \"{}\"\nseeds = \"{}\"\nparams = \"{}\"\n",
        path(d, "graph.edges"),
        path(d, "seeds.txt"),
        path(d, "params.toml")
    );
    fs::write(d.join("run.toml"), cfg).unwrap();
    let from_file = vnom(&["nominate", "--config", &path(d, "run.toml")]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    let flags = vnom(&[
        "nominate",
        "--scheme",
        "lcs",
        "--nmcmc",
        "4000",
        "--seed",
        "5",
        "--graph",
        &path(d, "graph.edges"),
        "--seeds",
        &path(d, "seeds.txt"),
        "--params",
        &path(d, "params.toml"),
    ]);
    assert_eq!(from_file.stdout, flags.stdout);
    fs::write(d.join("bad.toml"), "nmcmcc = 3\n").unwrap();
    assert_eq!(vnom(&["nominate", "--config", &path(d, "bad.toml")]).status.code(), Some(2));
}

#[test]
fn reproduce_writes_csv() {
    let out = vnom(&["reproduce", "table3", "--preset", "small-small", "--replicates", "3", "--nmcmc", "2000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
}
