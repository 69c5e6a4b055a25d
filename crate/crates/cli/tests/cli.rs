use std::path::PathBuf;
use std::process::Command;

use mergemetrics_cli::run;
use tempfile::TempDir;

const T_A: &str = "mergetree v1\n0 2 0\n1 2 1\n2 null 3\n";
const T_B: &str = "mergetree v1\n0 2 0\n1 2 1\n2 null 2\n";
const T_C: &str = "mergetree v1\n0 4 0\n1 3 1\n2 3 2\n3 4 2.5\n4 null 4\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mm(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mergemetrics").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

#[test]
fn bottleneck_prints_value_and_matching() {
    let f = Files::new();
    let (a, b) = (f.put("a.tree", T_A), f.put("b.tree", T_B));
    let r = mm(&["bottleneck", &a, &b]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut lines = r.out.lines();
    assert_eq!(lines.next(), Some("1"));
    assert!(lines.all(|l| l.starts_with("match ")));

    let bars = f.put("b.bars", "barcode v1\n0 null\n1 2\n");
    let r = mm(&["bottleneck", &a, &bars]);
    assert_eq!(r.out.lines().next(), Some("1"));
}

#[test]
fn interleave_modes() {
    let f = Files::new();
    let (a, b) = (f.put("a.tree", T_A), f.put("b.tree", T_B));
    assert_eq!(mm(&["interleave", "--mode", "exact", &a, &a]).out, "0\n");
    assert_eq!(mm(&["interleave", &a, &b]).out, "1\n");
    assert_eq!(
        mm(&["interleave", "--mode", "upper", &a, &b]).out,
        "1\nbijection 0 1\n"
    );
    assert_eq!(mm(&["interleave", "--mode", "trivial", &a, &b]).out, "3\n");
    assert_eq!(mm(&["interleave", "--mode", "fuzzy", &a, &b]).code, 2);
}

#[test]
fn barcode_and_validate() {
    let f = Files::new();
    let c = f.put("c.tree", T_C);
    assert_eq!(mm(&["barcode", &c]).out, "barcode v1\n0 null\n1 4\n2 2.5\n");
    assert_eq!(
        mm(&["validate", &c]).out,
        "leaves 3\nnodes 5\nroot_height 4\n"
    );
    let svg = mm(&["validate", "--svg", &c]).out;
    assert!(svg.starts_with("<svg") && svg.contains(r#"class="leaf""#));
    let bars = mm(&["barcode", "--svg", &c]).out;
    assert!(bars.contains("marker-end"));
}

#[test]
fn chamber_subcommands() {
    let f = Files::new();
    let (a, b, c) = (
        f.put("a.tree", T_A),
        f.put("b.tree", T_B),
        f.put("c.tree", T_C),
    );
    assert_eq!(
        mm(&["chamber", "signature", &a]).out,
        "n 2\nranking 0 2 1\n"
    );
    assert_eq!(mm(&["chamber", "compare", &a, &b]).out, "same\n");
    assert_eq!(mm(&["chamber", "compare", &a, &c]).out, "different\n");
    assert_eq!(mm(&["chamber", "distance", &a, &b]).out, "1\n");
    let r = mm(&["chamber", "distance", &a, &c]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("error[NotSameChamber]"));
    assert!(r.out.is_empty());
}

#[test]
fn paths_prune_and_length() {
    let f = Files::new();
    let (a, b) = (f.put("a.tree", T_A), f.put("b.tree", T_B));
    let g = mm(&["geodesic", "--samples", "8", &a, &b]);
    assert_eq!(g.code, 0, "{}", g.err);
    assert!(g.out.starts_with("mergepath v1\nwaypoint 0\n"));
    assert!(g.out.ends_with("# interleaving 1\n# length 1\n"));

    let p = f.put("g.path", &g.out);
    for metric in ["bottleneck", "interleaving"] {
        assert_eq!(mm(&["path-length", "--metric", metric, &p]).out, "1\n");
    }
    let pruned = mm(&["prune", "--epsilon", "0.5", &p]);
    assert_eq!(pruned.code, 0);
    let q = f.put("pruned.path", &pruned.out);
    let len: f64 = mm(&["path-length", &q]).out.trim().parse().unwrap();
    assert!(len <= 1.0);

    let c = f.put("c.tree", T_C);
    let shifted = mm(&["prune", "--epsilon", "0.75", &c]).out;
    assert_eq!(shifted, "mergetree v1\n0 2 0.75\n1 2 1.75\n2 null 4\n");
    let r = mm(&["prune", "--epsilon", "-1", &c]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("NegativeEpsilon"));
}

#[test]
fn random_is_deterministic() {
    let a = mm(&["random", "--leaves", "4", "--seed", "9"]);
    let b = mm(&["random", "--leaves", "4", "--seed", "9"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    assert_ne!(a.out, mm(&["random", "--leaves", "4", "--seed", "10"]).out);
    assert_eq!(mm(&["random", "--leaves", "0"]).code, 1);
}

#[test]
fn verify_theorem_summary() {
    let args = [
        "verify-theorem",
        "--trials",
        "20",
        "--max-leaves",
        "3",
        "--samples",
        "16",
        "--seed",
        "7",
    ];
    let r = mm(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("hard_pass 20/20\n"));
    assert_eq!(r.out, mm(&args).out);

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let j: serde_json::Value = serde_json::from_str(&mm(&json_args).out).unwrap();
    assert_eq!(j["hard_pass"], 20);
    assert_eq!(j["records"].as_array().unwrap().len(), 20);
}

#[test]
fn input_errors_use_exit_code_two() {
    let f = Files::new();
    let missing = f.put("m.tree", "mergetree v1\n0 2 0\n1 2\n2 null 3\n");
    let r = mm(&["validate", &missing]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error[SyntaxError]"), "{}", r.err);
    assert!(r.err.contains("line 3"));

    let nan = f.put("nan.tree", "mergetree v1\n0 null NaN\n");
    let r = mm(&["validate", &nan]);
    assert_eq!(r.code, 1);
    assert!(r.err.starts_with("error[NonFiniteHeight]"));

    let r = mm(&["validate", "/definitely/not/here.tree"]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error[IoError]"));
    assert_eq!(mm(&["frobnicate"]).code, 2);
    assert_eq!(mm(&[]).code, 2);
    assert_eq!(mm(&["--help"]).code, 0);
}

#[test]
fn binary_honours_the_oracle_limit() {
    let f = Files::new();
    let (a, c) = (f.put("a.tree", T_A), f.put("c.tree", T_C));
    let exe = env!("CARGO_BIN_EXE_mergemetrics");
    let out = Command::new(exe)
        .args(["interleave", &a, &c])
        .env("MERGEMETRICS_MAX_ORACLE_LEAVES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TooManyLeaves"));

    let out = Command::new(exe)
        .args(["interleave", &a, &c])
        .env_remove("MERGEMETRICS_MAX_ORACLE_LEAVES")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}
