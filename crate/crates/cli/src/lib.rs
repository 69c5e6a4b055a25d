//! The `mergemetrics` command line.
//!
//! [`run`] parses the arguments, executes one subcommand and writes to the
//! given streams, returning the process exit code: 0 on success, 1 when the
//! computation itself fails (invalid tree, trees in different chambers,
//! failed theorem checks), 2 on usage, syntax and I/O errors.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mergemetrics::barcode::{bottleneck, elder_rule, Barcode};
use mergemetrics::chambers::{chamber_distance, chamber_signature, same_chamber};
use mergemetrics::interleaving::{
    best_labeled_upper_bound, interleaving_distance_exact, OracleConfig,
};
use mergemetrics::io::{
    format_f64, parse_barcode, parse_path, parse_tree, render_barcode_svg, render_tree_svg,
    write_barcode, write_path, write_tree, BARCODE_HEADER, PATH_HEADER,
};
use mergemetrics::paths::{
    discrete_length, geodesic_witness, prune_path, verify_intrinsic_theorem, Metric, TheoremConfig,
    TheoremReport,
};
use mergemetrics::tree::{random_tree, shift, trivial_interleaving_bound, HeightRange};
use mergemetrics::MergeTree;

#[derive(Parser, Debug)]
#[command(
    name = "mergemetrics",
    version,
    about = "Distances and paths between merge trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a tree document and summarise the tree
    Validate {
        tree: PathBuf,
        /// Print an SVG drawing instead of the summary
        #[arg(long)]
        svg: bool,
    },
    /// Elder Rule barcode of a tree
    Barcode {
        tree: PathBuf,
        /// Print an SVG drawing instead of the barcode document
        #[arg(long)]
        svg: bool,
    },
    /// Bottleneck distance between two trees or barcodes, with an optimal matching
    Bottleneck { a: PathBuf, b: PathBuf },
    /// Interleaving distance or one of its upper bounds
    Interleave {
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        a: PathBuf,
        b: PathBuf,
    },
    /// Chamber signatures and in-chamber distances
    Chamber {
        #[command(subcommand)]
        action: ChamberAction,
    },
    /// Shift a tree, or every waypoint of a path, up by epsilon
    Prune {
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        input: PathBuf,
    },
    /// Length of a path document under a metric
    PathLength {
        #[arg(long, value_enum, default_value_t = MetricArg::Bottleneck)]
        metric: MetricArg,
        path: PathBuf,
    },
    /// Witness path between two trees
    Geodesic {
        #[arg(long, default_value_t = 128)]
        samples: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Compare witness path lengths with interleaving distances on random pairs
    VerifyTheorem(TheoremArgs),
    /// Random tree document
    Random {
        #[arg(long)]
        leaves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
        hi: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ChamberAction {
    /// Order pattern of the cophenetic entries
    Signature { tree: PathBuf },
    /// Whether two trees lie in the same chamber
    Compare { a: PathBuf, b: PathBuf },
    /// Largest entrywise matrix difference of two same-chamber trees
    Distance { a: PathBuf, b: PathBuf },
}

#[derive(Args, Debug)]
struct TheoremArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 4)]
    max_leaves: usize,
    #[arg(long, default_value_t = 128)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Exact,
    Upper,
    Trivial,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MetricArg {
    Bottleneck,
    Interleaving,
    CopheneticUpper,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Bottleneck => Metric::Bottleneck,
            MetricArg::Interleaving => Metric::Interleaving,
            MetricArg::CopheneticUpper => Metric::CopheneticUpper,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Text,
    Json,
}

enum Failure {
    Domain(mergemetrics::Error),
    /// Syntax error in the named input.
    Syntax(String, mergemetrics::Error),
    Io(String),
    Usage(String),
    /// Checks that ran but did not hold, with the report to print anyway.
    Checks {
        output: String,
        message: String,
    },
}

impl From<mergemetrics::Error> for Failure {
    fn from(e: mergemetrics::Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(e) if e.is_syntax() => 2,
            Failure::Domain(_) | Failure::Checks { .. } => 1,
            Failure::Syntax(..) | Failure::Io(_) | Failure::Usage(_) => 2,
        }
    }

    fn report(&self) -> String {
        match self {
            Failure::Domain(e) => format!("error[{}]: {e}", e.code()),
            Failure::Syntax(path, e) => format!("error[{}]: {path}: {e}", e.code()),
            Failure::Io(m) => format!("error[IoError]: {m}"),
            Failure::Usage(m) => format!("error[UsageError]: {m}"),
            Failure::Checks { message, .. } => format!("error[CheckFailed]: {message}"),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line given by `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let oracle = OracleConfig::from_env();
    let (text, failure) = match execute(cli.command, &oracle) {
        Ok(text) => (text, None),
        Err(Failure::Checks { output, message }) => (
            output,
            Some(Failure::Checks {
                output: String::new(),
                message,
            }),
        ),
        Err(f) => (String::new(), Some(f)),
    };
    if out
        .write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return 2;
    }
    match failure {
        None => 0,
        Some(f) => {
            let _ = writeln!(err, "{}", f.report());
            f.exit_code()
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let result = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// Attaches the input name to syntax errors.
fn in_file<T>(path: &Path, r: mergemetrics::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        if e.is_syntax() {
            Failure::Syntax(path.display().to_string(), e)
        } else {
            Failure::Domain(e)
        }
    })
}

fn load_tree(path: &Path) -> Result<MergeTree, Failure> {
    in_file(path, parse_tree(&read_input(path)?))
}

fn first_content_line(text: &str) -> &str {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("")
}

/// A barcode document, or the Elder Rule barcode of a tree document.
fn load_barcode(path: &Path) -> Result<Barcode, Failure> {
    let text = read_input(path)?;
    if first_content_line(&text) == BARCODE_HEADER {
        in_file(path, parse_barcode(&text))
    } else {
        Ok(elder_rule(&in_file(path, parse_tree(&text))?))
    }
}

fn line(out: &mut String, value: f64) {
    let _ = writeln!(out, "{}", format_f64(value));
}

fn execute(command: Command, oracle: &OracleConfig) -> Outcome {
    let mut out = String::new();
    match command {
        Command::Validate { tree, svg } => {
            let t = load_tree(&tree)?;
            if svg {
                return Ok(render_tree_svg(&t));
            }
            let _ = writeln!(out, "leaves {}", t.leaf_count());
            let _ = writeln!(out, "nodes {}", t.node_count());
            let _ = writeln!(out, "root_height {}", format_f64(t.root_height()));
        }
        Command::Barcode { tree, svg } => {
            let b = elder_rule(&load_tree(&tree)?);
            return Ok(if svg {
                render_barcode_svg(&b)
            } else {
                write_barcode(&b)
            });
        }
        Command::Bottleneck { a, b } => {
            let (b1, b2) = (load_barcode(&a)?, load_barcode(&b)?);
            let (d, matching) = bottleneck(&b1, &b2);
            line(&mut out, d);
            for (i, j) in matching.pairs {
                let _ = writeln!(out, "match {i} {j}");
            }
        }
        Command::Interleave { mode, a, b } => {
            let (t1, t2) = (load_tree(&a)?, load_tree(&b)?);
            match mode {
                Mode::Exact => line(&mut out, interleaving_distance_exact(&t1, &t2, oracle)?.0),
                Mode::Trivial => line(&mut out, trivial_interleaving_bound(&t1, &t2)),
                Mode::Upper => {
                    let (d, perm) = best_labeled_upper_bound(&t1, &t2, oracle)?;
                    line(&mut out, d);
                    let perm: Vec<String> = perm.iter().map(usize::to_string).collect();
                    let _ = writeln!(out, "bijection {}", perm.join(" "));
                }
            }
        }
        Command::Chamber { action } => match action {
            ChamberAction::Signature { tree } => {
                let s = chamber_signature(&load_tree(&tree)?)?;
                let ranks: Vec<String> = s.ranking.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "n {}", s.n);
                let _ = writeln!(out, "ranking {}", ranks.join(" "));
            }
            ChamberAction::Compare { a, b } => {
                let same = same_chamber(&load_tree(&a)?, &load_tree(&b)?)?;
                let _ = writeln!(out, "{}", if same { "same" } else { "different" });
            }
            ChamberAction::Distance { a, b } => {
                line(
                    &mut out,
                    chamber_distance(&load_tree(&a)?, &load_tree(&b)?)?,
                );
            }
        },
        Command::Prune { epsilon, input } => {
            let text = read_input(&input)?;
            if first_content_line(&text) == PATH_HEADER {
                let p = in_file(&input, parse_path(&text))?;
                return Ok(write_path(&prune_path(&p, epsilon)?));
            }
            let t = in_file(&input, parse_tree(&text))?;
            return Ok(write_tree(&shift(&t, epsilon)?));
        }
        Command::PathLength { metric, path } => {
            let p = in_file(&path, parse_path(&read_input(&path)?))?;
            line(&mut out, discrete_length(&p, metric.into(), oracle)?);
        }
        Command::Geodesic { samples, a, b } => {
            let g = geodesic_witness(&load_tree(&a)?, &load_tree(&b)?, samples, oracle)?;
            let length = discrete_length(&g.path, Metric::Bottleneck, oracle)?;
            out.push_str(&write_path(&g.path));
            let _ = writeln!(out, "# interleaving {}", format_f64(g.distance));
            let _ = writeln!(out, "# length {}", format_f64(length));
        }
        Command::VerifyTheorem(args) => return verify(args, oracle),
        Command::Random {
            leaves,
            seed,
            lo,
            hi,
        } => {
            return Ok(write_tree(&random_tree(
                leaves,
                seed,
                HeightRange::new(lo, hi),
            )?));
        }
    }
    Ok(out)
}

fn verify(args: TheoremArgs, oracle: &OracleConfig) -> Outcome {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let cfg = TheoremConfig {
        trials: args.trials,
        max_leaves: args.max_leaves,
        samples: args.samples,
        seed: args.seed,
    };
    let report = verify_intrinsic_theorem(&cfg, oracle)?;
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Io(format!("cannot encode report: {e}")))?;
            s.push('\n');
            s
        }
        Format::Text => theorem_text(&report),
    };
    if report.hard_pass < report.trials {
        let message = format!(
            "{} of {} trials failed a hard check",
            report.trials - report.hard_pass,
            report.trials
        );
        return Err(Failure::Checks {
            output: text,
            message,
        });
    }
    Ok(text)
}

fn theorem_text(r: &TheoremReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "trials {}", r.trials);
    let _ = writeln!(out, "max_leaves {}", r.max_leaves);
    let _ = writeln!(out, "samples {}", r.samples);
    let _ = writeln!(out, "seed {}", r.seed);
    for (name, pass) in [
        ("upper", r.upper_pass),
        ("bottleneck", r.bottleneck_pass),
        ("refinement", r.refinement_pass),
        ("hard", r.hard_pass),
        ("close", r.close_pass),
    ] {
        let _ = writeln!(out, "{name}_pass {pass}/{}", r.trials);
    }
    let _ = writeln!(out, "close_rate {}", format_f64(r.close_rate()));
    for f in r.failures() {
        let _ = writeln!(
            out,
            "# trial {} failed: interleaving {} length {} refinement_length {}",
            f.trial,
            format_f64(f.interleaving),
            format_f64(f.length),
            format_f64(f.refinement_length)
        );
        if let Some([a, b]) = &f.fixture {
            for doc in [a, b] {
                for l in doc.lines() {
                    let _ = writeln!(out, "#   {l}");
                }
            }
        }
    }
    out
}
