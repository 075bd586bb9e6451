//! The `bdproc` command line.
//!
//! Exit codes: 0 success (or `holds`), 1 `fails` / not enabled, 2 `unknown`
//! or truncated exploration, 3 invalid input file, 4 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::conflict::classify_graph;
use crate::corpus;
use crate::dot;
use crate::enumerate::Unfolding;
use crate::format::{self, FormatError};
use crate::harness::{self, Budgets};
use crate::net::{FireError, Net, Step, TransitionId};
use crate::process::Process;
use crate::reach::MarkingGraph;
use crate::report::{self, CheckedNet};
use crate::swapping;
use crate::verdict::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bdproc",
    version,
    about = "Processes, swapping and conflicts of place/transition nets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct NetArg {
    /// Net file, or the name of a built-in net (fig1 ... fig6, fig4-left,
    /// fig4-right, choice).
    net: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a net.
    Validate(NetArg),
    /// Fire a step or a sequence and print the resulting marking.
    Fire {
        #[command(flatten)]
        net: NetArg,
        /// Step as comma-separated transitions, e.g. "a,b".
        #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
        step: Option<String>,
        /// Sequence as space-separated transitions, e.g. "a b c".
        #[arg(long)]
        seq: Option<String>,
        /// Start from the marking in this file instead of the initial one.
        #[arg(long)]
        marking: Option<PathBuf>,
    },
    /// Explore the reachable markings.
    Reach {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        /// Write the net with its initial marking as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Classify the net's conflict properties.
    Classify {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        /// Print the JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Enumerate finite processes up to isomorphism.
    Unfold {
        #[command(flatten)]
        net: NetArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Maximal number of processes kept.
        #[arg(long, default_value_t = 20_000)]
        max: usize,
        /// Write one DOT file per process into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write one process file per process into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide swapping equivalence of two processes.
    Equiv {
        #[command(flatten)]
        net: NetArg,
        p1: PathBuf,
        p2: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Compare two processes in the BD-preorder.
    Order {
        #[command(flatten)]
        net: NetArg,
        p1: PathBuf,
        p2: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Run the check suite on one net, or on every built-in net.
    Check {
        net: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Write the built-in nets as net files.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure that ends the command with an exit code.
struct Exit(i32, String);

impl From<FormatError> for Exit {
    fn from(e: FormatError) -> Self {
        Exit(EXIT_INVALID, e.to_string())
    }
}

fn io(path: &Path, e: std::io::Error) -> Exit {
    Exit(EXIT_USAGE, format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    std::fs::write(path, text).map_err(|e| io(path, e))
}

fn create_dir(path: &Path) -> Result<(), Exit> {
    std::fs::create_dir_all(path).map_err(|e| io(path, e))
}

fn load_net(arg: &str) -> Result<Net, Exit> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(format::parse_net(&read(path)?)?);
    }
    corpus::by_name(arg).ok_or_else(|| Exit(EXIT_USAGE, format!("{arg}: no such file or built-in net")))
}

fn load_process(path: &Path, net: &Net) -> Result<Process, Exit> {
    Ok(format::parse_process(&read(path)?, net)?)
}

fn transitions(net: &Net, names: &str, sep: &[char]) -> Result<Vec<TransitionId>, Exit> {
    names
        .split(sep)
        .filter(|s| !s.is_empty())
        .map(|n| {
            net.transition(n)
                .ok_or_else(|| Exit(EXIT_USAGE, format!("unknown transition `{n}`")))
        })
        .collect()
}

/// Runs the command line `argv` (program name first), writing to `out` and
/// `err`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut buf = String::new();
    let code = match execute(cli.command, &mut buf) {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    };
    let _ = out.write_all(buf.as_bytes());
    code
}

fn budget_or_default(b: Option<usize>) -> usize {
    b.unwrap_or_else(crate::default_budget)
}

fn execute(cmd: Command, out: &mut String) -> Result<i32, Exit> {
    use std::fmt::Write;
    match cmd {
        Command::Validate(NetArg { net }) => {
            let n = load_net(&net)?;
            writeln!(
                out,
                "valid: {} ({} places, {} transitions)",
                n.name(),
                n.place_count(),
                n.transition_count()
            )
            .unwrap();
            Ok(EXIT_OK)
        }
        Command::Fire {
            net,
            step,
            seq,
            marking,
        } => {
            let net = load_net(&net.net)?;
            let m = match marking {
                Some(path) => format::parse_marking(&read(&path)?, &net)?,
                None => net.initial_marking().clone(),
            };
            let result = match (step, seq) {
                (Some(s), _) => {
                    let g: Step = transitions(&net, &s, &[','])?.into_iter().collect();
                    net.fire_step(&m, &g)
                }
                (None, Some(s)) => net.fire_sequence(&m, &transitions(&net, &s, &[' ', ','])?),
                (None, None) => unreachable!("clap requires one of --step, --seq"),
            };
            match result {
                Ok(m) => {
                    writeln!(out, "{}", net.show_marking(&m)).unwrap();
                    Ok(EXIT_OK)
                }
                Err(FireError::EmptyStep) => Err(Exit(EXIT_USAGE, "empty step".into())),
                Err(e @ FireError::Overflow(_)) => Err(Exit(EXIT_INVALID, e.to_string())),
                Err(e) => {
                    writeln!(out, "not enabled: {e}").unwrap();
                    Ok(EXIT_FAILS)
                }
            }
        }
        Command::Reach {
            net,
            cap,
            dot: dot_path,
        } => {
            let net = load_net(&net.net)?;
            let g = MarkingGraph::explore(&net, cap);
            for (i, m) in g.vertices().iter().enumerate() {
                writeln!(out, "m{i} {}", net.show_marking(m)).unwrap();
            }
            for &(s, t, d) in g.edges() {
                writeln!(out, "m{s} -{}-> m{d}", net.transition_name(t)).unwrap();
            }
            writeln!(
                out,
                "{} markings, {} edges, {}",
                g.len(),
                g.edges().len(),
                if g.is_complete() { "complete" } else { "truncated" }
            )
            .unwrap();
            if let Some(p) = dot_path {
                write(&p, &dot::net_to_dot(&net))?;
            }
            Ok(if g.is_complete() { EXIT_OK } else { EXIT_UNKNOWN })
        }
        Command::Classify { net, cap, json } => {
            let net = load_net(&net.net)?;
            let g = MarkingGraph::explore(&net, cap);
            let c = classify_graph(&net, &g);
            if json {
                out.push_str(&report::render(&report::classification_report(&net, &c)));
            } else {
                for (name, o) in c.outcomes() {
                    write!(out, "{name}={}", o.verdict).unwrap();
                    if let Some(w) = &o.witness {
                        write!(out, "  witness {}", w.show(&net)).unwrap();
                    }
                    out.push('\n');
                }
                let pairs: Vec<String> = c
                    .structural_conflict_pairs
                    .iter()
                    .map(|&(t, u)| format!("{{{}, {}}}", net.transition_name(t), net.transition_name(u)))
                    .collect();
                writeln!(out, "structural_conflict_pairs=[{}]", pairs.join(", ")).unwrap();
                writeln!(
                    out,
                    "markings={} complete={}",
                    c.exploration.markings, c.exploration.complete
                )
                .unwrap();
            }
            Ok(if c.all_definite() { EXIT_OK } else { EXIT_UNKNOWN })
        }
        Command::Unfold {
            net,
            depth,
            max,
            dot: dot_dir,
            out: out_dir,
        } => {
            let net = load_net(&net.net)?;
            let u = Unfolding::explore(&net, depth, max);
            writeln!(
                out,
                "{} processes, {} maximal, {}",
                u.len(),
                u.maximal().count(),
                if u.complete { "complete" } else { "truncated" }
            )
            .unwrap();
            for d in [&dot_dir, &out_dir].into_iter().flatten() {
                create_dir(d)?;
            }
            for (i, e) in u.processes.iter().enumerate() {
                let name = format!("p{i}");
                writeln!(
                    out,
                    "{name} events={} {}{}",
                    e.process.event_count(),
                    if e.maximal { "maximal " } else { "" },
                    harness::show_process(&e.process, &net)
                )
                .unwrap();
                if let Some(d) = &dot_dir {
                    write(
                        &d.join(format!("{name}.dot")),
                        &dot::process_to_dot(&e.process, &net, &name),
                    )?;
                }
                if let Some(d) = &out_dir {
                    write(
                        &d.join(format!("{name}.proc")),
                        &format::serialize_process(&e.process, &net, &name),
                    )?;
                }
            }
            Ok(if u.complete { EXIT_OK } else { EXIT_UNKNOWN })
        }
        Command::Equiv { net, p1, p2, budget } => {
            let net = load_net(&net.net)?;
            let (p, q) = (load_process(&p1, &net)?, load_process(&p2, &net)?);
            let o = swapping::swap_equiv(&p, &q, budget_or_default(budget));
            writeln!(out, "{}", o.verdict).unwrap();
            if let Some(path) = &o.path {
                let moves: Vec<String> = path
                    .moves
                    .iter()
                    .map(|m| format!("swap({},{})", m.p, m.q))
                    .collect();
                writeln!(out, "path length {}: {}", path.len(), moves.join(" ")).unwrap();
            }
            writeln!(out, "explored {}", o.explored).unwrap();
            Ok(match o.verdict {
                Verdict::Holds => EXIT_OK,
                Verdict::Fails => EXIT_FAILS,
                Verdict::Unknown => EXIT_UNKNOWN,
            })
        }
        Command::Order { net, p1, p2, budget } => {
            let net = load_net(&net.net)?;
            let (p, q) = (load_process(&p1, &net)?, load_process(&p2, &net)?);
            let b = budget_or_default(budget);
            let up = swapping::bd_preorder_fin(&net, &p, &q, b).verdict;
            let down = swapping::bd_preorder_fin(&net, &q, &p, b).verdict;
            let rel = match (up, down) {
                (Verdict::Holds, Verdict::Holds) => "equivalent",
                (Verdict::Holds, Verdict::Fails) => "below",
                (Verdict::Fails, Verdict::Holds) => "above",
                (Verdict::Fails, Verdict::Fails) => "incomparable",
                _ => "unknown",
            };
            writeln!(out, "{rel}").unwrap();
            Ok(if rel == "unknown" { EXIT_UNKNOWN } else { EXIT_OK })
        }
        Command::Check { net, depth, budget } => {
            let mut budgets = Budgets::with_depth(depth);
            if let Some(b) = budget {
                budgets.swaps = b;
            }
            let entries: Vec<(String, Net, Option<corpus::Expectations>)> = match net {
                Some(arg) => {
                    let known = corpus::corpus().into_iter().find(|c| c.name == arg);
                    match known {
                        Some(c) if !Path::new(&arg).exists() => vec![(arg, c.net, Some(c.expected))],
                        _ => {
                            let n = load_net(&arg)?;
                            vec![(n.name().to_string(), n, None)]
                        }
                    }
                }
                None => corpus::corpus()
                    .into_iter()
                    .map(|c| (c.name.to_string(), c.net, Some(c.expected)))
                    .collect(),
            };
            let label = if entries.len() == 1 {
                entries[0].0.clone()
            } else {
                "corpus".to_string()
            };
            let checked: Vec<CheckedNet> = entries
                .iter()
                .map(|(name, n, exp)| CheckedNet {
                    name: name.clone(),
                    net: n,
                    classification: classify_graph(n, &MarkingGraph::explore(n, budgets.markings)),
                    checks: harness::check_net(name, n, exp.as_ref(), budgets),
                })
                .collect();
            out.push_str(&report::render(&report::check_report(&label, budgets, &checked)));
            let failed = checked
                .iter()
                .flat_map(|c| &c.checks)
                .any(|r| r.verdict == Verdict::Fails);
            Ok(if failed { EXIT_FAILS } else { EXIT_OK })
        }
        Command::Corpus { out: dir } => {
            create_dir(&dir)?;
            for c in corpus::corpus() {
                let path = dir.join(format!("{}.net", c.name));
                write(&path, &format::serialize_net(&c.net))?;
                writeln!(out, "{}", path.display()).unwrap();
            }
            Ok(EXIT_OK)
        }
    }
}
