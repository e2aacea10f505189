//! The `cna` command line.
//!
//! Exit codes: 0 success, 1 checked and false, 2 usage or input error,
//! 3 undecided because a bound was hit.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cna_core::equivalence::{compare, law_harness, HarnessConfig, Mode, Verdict};
use cna_core::process::{format_process, parse_program, Program};
use cna_core::routing::{basic_equivalent, infra_graph, infra_to_process, parse_infra, verify_paths, CheckStatus, Infra};
use cna_core::semantics::{
    build_lts, concrete_step_oracle, sorted_steps, Bounds, SemanticsError, DEFAULT_MAX_STATES, DEFAULT_MAX_UNFOLD,
    DEFAULT_ORACLE_LEN,
};
use cna_core::{parse_chain, Chan, LinkChain, NormalLabel, Renaming};

use crate::export::{export_lts, Format};
use crate::service::{AppState, Session, DEFAULT_PORT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cna", version, about = "Core Network Algebra workbench")]
pub struct Cli {
    #[command(flatten)]
    pub bounds: BoundFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct BoundFlags {
    /// Stop exploring after this many states.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: usize,
    /// Unfoldings allowed before a constant counts as unguarded.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_UNFOLD)]
    pub max_unfold: usize,
    /// Keep targets exactly as derived, without structural cleanup.
    #[arg(long, global = true)]
    pub no_normalize: bool,
}

impl BoundFlags {
    pub fn bounds(&self) -> Bounds {
        Bounds::default()
            .with_max_states(self.max_states)
            .with_max_unfold(self.max_unfold)
            .with_normalize(!self.no_normalize)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ModeArg {
    Network,
    Strong,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Network => Mode::Network,
            ModeArg::Strong => Mode::Strong,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a program and print its canonical form.
    Parse { file: PathBuf },
    /// Operations on link-chain literals such as `a\b ; _\_ ; b\c`.
    Chain {
        #[command(subcommand)]
        op: ChainOp,
    },
    /// Build the transition system of an entry point and export it.
    Lts {
        file: PathBuf,
        /// `main`, a definition name, or a process expression.
        #[arg(default_value = "main")]
        entry: String,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
        /// Compare every state's transitions against the concrete oracle.
        #[arg(long)]
        check_oracle: bool,
        /// Longest concrete label the oracle enumerates.
        #[arg(long, default_value_t = DEFAULT_ORACLE_LEN)]
        oracle_len: usize,
    },
    /// Step through an entry point interactively: a number fires that
    /// transition, `u` undoes, `q` quits.
    Step {
        file: PathBuf,
        #[arg(default_value = "main")]
        entry: String,
    },
    /// Decide bisimilarity of two entry points.
    Bisim {
        file: PathBuf,
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Network)]
        mode: ModeArg,
    },
    /// Check the algebraic laws on random processes.
    Laws {
        /// Program whose definitions may appear in generated processes.
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Network)]
        mode: ModeArg,
    },
    /// Analyse a routing infrastructure from an `.infra` file.
    Infra {
        file: PathBuf,
        #[arg(value_enum)]
        action: InfraAction,
        /// Component to analyse; defaults to the last one declared.
        #[arg(long)]
        component: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Run the local stepping service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Directory whose `.cna` files the service lists.
        #[arg(long)]
        root: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChainOp {
    Merge { left: String, right: String },
    Restrict { chain: String, channel: String },
    /// Apply a permutation written `a<->b` or `a->b, b->c, c->a`.
    Rename { chain: String, renaming: String },
    Normalize { chain: String },
    Reduce { chain: String },
    /// Replace `old` by `new`.
    Subst { chain: String, new: String, old: String },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum InfraAction {
    Graph,
    Paths,
    Basic,
    Process,
    Verify,
}

/// Output of one command: streams and exit code.
#[derive(Default)]
struct Outcome {
    out: String,
    err: String,
    code: i32,
}

impl Outcome {
    fn ok(out: String) -> Outcome {
        Outcome { out, err: String::new(), code: EXIT_OK }
    }

    fn fail(code: i32, err: impl Into<String>) -> Outcome {
        Outcome { out: String::new(), err: err.into(), code }
    }
}

fn line(s: impl std::fmt::Display) -> String {
    format!("{s}\n")
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {e}\n", path.display())))
}

fn load(path: &Path) -> Result<Program, Outcome> {
    let src = read(path)?;
    parse_program(&src).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {} [{}]\n", path.display(), e, e.kind.code())))
}

fn entry(prog: &Program, name: &str) -> Result<cna_core::process::Process, Outcome> {
    if name.trim() == "main" && prog.main.is_none() {
        return Err(Outcome::fail(EXIT_USAGE, "the program has no main; name an entry point\n"));
    }
    prog.resolve(name).map_err(|e| Outcome::fail(EXIT_USAGE, format!("entry {name:?}: {e} [{}]\n", e.kind.code())))
}

fn semantics_failure(e: SemanticsError) -> Outcome {
    let code = match e {
        SemanticsError::UnguardedRecursion { .. } => EXIT_UNKNOWN,
        _ => EXIT_USAGE,
    };
    Outcome::fail(code, format!("{e} [{}]\n", e.code()))
}

fn chain_arg(text: &str) -> Result<LinkChain, Outcome> {
    parse_chain(text).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{text:?}: {e}\n")))
}

fn chan_arg(text: &str) -> Result<Chan, Outcome> {
    Chan::new(text).ok_or_else(|| Outcome::fail(EXIT_USAGE, format!("{text:?} is not a channel name\n")))
}

fn chain(op: &ChainOp) -> Result<Outcome, Outcome> {
    Ok(match op {
        ChainOp::Merge { left, right } => match chain_arg(left)?.merge(&chain_arg(right)?) {
            Some(c) => Outcome::ok(line(c)),
            None => Outcome::fail(EXIT_NEGATIVE, "the chains do not merge\n"),
        },
        ChainOp::Restrict { chain, channel } => match chain_arg(chain)?.restrict(&chan_arg(channel)?) {
            Some(c) => Outcome::ok(line(c)),
            None => Outcome::fail(EXIT_NEGATIVE, format!("{channel} is not matched in the chain\n")),
        },
        ChainOp::Rename { chain, renaming } => {
            let phi: Renaming =
                renaming.parse().map_err(|e| Outcome::fail(EXIT_USAGE, format!("{renaming:?}: {e}\n")))?;
            Outcome::ok(line(chain_arg(chain)?.rename(&phi)))
        }
        ChainOp::Normalize { chain } => {
            let n: NormalLabel = chain_arg(chain)?.normalize();
            Outcome::ok(format!("{n}\nblocks {}\n", n.blocks_string()))
        }
        ChainOp::Reduce { chain } => Outcome::ok(line(chain_arg(chain)?.reduce())),
        ChainOp::Subst { chain, new, old } => Outcome::ok(line(chain_arg(chain)?.subst(&chan_arg(new)?, &chan_arg(old)?))),
    })
}

/// Symbolic and concrete transitions of every state, compared on labels
/// of at most `len` links.
fn oracle_mismatches(
    lts: &cna_core::semantics::SymbolicLts,
    prog: &Program,
    len: usize,
    bounds: &Bounds,
) -> Result<Vec<String>, SemanticsError> {
    let mut out = Vec::new();
    for state in lts.states.iter().filter(|s| s.expanded) {
        let symbolic: BTreeSet<(NormalLabel, String)> = sorted_steps(&state.term, &prog.defs, bounds)?
            .into_iter()
            .filter(|(l, _, _)| l.min_length() <= len)
            .map(|(l, _, k)| (l, k))
            .collect();
        let concrete: BTreeSet<(NormalLabel, String)> = concrete_step_oracle(&state.term, &prog.defs, len, bounds)?
            .into_iter()
            .map(|(c, t)| (c.normalize(), format_process(&t.canonicalize())))
            .collect();
        for (l, k) in symbolic.symmetric_difference(&concrete) {
            let side = if symbolic.contains(&(l.clone(), k.clone())) { "symbolic only" } else { "concrete only" };
            out.push(format!("{}: {side}: {l} -> {k}", state.key));
        }
    }
    Ok(out)
}

fn lts(
    file: &Path,
    name: &str,
    format: Format,
    check: bool,
    oracle_len: usize,
    bounds: &Bounds,
) -> Result<Outcome, Outcome> {
    let prog = load(file)?;
    let p = entry(&prog, name)?;
    let lts = build_lts(&p, &prog.defs, bounds).map_err(semantics_failure)?;
    let mut outcome = Outcome::ok(export_lts(&lts, format));
    if check {
        if oracle_len == 0 {
            return Err(Outcome::fail(EXIT_USAGE, "--oracle-len must be positive\n"));
        }
        let bad = oracle_mismatches(&lts, &prog, oracle_len, bounds).map_err(semantics_failure)?;
        if !bad.is_empty() {
            outcome.err = bad.iter().map(line).collect();
            outcome.code = EXIT_NEGATIVE;
            return Ok(outcome);
        }
    }
    if !lts.complete {
        outcome.err = format!("truncated at {} states\n", bounds.max_states);
        outcome.code = EXIT_UNKNOWN;
    }
    Ok(outcome)
}

fn show_state(out: &mut dyn Write, s: &Session) -> std::io::Result<()> {
    writeln!(out, "state {}: {}", s.current(), s.term())?;
    let ts = s.transitions();
    if ts.is_empty() {
        writeln!(out, "  no transitions")?;
    }
    for t in ts {
        writeln!(out, "  [{}] {} -> {}", t.index, t.essential, t.target_preview)?;
    }
    Ok(())
}

fn step(
    file: &Path,
    name: &str,
    bounds: &Bounds,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<Outcome, Outcome> {
    let prog = load(file)?;
    let p = entry(&prog, name)?;
    let mut session = Session::start(prog.defs, &p, *bounds).map_err(semantics_failure)?;
    let io = |e: std::io::Error| Outcome::fail(EXIT_USAGE, format!("{e}\n"));
    show_state(out, &session).map_err(io)?;
    let mut buf = String::new();
    loop {
        write!(out, "> ").and_then(|_| out.flush()).map_err(io)?;
        buf.clear();
        if input.read_line(&mut buf).map_err(io)? == 0 {
            writeln!(out).map_err(io)?;
            break;
        }
        let cmd = buf.trim();
        let result = match cmd {
            "" => continue,
            "q" | "quit" => break,
            "u" | "undo" => session.undo(),
            n => match n.parse::<usize>() {
                Ok(i) => session.step(i),
                Err(_) => {
                    writeln!(out, "expected a transition number, `u` or `q`").map_err(io)?;
                    continue;
                }
            },
        };
        match result {
            Ok(()) => show_state(out, &session).map_err(io)?,
            Err(e) => writeln!(out, "{}", e.message).map_err(io)?,
        }
    }
    Ok(Outcome::default())
}

fn bisim(file: &Path, left: &str, right: &str, mode: Mode, bounds: &Bounds) -> Result<Outcome, Outcome> {
    let prog = load(file)?;
    let (p, q) = (entry(&prog, left)?, entry(&prog, right)?);
    let c = compare(&p, &q, &prog.defs, mode, bounds).map_err(semantics_failure)?;
    let mut out = line(c.verdict.name());
    let code = match &c.verdict {
        Verdict::Bisimilar => EXIT_OK,
        Verdict::Distinguished(w) => {
            let first = &w.steps[0];
            let _ = writeln!(out, "witness {}", first.key);
            out.push_str(&w.render(&c.left, &c.right));
            EXIT_NEGATIVE
        }
        Verdict::Unknown(reason) => {
            out.push_str(&line(reason));
            EXIT_UNKNOWN
        }
    };
    Ok(Outcome { out, err: String::new(), code })
}

fn laws(file: Option<&Path>, seed: u64, samples: usize, mode: Mode, bounds: &Bounds) -> Result<Outcome, Outcome> {
    let defs = match file {
        Some(f) => load(f)?.defs,
        None => Default::default(),
    };
    let cfg = HarnessConfig { seed, samples, mode, bounds: *bounds };
    let report = law_harness(&defs, &cfg);
    let code = if report.failures() > 0 { EXIT_NEGATIVE } else { EXIT_OK };
    Ok(Outcome { out: report.to_string(), err: String::new(), code })
}

fn routing_failure(e: cna_core::routing::RoutingError) -> Outcome {
    Outcome::fail(EXIT_USAGE, line(e))
}

fn graph_dot(g: &cna_core::routing::InfraGraph) -> String {
    let mut out = String::from("digraph infra {\n  rankdir=LR;\n");
    for n in &g.nodes {
        let shape = if g.left.contains(n) || g.right.contains(n) { "box" } else { "ellipse" };
        let _ = writeln!(out, "  \"{n}\" [shape={shape}];");
    }
    for (a, b) in &g.arcs {
        let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
    }
    out.push_str("}\n");
    out
}

fn graph_json(g: &cna_core::routing::InfraGraph) -> String {
    let names = |cs: &mut dyn Iterator<Item = &Chan>| cs.map(|c| c.to_string()).collect::<Vec<_>>();
    let doc = serde_json::json!({
        "nodes": names(&mut g.nodes.iter()),
        "arcs": g.arcs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
        "left": names(&mut g.left.iter()),
        "right": names(&mut g.right.iter()),
    });
    line(serde_json::to_string_pretty(&doc).expect("documents serialize"))
}

fn infra(file: &Path, action: InfraAction, component: Option<&str>, format: Format, bounds: &Bounds) -> Result<Outcome, Outcome> {
    let parsed = parse_infra(&read(file)?).map_err(routing_failure)?;
    let target: &Infra = match component {
        Some(n) => parsed.get(n).ok_or_else(|| Outcome::fail(EXIT_USAGE, format!("no component {n}\n")))?,
        None => parsed.root().ok_or_else(|| Outcome::fail(EXIT_USAGE, "the file declares nothing\n"))?,
    };
    Ok(match action {
        InfraAction::Graph => {
            let g = infra_graph(target).map_err(routing_failure)?;
            Outcome::ok(match format {
                Format::Dot => graph_dot(&g),
                Format::Structured => graph_json(&g),
            })
        }
        InfraAction::Paths => {
            let g = infra_graph(target).map_err(routing_failure)?;
            let out = g
                .boundary_paths()
                .iter()
                .map(|p| line(p.iter().map(Chan::as_str).collect::<Vec<_>>().join(" -> ")))
                .collect();
            Outcome::ok(out)
        }
        InfraAction::Basic => {
            let b = basic_equivalent(target, &format!("{}_paths", target.name())).map_err(routing_failure)?;
            Outcome::ok(b.to_string())
        }
        InfraAction::Process => {
            let (p, defs) = infra_to_process(target).map_err(routing_failure)?;
            Outcome::ok(format!("{defs}main := {}\n", format_process(&p)))
        }
        InfraAction::Verify => {
            let report = verify_paths(target, bounds).map_err(routing_failure)?;
            let statuses: Vec<CheckStatus> = report.checks.iter().map(|c| c.status).collect();
            let code = if statuses.contains(&CheckStatus::Fail) {
                EXIT_NEGATIVE
            } else if statuses.contains(&CheckStatus::Unknown) {
                EXIT_UNKNOWN
            } else {
                EXIT_OK
            };
            Outcome { out: report.to_string(), err: String::new(), code }
        }
    })
}

fn serve(port: u16, root: Option<PathBuf>, bounds: &Bounds, err: &mut dyn Write) -> Outcome {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("{e}\n")),
    };
    let _ = writeln!(err, "listening on http://127.0.0.1:{port}");
    match runtime.block_on(crate::service::serve(port, AppState::new(*bounds, root))) {
        Ok(()) => Outcome::default(),
        Err(e) => Outcome::fail(EXIT_USAGE, format!("port {port}: {e}\n")),
    }
}

/// Runs one invocation; `argv` includes the program name.
pub fn run<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let bounds = cli.bounds.bounds();
    let result = match &cli.command {
        Command::Parse { file } => load(file).map(|p| Outcome::ok(p.to_string())),
        Command::Chain { op } => chain(op),
        Command::Lts { file, entry, format, check_oracle, oracle_len } => {
            lts(file, entry, *format, *check_oracle, *oracle_len, &bounds)
        }
        Command::Step { file, entry } => step(file, entry, &bounds, input, out),
        Command::Bisim { file, left, right, mode } => bisim(file, left, right, (*mode).into(), &bounds),
        Command::Laws { file, seed, samples, mode } => laws(file.as_deref(), *seed, *samples, (*mode).into(), &bounds),
        Command::Infra { file, action, component, format } => infra(file, *action, component.as_deref(), *format, &bounds),
        Command::Serve { port, root } => Ok(serve(*port, root.clone(), &bounds, err)),
    };
    let o = result.unwrap_or_else(|o| o);
    let _ = out.write_all(o.out.as_bytes());
    let _ = err.write_all(o.err.as_bytes());
    let _ = out.flush();
    o.code
}
