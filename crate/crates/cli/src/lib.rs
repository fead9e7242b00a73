//! The `bcplus` command: load a description, answer a labeled query, print
//! the solutions.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use bcplus_core::query::{query_theory, solve, Maxstep, QueryOutcome, SolveOptions, DEFAULT_HORIZON_CAP};
use bcplus_core::signature::{Atom, Signature};
use bcplus_core::transition::{Path, TransitionSystem, Valuation};
use bcplus_core::{StableEngine, Symbol, Translation};
use bcplus_lang::{load, GroundOptions, Mode};
use clap::Parser;

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bcplus",
    about = "Answer queries about BC+, BC and C+ action descriptions",
    override_usage = "bcplus [-l bc+|bc|c+] <FILE> [NAME=INT ...] query=<LABEL> [N] [OPTIONS]"
)]
struct Cli {
    /// Language of the input file.
    #[arg(short = 'l', long = "language", default_value = "bc+")]
    language: Mode,

    /// Largest maxstep tried for queries without a fixed maxstep.
    #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
    horizon_cap: usize,

    /// Print the propositional theory the query is solved against.
    #[arg(long)]
    dump_theory: bool,

    /// Print the transition system in DOT format.
    #[arg(long)]
    dump_graph: bool,

    /// The input file, then `name=int` bindings, `query=label`, and the
    /// number of solutions to print (0 for all; default 1).
    #[arg(required = true, value_name = "ARGS")]
    args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub input: PathBuf,
    pub mode: Mode,
    pub bindings: BTreeMap<String, i64>,
    pub query: Option<String>,
    pub limit: usize,
    pub horizon_cap: usize,
    pub dump_theory: bool,
    pub dump_graph: bool,
}

fn config(cli: Cli) -> Result<CliConfig, String> {
    let mut args = cli.args.into_iter();
    let input = PathBuf::from(args.next().ok_or("missing input file")?);
    let mut cfg = CliConfig {
        input,
        mode: cli.language,
        bindings: BTreeMap::new(),
        query: None,
        limit: 1,
        horizon_cap: cli.horizon_cap,
        dump_theory: cli.dump_theory,
        dump_graph: cli.dump_graph,
    };
    for arg in args {
        if let Some((name, value)) = arg.split_once('=') {
            if name == "query" {
                cfg.query = Some(value.to_string());
            } else {
                let v = value
                    .parse()
                    .map_err(|_| format!("binding `{arg}` needs an integer value"))?;
                cfg.bindings.insert(name.to_string(), v);
            }
        } else {
            cfg.limit = arg
                .parse()
                .map_err(|_| format!("unexpected argument `{arg}`"))?;
        }
    }
    Ok(cfg)
}

fn resolve_input(path: &FsPath) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let mut with_ext = path.as_os_str().to_owned();
    with_ext.push(".bcp");
    let with_ext = PathBuf::from(with_ext);
    if with_ext.exists() {
        with_ext
    } else {
        path.to_path_buf()
    }
}

fn shown(sig: &Signature, atom: &Atom) -> Option<String> {
    let decl = sig.get(&atom.constant)?;
    if decl.is_boolean() {
        return (atom.value == Symbol::t()).then(|| atom.constant.to_string());
    }
    if decl.attribute_of.is_some() && atom.value == Symbol::name("none") {
        return None;
    }
    Some(atom.to_string())
}

fn atom_line(sig: &Signature, v: &Valuation) -> String {
    v.atoms().filter_map(|a| shown(sig, a)).collect::<Vec<_>>().join(" ")
}

fn labeled(label: &str, atoms: String) -> String {
    if atoms.is_empty() {
        format!("\t{label}:")
    } else {
        format!("\t{label}:  {atoms}")
    }
}

/// One solution as printed: a header, then a line per state and per
/// nonempty event, separated by blank lines.
pub fn format_solution(sig: &Signature, path: &Path, index: usize) -> String {
    let mut lines = Vec::new();
    for (i, s) in path.states.iter().enumerate() {
        if i > 0 {
            let actions = atom_line(sig, &path.events[i - 1]);
            if !actions.is_empty() {
                lines.push(labeled("ACTIONS", actions));
            }
        }
        lines.push(labeled(&i.to_string(), atom_line(sig, s)));
    }
    format!("Solution: {index}\n{}\n", lines.join("\n\n"))
}

pub fn format_solutions(sig: &Signature, paths: &[Path]) -> String {
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| format_solution(sig, p, i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn execute(cfg: &CliConfig, out: &mut String) -> Result<i32, Failure> {
    let path = resolve_input(&cfg.input);
    let src = std::fs::read_to_string(&path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    let opts = GroundOptions {
        bindings: cfg.bindings.clone(),
        ..GroundOptions::default()
    };
    let grounded = load(&src, cfg.mode, &opts).map_err(|d| Failure(format!("{}:{d}", path.display())))?;
    let d = grounded.description.to_bcplus()?;
    let engine = StableEngine::default();

    if cfg.dump_graph {
        out.push_str(&TransitionSystem::build(&d, &engine)?.to_dot());
    }
    let Some(label) = &cfg.query else {
        if cfg.dump_graph || cfg.dump_theory {
            if cfg.dump_theory {
                out.push_str(&d.translate(1)?.dump());
            }
            return Ok(EXIT_FOUND);
        }
        return Err(Failure("no query selected; pass query=<label>".into()));
    };
    let q = grounded.query(label).ok_or_else(|| {
        let known: Vec<&str> = grounded.queries.iter().map(|q| q.label.as_str()).collect();
        Failure(format!("unknown query `{label}` (defined: {})", known.join(", ")))
    })?;
    let solve_opts = SolveOptions {
        limit: cfg.limit,
        horizon_cap: cfg.horizon_cap,
        engine,
    };
    let outcome = solve(&d, q, &solve_opts)?;
    if cfg.dump_theory {
        let m = match (&outcome, q.maxstep) {
            (QueryOutcome::Found { horizon, .. }, _) => *horizon,
            (_, Maxstep::Fixed(m)) => m,
            _ => cfg.horizon_cap,
        };
        out.push_str(&format!("% maxstep {m}\n"));
        out.push_str(&query_theory(&d, q, m)?.dump());
    }
    match outcome {
        QueryOutcome::Found { solutions, .. } => {
            out.push_str(&format_solutions(&d.signature, &solutions));
            Ok(EXIT_FOUND)
        }
        QueryOutcome::Unsatisfiable { horizon } => {
            out.push_str(&format!("No solution with maxstep {horizon}.\n"));
            Ok(EXIT_NONE)
        }
        QueryOutcome::NoSolutionUpToCap { cap } => {
            out.push_str(&format!("No solution with maxstep up to {cap}.\n"));
            Ok(EXIT_NONE)
        }
    }
}

/// Runs the command on `args` (program name first). Output is written only
/// once the run has succeeded; diagnostics go to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_FOUND };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let cfg = match config(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_ERROR;
        }
    };
    let mut buf = String::new();
    match execute(&cfg, &mut buf) {
        Ok(code) => {
            let _ = out.write_all(buf.as_bytes());
            code
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcplus_core::signature::ConstantKind;

    fn sig() -> Signature {
        let mut sig = Signature::new()
            .with("c", ConstantKind::RegularFluent, [1, 2].map(Symbol::int))
            .unwrap()
            .with_boolean("p", ConstantKind::RegularFluent)
            .unwrap()
            .with_boolean("a", ConstantKind::Action)
            .unwrap();
        sig.declare("d", ConstantKind::Action, [Symbol::int(1), Symbol::name("none")])
            .unwrap()
            .attribute_of = Some(Symbol::name("a"));
        sig
    }

    fn v(atoms: &[Atom]) -> Valuation {
        Valuation::new(atoms.iter().cloned())
    }

    #[test]
    fn booleans_print_bare_and_none_is_hidden() {
        let path = Path {
            states: vec![
                v(&[Atom::new("c", 1), Atom::truth("p")]),
                v(&[Atom::new("c", 2), Atom::falsity("p")]),
                v(&[Atom::new("c", 2), Atom::falsity("p")]),
            ],
            events: vec![
                v(&[Atom::truth("a"), Atom::new("d", 1)]),
                v(&[Atom::falsity("a"), Atom::new("d", "none")]),
            ],
        };
        assert_eq!(
            format_solution(&sig(), &path, 7),
            "Solution: 7\n\t0:  c=1 p\n\n\tACTIONS:  a d=1\n\n\t1:  c=2\n\n\t2:  c=2\n"
        );
    }

    #[test]
    fn zero_step_solution() {
        let path = Path {
            states: vec![v(&[Atom::new("c", 1), Atom::falsity("p")])],
            events: vec![],
        };
        assert_eq!(format_solution(&sig(), &path, 1), "Solution: 1\n\t0:  c=1\n");
    }

    fn cfg(args: &[&str]) -> Result<CliConfig, String> {
        let argv = std::iter::once("bcplus").chain(args.iter().copied());
        config(Cli::try_parse_from(argv).map_err(|e| e.to_string())?)
    }

    #[test]
    fn arguments() {
        let c = cfg(&["-l", "c+", "switch", "k=3", "query=test", "0", "--horizon-cap", "5"]).unwrap();
        assert_eq!(c.mode, Mode::Cplus);
        assert_eq!(c.input, PathBuf::from("switch"));
        assert_eq!(c.bindings, BTreeMap::from([("k".to_string(), 3)]));
        assert_eq!(c.query.as_deref(), Some("test"));
        assert_eq!((c.limit, c.horizon_cap), (0, 5));
        assert_eq!(cfg(&["f"]).unwrap().limit, 1);
        assert!(cfg(&["f", "k=x"]).unwrap_err().contains("integer"));
        assert!(cfg(&["f", "bogus"]).unwrap_err().contains("unexpected argument"));
        assert!(cfg(&["-l", "asp", "f"]).is_err());
    }
}
