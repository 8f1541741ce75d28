use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use scjc::ast::{CircusParagraph, Paragraph, Program};
use scjc::checker::{check_located, check_timing_located};
use scjc::diag::{has_errors, Diagnostic};
use scjc::frameworks::FrameworkKind;
use scjc::parser::{parse_action, parse_program_in};
use scjc::pretty;
use scjc::refine::{self, RefineError, RefinementResult};
use scjc::sim::{Model, Policy, Sim, TraceSet};
use scjc::translate::{monolithic, translate_program};

#[derive(Parser)]
#[command(name = "scjc", version, about = "SCJ-Circus parser, checker, translator, simulator and refinement tool")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a file and print its AST.
    Parse { file: PathBuf },
    /// Report well-formedness diagnostics; with constants, also timing conditions.
    Check {
        file: PathBuf,
        #[arg(long = "const", value_parser = parse_binding)]
        consts: Vec<(String, u64)>,
    },
    /// Translate SCJ-Circus paragraphs into Circus Time processes.
    Translate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Append the framework-first composition `Monolithic`.
        #[arg(long)]
        monolithic: bool,
    },
    #[command(subcommand)]
    Sim(SimCmd),
    #[command(subcommand)]
    Refine(RefineCmd),
    #[command(subcommand)]
    Frameworks(FwCmd),
}

#[derive(Args)]
struct SimTarget {
    file: PathBuf,
    #[arg(long)]
    main: String,
    #[arg(long = "const", value_parser = parse_binding)]
    consts: Vec<(String, u64)>,
}

#[derive(Subcommand)]
enum SimCmd {
    /// One run under a seeded random policy (or a priority order).
    Run {
        #[command(flatten)]
        target: SimTarget,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_ticks: u64,
        /// Comma-separated channel order; replaces random choice.
        #[arg(long, value_delimiter = ',')]
        priority: Vec<String>,
        /// Search all schedules for a deadline violation instead.
        #[arg(long)]
        search: bool,
    },
    /// Enumerate traces up to a depth.
    Traces {
        #[command(flatten)]
        target: SimTarget,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Let time pass silently instead of recording `tock`.
        #[arg(long)]
        untimed: bool,
        /// Print maximal traces only.
        #[arg(long)]
        maximal: bool,
    },
}

#[derive(Subcommand)]
enum RefineCmd {
    /// Parallelism introduction on `F(A)`.
    Law1 {
        /// Context F containing HOLE.
        #[arg(long)]
        context: String,
        /// The action A filling the hole.
        #[arg(long)]
        filler: String,
        #[arg(long, default_value = "c1")]
        c1: String,
        #[arg(long, default_value = "c2")]
        c2: String,
        /// Declarations for checking the rewrite by bounded refinement.
        #[arg(long)]
        decls: Option<PathBuf>,
        #[arg(long)]
        verify: Option<usize>,
    },
    /// Unused behaviour introduction on a parallel composition.
    Law2 {
        #[arg(long)]
        target: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        branch: String,
        #[arg(long)]
        decls: Option<PathBuf>,
        #[arg(long)]
        verify: Option<usize>,
    },
    /// Bounded trace refinement of `--impl` against `--spec`.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "impl")]
        imp: PathBuf,
        /// Process names; default to the last process of each file.
        #[arg(long)]
        spec_process: Option<String>,
        #[arg(long)]
        impl_process: Option<String>,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long = "const", value_parser = parse_binding)]
        consts: Vec<(String, u64)>,
    },
}

#[derive(Subcommand)]
enum FwCmd {
    /// Print a framework process template.
    Dump { kind: FrameworkKind },
}

fn parse_binding(s: &str) -> Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or("expected K=V")?;
    let v = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Failure with an exit code: 1 for user-level failures, 2 otherwise.
struct Fail(u8, String);

impl Fail {
    fn user(msg: impl ToString) -> Self {
        Fail(1, msg.to_string())
    }

    fn internal(msg: impl ToString) -> Self {
        Fail(2, msg.to_string())
    }
}

type Out = Result<u8, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::internal(format!("{}: {e}", path.display())))
}

fn print_diags(diags: &[Diagnostic], format: Format) {
    match format {
        Format::Text => diags.iter().for_each(|d| println!("{d}")),
        Format::Json => println!("{}", serde_json::to_string_pretty(diags).unwrap()),
    }
}

fn load(path: &Path, format: Format) -> Result<scjc::parser::Located, Fail> {
    let text = read(path)?;
    parse_program_in(&text, &path.display().to_string()).map_err(|d| {
        print_diags(&d, format);
        Fail(1, String::new())
    })
}

/// Parsed, checked and (when it has SCJ paragraphs) translated program,
/// with its last unparametrised process.
fn load_circus(path: &Path, format: Format) -> Result<(Program, Option<String>), Fail> {
    let l = load(path, format)?;
    let d = check_located(&l);
    if has_errors(&d) {
        print_diags(&d, format);
        return Err(Fail(1, String::new()));
    }
    if l.program.paragraphs.iter().any(Paragraph::is_scj) {
        let mut p = translate_program(&l.program).map_err(Fail::internal)?.program();
        let last = last_process(&p);
        p.paragraphs.extend(monolithic(&l.program));
        Ok((p, last))
    } else {
        let last = last_process(&l.program);
        Ok((l.program, last))
    }
}

fn refine_fail(e: RefineError) -> Fail {
    match e {
        RefineError::Sim(_) | RefineError::Unrecognized(..) => Fail::internal(e),
        e => Fail::user(e),
    }
}

fn last_process(p: &Program) -> Option<String> {
    p.paragraphs.iter().rev().find_map(|x| match x {
        Paragraph::Circus(CircusParagraph::Process(d)) if d.params.is_empty() => Some(d.name.clone()),
        _ => None,
    })
}

fn action_arg(s: &str) -> Result<scjc::ast::Action, Fail> {
    parse_action(s).map_err(|d| Fail::user(d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))
}

fn report_refinement(r: &RefinementResult, format: Format) -> u8 {
    match format {
        Format::Text => {
            if r.holds {
                println!("refinement holds{}", if r.partial { " (partial)" } else { "" });
            } else {
                println!("refinement fails");
                eprintln!("counterexample: <{}>", r.counterexample.clone().unwrap_or_default().join(", "));
            }
        }
        Format::Json => println!(
            "{}",
            json!({"holds": r.holds, "partial": r.partial, "counterexample": r.counterexample})
        ),
    }
    if r.holds {
        0
    } else {
        1
    }
}

fn rewrite(
    result: scjc::ast::Action,
    original: scjc::ast::Action,
    decls: Option<PathBuf>,
    verify: Option<usize>,
    format: Format,
) -> Out {
    let text = pretty::action(&result);
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", json!({"result": text})),
    }
    let Some(depth) = verify else { return Ok(0) };
    let decls = match decls {
        Some(p) => load(&p, format)?.program.paragraphs,
        None => Vec::new(),
    };
    let r = refine::check_actions(&decls, &original, &result, depth, &BTreeMap::new()).map_err(refine_fail)?;
    Ok(report_refinement(&r, format))
}

fn print_traces(t: &TraceSet, maximal: bool, format: Format) {
    let list: Vec<&Vec<String>> = if maximal { t.maximal() } else { t.traces.iter().collect() };
    match format {
        Format::Text => {
            for tr in &list {
                println!("<{}>", tr.join(", "));
            }
            if t.partial {
                println!("partial");
            }
        }
        Format::Json => println!("{}", json!({"traces": list, "partial": t.partial})),
    }
}

fn run(cli: Cli) -> Out {
    let format = cli.format;
    match cli.cmd {
        Cmd::Parse { file } => {
            let l = load(&file, format)?;
            match format {
                Format::Text => print!("{}", pretty::program(&l.program)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&l.program).unwrap()),
            }
            Ok(0)
        }
        Cmd::Check { file, consts } => {
            let l = load(&file, format)?;
            let mut d = check_located(&l);
            if !consts.is_empty() {
                d.extend(check_timing_located(&l, &consts.into_iter().collect()));
            }
            print_diags(&d, format);
            Ok(if has_errors(&d) { 1 } else { 0 })
        }
        Cmd::Translate { file, output, monolithic: mono } => {
            let l = load(&file, format)?;
            let d = check_located(&l);
            if has_errors(&d) {
                print_diags(&d, format);
                return Ok(1);
            }
            let t = translate_program(&l.program).map_err(Fail::internal)?;
            let mut p = t.program();
            if mono {
                p.paragraphs.extend(monolithic(&l.program));
            }
            let text = match format {
                Format::Text => pretty::program(&p),
                Format::Json => serde_json::to_string_pretty(&p).unwrap() + "\n",
            };
            match output {
                Some(o) => std::fs::write(&o, text).map_err(|e| Fail::internal(format!("{}: {e}", o.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Sim(SimCmd::Run { target, seed, max_ticks, priority, search }) => {
            let (p, _) = load_circus(&target.file, format)?;
            let model = Model::new(&p, &target.consts.into_iter().collect()).map_err(Fail::user)?;
            let sim = Sim::new(model, &target.main).map_err(Fail::user)?;
            let r = if search {
                match sim.search_violation(max_ticks).map_err(Fail::internal)? {
                    Some(r) => r,
                    None => {
                        match format {
                            Format::Text => println!("no deadline violation within {max_ticks} ticks"),
                            Format::Json => println!("{}", json!({"violation": null})),
                        }
                        return Ok(0);
                    }
                }
            } else {
                let policy = if priority.is_empty() { Policy::Random(seed) } else { Policy::Priority(priority) };
                sim.run(&policy, max_ticks)
            };
            match format {
                Format::Text => r.lines().iter().for_each(|l| println!("{l}")),
                Format::Json => {
                    let trace: Vec<_> = r.trace.iter().map(|(t, e)| json!({"clock": t, "event": e.to_string()})).collect();
                    println!("{}", json!({"trace": trace, "verdict": r.verdict}));
                }
            }
            Ok(if r.verdict.is_ok() { 0 } else { 1 })
        }
        Cmd::Sim(SimCmd::Traces { target, depth, untimed, maximal }) => {
            let (p, _) = load_circus(&target.file, format)?;
            let model = Model::new(&p, &target.consts.into_iter().collect()).map_err(Fail::user)?;
            let sim = Sim::new(model, &target.main).map_err(Fail::user)?;
            let t = if untimed { sim.untimed_traces(depth) } else { sim.traces(depth) };
            print_traces(&t, maximal, format);
            Ok(0)
        }
        Cmd::Refine(RefineCmd::Law1 { context, filler, c1, c2, decls, verify }) => {
            let ctx = action_arg(&context)?;
            let a = action_arg(&filler)?;
            let result = refine::apply_law1(&ctx, &a, &c1, &c2, &BTreeSet::new()).map_err(refine_fail)?;
            let original = scjc::ast::substitute(&ctx, &a).map_err(Fail::user)?;
            rewrite(result, original, decls, verify, format)
        }
        Cmd::Refine(RefineCmd::Law2 { target, b, branch, decls, verify }) => {
            let t = action_arg(&target)?;
            let result = refine::apply_law2(&t, &b, &action_arg(&branch)?).map_err(refine_fail)?;
            rewrite(result, t, decls, verify, format)
        }
        Cmd::Refine(RefineCmd::Check { spec, imp, spec_process, impl_process, depth, consts }) => {
            let (sp, slast) = load_circus(&spec, format)?;
            let (ip, ilast) = load_circus(&imp, format)?;
            let sn = spec_process.or(slast).ok_or_else(|| Fail::user("no process in spec"))?;
            let iname = impl_process.or(ilast).ok_or_else(|| Fail::user("no process in impl"))?;
            let r = refine::check_programs(&sp, &sn, &ip, &iname, depth, &consts.into_iter().collect())
                .map_err(refine_fail)?;
            Ok(report_refinement(&r, format))
        }
        Cmd::Frameworks(FwCmd::Dump { kind }) => {
            let d = kind.decl();
            match format {
                Format::Text => println!("{}", pretty::circus_paragraph(&CircusParagraph::Process(d))),
                Format::Json => println!("{}", serde_json::to_string_pretty(&d).unwrap()),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
