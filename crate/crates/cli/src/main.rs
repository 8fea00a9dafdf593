use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctxtt::frontend::{print, Severity};
use ctxtt::harness::{self, Config};
use ctxtt::reduce::{Redex, TraceStep};
use ctxtt::{ErasedCtx, Kernel, Session, Status, DEFAULT_FUEL};

#[derive(Parser)]
#[command(name = "kernel", version, about = "Checks and runs programs of the contextual type theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Reduction steps allowed per item.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Print every reduction step to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Print diagnostics as JSON, one object per line.
    #[arg(long, global = true)]
    json: bool,
    /// Continue after the first failing item.
    #[arg(long, global = true)]
    keep_going: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Typecheck a file and print the results of its `#eval` items.
    Eval { file: PathBuf },
    /// Run the property harness on generated terms.
    Harness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Run against a deliberately broken kernel.
        #[arg(long, value_enum, hide = true)]
        mutant: Option<Mutant>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutant {
    SkipEta,
}

fn trace_line(step: &TraceStep) {
    let redex = match &step.redex {
        Redex::Comp(t) => print::comp(t),
        Redex::Lf(m) => print::lf_term_in(&[], &ErasedCtx::empty(), m),
    };
    eprintln!("[{}] {redex}", step.rule.name());
}

fn kernel(opts: &Opts) -> Kernel {
    let mut k = Kernel::with_fuel(opts.fuel);
    if opts.trace {
        k.set_trace(trace_line);
    }
    k
}

/// Runs one file and prints its diagnostics; infos only when `show_info`.
fn run_file(opts: &Opts, path: &PathBuf, show_info: bool) -> Status {
    let file = path.display().to_string();
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{file}: {e}");
            return Status::Resource;
        }
    };
    let mut session = Session::new(kernel(opts));
    let report = session.run(&src, opts.keep_going);
    for d in &report.diagnostics {
        if d.severity == Severity::Info && !show_info {
            continue;
        }
        if opts.json {
            println!("{}", serde_json::to_string(d).expect("diagnostics serialize"));
        } else if d.severity == Severity::Info {
            println!("{}", d.message);
        } else {
            println!("{}", d.render(&file, &src));
        }
    }
    report.status
}

fn run_harness(opts: &Opts, seed: u64, count: usize, mutant: Option<Mutant>) -> Status {
    let cfg = Config { seed, count, skip_eta: matches!(mutant, Some(Mutant::SkipEta)), fuel: opts.fuel };
    let report = harness::run(&cfg);
    if opts.json {
        println!("{}", serde_json::to_string(&report).expect("reports serialize"));
    } else {
        for s in &report.suites {
            let verdict = if s.failures.is_empty() { "pass" } else { "FAIL" };
            println!("{:<20} {verdict} {}/{}", s.name, s.cases - s.failures.len(), s.cases);
            for f in &s.failures {
                println!("  case {} (seed {}, depth {}): {}", f.case, f.seed, f.depth, f.message);
                println!("    {}", f.witness);
            }
        }
        if report.suites.is_empty() {
            println!("no cases");
        }
    }
    if report.passed() {
        Status::Ok
    } else {
        Status::CheckFailed
    }
}

fn run(cli: Cli) -> Status {
    let opts = &cli.opts;
    match &cli.command {
        Command::Check { files } => files.iter().map(|f| run_file(opts, f, false)).max().unwrap_or(Status::Ok),
        Command::Eval { file } => run_file(opts, file, true),
        Command::Harness { seed, count, mutant } => run_harness(opts, *seed, *count, *mutant),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Deeply nested terms recurse deeply; give the kernel room.
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(move || run(cli));
    let status = match worker.map(|h| h.join()) {
        Ok(Ok(status)) => status,
        _ => {
            eprintln!("kernel: internal error");
            Status::Resource
        }
    };
    ExitCode::from(status.exit_code() as u8)
}
