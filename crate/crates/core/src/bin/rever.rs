use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rever::bridge::{serve, serve_tcp, Bridge};
use rever::debugger::{Action, Key, Mode, Session, DEFAULT_MAX_STEPS};
use rever::parser::{parse_program, parse_query, SourceProgram};

#[derive(Parser)]
#[command(name = "rever", version, about = "Reversible debugger for definite logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show every port from the first call.
    Trace(Run),
    /// Run silently until an `rtrace` goal, an answer or a failure.
    Debug(Run),
    /// Speak the JSON line protocol on stdio or a local TCP port.
    Serve(Serve),
}

#[derive(Args)]
struct Engine {
    /// Engine steps one command may take.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Unify without the occurs check.
    #[arg(long)]
    no_occurs_check: bool,
}

#[derive(Args)]
struct Run {
    program: PathBuf,
    query: String,
    #[command(flatten)]
    engine: Engine,
}

#[derive(Args)]
struct Serve {
    /// Use standard input and output (the default).
    #[arg(long, conflicts_with = "listen")]
    stdio: bool,
    /// Listen on 127.0.0.1 at this port.
    #[arg(long)]
    listen: Option<u16>,
    #[command(flatten)]
    engine: Engine,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Trace(run) => interact(run, Mode::Trace),
        Command::Debug(run) => interact(run, Mode::Debug),
        Command::Serve(s) => bridge(s),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rever: {e}");
            ExitCode::FAILURE
        }
    }
}

fn interact(run: Run, mode: Mode) -> io::Result<ExitCode> {
    let source = SourceProgram::read(&run.program)?;
    let program = match parse_program(&source) {
        Ok(p) => p.with_occurs_check(!run.engine.no_occurs_check),
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(2));
        }
    };
    let query = match parse_query(&run.query) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(2));
        }
    };
    let mut session = Session::start(program, query, mode).with_max_steps(run.engine.max_steps);
    let stdout = io::stdout();
    let mut out = stdout.lock();

    if !show(&mut out, session.handle_key(&Key::Down))? {
        return Ok(ExitCode::SUCCESS);
    }
    for line in io::stdin().lock().lines() {
        let key = Key::from_input(&line?);
        if !show(&mut out, session.handle_key(&key))? {
            break;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Prints the result of a key press; false once the session is over.
fn show(out: &mut impl Write, action: Action) -> io::Result<bool> {
    match action {
        Action::Show(lines) => write_lines(out, &lines)?,
        Action::Stopped { lines, halt } => {
            write_lines(out, &lines)?;
            eprintln!("% {halt}");
        }
        Action::Hint(hint) => eprintln!("% {hint}"),
        Action::Quit => return Ok(false),
    }
    out.flush()?;
    Ok(true)
}

fn write_lines(out: &mut impl Write, lines: &[String]) -> io::Result<()> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn bridge(s: Serve) -> io::Result<ExitCode> {
    let make = || {
        Bridge::new()
            .with_max_steps(s.engine.max_steps)
            .with_occurs_check(!s.engine.no_occurs_check)
    };
    match s.listen {
        Some(port) => {
            let listener = TcpListener::bind(("127.0.0.1", port))?;
            eprintln!("% listening on {}", listener.local_addr()?);
            serve_tcp(listener, make)?;
        }
        None => {
            let stdin = io::stdin();
            serve(&mut make(), BufReader::new(stdin.lock()), io::stdout().lock())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
