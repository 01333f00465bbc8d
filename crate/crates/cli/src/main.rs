use clap::Parser;
use kds_cli::{configure_threads, execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error[{}]: {e}", e.code());
        std::process::exit(e.exit_code());
    }
    let outcome = execute(&cli);
    if let Some(r) = &outcome.report {
        for line in &r.summary {
            println!("{line}");
        }
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
    }
    if let Some(e) = &outcome.error {
        eprintln!("error[{}]: {e}", e.code());
    }
    std::process::exit(outcome.exit_code);
}
