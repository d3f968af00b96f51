//! Command-line front end for `nmlg-core`: argument parsing, the `verify`
//! suite and the JSON, CSV and human output formats.

pub mod args;
pub mod checks;
pub mod commands;
pub mod error;
pub mod input;
pub mod oracle;
pub mod output;

use clap::Parser;

pub use args::Cli;
pub use error::CliError;

/// Parses `argv`, runs the command and returns what to print and the exit
/// code. Output is fully rendered before anything is written, so a failing
/// run prints only its diagnostic.
pub fn execute<I, T>(argv: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (text, String::new(), 0) } else { (String::new(), text, code) };
        }
    };
    if let Some(threads) = cli.global.threads {
        // A second initialization (only possible in-process) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads as usize).build_global();
    }
    match commands::run(&cli) {
        Ok(outcome) => (outcome.report.render(cli.global.format), String::new(), outcome.exit_code),
        Err(e) => (String::new(), format!("error: {e}\n"), e.exit_code()),
    }
}
