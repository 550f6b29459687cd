//! Command-line front-end for `stegograph`.
//!
//! ```text
//! stegograph encode   [OPTIONS] --payload P... COVER...
//! stegograph decode   [OPTIONS] STEGO...
//! stegograph capacity [OPTIONS] COVER...
//! stegograph analyze  [OPTIONS] [--compare A B] [IMAGE...]
//! ```
//!
//! Exit codes: 0 ok, 1 corrupt data or write failure, 2 bad input,
//! 3 insufficient capacity, 4 incomplete payload, 5 no stego image found.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

pub use args::{Cli, Command};
pub use commands::JobConfig;
pub use error::{exit, CliError};

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::INPUT
            } else {
                exit::OK
            };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match commands::execute(&cli, out, err) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
