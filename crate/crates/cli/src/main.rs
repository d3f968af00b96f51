use std::io::Write;

fn main() {
    let (stdout, stderr, code) = nmlg_cli::execute(std::env::args_os());
    // A closed pipe on stdout is not worth a panic.
    let _ = std::io::stdout().lock().write_all(stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(stderr.as_bytes());
    std::process::exit(code);
}
