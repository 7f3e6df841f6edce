use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = jetham::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let out = jetham::run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    ExitCode::from(out.code as u8)
}
