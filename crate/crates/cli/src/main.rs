use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = admgraph::run_command(std::env::args_os());
    print!("{}", outcome.stdout);
    ExitCode::from(outcome.code)
}
