use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = progjohn::cli::run(std::env::args_os());
    if code != 0 && !out.starts_with('{') {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(code as u8)
}
