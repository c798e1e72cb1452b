use std::io::Write;

fn main() {
    let (code, out) = twisted_ccr::cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{out}");
    std::process::exit(code);
}
