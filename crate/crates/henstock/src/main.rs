use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = henstock::cli::dispatch(&args, &mut out);
    out.flush().ok();
    std::process::exit(code);
}
