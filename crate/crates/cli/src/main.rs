use std::io::IsTerminal;

use simplex_priors_cli::{run, EXIT_OK};

fn main() {
    let stdout = std::io::stdout();
    let code = match run(std::env::args_os(), &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal() {
                eprintln!("\x1b[31m{}\x1b[0m: {e}", e.code());
            } else {
                eprintln!("{}: {e}", e.code());
            }
            e.exit_code()
        }
    };
    std::process::exit(code);
}
