use clap::Parser;
use gibbs_cli::{configure_threads, execute, Cli};

fn main() {
    let cli = Cli::parse();
    let code = configure_threads().and_then(|()| execute(&cli)).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    std::process::exit(code);
}
