use clap::Parser;

use browfiber_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut err = std::io::stderr();
    if let Err(e) = run(&cli, &mut err) {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
