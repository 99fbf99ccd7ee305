use clap::Parser;

fn main() {
    let cli = rtm_cli::Cli::parse();
    if let Err(e) = rtm_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
