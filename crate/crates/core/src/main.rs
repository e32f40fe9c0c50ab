use clap::Parser;

fn main() {
    let cli = opplearn::cli::Cli::parse();
    if let Err(err) = opplearn::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
