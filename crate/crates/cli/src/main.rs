use clap::Parser;

fn main() {
    let cli = jch_cli::Cli::parse();
    std::process::exit(jch_cli::run(&cli));
}
