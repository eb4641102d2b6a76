use clap::Parser;

fn main() {
    let cli = halflap::cli::Cli::parse();
    std::process::exit(halflap::cli::run(cli));
}
