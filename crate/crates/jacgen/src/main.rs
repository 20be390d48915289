use clap::Parser;

fn main() {
    env_logger::init();
    let cli = jacgen::cli::Cli::parse();
    std::process::exit(jacgen::cli::run(cli));
}
