use clap::Parser;

fn main() {
    let cli = caloop::cli::Cli::parse();
    std::process::exit(caloop::cli::run(cli));
}
