use clap::Parser;

fn main() {
    let cli = robinc::Cli::parse();
    std::process::exit(robinc::run(cli));
}
