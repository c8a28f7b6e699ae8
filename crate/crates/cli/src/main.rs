use clap::Parser;

fn main() {
    let cli = qkorovkin_cli::Cli::parse();
    std::process::exit(qkorovkin_cli::run(cli));
}
