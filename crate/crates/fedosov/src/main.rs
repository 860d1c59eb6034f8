use clap::Parser;

fn main() {
    let cfg = fedosov::cli::JobConfig::parse();
    let mut stdout = std::io::stdout().lock();
    let code = fedosov::cli::run(&cfg, &mut stdout);
    std::process::exit(code);
}
