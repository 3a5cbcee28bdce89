use clap::Parser;
use lieinv::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let argv = std::iter::once("lieinv".to_string()).chain(std::env::args().skip(1)).collect();
    let out = run(&cli, argv);
    println!("{}", out.report.to_json());
    eprintln!("{}", out.summary);
    std::process::exit(out.report.exit_code());
}
