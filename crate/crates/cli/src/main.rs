use clap::Parser;
use qsd_cli::{run, Args, RunConfig};

fn main() {
    let code = match RunConfig::resolve(Args::parse()).and_then(|c| run(&c)) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
