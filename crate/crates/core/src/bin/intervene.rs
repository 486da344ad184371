use clap::Parser;
use intervene::cli::{self, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Cli::parse();
    if let Err(e) = cli::run(&args, &mut std::io::stdout().lock()) {
        eprintln!("error: {e}");
        std::process::exit(cli::exit_code(&e));
    }
}
