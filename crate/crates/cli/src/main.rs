use clap::Parser;

use expexp_cli::args::Cli;

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    expexp_cli::run(Cli::parse())
}
