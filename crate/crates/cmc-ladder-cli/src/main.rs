use clap::Parser;

fn main() {
    let cli = cmc_ladder_cli::Cli::parse();
    let code = cmc_ladder_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
