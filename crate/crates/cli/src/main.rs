use clap::Parser;

fn main() {
    // clap exits with status 2 on usage errors
    let cli = cml_cli::Cli::parse();
    let code = cml_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
