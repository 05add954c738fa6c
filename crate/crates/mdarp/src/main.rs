use clap::Parser;

#[derive(Parser)]
#[command(name = "mdarp", version, about = "Modular dial-a-ride solver toolkit")]
struct Cli {}

fn main() -> anyhow::Result<()> {
    let _cli = Cli::parse();
    Ok(())
}
