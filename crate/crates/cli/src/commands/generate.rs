use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use crate::inputs::{self, GeneratorArgs, Kind};
use crate::output::{emit, write_text};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &GenerateArgs) -> Result<()> {
    let instance = inputs::generate(args.kind, &args.generator, args.seed)?;
    let json = instance.to_json()? + "\n";
    let summary = format!("{}\t{} edges", instance.label(), instance.n_edges());
    match &args.out {
        Some(path) => {
            write_text(path, &json)?;
            emit(&format!("{summary}\n"))?;
        }
        None => {
            emit(&json)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}
