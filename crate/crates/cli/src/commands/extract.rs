//! `chop extract`: run the mining pipeline over a trajectory corpus and
//! write the basis-subtask library.

use crate::backend::BackendOptions;
use crate::CliError;
use chop_miner::{
    load_corpus, mine_library, save_library, LibraryOverlay, MinerConfig, SynonymTable, VerbLexicon,
};
use std::path::PathBuf;

pub const MINER_CASSETTE: &str = "miner_summaries";

#[derive(Debug, clap::Args)]
pub struct ExtractArgs {
    /// Trajectory corpus (JSON list of records).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Synonym table data file.
    #[arg(long)]
    pub synonyms: PathBuf,
    /// Verb lexicon data file.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Library overlay config (names, arities, batching flags).
    #[arg(long)]
    pub overlay: PathBuf,
    /// Output library file.
    #[arg(long)]
    pub out: PathBuf,
    /// Basis subtasks to retain (top-k by frequency).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Minimum steps per demonstration.
    #[arg(long = "min-steps", default_value_t = 3)]
    pub min_steps: usize,
    #[command(flatten)]
    pub backend: crate::BackendArgs,
}

pub fn cmd_extract(args: &ExtractArgs) -> Result<(), CliError> {
    if args.k < 1 {
        return Err(CliError::Usage("--k must be >= 1".to_string()));
    }
    if args.min_steps < 1 {
        return Err(CliError::Usage("--min-steps must be >= 1".to_string()));
    }
    let records = load_corpus(&args.corpus).map_err(|e| CliError::Validation(e.to_string()))?;
    let lexicon = VerbLexicon::from_file(&args.lexicon).map_err(|e| CliError::Validation(e.to_string()))?;
    let table = SynonymTable::from_file(&args.synonyms).map_err(|e| CliError::Validation(e.to_string()))?;
    let overlay = LibraryOverlay::from_file(&args.overlay).map_err(|e| CliError::Validation(e.to_string()))?;

    let options: BackendOptions = args.backend.to_options();
    let backend = options.build(MINER_CASSETTE)?;

    let config = MinerConfig {
        min_steps: args.min_steps,
        top_k: args.k,
    };
    let (library, clusters) = mine_library(&records, &config, &lexicon, &table, &overlay, &*backend)
        .map_err(|e| CliError::Infra(e.to_string()))?;

    save_library(&library, &args.out).map_err(|e| CliError::Infra(e.to_string()))?;

    println!("{:<24} {:>9} members", "cluster", "frequency");
    for cluster in &clusters {
        println!(
            "{:<24} {:>9} {}",
            cluster.canonical_verb,
            cluster.frequency,
            cluster
                .members
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    println!(
        "library: {} subtasks written to {}",
        library.len(),
        args.out.display()
    );
    Ok(())
}
