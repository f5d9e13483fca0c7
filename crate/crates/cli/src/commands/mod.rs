pub mod eval;
pub mod extract;
pub mod replay;
pub mod run;
pub mod validate;

pub use eval::{cmd_eval, EvalArgs};
pub use extract::{cmd_extract, ExtractArgs, MINER_CASSETTE};
pub use replay::{cmd_replay, ReplayArgs};
pub use run::{cmd_run, RunArgs};
pub use validate::{cmd_validate, ValidateArgs};
