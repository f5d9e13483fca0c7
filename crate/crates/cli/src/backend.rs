//! Backend selection shared by `extract` and `run`.

use crate::CliError;
use chop_backends::{
    CassetteMode, CompletionBackend, HttpBackend, HttpConfig, RecordingBackend, ReplayBackend,
    ScriptedBackend,
};
use clap::ValueEnum;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Scripted,
    Replay,
    ReplayStrict,
    Record,
    Http,
}

#[derive(Debug, Clone)]
pub struct BackendOptions {
    pub kind: BackendKind,
    pub script: Option<PathBuf>,
    pub cassettes: Option<PathBuf>,
    pub base_url: Option<String>,
    pub model: String,
    pub api_key_env: String,
}

impl BackendOptions {
    fn cassette_file(&self, name: &str) -> Result<PathBuf, CliError> {
        let dir = self.cassettes.as_ref().ok_or_else(|| {
            CliError::Usage("--cassettes is required for replay and record backends".to_string())
        })?;
        Ok(dir.join(format!("{name}.json")))
    }

    fn scripted(&self) -> Result<ScriptedBackend, CliError> {
        let script = self.script.as_ref().ok_or_else(|| {
            CliError::Usage("--script is required for the scripted backend".to_string())
        })?;
        ScriptedBackend::from_file(script).map_err(|e| CliError::Infra(e.to_string()))
    }

    fn http(&self) -> Result<HttpBackend, CliError> {
        let base_url = self.base_url.clone().ok_or_else(|| {
            CliError::Usage("--base-url is required for the http backend".to_string())
        })?;
        HttpBackend::new(HttpConfig {
            base_url,
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
            ..HttpConfig::default()
        })
        .map_err(|e| CliError::Infra(e.to_string()))
    }

    /// The inner source a recorder wraps: scripted when a script is given,
    /// the live provider otherwise.
    fn record_inner(&self) -> Result<Box<dyn CompletionBackend>, CliError> {
        if self.script.is_some() {
            Ok(Box::new(self.scripted()?))
        } else {
            Ok(Box::new(self.http()?))
        }
    }

    /// Build the backend serving one cassette scope (`name` keys the
    /// cassette file under the cassette directory).
    pub fn build(&self, name: &str) -> Result<Arc<dyn CompletionBackend>, CliError> {
        match self.kind {
            BackendKind::Scripted => Ok(Arc::new(self.scripted()?)),
            BackendKind::Replay => {
                let file = self.cassette_file(name)?;
                Ok(Arc::new(load_replay(&file, CassetteMode::Replay)?))
            }
            BackendKind::ReplayStrict => {
                let file = self.cassette_file(name)?;
                Ok(Arc::new(load_replay(&file, CassetteMode::ReplayStrict)?))
            }
            BackendKind::Record => {
                let file = self.cassette_file(name)?;
                if let Some(parent) = file.parent() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| CliError::Infra(format!("{}: {e}", parent.display())))?;
                }
                Ok(Arc::new(RecordingBackend::new(self.record_inner()?, file)))
            }
            BackendKind::Http => Ok(Arc::new(self.http()?)),
        }
    }

    /// For `run`, scripted/record/http backends are shared across tasks;
    /// replay backends are per-task cassette files.
    pub fn per_task(&self) -> bool {
        matches!(
            self.kind,
            BackendKind::Replay | BackendKind::ReplayStrict | BackendKind::Record
        )
    }
}

fn load_replay(file: &Path, mode: CassetteMode) -> Result<ReplayBackend, CliError> {
    ReplayBackend::from_file(file, mode).map_err(|e| CliError::Infra(e.to_string()))
}
