//! HTTP provider backend speaking the OpenAI-style chat-completions
//! contract. Generation parameters are pinned for reproducibility:
//! temperature 0.0, maximum output length 4096.

use crate::{BackendError, BackendRequest, CompletionBackend};
use serde::Deserialize;
use std::time::Duration;

pub const TEMPERATURE: f64 = 0.0;
pub const MAX_OUTPUT_TOKENS: u32 = 4096;

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Provider base URL, e.g. `https://api.example.com/v1`.
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer credential.
    /// Empty means the provider needs no auth header.
    pub api_key_env: String,
    /// Additional attempts after the first failure.
    pub max_retries: u32,
    pub timeout_secs: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            base_url: String::new(),
            model: "gpt-4o".to_string(),
            api_key_env: "CHOP_API_KEY".to_string(),
            max_retries: 2,
            timeout_secs: 120,
        }
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    agent: ureq::Agent,
    bearer: Option<String>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        let bearer = if config.api_key_env.is_empty() {
            None
        } else {
            match std::env::var(&config.api_key_env) {
                Ok(key) => Some(key),
                Err(_) => {
                    return Err(BackendError::MissingCredential {
                        var: config.api_key_env.clone(),
                    });
                }
            }
        };
        let agent_config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(true)
            .build();
        Ok(Self {
            config,
            agent: agent_config.into(),
            bearer,
        })
    }

    fn attempt(&self, prompt: &str) -> Result<String, String> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": self.config.model,
            "temperature": TEMPERATURE,
            "max_tokens": MAX_OUTPUT_TOKENS,
            "messages": [{ "role": "user", "content": prompt }],
        })
        .to_string();

        let mut request = self.agent.post(&url).header("content-type", "application/json");
        if let Some(key) = &self.bearer {
            request = request.header("authorization", &format!("Bearer {key}"));
        }

        let mut response = request.send(body.as_str()).map_err(|e| e.to_string())?;
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| format!("reading response body: {e}"))?;
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| format!("malformed provider response: {e}"))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| "provider returned no choices".to_string())
    }
}

impl CompletionBackend for HttpBackend {
    fn complete(&self, req: &BackendRequest) -> Result<String, BackendError> {
        if req.prompt.trim().is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        let mut last_error = String::new();
        let mut attempts = 0;
        while attempts <= self.config.max_retries {
            attempts += 1;
            match self.attempt(&req.prompt) {
                Ok(response) => return Ok(response),
                Err(detail) => last_error = detail,
            }
        }
        Err(BackendError::Transport {
            attempts,
            detail: last_error,
        })
    }
}
