use std::sync::{Condvar, Mutex};
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::{build_prompt, Generated, GenerationRequest, Generator, GeneratorError};
use crate::dsl::sha256_hex;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("environment variable `{0}` holding the API key is not set")]
    MissingApiKey(String),
    #[error("http error after {attempts} attempt(s): {message}")]
    Http {
        status: Option<u16>,
        attempts: u32,
        message: String,
    },
    #[error("malformed completion response: {0}")]
    Decode(String),
    #[error("reply contains an empty code block")]
    NoCodeBlock,
    #[error("empty reply")]
    EmptyReply,
}

fn default_api_key_env() -> String {
    "LAS_API_KEY".to_string()
}
fn default_temperature() -> f64 {
    0.7
}
fn default_timeout() -> u64 {
    120
}
fn default_retries() -> u32 {
    3
}
fn default_in_flight() -> usize {
    4
}
fn default_backoff_ms() -> u64 {
    1000
}

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmEndpointConfig {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    /// Base of the exponential backoff: attempt `k` waits `base * 2^k`, ±20%.
    #[serde(default = "default_backoff_ms")]
    pub backoff_base_ms: u64,
}

impl LlmEndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        LlmEndpointConfig {
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: default_api_key_env(),
            temperature: default_temperature(),
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            max_in_flight: default_in_flight(),
            backoff_base_ms: default_backoff_ms(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_in_flight == 0 {
            return Err("max_in_flight must be at least 1".into());
        }
        if self.base_url.is_empty() || self.model.is_empty() {
            return Err("base_url and model are required".into());
        }
        Ok(())
    }
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct Limiter {
    free: Mutex<usize>,
    cond: Condvar,
}

impl Limiter {
    fn new(n: usize) -> Self {
        Limiter {
            free: Mutex::new(n),
            cond: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().expect("limiter lock");
        while *free == 0 {
            free = self.cond.wait(free).expect("limiter lock");
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Limiter);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("limiter lock") += 1;
        self.0.cond.notify_one();
    }
}

/// Blocking chat-completions client; shareable across threads.
#[derive(Debug)]
pub struct LlmGenerator {
    config: LlmEndpointConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    limiter: Limiter,
}

impl LlmGenerator {
    /// Reads the API key from the configured environment variable.
    pub fn from_env(config: LlmEndpointConfig) -> Result<Self, LlmError> {
        let key = std::env::var(&config.api_key_env)
            .map_err(|_| LlmError::MissingApiKey(config.api_key_env.clone()))?;
        Self::with_api_key(config, key)
    }

    pub fn with_api_key(
        config: LlmEndpointConfig,
        api_key: impl Into<String>,
    ) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| LlmError::Http {
                status: None,
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(LlmGenerator {
            limiter: Limiter::new(config.max_in_flight.max(1)),
            config,
            api_key: api_key.into(),
            client,
        })
    }

    pub fn config(&self) -> &LlmEndpointConfig {
        &self.config
    }

    fn endpoint(&self) -> String {
        format!(
            "{}/chat/completions",
            self.config.base_url.trim_end_matches('/')
        )
    }

    fn backoff(&self, attempt: u32, rng: &mut ChaCha8Rng) -> Duration {
        let base = self.config.backoff_base_ms as f64 * 2f64.powi(attempt as i32);
        let jitter = rng.random_range(-0.2..=0.2);
        Duration::from_secs_f64((base * (1.0 + jitter)).max(0.0) / 1000.0)
    }

    /// Sends one user message; retries transport errors, 429 and 5xx with
    /// exponential backoff. Returns the reply content and the attempt count.
    pub fn chat(&self, prompt: &str, rng: &mut ChaCha8Rng) -> Result<(String, u32), LlmError> {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        });
        let _permit = self.limiter.acquire();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let (status, message) = match self
                .client
                .post(self.endpoint())
                .bearer_auth(&self.api_key)
                .json(&body)
                .send()
            {
                Ok(resp) if resp.status().is_success() => {
                    let text = resp.text().map_err(|e| LlmError::Decode(e.to_string()))?;
                    return Ok((parse_completion(&text)?, attempt));
                }
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    let retryable = status == 429 || status >= 500;
                    let message = format!("status {status}: {}", resp.text().unwrap_or_default());
                    if !retryable {
                        return Err(LlmError::Http {
                            status: Some(status),
                            attempts: attempt,
                            message,
                        });
                    }
                    (Some(status), message)
                }
                Err(e) => (None, e.to_string()),
            };
            if attempt > self.config.max_retries {
                return Err(LlmError::Http {
                    status,
                    attempts: attempt,
                    message,
                });
            }
            log::warn!("completion request failed ({message}); retrying");
            std::thread::sleep(self.backoff(attempt - 1, rng));
        }
    }
}

fn parse_completion(body: &str) -> Result<String, LlmError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| LlmError::Decode(e.to_string()))?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| LlmError::Decode("missing choices[0].message.content".into()))
}

/// Returns the first triple-backtick fenced region (language tag ignored),
/// or the whole trimmed reply when it has no fences.
pub fn extract_code_block(reply: &str) -> Result<String, LlmError> {
    if reply.trim().is_empty() {
        return Err(LlmError::EmptyReply);
    }
    let Some(open) = reply.find("```") else {
        return Ok(reply.trim().to_string());
    };
    let after = &reply[open + 3..];
    // Skip the info string up to the end of the fence line.
    let body = match after.find('\n') {
        Some(nl) if !after[..nl].contains("```") => &after[nl + 1..],
        _ => after,
    };
    let block = match body.find("```") {
        Some(close) => &body[..close],
        None => body,
    };
    let block = block.trim();
    if block.is_empty() {
        Err(LlmError::NoCodeBlock)
    } else {
        Ok(block.to_string())
    }
}

impl Generator for LlmGenerator {
    fn name(&self) -> &str {
        "llm"
    }

    fn generate(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Generated, GeneratorError> {
        let prompt = build_prompt(request.op, request.parents, request.task);
        let (reply, attempts) = self.chat(&prompt, rng)?;
        let code = extract_code_block(&reply)?;
        Ok(Generated {
            code,
            note: Some(format!(
                "model={} attempts={attempts} reply_sha256={}",
                self.config.model,
                sha256_hex(&reply)
            )),
        })
    }
}
