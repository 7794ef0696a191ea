//! One HTTP chat client for every provider; providers differ only in
//! endpoint, headers and where the reply text sits in the response.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{BackendError, ChatContext, Origin, Player};

fn default_pointer() -> String {
    "/choices/0/message/content".into()
}
fn default_max_tokens() -> u32 {
    300
}
fn default_timeout() -> u64 {
    60
}
fn default_retries() -> u32 {
    3
}
fn default_backoff() -> u64 {
    500
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub name: String,
    pub endpoint: String,
    /// Header templates; `{key}` is replaced by the credential.
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    /// JSON pointer to the reply text in the response body.
    #[serde(default = "default_pointer")]
    pub response_pointer: String,
    /// Send system messages as a top-level field instead of in the list.
    #[serde(default)]
    pub system_field: Option<String>,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    /// Minimum spacing between requests to this provider.
    #[serde(default)]
    pub min_interval_ms: u64,
}

impl ProviderConfig {
    pub fn key_var(&self) -> String {
        let up: String =
            self.name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' }).collect();
        format!("CLEM_API_KEY_{up}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiConfig {
    pub providers: Vec<ProviderConfig>,
}

impl ApiConfig {
    pub fn provider(&self, name: &str) -> Option<&ProviderConfig> {
        self.providers.iter().find(|p| p.name == name)
    }
}

/// Spaces requests at least `interval` apart; shared across clones.
#[derive(Debug, Clone)]
pub struct RateLimiter {
    interval: Duration,
    last: Arc<Mutex<Option<Instant>>>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        RateLimiter { interval, last: Arc::new(Mutex::new(None)) }
    }

    pub fn wait(&self) {
        let mut last = self.last.lock().expect("rate limiter lock");
        if let Some(prev) = *last {
            let ready = prev + self.interval;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        *last = Some(Instant::now());
    }
}

pub struct ApiPlayer {
    provider: ProviderConfig,
    model: String,
    key: Option<String>,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

/// Chat-style message list; consecutive messages from the same side merge.
pub fn build_messages(context: &ChatContext) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for m in &context.messages {
        let role = match m.origin {
            Origin::System => "system",
            Origin::Own => "assistant",
            Origin::Other => "user",
        };
        match out.last_mut() {
            Some((r, text)) if r == role => {
                text.push_str("\n\n");
                text.push_str(&m.text);
            }
            _ => out.push((role.to_string(), m.text.clone())),
        }
    }
    out
}

impl ApiPlayer {
    pub fn new(provider: ProviderConfig, model: &str, key: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(provider.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let limiter = RateLimiter::new(Duration::from_millis(provider.min_interval_ms));
        ApiPlayer { provider, model: model.to_string(), key, agent, limiter }
    }

    /// Reads the credential from `CLEM_API_KEY_<PROVIDER>` when present.
    pub fn from_config(cfg: &ApiConfig, provider: &str, model: &str) -> Result<Self, BackendError> {
        let p = cfg.provider(provider).ok_or_else(|| BackendError::Config(format!("unknown provider `{provider}`")))?;
        let key = std::env::var(p.key_var()).ok();
        Ok(Self::new(p.clone(), model, key))
    }

    pub fn request_body(&self, context: &ChatContext) -> Value {
        let mut messages = build_messages(context);
        let mut body = json!({
            "model": self.model,
            "temperature": 0,
            "max_tokens": self.provider.max_tokens,
        });
        if let Some(field) = &self.provider.system_field {
            let system: Vec<String> = messages.iter().filter(|(r, _)| r == "system").map(|(_, t)| t.clone()).collect();
            messages.retain(|(r, _)| r != "system");
            if !system.is_empty() {
                body[field] = Value::String(system.join("\n\n"));
            }
        }
        body["messages"] =
            messages.into_iter().map(|(role, content)| json!({"role": role, "content": content})).collect();
        body
    }

    fn attempt(&self, body: &Value) -> Result<String, BackendError> {
        self.limiter.wait();
        let mut req = self.agent.post(&self.provider.endpoint).header("content-type", "application/json");
        for (k, v) in &self.provider.headers {
            let v = match (&self.key, v.contains("{key}")) {
                (Some(key), true) => v.replace("{key}", key),
                (None, true) => {
                    return Err(BackendError::AuthFailure(format!("{} is not set", self.provider.key_var())))
                }
                _ => v.clone(),
            };
            req = req.header(k.as_str(), v.as_str());
        }
        let mut resp = req.send_json(body).map_err(|e| match e {
            ureq::Error::Timeout(_) => BackendError::Timeout(e.to_string()),
            other => BackendError::Transport(other.to_string()),
        })?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| BackendError::Transport(e.to_string()))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(BackendError::AuthFailure(format!("HTTP {status}"))),
            429 => return Err(BackendError::RateLimited(format!("HTTP {status}"))),
            500..=599 => return Err(BackendError::Transport(format!("HTTP {status}"))),
            _ => return Err(BackendError::Protocol(format!("HTTP {status}: {text}"))),
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| BackendError::Protocol(e.to_string()))?;
        v.pointer(&self.provider.response_pointer)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| BackendError::Protocol(format!("no text at {}", self.provider.response_pointer)))
    }
}

impl Player for ApiPlayer {
    fn descriptor(&self) -> String {
        format!("api:{}/{}", self.provider.name, self.model)
    }

    fn complete(&mut self, context: &ChatContext) -> Result<String, BackendError> {
        let body = self.request_body(context);
        let mut delay = Duration::from_millis(self.provider.backoff_ms);
        let mut tries = 0;
        loop {
            match self.attempt(&body) {
                Err(e) if e.retryable() && tries < self.provider.retries => {
                    tries += 1;
                    thread::sleep(delay);
                    delay *= 2;
                }
                other => return other,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    fn provider(endpoint: String) -> ProviderConfig {
        serde_json::from_value(json!({
            "name": "stub",
            "endpoint": endpoint,
            "headers": {"authorization": "Bearer {key}"},
            "retries": 2,
            "backoff_ms": 1,
            "timeout_secs": 5
        }))
        .unwrap()
    }

    /// Serves the given status codes in turn, capturing request bodies.
    fn stub(statuses: Vec<u16>) -> (String, thread::JoinHandle<Vec<(String, Value)>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat", listener.local_addr().unwrap());
        let h = thread::spawn(move || {
            let mut seen = Vec::new();
            for status in statuses {
                let (mut sock, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(sock.try_clone().unwrap());
                let mut len = 0;
                let mut auth = String::new();
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    let l = line.trim_end().to_ascii_lowercase();
                    if l.is_empty() {
                        break;
                    }
                    if let Some(v) = l.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    if l.starts_with("authorization:") {
                        auth = line.trim_end()["authorization:".len()..].trim().to_string();
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                seen.push((auth, serde_json::from_slice(&buf).unwrap()));
                let body = r#"{"choices":[{"message":{"content":"CLUE: a stub"}}]}"#;
                let resp = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                sock.write_all(resp.as_bytes()).unwrap();
            }
            seen
        });
        (url, h)
    }

    fn context() -> ChatContext {
        let mut c = ChatContext::default();
        c.push(Origin::Other, "rules");
        c.push(Origin::Other, "more rules");
        c.push(Origin::Own, "ok");
        c
    }

    #[test]
    fn body_carries_model_and_zero_temperature() {
        let (url, h) = stub(vec![200]);
        let mut p = ApiPlayer::new(provider(url), "model-x", Some("secret".into()));
        assert_eq!(p.complete(&context()).unwrap(), "CLUE: a stub");
        let seen = h.join().unwrap();
        let (auth, body) = &seen[0];
        assert_eq!(auth, "Bearer secret");
        assert_eq!(body["model"], "model-x");
        assert_eq!(body["temperature"], 0);
        assert_eq!(body["messages"].as_array().unwrap().len(), 2);
        assert_eq!(body["messages"][0]["content"], "rules\n\nmore rules");
    }

    #[test]
    fn retries_server_errors() {
        let (url, h) = stub(vec![500, 429, 200]);
        let mut p = ApiPlayer::new(provider(url), "m", Some("k".into()));
        assert_eq!(p.complete(&context()).unwrap(), "CLUE: a stub");
        assert_eq!(h.join().unwrap().len(), 3);
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let (url, h) = stub(vec![401]);
        let mut p = ApiPlayer::new(provider(url), "m", Some("k".into()));
        assert!(matches!(p.complete(&context()), Err(BackendError::AuthFailure(_))));
        h.join().unwrap();
    }

    #[test]
    fn unreachable_host_fails_after_retries() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        drop(listener);
        let mut p = ApiPlayer::new(provider(url), "m", Some("k".into()));
        let err = p.complete(&context()).unwrap_err();
        assert!(err.retryable(), "{err:?}");
    }

    #[test]
    fn missing_key_is_an_auth_failure() {
        let mut p = ApiPlayer::new(provider("http://127.0.0.1:9/".into()), "m", None);
        assert!(matches!(p.complete(&context()), Err(BackendError::AuthFailure(_))));
    }

    #[test]
    fn key_variable_name() {
        assert_eq!(provider(String::new()).key_var(), "CLEM_API_KEY_STUB");
    }

    #[test]
    fn rate_limiter_spaces_calls() {
        let l = RateLimiter::new(Duration::from_millis(30));
        let t = Instant::now();
        l.wait();
        l.wait();
        assert!(t.elapsed() >= Duration::from_millis(30));
    }
}
