//! Thin async client for the pass feasibility service.
//!
//! ```no_run
//! # async fn demo(req: passfeas_core::wire::ScenarioRequest) -> Result<(), passfeas_client::ClientError> {
//! let client = passfeas_client::FeasibilityClient::new("http://127.0.0.1:8080")?;
//! let res = client.evaluate(&req).await?;
//! println!("best receiver: {}", res.ranking[0]);
//! # Ok(())
//! # }
//! ```

use passfeas_core::wire::{
    EpvCombineRequest, EpvCombineResponse, ErrorBody, EvaluationResponse, MapsResponse, ScenarioRequest,
};
use reqwest::{StatusCode, Url};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid service url `{url}`: {message}")]
    Url { url: String, message: String },
    #[error("request to {url} failed: {source}")]
    Transport {
        url: Url,
        #[source]
        source: reqwest::Error,
    },
    /// The service answered with an error body.
    #[error("service returned {status}: {message}")]
    Status { status: StatusCode, message: String },
}

impl ClientError {
    /// HTTP status for service-side errors.
    pub fn status(&self) -> Option<StatusCode> {
        match self {
            ClientError::Status { status, .. } => Some(*status),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityClient {
    base: Url,
    http: reqwest::Client,
}

impl FeasibilityClient {
    pub fn new(base_url: &str) -> Result<Self, ClientError> {
        let bad = |message: String| ClientError::Url {
            url: base_url.to_string(),
            message,
        };
        let mut base = Url::parse(base_url).map_err(|e| bad(e.to_string()))?;
        if base.cannot_be_a_base() {
            return Err(bad("not a base url".into()));
        }
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        Ok(Self {
            base,
            http: reqwest::Client::new(),
        })
    }

    pub fn base_url(&self) -> &Url {
        &self.base
    }

    fn url(&self, path: &str) -> Url {
        self.base.join(path).expect("static relative path")
    }

    async fn finish<T: DeserializeOwned>(url: Url, res: Result<reqwest::Response, reqwest::Error>) -> Result<T, ClientError> {
        let transport = |source| ClientError::Transport { url: url.clone(), source };
        let res = res.map_err(transport)?;
        let status = res.status();
        if status.is_success() {
            return res.json().await.map_err(transport);
        }
        let text = res.text().await.map_err(transport)?;
        let message = serde_json::from_str::<ErrorBody>(&text).map(|b| b.error).unwrap_or(text);
        Err(ClientError::Status { status, message })
    }

    async fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T, ClientError> {
        let url = self.url(path);
        let res = self.http.post(url.clone()).json(body).send().await;
        Self::finish(url, res).await
    }

    /// `true` when `/health` answers 200.
    pub async fn health(&self) -> Result<bool, ClientError> {
        let url = self.url("health");
        let res = self
            .http
            .get(url.clone())
            .send()
            .await
            .map_err(|source| ClientError::Transport { url, source })?;
        Ok(res.status().is_success())
    }

    pub async fn maps(&self) -> Result<Vec<String>, ClientError> {
        let url = self.url("api/maps");
        let res = self.http.get(url.clone()).send().await;
        Self::finish::<MapsResponse>(url, res).await.map(|m| m.maps)
    }

    pub async fn evaluate(&self, request: &ScenarioRequest) -> Result<EvaluationResponse, ClientError> {
        self.post("api/evaluate", request).await
    }

    pub async fn epv_combine(&self, request: &EpvCombineRequest) -> Result<EpvCombineResponse, ClientError> {
        self.post("api/epv-combine", request).await
    }
}
