//! Stateless JSON-over-HTTP service.
//!
//! Every response is a pure function of its request body. Malformed JSON is
//! answered with 400; any language-level failure (template, compile or
//! runtime error) with 422 and a diagnostics payload.

use std::num::NonZeroU64;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequest, Request};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use natprog_core::interpreter::{self, ScriptedInput, DEFAULT_STEP_LIMIT};
use natprog_core::templates::{self, TemplateInstance};
use natprog_core::{codegen, nlg, Diagnostic};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub const MAX_BODY_BYTES: usize = 1 << 20;

/// Upper bound on a requested step limit.
pub const MAX_STEP_LIMIT: u64 = DEFAULT_STEP_LIMIT;

pub fn router() -> Router {
    Router::new()
        .route("/api/templates", get(list_templates))
        .route("/api/generate", post(generate))
        .route("/api/compile", post(compile))
        .route("/api/run", post(run))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(CorsLayer::permissive())
}

/// JSON body parsed without content-type negotiation. Any parse or shape
/// failure is a 400.
pub struct JsonBody<T>(pub T);

#[derive(Debug, Serialize)]
struct BadRequest {
    ok: bool,
    error: String,
}

impl<S, T> FromRequest<S> for JsonBody<T>
where
    S: Send + Sync,
    T: DeserializeOwned,
{
    type Rejection = Response;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(IntoResponse::into_response)?;
        serde_json::from_slice(&bytes).map(JsonBody).map_err(|e| {
            let body = BadRequest {
                ok: false,
                error: format!("malformed request: {e}"),
            };
            (StatusCode::BAD_REQUEST, Json(body)).into_response()
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerateRequest {
    pub template_instance: TemplateInstance,
    #[serde(default)]
    pub context: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerateResponse {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompileRequest {
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompileResponse {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_source: Option<String>,
    /// Canonical realization of the parsed program.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub natural_source_echo: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRequest {
    pub source: String,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub step_limit: Option<NonZeroU64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunResponse {
    pub ok: bool,
    pub outputs: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_error: Option<Diagnostic>,
}

fn respond<T: Serialize>(ok: bool, body: T) -> Response {
    let status = if ok {
        StatusCode::OK
    } else {
        StatusCode::UNPROCESSABLE_ENTITY
    };
    (status, Json(body)).into_response()
}

async fn list_templates() -> Response {
    Json(templates::catalog()).into_response()
}

pub fn generate_response(req: &GenerateRequest) -> GenerateResponse {
    let context = req.context.as_deref().unwrap_or("");
    match templates::generate_in_source(&req.template_instance, context) {
        Ok(text) => GenerateResponse {
            ok: true,
            text: Some(text),
            diagnostics: Vec::new(),
        },
        Err(diagnostics) => GenerateResponse {
            ok: false,
            text: None,
            diagnostics,
        },
    }
}

pub fn compile_response(req: &CompileRequest) -> CompileResponse {
    match natprog_core::compile(&req.source) {
        Ok(checked) => CompileResponse {
            ok: true,
            diagnostics: Vec::new(),
            target_source: Some(codegen::emit_target(&checked).source_text),
            natural_source_echo: Some(nlg::realize_program(checked.program())),
        },
        Err(diagnostics) => CompileResponse {
            ok: false,
            diagnostics,
            target_source: None,
            natural_source_echo: None,
        },
    }
}

pub fn run_response(req: &RunRequest) -> RunResponse {
    let checked = match natprog_core::compile(&req.source) {
        Ok(c) => c,
        Err(diagnostics) => {
            return RunResponse {
                ok: false,
                outputs: Vec::new(),
                diagnostics,
                runtime_error: None,
            }
        }
    };
    let limit = req
        .step_limit
        .map_or(DEFAULT_STEP_LIMIT, |n| n.get().min(MAX_STEP_LIMIT));
    let mut inputs = ScriptedInput::new(req.inputs.iter().cloned());
    let result = interpreter::run(&checked, &mut inputs, limit);
    RunResponse {
        ok: result.is_ok(),
        outputs: result.outputs,
        diagnostics: Vec::new(),
        runtime_error: result.runtime_error,
    }
}

async fn generate(JsonBody(req): JsonBody<GenerateRequest>) -> Response {
    let body = generate_response(&req);
    respond(body.ok, body)
}

async fn compile(JsonBody(req): JsonBody<CompileRequest>) -> Response {
    let body = tokio::task::spawn_blocking(move || compile_response(&req)).await;
    match body {
        Ok(body) => respond(body.ok, body),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

async fn run(JsonBody(req): JsonBody<RunRequest>) -> Response {
    let body = tokio::task::spawn_blocking(move || run_response(&req)).await;
    match body {
        Ok(body) => respond(body.ok, body),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

pub async fn serve(host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("natprog service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
