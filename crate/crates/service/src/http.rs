//! axum routes for the `/v1` protocol.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tokio::net::TcpListener;

use crate::service::{Outcome, Registered, ServiceError, VerifierService};
use crate::wire::{
    CommitRequest, CommitResponse, RegisterRequest, RegisterResponse, RespondRequest,
    StartRequest,
};

type Shared = Arc<VerifierService>;

pub fn router(svc: Shared) -> Router {
    let mut app = Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/register", post(register))
        .route("/v1/session", post(start_session))
        .route("/v1/session/{id}/commit", post(commit))
        .route("/v1/session/{id}/respond", post(respond));
    if let Some(dir) = &svc.config().app_dir {
        app = app.nest_service("/app", tower_http::services::ServeDir::new(dir));
    }
    app.with_state(svc)
}

/// Binds `addr` and serves until the task is dropped.
pub async fn serve(svc: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    serve_on(svc, listener).await
}

pub async fn serve_on(svc: Shared, listener: TcpListener) -> std::io::Result<()> {
    tracing::info!(addr = %listener.local_addr()?, "verifier listening");
    axum::serve(listener, router(svc)).await
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).expect("valid status");
        (status, Json(self.body())).into_response()
    }
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::Malformed(format!("request body: {e}")))
}

async fn finish<T: Serialize>(svc: &VerifierService, out: Outcome<T>) -> Response {
    if !out.delay.is_zero() {
        svc.clock().sleep(out.delay).await;
    }
    match out.result {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn register(State(svc): State<Shared>, body: Bytes) -> Response {
    let req: RegisterRequest = match parse(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    match svc.register(&req) {
        Ok(outcome) => {
            let status = match outcome {
                Registered::Created => StatusCode::CREATED,
                Registered::AlreadyPresent => StatusCode::OK,
            };
            let body = RegisterResponse {
                status: "created".into(),
            };
            (status, Json(body)).into_response()
        }
        Err(e) => e.into_response(),
    }
}

async fn start_session(State(svc): State<Shared>, body: Bytes) -> Response {
    match parse::<StartRequest>(&body) {
        Ok(req) => {
            let out = svc.start_session(&req.login);
            finish(&svc, out).await
        }
        Err(e) => e.into_response(),
    }
}

async fn commit(State(svc): State<Shared>, Path(id): Path<String>, body: Bytes) -> Response {
    match parse::<CommitRequest>(&body) {
        Ok(req) => {
            let out = svc.submit_commitment(&id, &req.h);
            let out = Outcome {
                result: out.result.map(|c| CommitResponse { b: c.b.as_u8() }),
                delay: out.delay,
            };
            finish(&svc, out).await
        }
        Err(e) => e.into_response(),
    }
}

async fn respond(State(svc): State<Shared>, Path(id): Path<String>, body: Bytes) -> Response {
    match parse::<RespondRequest>(&body) {
        Ok(req) => {
            let out = svc.submit_response(&id, &req.chi);
            finish(&svc, out).await
        }
        Err(e) => e.into_response(),
    }
}
