//! HTTP/JSON front of the session manager, with a server-sent event stream
//! for turn notifications and long-polling on the view endpoint.

use std::convert::Infallible;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clem_core::engine::Role;
use futures::stream::{self, Stream};
use serde::Deserialize;
use serde_json::json;

use crate::session::{SessionError, SessionManager, SessionRequest};

/// Upper bound on a single long-poll.
const MAX_WAIT: Duration = Duration::from_secs(60);

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}/view", get(view))
        .route("/sessions/{id}/moves", post(submit))
        .route("/sessions/{id}/events", get(events))
        .route("/sessions/{id}/record", get(record))
        .with_state(manager)
}

pub async fn serve(manager: Arc<SessionManager>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(manager)).await
}

struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0 {
            SessionError::UnknownGame(_) | SessionError::UnknownInstance(_) | SessionError::UnknownSession(_) => {
                StatusCode::NOT_FOUND
            }
            SessionError::BadRequest(_) => StatusCode::BAD_REQUEST,
            SessionError::NotYourTurn { .. } | SessionError::SessionFinished => StatusCode::CONFLICT,
        };
        (status, Json(json!({ "error": self.0.code(), "message": self.0.to_string() }))).into_response()
    }
}

fn bad(msg: impl Into<String>) -> ApiError {
    ApiError(SessionError::BadRequest(msg.into()))
}

fn parse_role(role: Option<&str>) -> Result<Role, ApiError> {
    let text = role.ok_or_else(|| bad("missing role"))?;
    Role::parse(text).filter(|r| r.is_player()).ok_or_else(|| bad(format!("unknown role `{text}`")))
}

/// Runs a blocking manager call off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| bad(format!("worker failed: {e}")))?.map_err(ApiError)
}

async fn create(State(m): State<Arc<SessionManager>>, Json(req): Json<SessionRequest>) -> Result<Response, ApiError> {
    let id = blocking(move || m.create_session(&req)).await?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}

async fn list(State(m): State<Arc<SessionManager>>) -> Response {
    Json(m.list()).into_response()
}

#[derive(Debug, Deserialize)]
struct ViewQuery {
    role: Option<String>,
    #[serde(default)]
    spectator: bool,
    #[serde(default)]
    after: usize,
    /// Long-poll for up to this many milliseconds.
    wait_ms: Option<u64>,
}

async fn view(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> Result<Response, ApiError> {
    let role = if q.spectator { None } else { Some(parse_role(q.role.as_deref())?) };
    let wait = q.wait_ms.map(|ms| Duration::from_millis(ms).min(MAX_WAIT));
    let v = blocking(move || m.view(&id, role, q.after, wait)).await?;
    Ok(Json(v).into_response())
}

#[derive(Debug, Deserialize)]
struct MoveBody {
    role: String,
    text: String,
}

async fn submit(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    Json(body): Json<MoveBody>,
) -> Result<Response, ApiError> {
    let role = parse_role(Some(&body.role))?;
    let ack = blocking(move || m.submit_move(&id, role, &body.text)).await?;
    Ok(Json(ack).into_response())
}

async fn record(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = m.session(&id)?;
    match session.record() {
        Some(r) => Ok(([("content-type", "application/json")], r.to_canonical_json()).into_response()),
        None => Ok((StatusCode::CONFLICT, Json(json!({ "error": "not_finished", "status": session.status() })))
            .into_response()),
    }
}

/// One `status` event per change: the status and the event cursor. Clients
/// fetch their own view in response, so nothing role-specific is pushed.
async fn events(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ApiError> {
    let session = m.session(&id)?;
    let rx = session.subscribe();
    let stream = stream::unfold((session, rx, true), |(session, mut rx, first)| async move {
        if !first && (session.is_finished() || rx.changed().await.is_err()) {
            return None;
        }
        let version = *rx.borrow_and_update();
        let data = json!({ "status": session.status(), "cursor": session.event_count(), "version": version });
        Some((Ok(SseEvent::default().event("status").data(data.to_string())), (session, rx, false)))
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}
