use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

/// Error response: status code plus `{"error": name, "message": text}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub name: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, name: "InvalidInput", message: message.into() }
    }

    pub fn unknown_session(id: &str) -> Self {
        Self { status: StatusCode::NOT_FOUND, name: "UnknownSession", message: format!("no session {id:?}") }
    }

    pub fn unknown_job(id: &str) -> Self {
        Self { status: StatusCode::NOT_FOUND, name: "UnknownJob", message: format!("no job {id:?}") }
    }

    pub fn stale(expected: u64, found: u64) -> Self {
        Self {
            status: StatusCode::CONFLICT,
            name: "StaleVersion",
            message: format!("edit based on version {found}, session is at version {expected}"),
        }
    }
}

/// Input problems map to 400, method failures on valid input to 422.
impl From<ratlink::Error> for ApiError {
    fn from(e: ratlink::Error) -> Self {
        let status = if e.is_input_error() { StatusCode::BAD_REQUEST } else { StatusCode::UNPROCESSABLE_ENTITY };
        Self { status, name: e.name(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.name, "message": self.message }))).into_response()
    }
}
