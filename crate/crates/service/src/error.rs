use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("event log {path}: {message}")]
    Store { path: String, message: String },
    #[error(transparent)]
    Core(#[from] avlab_core::Error),
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::UnknownSession(_) | ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Core(e) if is_input_error(e) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

fn is_input_error(e: &avlab_core::Error) -> bool {
    use avlab_core::Error as E;
    matches!(
        e,
        E::Parameter { .. }
            | E::UnknownCandidate(_)
            | E::Input(_)
            | E::TiedUtilities { .. }
            | E::Validation(_)
            | E::Parse { .. }
            | E::UndefinedDenominator
    )
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}
