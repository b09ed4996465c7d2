use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use quizbn_core::model_io::Diagnostics;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),

    #[error("{0}")]
    Conflict(String),

    /// The request is well-formed HTTP but its content is invalid; the
    /// diagnostics are set for questionnaire documents.
    #[error("{message}")]
    Validation { message: String, diagnostics: Option<Diagnostics> },

    #[error(transparent)]
    Internal(#[from] quizbn_core::Error),
}

impl ApiError {
    pub fn validation(message: impl Into<String>) -> Self {
        ApiError::Validation { message: message.into(), diagnostics: None }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Validation { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::NotFound(_) => "not_found",
            ApiError::Conflict(_) => "conflict",
            ApiError::Validation { .. } => "validation_failed",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl From<Diagnostics> for ApiError {
    fn from(d: Diagnostics) -> Self {
        ApiError::Validation {
            message: format!("questionnaire document has {} problem(s)", d.0.len()),
            diagnostics: Some(d),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<&'a Diagnostics>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(e) = &self {
            tracing::error!(error = %e, "request failed");
        }
        let diagnostics = match &self {
            ApiError::Validation { diagnostics, .. } => diagnostics.as_ref(),
            _ => None,
        };
        let body = ErrorBody { error: self.code(), message: self.to_string(), diagnostics };
        (self.status(), Json(body)).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
