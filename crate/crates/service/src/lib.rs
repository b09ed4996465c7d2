//! REST service for adaptive questionnaires.
//!
//! Surveys are questionnaire documents that move from draft to published;
//! sessions run the adaptive loop of one published survey for one
//! respondent. See `openapi.json` for the wire contract.

pub mod config;
pub mod error;
pub mod routes;
pub mod state;

use std::sync::Arc;

use axum::http::HeaderValue;
use axum::Router;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::trace::TraceLayer;

pub use config::Config;
pub use error::{ApiError, ApiResult};
pub use routes::{router, OPENAPI};
pub use state::{
    AnswerRequest, NextQuestionResponse, OfferedQuestion, Service, SessionResult, SurveyResource, SurveyStatus,
    SurveySummary,
};

/// Router with tracing and the configured CORS policy.
pub fn app(service: Arc<Service>, cors_origins: &[String]) -> Router {
    let mut app = router(service).layer(TraceLayer::new_for_http());
    if !cors_origins.is_empty() {
        let origin = if cors_origins.iter().any(|o| o == "*") {
            AllowOrigin::any()
        } else {
            AllowOrigin::list(cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
        };
        app = app.layer(CorsLayer::new().allow_origin(origin).allow_methods(Any).allow_headers(Any));
    }
    app
}
