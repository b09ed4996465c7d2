use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};

use crate::error::{ApiError, ApiResult};
use crate::state::{AnswerRequest, Service};

pub const OPENAPI: &str = include_str!("../openapi.json");

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/surveys", post(create_survey).get(list_surveys))
        .route("/surveys/{id}", get(get_survey).put(update_survey).delete(delete_survey))
        .route("/surveys/{id}/publish", post(publish_survey))
        .route("/surveys/{id}/sessions", post(start_session))
        .route("/sessions/{id}/answers", post(submit_answer))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/explain", get(explain))
        .route("/sessions/{id}/result", get(result))
        .route("/openapi.json", get(openapi))
        .with_state(service)
}

fn utf8(body: &Bytes) -> ApiResult<&str> {
    std::str::from_utf8(body).map_err(|e| ApiError::validation(format!("body is not UTF-8: {e}")))
}

async fn create_survey(State(svc): State<Arc<Service>>, body: Bytes) -> ApiResult<Response> {
    let r = svc.create_survey(utf8(&body)?)?;
    let location = format!("/surveys/{}", r.id);
    Ok((StatusCode::CREATED, [(header::LOCATION, location)], Json(r)).into_response())
}

async fn list_surveys(State(svc): State<Arc<Service>>) -> impl IntoResponse {
    Json(svc.list_surveys())
}

async fn get_survey(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(svc.get_survey(&id)?).into_response())
}

async fn update_survey(State(svc): State<Arc<Service>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    Ok(Json(svc.update_survey(&id, utf8(&body)?)?).into_response())
}

async fn delete_survey(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    svc.delete_survey(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn publish_survey(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(svc.publish_survey(&id)?).into_response())
}

async fn start_session(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    let next = svc.start_session(&id)?;
    Ok((StatusCode::CREATED, Json(next)).into_response())
}

async fn submit_answer(State(svc): State<Arc<Service>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let req: AnswerRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::validation(format!("invalid answer body: {e}")))?;
    Ok(Json(svc.submit_answer(&id, &req)?).into_response())
}

async fn next(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(svc.next(&id)?).into_response())
}

async fn explain(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(svc.explain(&id)?).into_response())
}

async fn result(State(svc): State<Arc<Service>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(svc.result(&id)?).into_response())
}

async fn openapi() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], OPENAPI)
}
