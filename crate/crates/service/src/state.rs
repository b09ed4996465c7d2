use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use parking_lot::{Mutex, RwLock};
use quizbn_core::adaptive::{explain, grade, marginal_risks, pick_question, posterior_entropy, ExplanationReport, TranscriptEntry};
use quizbn_core::model_io::{
    document_to_model, model_to_document, parse_questionnaire, FileStore, JsonlLog, Keyed, MemoryStore,
    QuestionnaireDocument, SessionRecord, SessionStore,
};
use quizbn_core::{Error, QuestionnaireModel, Session, SessionStatus};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::{ApiError, ApiResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyStatus {
    Draft,
    Published,
}

/// A stored survey. `document` is the canonical form of the submitted
/// questionnaire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyResource {
    pub id: String,
    pub status: SurveyStatus,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub document: QuestionnaireDocument,
}

impl Keyed for SurveyResource {
    fn key(&self) -> &str {
        &self.id
    }

    fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub id: String,
    pub title: String,
    pub status: SurveyStatus,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub sessions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfferedQuestion {
    pub id: String,
    pub text: String,
    /// Display text per answer state; submit the position as `answer`.
    pub options: Vec<String>,
}

/// What the client should do next: answer the offered question, or show
/// the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NextQuestionResponse {
    Question {
        session_id: String,
        question: OfferedQuestion,
        answered: usize,
        entropy: f64,
        explain_panel: bool,
    },
    Terminal {
        session_id: String,
        stop_reason: SessionStatus,
        grade: f64,
        risks: BTreeMap<String, f64>,
        answered: usize,
        entropy: f64,
        explain_panel: bool,
    },
}

impl NextQuestionResponse {
    pub fn is_terminal(&self) -> bool {
        matches!(self, NextQuestionResponse::Terminal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub question: String,
    pub answer: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub session_id: String,
    pub survey_id: String,
    pub status: SessionStatus,
    pub grade: f64,
    pub risks: BTreeMap<String, f64>,
    pub transcript: Vec<TranscriptEntry>,
}

struct SurveyEntry {
    resource: SurveyResource,
    model: Arc<QuestionnaireModel>,
    sessions: usize,
    seq: u64,
}

struct LiveSession {
    id: String,
    survey_id: String,
    model: Arc<QuestionnaireModel>,
    session: Session,
    offered: Option<String>,
    created_at: DateTime<Utc>,
    last: NextQuestionResponse,
}

impl LiveSession {
    fn new(
        id: String,
        survey_id: String,
        model: Arc<QuestionnaireModel>,
        session: Session,
        created_at: DateTime<Utc>,
    ) -> ApiResult<Self> {
        let offered = if session.is_active() { pick_question(&model, &session)? } else { None };
        let mut live = Self {
            id,
            survey_id,
            model,
            session,
            offered,
            created_at,
            last: NextQuestionResponse::Terminal {
                session_id: String::new(),
                stop_reason: SessionStatus::Active,
                grade: 0.0,
                risks: BTreeMap::new(),
                answered: 0,
                entropy: 0.0,
                explain_panel: false,
            },
        };
        live.last = live.respond()?;
        Ok(live)
    }

    fn respond(&self) -> ApiResult<NextQuestionResponse> {
        let m = &self.model;
        let e = self.session.evidence();
        let entropy = posterior_entropy(m, e)?;
        let explain_panel = m.metadata().explain_panel;
        Ok(match &self.offered {
            Some(q) => {
                let item = m.question(q).expect("offered questions come from the pool");
                NextQuestionResponse::Question {
                    session_id: self.id.clone(),
                    question: OfferedQuestion { id: item.id.clone(), text: item.text.clone(), options: item.options.clone() },
                    answered: e.len(),
                    entropy,
                    explain_panel,
                }
            }
            None => NextQuestionResponse::Terminal {
                session_id: self.id.clone(),
                stop_reason: self.session.status(),
                grade: grade(m, e)?,
                risks: marginal_risks(m, e, m.risks())?,
                answered: e.len(),
                entropy,
                explain_panel,
            },
        })
    }

    fn record(&self, now: DateTime<Utc>) -> ApiResult<SessionRecord> {
        Ok(SessionRecord::capture(&self.id, &self.survey_id, &self.model, &self.session, self.created_at, now)?)
    }
}

/// Surveys, live sessions and their persistence.
///
/// Survey reads share a map lock; mutations of one survey lock that
/// survey. Each session has its own lock, so requests for different
/// sessions run in parallel while requests for one session are linearised.
pub struct Service {
    surveys: RwLock<HashMap<String, Arc<Mutex<SurveyEntry>>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<LiveSession>>>>,
    store: Arc<dyn SessionStore>,
    survey_log: Option<JsonlLog<SurveyResource>>,
    next_seq: Mutex<u64>,
}

fn now() -> DateTime<Utc> {
    Utc::now()
}

fn not_found_survey(id: &str) -> ApiError {
    ApiError::NotFound(format!("survey `{id}` does not exist"))
}

fn not_found_session(id: &str) -> ApiError {
    ApiError::NotFound(format!("session `{id}` does not exist"))
}

impl Service {
    /// Everything in memory.
    pub fn in_memory() -> Self {
        Self {
            surveys: RwLock::default(),
            sessions: RwLock::default(),
            store: Arc::new(MemoryStore::new()),
            survey_log: None,
            next_seq: Mutex::new(0),
        }
    }

    /// Persists to `surveys.jsonl` and `sessions.jsonl` under `dir`, and
    /// restores whatever those files already hold.
    pub fn persistent(dir: &Path) -> ApiResult<Self> {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        let log: JsonlLog<SurveyResource> = JsonlLog::open(dir.join("surveys.jsonl"))?;
        let store = FileStore::open(dir.join("sessions.jsonl"))?;
        let svc = Self {
            surveys: RwLock::default(),
            sessions: RwLock::default(),
            store: Arc::new(store),
            survey_log: None,
            next_seq: Mutex::new(0),
        };
        for r in log.all() {
            let model = document_to_model(&r.document).map_err(ApiError::from)?;
            svc.insert_survey(r, model);
        }
        let svc = Self { survey_log: Some(log), ..svc };
        svc.restore_sessions()?;
        Ok(svc)
    }

    fn restore_sessions(&self) -> ApiResult<()> {
        for id in self.store.list()? {
            let rec = self.store.load(&id)?;
            let entry = self
                .surveys
                .read()
                .get(&rec.questionnaire_id)
                .cloned()
                .ok_or_else(|| not_found_survey(&rec.questionnaire_id))?;
            let mut entry = entry.lock();
            let session = rec.verify(&entry.model)?;
            let live = LiveSession::new(rec.session_id.clone(), rec.questionnaire_id.clone(), entry.model.clone(), session, rec.created_at)?;
            entry.sessions += 1;
            self.sessions.write().insert(rec.session_id, Arc::new(Mutex::new(live)));
        }
        Ok(())
    }

    fn insert_survey(&self, resource: SurveyResource, model: QuestionnaireModel) {
        let seq = {
            let mut s = self.next_seq.lock();
            *s += 1;
            *s
        };
        let id = resource.id.clone();
        let entry = SurveyEntry { resource, model: Arc::new(model), sessions: 0, seq };
        self.surveys.write().insert(id, Arc::new(Mutex::new(entry)));
    }

    fn persist_survey(&self, r: &SurveyResource) -> ApiResult<()> {
        if let Some(log) = &self.survey_log {
            log.put(r)?;
        }
        Ok(())
    }

    fn survey(&self, id: &str) -> ApiResult<Arc<Mutex<SurveyEntry>>> {
        self.surveys.read().get(id).cloned().ok_or_else(|| not_found_survey(id))
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<LiveSession>>> {
        self.sessions.read().get(id).cloned().ok_or_else(|| not_found_session(id))
    }

    pub fn create_survey(&self, text: &str) -> ApiResult<SurveyResource> {
        let model = parse_questionnaire(text)?;
        let at = now();
        let resource = SurveyResource {
            id: Uuid::new_v4().to_string(),
            status: SurveyStatus::Draft,
            created_at: at,
            updated_at: at,
            document: model_to_document(&model),
        };
        self.persist_survey(&resource)?;
        self.insert_survey(resource.clone(), model);
        Ok(resource)
    }

    pub fn list_surveys(&self) -> Vec<SurveySummary> {
        let mut all: Vec<(u64, SurveySummary)> = self
            .surveys
            .read()
            .values()
            .map(|e| {
                let e = e.lock();
                let r = &e.resource;
                (
                    e.seq,
                    SurveySummary {
                        id: r.id.clone(),
                        title: r.document.metadata.title.clone(),
                        status: r.status,
                        created_at: r.created_at,
                        updated_at: r.updated_at,
                        sessions: e.sessions,
                    },
                )
            })
            .collect();
        all.sort_by_key(|(seq, _)| *seq);
        all.into_iter().map(|(_, s)| s).collect()
    }

    pub fn get_survey(&self, id: &str) -> ApiResult<SurveyResource> {
        Ok(self.survey(id)?.lock().resource.clone())
    }

    /// Replaces the document of a draft survey.
    pub fn update_survey(&self, id: &str, text: &str) -> ApiResult<SurveyResource> {
        let entry = self.survey(id)?;
        let mut e = entry.lock();
        if e.resource.status == SurveyStatus::Published {
            return Err(ApiError::Conflict(format!("survey `{id}` is published and cannot be modified")));
        }
        let model = parse_questionnaire(text)?;
        let mut updated = e.resource.clone();
        updated.document = model_to_document(&model);
        updated.updated_at = now();
        self.persist_survey(&updated)?;
        e.resource = updated.clone();
        e.model = Arc::new(model);
        Ok(updated)
    }

    /// Freezes a survey so that sessions can attach to it. Publishing a
    /// published survey is a no-op.
    pub fn publish_survey(&self, id: &str) -> ApiResult<SurveyResource> {
        let entry = self.survey(id)?;
        let mut e = entry.lock();
        if e.resource.status == SurveyStatus::Draft {
            let mut updated = e.resource.clone();
            updated.status = SurveyStatus::Published;
            updated.updated_at = now();
            self.persist_survey(&updated)?;
            e.resource = updated;
        }
        Ok(e.resource.clone())
    }

    pub fn delete_survey(&self, id: &str) -> ApiResult<()> {
        let mut map = self.surveys.write();
        let entry = map.get(id).ok_or_else(|| not_found_survey(id))?;
        let sessions = entry.lock().sessions;
        if sessions > 0 {
            return Err(ApiError::Conflict(format!("survey `{id}` has {sessions} session(s) and cannot be deleted")));
        }
        if let Some(log) = &self.survey_log {
            log.delete(id)?;
        }
        map.remove(id);
        Ok(())
    }

    /// Opens a session on a published survey and returns its first step.
    pub fn start_session(&self, survey_id: &str) -> ApiResult<NextQuestionResponse> {
        let model = {
            let map = self.surveys.read();
            let entry = map.get(survey_id).ok_or_else(|| not_found_survey(survey_id))?;
            let mut e = entry.lock();
            if e.resource.status != SurveyStatus::Published {
                return Err(ApiError::Conflict(format!("survey `{survey_id}` is not published")));
            }
            e.sessions += 1;
            e.model.clone()
        };
        let at = now();
        let session = Session::start(&model)?;
        let live = LiveSession::new(Uuid::new_v4().to_string(), survey_id.to_string(), model, session, at)?;
        self.store.save(&live.record(at)?)?;
        let response = live.last.clone();
        self.sessions.write().insert(live.id.clone(), Arc::new(Mutex::new(live)));
        Ok(response)
    }

    /// Applies an answer to the offered question.
    ///
    /// Resubmitting the most recently accepted `(question, answer)` returns
    /// the response it produced without applying it again.
    pub fn submit_answer(&self, session_id: &str, req: &AnswerRequest) -> ApiResult<NextQuestionResponse> {
        let live = self.session(session_id)?;
        let mut live = live.lock();
        if let Some(last) = live.session.transcript().last() {
            if last.question == req.question && last.answer == req.answer {
                return Ok(live.last.clone());
            }
        }
        if !live.session.is_active() {
            return Err(ApiError::Conflict(format!(
                "session `{session_id}` is terminal ({})",
                live.session.status().as_str()
            )));
        }
        let offered = live.offered.clone().expect("active sessions have an offered question");
        if req.question != offered {
            return Err(ApiError::Conflict(format!(
                "question `{}` is not the offered question `{offered}`",
                req.question
            )));
        }
        let options = live.model.question(&offered).map_or(0, |q| q.options.len());
        if req.answer >= options {
            return Err(ApiError::validation(format!(
                "answer {} is out of range for `{offered}` ({options} options)",
                req.answer
            )));
        }
        let model = live.model.clone();
        match live.session.answer(&model, &offered, req.answer) {
            Ok(_) => {}
            Err(Error::InconsistentEvidence) => {
                return Err(ApiError::validation(format!(
                    "answer {} to `{offered}` has probability zero given the previous answers",
                    req.answer
                )))
            }
            Err(e) => return Err(e.into()),
        }
        live.offered = if live.session.is_active() { pick_question(&model, &live.session)? } else { None };
        live.last = live.respond()?;
        self.store.save(&live.record(now())?)?;
        Ok(live.last.clone())
    }

    pub fn next(&self, session_id: &str) -> ApiResult<NextQuestionResponse> {
        Ok(self.session(session_id)?.lock().last.clone())
    }

    pub fn explain(&self, session_id: &str) -> ApiResult<ExplanationReport> {
        let live = self.session(session_id)?;
        let live = live.lock();
        Ok(explain(&live.model, &live.session)?)
    }

    pub fn result(&self, session_id: &str) -> ApiResult<SessionResult> {
        let live = self.session(session_id)?;
        let live = live.lock();
        if live.session.is_active() {
            return Err(ApiError::Conflict(format!("session `{session_id}` is not terminal")));
        }
        let m = &live.model;
        let e = live.session.evidence();
        Ok(SessionResult {
            session_id: live.id.clone(),
            survey_id: live.survey_id.clone(),
            status: live.session.status(),
            grade: grade(m, e)?,
            risks: marginal_risks(m, e, m.risks())?,
            transcript: live.session.transcript().to_vec(),
        })
    }

    /// Stored record of a session, as persisted after its last change.
    pub fn session_record(&self, session_id: &str) -> ApiResult<SessionRecord> {
        self.store.load(session_id).map_err(|e| match e {
            Error::NotFound(_) => not_found_session(session_id),
            other => other.into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NET_A: &str = include_str!("../../core/fixtures/questionnaires/net_a.json");

    fn published(svc: &Service) -> String {
        let id = svc.create_survey(NET_A).unwrap().id;
        svc.publish_survey(&id).unwrap();
        id
    }

    #[test]
    fn surveys_list_in_creation_order() {
        let svc = Service::in_memory();
        let ids: Vec<String> = (0..5).map(|_| svc.create_survey(NET_A).unwrap().id).collect();
        let listed: Vec<String> = svc.list_surveys().into_iter().map(|s| s.id).collect();
        assert_eq!(listed, ids);
    }

    #[test]
    fn stored_document_is_canonical() {
        let svc = Service::in_memory();
        let r = svc.create_survey(NET_A).unwrap();
        let model = parse_questionnaire(NET_A).unwrap();
        assert_eq!(r.document, model_to_document(&model));
    }

    #[test]
    fn each_answer_is_persisted() {
        let svc = Service::in_memory();
        let id = published(&svc);
        let NextQuestionResponse::Question { session_id, .. } = svc.start_session(&id).unwrap() else {
            panic!("NET-A starts with a question");
        };
        assert!(svc.session_record(&session_id).unwrap().transcript.is_empty());
        svc.submit_answer(&session_id, &AnswerRequest { question: "Q1".into(), answer: 1 }).unwrap();
        let rec = svc.session_record(&session_id).unwrap();
        assert_eq!(rec.status, SessionStatus::StoppedEntropy);
        assert!((rec.grade.unwrap() - 0.1).abs() < 1e-9);
        assert!(matches!(svc.session_record("missing"), Err(ApiError::NotFound(_))));
    }

    #[test]
    fn terminal_response_serializes_with_kind_tag() {
        let svc = Service::in_memory();
        let id = published(&svc);
        let NextQuestionResponse::Question { session_id, .. } = svc.start_session(&id).unwrap() else {
            panic!("NET-A starts with a question");
        };
        let r = svc.submit_answer(&session_id, &AnswerRequest { question: "Q1".into(), answer: 0 }).unwrap();
        assert!(r.is_terminal());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "terminal");
        assert_eq!(v["stop_reason"], "stopped_entropy");
        assert_eq!(v["answered"], 1);
    }
}
