//! Questionnaire documents and session persistence.
//!
//! A questionnaire is a strict JSON document (see `schema/questionnaire.schema.json`
//! in this crate). Unknown fields are rejected, every problem found is
//! reported as a [`Diagnostic`] with a JSON path, and
//! [`serialize_questionnaire`] writes a canonical form that parses back to
//! the same model.
//!
//! Sessions are stored as [`SessionRecord`]s, either in memory or in an
//! append-only JSON-lines file.

mod diagnostics;
mod document;
mod store;

pub use diagnostics::{Diagnostic, DiagnosticCode, Diagnostics};
pub use document::{
    document_to_model, model_to_document, parse_document, parse_questionnaire,
    serialize_questionnaire, DocumentMetadata, QuestionDecl, QuestionnaireDocument, VariableDecl,
    FORMAT_VERSION,
};
pub use store::{
    list_sessions, load_session, save_session, FileStore, JsonlLog, Keyed, MemoryStore,
    SessionRecord, SessionStore, REPLAY_TOLERANCE,
};
