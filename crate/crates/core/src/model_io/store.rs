use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use parking_lot::{Mutex, RwLock};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::adaptive::{grade, marginal_risks, QuestionnaireModel, Session, SessionStatus, TranscriptEntry};
use crate::error::{Error, Result};

/// Tolerance used when checking a replayed transcript against a record.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

/// Persistent form of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub session_id: String,
    pub questionnaire_id: String,
    pub format_version: u32,
    pub status: SessionStatus,
    pub transcript: Vec<TranscriptEntry>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    /// Set once the session has stopped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub risks: BTreeMap<String, f64>,
}

impl SessionRecord {
    /// Snapshot of `session`; grade and risks are filled in when it has stopped.
    pub fn capture(
        session_id: impl Into<String>,
        questionnaire_id: impl Into<String>,
        model: &QuestionnaireModel,
        session: &Session,
        created_at: DateTime<Utc>,
        updated_at: DateTime<Utc>,
    ) -> Result<Self> {
        let (grade, risks) = if session.is_active() {
            (None, BTreeMap::new())
        } else {
            (
                Some(grade(model, session.evidence())?),
                marginal_risks(model, session.evidence(), model.risks())?,
            )
        };
        Ok(Self {
            session_id: session_id.into(),
            questionnaire_id: questionnaire_id.into(),
            format_version: super::FORMAT_VERSION,
            status: session.status(),
            transcript: session.transcript().to_vec(),
            created_at,
            updated_at,
            grade,
            risks,
        })
    }

    /// Rebuilds the live session by re-applying the recorded answers.
    pub fn replay(&self, model: &QuestionnaireModel) -> Result<Session> {
        Session::replay(model, self.transcript.iter().map(|t| (t.question.as_str(), t.answer)))
    }

    /// Replays and checks status, every recorded gain and entropy, and the
    /// grade against the record.
    pub fn verify(&self, model: &QuestionnaireModel) -> Result<Session> {
        let session = self.replay(model)?;
        let mismatch = |what: String| Err(Error::ReplayMismatch(format!("session `{}`: {what}", self.session_id)));
        if session.status() != self.status {
            return mismatch(format!(
                "status {} recorded, {} replayed",
                self.status.as_str(),
                session.status().as_str()
            ));
        }
        for (i, (rec, rep)) in self.transcript.iter().zip(session.transcript()).enumerate() {
            if (rec.gain - rep.gain).abs() > REPLAY_TOLERANCE
                || (rec.entropy - rep.entropy).abs() > REPLAY_TOLERANCE
            {
                return mismatch(format!("step {i} numbers differ"));
            }
        }
        if let Some(g) = self.grade {
            let replayed = grade(model, session.evidence())?;
            if (g - replayed).abs() > REPLAY_TOLERANCE {
                return mismatch(format!("grade {g} recorded, {replayed} replayed"));
            }
        }
        Ok(session)
    }
}

/// Storage for session records. Writes are serialised by the
/// implementation; reads may run concurrently.
pub trait SessionStore: Send + Sync {
    /// Inserts or replaces the record with the same id.
    fn save(&self, record: &SessionRecord) -> Result<()>;
    fn load(&self, id: &str) -> Result<SessionRecord>;
    /// Ids ordered by creation time, then by first save.
    fn list(&self) -> Result<Vec<String>>;
}

pub fn save_session(store: &dyn SessionStore, record: &SessionRecord) -> Result<()> {
    store.save(record)
}

/// Loads a record and checks that it was written for `current_version`.
pub fn load_session(store: &dyn SessionStore, id: &str, current_version: u32) -> Result<SessionRecord> {
    let r = store.load(id)?;
    if r.format_version != current_version {
        return Err(Error::VersionConflict { record: r.format_version, current: current_version });
    }
    Ok(r)
}

pub fn list_sessions(store: &dyn SessionStore) -> Result<Vec<String>> {
    store.list()
}

/// Records that can live in a [`JsonlLog`].
pub trait Keyed {
    fn key(&self) -> &str;
    fn created_at(&self) -> DateTime<Utc>;
}

impl Keyed for SessionRecord {
    fn key(&self) -> &str {
        &self.session_id
    }

    fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }
}

/// Latest version of each record plus its first-save sequence number.
#[derive(Debug)]
struct Index<T> {
    records: HashMap<String, (u64, T)>,
    next_seq: u64,
}

impl<T: Keyed + Clone> Index<T> {
    fn new() -> Self {
        Self { records: HashMap::new(), next_seq: 0 }
    }

    fn upsert(&mut self, record: T) {
        let seq = match self.records.get(record.key()) {
            Some((s, _)) => *s,
            None => {
                self.next_seq += 1;
                self.next_seq
            }
        };
        self.records.insert(record.key().to_string(), (seq, record));
    }

    fn remove(&mut self, key: &str) -> bool {
        self.records.remove(key).is_some()
    }

    fn get(&self, key: &str) -> Option<T> {
        self.records.get(key).map(|(_, r)| r.clone())
    }

    fn ordered(&self) -> Vec<T> {
        let mut all: Vec<&(u64, T)> = self.records.values().collect();
        all.sort_by_key(|(seq, r)| (r.created_at(), *seq));
        all.into_iter().map(|(_, r)| r.clone()).collect()
    }
}

/// In-process store.
#[derive(Debug)]
pub struct MemoryStore {
    index: RwLock<Index<SessionRecord>>,
}

impl Default for MemoryStore {
    fn default() -> Self {
        Self { index: RwLock::new(Index::new()) }
    }
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SessionStore for MemoryStore {
    fn save(&self, record: &SessionRecord) -> Result<()> {
        self.index.write().upsert(record.clone());
        Ok(())
    }

    fn load(&self, id: &str) -> Result<SessionRecord> {
        self.index.read().get(id).ok_or_else(|| Error::NotFound(format!("session `{id}`")))
    }

    fn list(&self) -> Result<Vec<String>> {
        Ok(self.index.read().ordered().into_iter().map(|r| r.session_id).collect())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum LogLine<T> {
    Put { record: T },
    Delete { key: String },
}

/// Append-only JSON-lines log of keyed records. The last line for a key
/// wins; the whole file is read back on open.
#[derive(Debug)]
pub struct JsonlLog<T> {
    path: PathBuf,
    file: Mutex<File>,
    index: RwLock<Index<T>>,
}

impl<T: Keyed + Clone + Serialize + DeserializeOwned> JsonlLog<T> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut index = Index::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (n, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: LogLine<T> = serde_json::from_str(&line).map_err(|e| {
                    Error::Io(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("{}:{}: {e}", path.display(), n + 1),
                    ))
                })?;
                match entry {
                    LogLine::Put { record } => index.upsert(record),
                    LogLine::Delete { key } => {
                        index.remove(&key);
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file: Mutex::new(file), index: RwLock::new(index) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn append<R: Serialize>(file: &mut File, line: &LogLine<R>) -> Result<()> {
        let mut text = serde_json::to_string(line)?;
        text.push('\n');
        file.write_all(text.as_bytes())?;
        file.flush()?;
        Ok(())
    }

    pub fn put(&self, record: &T) -> Result<()> {
        // The writer lock is held until the index is updated, so the index
        // never runs ahead of the file.
        let mut f = self.file.lock();
        Self::append(&mut f, &LogLine::Put { record })?;
        self.index.write().upsert(record.clone());
        Ok(())
    }

    /// Returns whether the key existed.
    pub fn delete(&self, key: &str) -> Result<bool> {
        let mut f = self.file.lock();
        if self.index.read().get(key).is_none() {
            return Ok(false);
        }
        Self::append(&mut f, &LogLine::<&T>::Delete { key: key.to_string() })?;
        Ok(self.index.write().remove(key))
    }

    pub fn get(&self, key: &str) -> Option<T> {
        self.index.read().get(key)
    }

    /// Records ordered by creation time, then first save.
    pub fn all(&self) -> Vec<T> {
        self.index.read().ordered()
    }
}

/// Session store backed by a single append-only JSON-lines file.
#[derive(Debug)]
pub struct FileStore {
    log: JsonlLog<SessionRecord>,
}

impl FileStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self { log: JsonlLog::open(path)? })
    }

    pub fn path(&self) -> &Path {
        self.log.path()
    }
}

impl SessionStore for FileStore {
    fn save(&self, record: &SessionRecord) -> Result<()> {
        self.log.put(record)
    }

    fn load(&self, id: &str) -> Result<SessionRecord> {
        self.log.get(id).ok_or_else(|| Error::NotFound(format!("session `{id}`")))
    }

    fn list(&self) -> Result<Vec<String>> {
        Ok(self.log.all().into_iter().map(|r| r.session_id).collect())
    }
}
