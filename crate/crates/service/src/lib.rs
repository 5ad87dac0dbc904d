//! HTTP backend for the approval-voting game.
//!
//! Participants get a session with twelve conditions: the six single-winner
//! conditions, then the same six at a randomly assigned k of 2 or 3. Each
//! ballot is resolved against sampled missing ballots and credited with the
//! utility of the realized winners. Sessions are persisted as append-only
//! NDJSON event logs and rebuilt from them on start.

pub mod api;
pub mod config;
pub mod error;
pub mod session;
pub mod store;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use avlab_core::data::builtin_scenarios;
use avlab_core::fitting::Scenarios;
use tokio::sync::{Mutex, RwLock};

pub use api::router;
pub use config::ServiceConfig;
pub use error::ServiceError;
pub use session::{OutcomeRecord, Session};

use crate::session::Event;
use crate::store::Store;

/// Shared service state. Each session sits behind its own mutex so writes
/// to one session are serialized while other sessions proceed.
pub struct AppState {
    pub config: ServiceConfig,
    pub scenarios: Scenarios,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    next_index: Mutex<u64>,
    store: Option<Store>,
}

impl AppState {
    /// Builds the state, replaying any event logs under `config.data_dir`.
    pub fn open(config: ServiceConfig) -> Result<Arc<Self>, ServiceError> {
        config.validate()?;
        let store = config.data_dir.as_deref().map(Store::open).transpose()?;
        let mut sessions = BTreeMap::new();
        let mut next_index = 0;
        if let Some(store) = &store {
            for (path, events) in store.load_all()? {
                if events.is_empty() {
                    continue;
                }
                let session = Session::replay(&events).map_err(|message| ServiceError::Store {
                    path: path.display().to_string(),
                    message,
                })?;
                next_index = next_index.max(session.index + 1);
                sessions.insert(session.session_id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        Ok(Arc::new(AppState {
            config,
            scenarios: builtin_scenarios(),
            sessions: RwLock::new(sessions),
            next_index: Mutex::new(next_index),
            store,
        }))
    }

    pub async fn create_session(&self, participant_id: &str, created_at: String) -> Result<Session, ServiceError> {
        let mut next = self.next_index.lock().await;
        let event = session::creation_event(self.config.seed, *next, participant_id, self.config.shuffle, created_at);
        let session = Session::from_created(&event).expect("creation event");
        if let Some(store) = &self.store {
            store.create(&session.session_id, &event)?;
        }
        *next += 1;
        self.sessions
            .write()
            .await
            .insert(session.session_id.clone(), Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }

    pub async fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    /// Persists `event` and then applies it; the in-memory state never runs
    /// ahead of the log.
    pub(crate) fn commit(&self, session: &mut Session, event: &Event) -> Result<(), ServiceError> {
        if let Some(store) = &self.store {
            store.append(&session.session_id, event)?;
        }
        session.apply(event).map_err(|message| ServiceError::Store {
            path: session.session_id.clone(),
            message,
        })
    }

    /// Snapshot of all sessions ordered by session id.
    pub async fn snapshot(&self) -> Vec<Session> {
        let handles: Vec<_> = self.sessions.read().await.values().cloned().collect();
        let mut out = Vec::with_capacity(handles.len());
        for h in handles {
            out.push(h.lock().await.clone());
        }
        out
    }
}

/// Binds `config.port` on all interfaces and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let state = AppState::open(config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ServiceError::Config(format!("bind {addr}: {e}")))?;
    eprintln!("avlab service listening on {}", listener.local_addr().map_err(|e| ServiceError::Config(e.to_string()))?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Config(e.to_string()))
}
