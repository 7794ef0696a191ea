//! Live episodes with human seats.
//!
//! Each session runs its episode on its own thread. A human seat is a
//! [`HumanSeat`] player whose `complete` parks until a move is submitted,
//! so the engine, parsers and reprompt policy are exactly the ones used for
//! automated runs.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError, SyncSender};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use clem_core::backends::{resolve_player, ApiConfig, BackendError, ChatContext, Player, PlayerSpec};
use clem_core::engine::{Channel, EpisodeOutcome, Event, InteractionRecord, MoveVerdict, Role};
use clem_core::games::registry::{make_game, AnyInstance, InstanceFile};
use clem_core::games::{GameKind, GameResources};
use clem_core::runner::play_observed;
use serde::{Deserialize, Serialize};
use tokio::sync::watch;

use crate::config::Config;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionError {
    UnknownGame(String),
    UnknownInstance(String),
    UnknownSession(String),
    BadRequest(String),
    NotYourTurn { awaiting: Option<Role> },
    SessionFinished,
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownGame(_) => "unknown_game",
            SessionError::UnknownInstance(_) => "unknown_instance",
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::BadRequest(_) => "bad_request",
            SessionError::NotYourTurn { .. } => "not_your_turn",
            SessionError::SessionFinished => "session_finished",
        }
    }
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::UnknownGame(g) => write!(f, "unknown game `{g}`"),
            SessionError::UnknownInstance(m) => write!(f, "unknown instance: {m}"),
            SessionError::UnknownSession(id) => write!(f, "unknown session `{id}`"),
            SessionError::BadRequest(m) => f.write_str(m),
            SessionError::NotYourTurn { awaiting: Some(r) } => write!(f, "not your turn; waiting for {r}"),
            SessionError::NotYourTurn { awaiting: None } => f.write_str("not your turn; no move is awaited"),
            SessionError::SessionFinished => f.write_str("session already finished"),
        }
    }
}

impl std::error::Error for SessionError {}

#[derive(Debug, Clone, Deserialize)]
pub struct SessionRequest {
    pub game: String,
    /// Needed only when the id occurs in more than one experiment.
    #[serde(default)]
    pub experiment: Option<String>,
    pub instance: u32,
    /// Role (`A`, `B`) to player spec; `human` seats a person.
    pub roles: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SessionStatus {
    Running,
    AwaitingMove { role: Role },
    Finished { outcome: EpisodeOutcome },
}

/// One visible message. `verdict` is `valid` or a violation class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewEntry {
    pub index: usize,
    pub sender: Role,
    pub recipient: Role,
    pub turn: u32,
    pub text: String,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub aside: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    /// Spectator views only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct View {
    pub session: String,
    pub game: String,
    pub experiment: String,
    pub instance: u32,
    /// `None` for spectators.
    pub role: Option<Role>,
    pub status: SessionStatus,
    /// Pass back as `after` to receive only newer entries.
    pub cursor: usize,
    pub entries: Vec<ViewEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MoveAck {
    pub status: SessionStatus,
    /// Verdict on the submitted text, once the GM has judged it.
    pub verdict: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub id: String,
    pub game: String,
    pub experiment: String,
    pub instance: u32,
    pub roles: BTreeMap<Role, String>,
    pub status: SessionStatus,
}

struct State {
    status: SessionStatus,
    events: Vec<Event>,
    record: Option<InteractionRecord>,
    pending: Option<(Role, SyncSender<String>)>,
    closed: bool,
    version: u64,
}

pub struct Session {
    id: String,
    game: GameKind,
    experiment: String,
    instance: u32,
    roles: BTreeMap<Role, String>,
    state: Mutex<State>,
    changed: Condvar,
    notify: watch::Sender<u64>,
    snapshot_dir: Option<PathBuf>,
}

impl Session {
    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn bump(&self, st: &mut State) {
        st.version += 1;
        self.changed.notify_all();
        self.notify.send_replace(st.version);
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> SessionStatus {
        self.lock().status.clone()
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.lock().status, SessionStatus::Finished { .. })
    }

    pub fn event_count(&self) -> usize {
        self.lock().events.len()
    }

    pub fn record(&self) -> Option<InteractionRecord> {
        self.lock().record.clone()
    }

    /// Version counter, bumped on every event and status change.
    pub fn subscribe(&self) -> watch::Receiver<u64> {
        self.notify.subscribe()
    }

    pub fn summary(&self) -> Summary {
        Summary {
            id: self.id.clone(),
            game: self.game.name().into(),
            experiment: self.experiment.clone(),
            instance: self.instance,
            roles: self.roles.clone(),
            status: self.status(),
        }
    }

    fn view_of(&self, st: &State, role: Option<Role>, after: usize) -> View {
        let entries = st.events.iter().enumerate().skip(after).filter_map(|(i, e)| entry(i, e, role)).collect();
        View {
            session: self.id.clone(),
            game: self.game.name().into(),
            experiment: self.experiment.clone(),
            instance: self.instance,
            role,
            status: st.status.clone(),
            cursor: st.events.len(),
            entries,
        }
    }

    fn snapshot(&self, st: &State) {
        let Some(dir) = &self.snapshot_dir else { return };
        let body = serde_json::json!({
            "id": self.id,
            "game": self.game.name(),
            "experiment": self.experiment,
            "instance": self.instance,
            "roles": self.roles,
            "status": st.status,
            "events": st.events,
            "record": st.record,
        });
        // Snapshots are best effort; a full disk must not stall the game.
        let _ = std::fs::create_dir_all(dir).and_then(|_| {
            let tmp = dir.join(format!("{}.json.tmp", self.id));
            std::fs::write(&tmp, serde_json::to_string_pretty(&body).unwrap_or_default())?;
            std::fs::rename(tmp, dir.join(format!("{}.json", self.id)))
        });
    }

    fn finish(&self, record: InteractionRecord) {
        let mut st = self.lock();
        st.status = SessionStatus::Finished { outcome: record.outcome };
        st.events = record.events.clone();
        st.record = Some(record);
        st.pending = None;
        self.bump(&mut st);
        self.snapshot(&st);
    }

    /// Unblocks a parked seat; the episode then ends as a backend failure.
    fn close(&self) {
        let mut st = self.lock();
        st.closed = true;
        st.pending = None;
        self.bump(&mut st);
    }
}

fn entry(index: usize, e: &Event, role: Option<Role>) -> Option<ViewEntry> {
    let m = &e.message;
    let verdict = e.annotation.as_ref().map(|v| match v {
        MoveVerdict::Valid => "valid".to_string(),
        MoveVerdict::Violation { class, .. } => class.clone(),
    });
    match role {
        None => Some(ViewEntry {
            index,
            sender: m.sender,
            recipient: m.recipient,
            turn: m.turn,
            text: m.text.clone(),
            aside: e.aside,
            verdict,
            channel: Some(m.channel),
            detail: match &e.annotation {
                Some(MoveVerdict::Violation { detail, .. }) => Some(detail.clone()),
                _ => None,
            },
        }),
        Some(r) if m.channel == Channel::Game && (m.sender == r || m.recipient == r) => Some(ViewEntry {
            index,
            sender: m.sender,
            recipient: m.recipient,
            turn: m.turn,
            text: m.text.clone(),
            aside: e.aside,
            verdict: if m.sender == r { verdict } else { None },
            channel: None,
            detail: None,
        }),
        Some(_) => None,
    }
}

/// A player seat filled by whoever submits moves for `role`.
pub struct HumanSeat {
    session: Arc<Session>,
    role: Role,
    timeout: Option<Duration>,
}

impl Player for HumanSeat {
    fn descriptor(&self) -> String {
        "human".into()
    }

    fn complete(&mut self, _: &ChatContext) -> Result<String, BackendError> {
        let (tx, rx) = mpsc::sync_channel(1);
        {
            let mut st = self.session.lock();
            if st.closed {
                return Err(BackendError::Closed);
            }
            st.pending = Some((self.role, tx));
            st.status = SessionStatus::AwaitingMove { role: self.role };
            self.session.bump(&mut st);
            self.session.snapshot(&st);
        }
        let reply = match self.timeout {
            Some(t) => rx.recv_timeout(t).map_err(|e| match e {
                RecvTimeoutError::Timeout => BackendError::Timeout(format!("no move from {} within {t:?}", self.role)),
                RecvTimeoutError::Disconnected => BackendError::Closed,
            }),
            None => rx.recv().map_err(|_| BackendError::Closed),
        };
        if reply.is_err() {
            let mut st = self.session.lock();
            st.pending = None;
            st.status = SessionStatus::Running;
            self.session.bump(&mut st);
        }
        reply
    }
}

/// How long `submit_move` waits for the GM's verdict before returning.
const SUBMIT_WAIT: Duration = Duration::from_secs(10);

pub struct SessionManager {
    instances_dir: PathBuf,
    resources: GameResources,
    api: Option<ApiConfig>,
    snapshot_dir: Option<PathBuf>,
    human_timeout: Option<Duration>,
    files: Mutex<HashMap<GameKind, Arc<InstanceFile>>>,
    sessions: Mutex<HashMap<String, Arc<Session>>>,
    counter: AtomicU64,
}

impl SessionManager {
    pub fn new(instances_dir: impl Into<PathBuf>, resources: GameResources) -> SessionManager {
        SessionManager {
            instances_dir: instances_dir.into(),
            resources,
            api: None,
            snapshot_dir: None,
            human_timeout: None,
            files: Mutex::default(),
            sessions: Mutex::default(),
            counter: AtomicU64::new(0),
        }
    }

    pub fn from_config(cfg: &Config) -> anyhow::Result<SessionManager> {
        let resources = GameResources::load(&cfg.resources_dir)?;
        let mut m = SessionManager::new(&cfg.instances_dir, resources);
        m.api = cfg.api.clone();
        m.snapshot_dir = cfg.snapshot_dir.clone();
        m.human_timeout = cfg.human_timeout();
        Ok(m)
    }

    pub fn with_snapshots(mut self, dir: impl Into<PathBuf>) -> Self {
        self.snapshot_dir = Some(dir.into());
        self
    }

    pub fn with_human_timeout(mut self, t: Duration) -> Self {
        self.human_timeout = Some(t);
        self
    }

    fn file(&self, game: GameKind) -> Result<Arc<InstanceFile>, SessionError> {
        let mut files = self.files.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(f) = files.get(&game) {
            return Ok(f.clone());
        }
        let path = InstanceFile::path_in(&self.instances_dir, game);
        let file =
            InstanceFile::load(&path).map_err(|e| SessionError::UnknownInstance(format!("{}: {e}", path.display())))?;
        let file = Arc::new(file);
        files.insert(game, file.clone());
        Ok(file)
    }

    fn locate(&self, game: GameKind, experiment: Option<&str>, id: u32) -> Result<(String, AnyInstance), SessionError> {
        let file = self.file(game)?;
        let hits: Vec<_> = file
            .experiments
            .iter()
            .filter(|e| experiment.is_none_or(|x| x == e.name))
            .filter_map(|e| e.instances.iter().find(|i| i.id() == id).map(|i| (e.name.clone(), i.clone())))
            .collect();
        match hits.len() {
            1 => Ok(hits.into_iter().next().expect("one hit")),
            0 => Err(SessionError::UnknownInstance(format!("{game} instance {id}"))),
            n => Err(SessionError::BadRequest(format!("instance {id} occurs in {n} experiments; name one"))),
        }
    }

    fn next_id(&self) -> String {
        let n = self.counter.fetch_add(1, Ordering::Relaxed);
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_micros()).unwrap_or(0);
        format!("{t:x}-{n}")
    }

    pub fn create_session(&self, req: &SessionRequest) -> Result<String, SessionError> {
        let game = GameKind::from_name(&req.game).map_err(|_| SessionError::UnknownGame(req.game.clone()))?;
        let (experiment, instance) = self.locate(game, req.experiment.as_deref(), req.instance)?;

        let mut specs = BTreeMap::new();
        for (key, spec) in &req.roles {
            let role = Role::parse(key)
                .filter(|r| game.roles().contains(r))
                .ok_or_else(|| SessionError::BadRequest(format!("{game} has no role `{key}`")))?;
            let spec: PlayerSpec = spec.parse().map_err(|e: BackendError| SessionError::BadRequest(e.to_string()))?;
            specs.insert(role, spec);
        }
        if let Some(missing) = game.roles().iter().find(|r| !specs.contains_key(r)) {
            return Err(SessionError::BadRequest(format!("no player for role {missing}")));
        }
        if !specs.values().any(|s| *s == PlayerSpec::Human) {
            return Err(SessionError::BadRequest("at least one role must be human".into()));
        }
        // Fail here rather than on the episode thread.
        make_game(game, &instance, &self.resources).map_err(|e| SessionError::BadRequest(e.to_string()))?;

        let session = Arc::new(Session {
            id: self.next_id(),
            game,
            experiment: experiment.clone(),
            instance: req.instance,
            roles: specs.iter().map(|(r, s)| (*r, s.to_string())).collect(),
            state: Mutex::new(State {
                status: SessionStatus::Running,
                events: Vec::new(),
                record: None,
                pending: None,
                closed: false,
                version: 0,
            }),
            changed: Condvar::new(),
            notify: watch::channel(0).0,
            snapshot_dir: self.snapshot_dir.clone(),
        });

        let mut players: Vec<(Role, Box<dyn Player>)> = Vec::new();
        for (role, spec) in &specs {
            let player: Box<dyn Player> = match spec {
                PlayerSpec::Human => {
                    Box::new(HumanSeat { session: session.clone(), role: *role, timeout: self.human_timeout })
                }
                other => resolve_player(other, game, *role, &self.resources, self.api.as_ref())
                    .map_err(|e| SessionError::BadRequest(format!("role {role}: {e}")))?,
            };
            players.push((*role, player));
        }

        let observed = session.clone();
        let observer = Box::new(move |e: &Event| {
            let mut st = observed.lock();
            st.events.push(e.clone());
            observed.bump(&mut st);
        });
        let runner = session.clone();
        let resources = self.resources.clone();
        std::thread::Builder::new()
            .name(format!("session-{}", session.id))
            .spawn(move || {
                match play_observed(game, &experiment, &instance, &resources, &mut players, Some(observer)) {
                    Ok(record) => runner.finish(record),
                    // Checked in create_session; only reachable on a bug.
                    Err(e) => panic!("session {}: {e}", runner.id),
                }
            })
            .map_err(|e| SessionError::BadRequest(format!("cannot start episode: {e}")))?;

        let id = session.id.clone();
        self.sessions.lock().unwrap_or_else(|p| p.into_inner()).insert(id.clone(), session);
        Ok(id)
    }

    pub fn session(&self, id: &str) -> Result<Arc<Session>, SessionError> {
        self.sessions
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.into()))
    }

    pub fn list(&self) -> Vec<Summary> {
        let sessions: Vec<_> = self.sessions.lock().unwrap_or_else(|p| p.into_inner()).values().cloned().collect();
        let mut out: Vec<_> = sessions.iter().map(|s| s.summary()).collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// Hands `text` to the engine as `role`'s response and waits (bounded)
    /// until the GM has judged it.
    pub fn submit_move(&self, id: &str, role: Role, text: &str) -> Result<MoveAck, SessionError> {
        let session = self.session(id)?;
        let mut st = session.lock();
        if matches!(st.status, SessionStatus::Finished { .. }) {
            return Err(SessionError::SessionFinished);
        }
        let tx = match st.pending.take() {
            Some((r, tx)) if r == role => tx,
            other => {
                let awaiting = other.as_ref().map(|(r, _)| *r);
                st.pending = other;
                return Err(SessionError::NotYourTurn { awaiting });
            }
        };
        let from = st.events.len();
        st.status = SessionStatus::Running;
        session.bump(&mut st);
        if tx.send(text.to_string()).is_err() {
            return Err(SessionError::SessionFinished);
        }
        let deadline = Instant::now() + SUBMIT_WAIT;
        while st.status == SessionStatus::Running {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                break;
            }
            st = session.changed.wait_timeout(st, left).unwrap_or_else(|p| p.into_inner()).0;
        }
        let verdict = st
            .events
            .iter()
            .skip(from)
            .find(|e| e.message.sender == role)
            .and_then(|e| entry(0, e, Some(role)))
            .and_then(|e| e.verdict);
        Ok(MoveAck { status: st.status.clone(), verdict })
    }

    /// Entries from index `after` on. With `wait`, blocks until there is
    /// something newer than `after` or the session has finished.
    pub fn view(
        &self,
        id: &str,
        role: Option<Role>,
        after: usize,
        wait: Option<Duration>,
    ) -> Result<View, SessionError> {
        let session = self.session(id)?;
        let mut st = session.lock();
        if let Some(wait) = wait {
            let deadline = Instant::now() + wait;
            while st.events.len() <= after && !matches!(st.status, SessionStatus::Finished { .. }) {
                let left = deadline.saturating_duration_since(Instant::now());
                if left.is_zero() {
                    break;
                }
                st = session.changed.wait_timeout(st, left).unwrap_or_else(|p| p.into_inner()).0;
            }
        }
        Ok(session.view_of(&st, role, after))
    }

    /// Blocks until the session is finished or `timeout` passes.
    pub fn wait_finished(&self, id: &str, timeout: Duration) -> Result<Option<InteractionRecord>, SessionError> {
        let session = self.session(id)?;
        let deadline = Instant::now() + timeout;
        let mut st = session.lock();
        while st.record.is_none() {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                break;
            }
            st = session.changed.wait_timeout(st, left).unwrap_or_else(|p| p.into_inner()).0;
        }
        Ok(st.record.clone())
    }

    /// Blocks until `id` is awaiting a move or finished.
    pub fn wait_settled(&self, id: &str, timeout: Duration) -> Result<SessionStatus, SessionError> {
        let session = self.session(id)?;
        let deadline = Instant::now() + timeout;
        let mut st = session.lock();
        while st.status == SessionStatus::Running {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                break;
            }
            st = session.changed.wait_timeout(st, left).unwrap_or_else(|p| p.into_inner()).0;
        }
        Ok(st.status.clone())
    }

    pub fn snapshot_dir(&self) -> Option<&Path> {
        self.snapshot_dir.as_deref()
    }
}

impl Drop for SessionManager {
    fn drop(&mut self) {
        for s in self.sessions.lock().unwrap_or_else(|p| p.into_inner()).values() {
            s.close();
        }
    }
}
