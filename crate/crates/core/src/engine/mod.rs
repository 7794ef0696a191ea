//! Generic turn-based episode runner.

pub mod episode;
pub mod policy;
pub mod record;
pub mod template;
pub mod types;

pub use episode::{run_episode, run_episode_observed, Episode, EventObserver, GameMaster, Interrupt, Seat, Terminal};
pub use policy::{decide_reprompt, Decision, PolicyError, RepromptPolicy};
pub use record::{
    canonical_json, AbortCause, AbortInfo, Event, InteractionRecord, RecordBuilder, RecordError, RecordMeta,
    RequestCounts,
};
pub use template::{fill, render_template, PromptTemplate, TemplateError};
pub use types::{Channel, EpisodeOutcome, Message, MoveVerdict, Role, Status, Violation, ViolationKind};
