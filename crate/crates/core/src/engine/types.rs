use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "GM")]
    Gm,
    #[serde(rename = "A")]
    PlayerA,
    #[serde(rename = "B")]
    PlayerB,
}

impl Role {
    pub fn is_player(self) -> bool {
        self != Role::Gm
    }

    pub fn short(self) -> &'static str {
        match self {
            Role::Gm => "GM",
            Role::PlayerA => "A",
            Role::PlayerB => "B",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gm" => Some(Role::Gm),
            "a" | "playera" | "player_a" => Some(Role::PlayerA),
            "b" | "playerb" | "player_b" => Some(Role::PlayerB),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Game,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Role,
    pub recipient: Role,
    pub channel: Channel,
    pub text: String,
    pub turn: u32,
}

impl Message {
    pub fn to_player(recipient: Role, text: impl Into<String>, turn: u32) -> Message {
        Message { sender: Role::Gm, recipient, channel: Channel::Game, text: text.into(), turn }
    }

    pub fn from_player(sender: Role, text: impl Into<String>, turn: u32) -> Message {
        Message { sender, recipient: Role::Gm, channel: Channel::Game, text: text.into(), turn }
    }

    pub fn internal(text: impl Into<String>, turn: u32) -> Message {
        Message { sender: Role::Gm, recipient: Role::Gm, channel: Channel::Internal, text: text.into(), turn }
    }

    /// A response from a player to the GM; these are the countable requests.
    pub fn is_request(&self) -> bool {
        self.sender.is_player() && self.recipient == Role::Gm && self.channel == Channel::Game
    }

    /// Internal iff GM to GM; players only ever talk to the GM.
    pub fn well_formed(&self) -> bool {
        let gm_only = self.sender == Role::Gm && self.recipient == Role::Gm;
        let via_gm = self.sender == Role::Gm || self.recipient == Role::Gm;
        (self.channel == Channel::Internal) == gm_only && via_gm && self.turn >= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Format,
    Rule,
}

/// The GM's judgement of one player response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MoveVerdict {
    Valid,
    Violation { kind: ViolationKind, class: String, detail: String },
}

impl MoveVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, MoveVerdict::Valid)
    }
}

/// A rejected move, with the text the GM sends if it decides to reprompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub class: &'static str,
    pub detail: String,
    pub reprompt: String,
}

impl Violation {
    pub fn format(class: &'static str, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Violation { kind: ViolationKind::Format, class, reprompt: detail.clone(), detail }
    }

    pub fn rule(class: &'static str, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Violation { kind: ViolationKind::Rule, class, reprompt: detail.clone(), detail }
    }

    pub fn with_reprompt(mut self, text: impl Into<String>) -> Self {
        self.reprompt = text.into();
        self
    }

    pub fn verdict(&self) -> MoveVerdict {
        MoveVerdict::Violation { kind: self.kind, class: self.class.to_string(), detail: self.detail.clone() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Lose,
    Aborted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub status: Status,
    pub final_turn: u32,
}
