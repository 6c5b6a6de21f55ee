use thiserror::Error;

/// Failures raised by the game and value operations.
///
/// Each variant maps to a stable machine-readable code via [`GameError::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("set system is not intersection-closed")]
    NotIntersectionClosed,
    #[error("grand coalition is not a known coalition")]
    GrandCoalitionMissing,
    #[error("game has no positive extension")]
    NotPExtendable,
    #[error("UD-value is not unique on this set system")]
    UdNotUnique,
    #[error("exhaustive enumeration refused for {players} players (limit {limit})")]
    TooManyPlayers { players: usize, limit: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl GameError {
    pub fn code(&self) -> &'static str {
        match self {
            GameError::Input(_) => "invalid_input",
            GameError::NotIntersectionClosed => "not_intersection_closed",
            GameError::GrandCoalitionMissing => "grand_coalition_missing",
            GameError::NotPExtendable => "not_p_extendable",
            GameError::UdNotUnique => "ud_not_unique",
            GameError::TooManyPlayers { .. } => "too_many_players",
            GameError::Parse { .. } => "parse_error",
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        GameError::Input(message.into())
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
