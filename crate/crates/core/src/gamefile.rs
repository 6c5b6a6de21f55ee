//! Text format for incomplete games.
//!
//! ```text
//! # comment
//! players 3
//! 1 0
//! 6 1
//! 7 1
//! ```
//!
//! Each data line is a decimal coalition mask and its worth. The set system
//! is exactly the listed masks plus `∅`.

use std::fs;
use std::path::Path;

use crate::error::{GameError, Result};
use crate::games::IncompleteGame;
use crate::scalar::Scalar;
use crate::setsys::{Coalition, SetSystem, MAX_PLAYERS};

fn parse_error(line: usize, message: impl Into<String>) -> GameError {
    GameError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_game<S: Scalar>(text: &str) -> Result<IncompleteGame<S>> {
    let mut players: Option<usize> = None;
    let mut seen: u128 = 0;
    let mut known: Vec<(Coalition, S)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(n) = players else {
            match tokens.as_slice() {
                ["players", count] => {
                    let n: usize = count
                        .parse()
                        .map_err(|_| parse_error(line, format!("bad player count '{count}'")))?;
                    if n == 0 || n > MAX_PLAYERS {
                        return Err(parse_error(line, format!("player count must be in 1..={MAX_PLAYERS}")));
                    }
                    players = Some(n);
                    continue;
                }
                _ => return Err(parse_error(line, "expected 'players <n>'")),
            }
        };
        let [mask, worth] = tokens.as_slice() else {
            return Err(parse_error(line, "expected '<mask> <value>'"));
        };
        let mask: u32 = mask
            .parse()
            .map_err(|_| parse_error(line, format!("bad coalition mask '{mask}'")))?;
        if mask >= 1 << n {
            return Err(parse_error(line, format!("mask {mask} out of range for {n} players")));
        }
        if seen >> mask & 1 == 1 {
            return Err(parse_error(line, format!("duplicate mask {mask}")));
        }
        seen |= 1 << mask;
        let worth = S::parse_value(worth).ok_or_else(|| parse_error(line, format!("bad value '{worth}'")))?;
        if mask == 0 && !worth.is_zero() {
            return Err(parse_error(line, "the empty coalition must have worth 0"));
        }
        known.push((Coalition::from_mask(mask), worth));
    }
    let n = players.ok_or_else(|| parse_error(text.lines().count().max(1), "missing 'players <n>' line"))?;
    IncompleteGame::from_known(n, known)
}

pub fn read_game<S: Scalar>(path: impl AsRef<Path>) -> Result<IncompleteGame<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| GameError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_game(&text)
}

/// Serializes `game`; `header` lines are written as `#` comments. `∅` is
/// omitted.
pub fn format_game<S: Scalar>(game: &IncompleteGame<S>, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
    out.push_str(&format!("players {}\n", game.players()));
    for (c, v) in game.entries().filter(|(c, _)| !c.is_empty()) {
        out.push_str(&format!("{} {}\n", c.mask(), v));
    }
    out
}

pub fn write_game<S: Scalar>(path: impl AsRef<Path>, game: &IncompleteGame<S>, header: &[String]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_game(game, header))
        .map_err(|e| GameError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Parses a set system given as a decimal membership mask.
pub fn parse_system(n: usize, mask: &str) -> Result<SetSystem> {
    let mask: u128 = mask
        .trim()
        .parse()
        .map_err(|_| GameError::Input(format!("bad set-system mask '{mask}'")))?;
    if n <= MAX_PLAYERS && (1u32 << n) < 128 && mask >> (1u32 << n) != 0 {
        return Err(GameError::Input(format!("mask {mask} has members outside 2^N for {n} players")));
    }
    SetSystem::from_mask(n, mask)
}
