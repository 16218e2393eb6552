//! Bot identification: a user-supplied list plus a username-suffix rule.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use crate::{Error, Result};

/// True when `name` should be treated as a bot: exact membership in
/// `bot_list`, or a case-insensitive `bot` suffix (the convention MediaWiki
/// bot accounts follow). Dump files carry no group membership, so this is
/// the best signal available offline.
pub fn classify_bot(name: &str, bot_list: &BTreeSet<String>) -> bool {
    bot_list.contains(name) || name.to_lowercase().ends_with("bot")
}

/// Parse a bot list: one username per line, `#` starts a comment, blank
/// lines ignored, surrounding whitespace trimmed.
pub fn parse_bot_list(reader: impl BufRead) -> std::io::Result<BTreeSet<String>> {
    let mut set = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        let entry = match line.split_once('#') {
            Some((before, _)) => before,
            None => &line,
        }
        .trim();
        if !entry.is_empty() {
            set.insert(entry.to_string());
        }
    }
    Ok(set)
}

/// Load a bot list from a UTF-8 text file.
pub fn load_bot_list(path: &Path) -> Result<BTreeSet<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_bot_list(std::io::BufReader::new(file)).map_err(|e| Error::io(path, e))
}
