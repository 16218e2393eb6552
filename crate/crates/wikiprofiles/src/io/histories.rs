//! JSON-lines serialization of contributor histories.
//!
//! Line 1 is a schema header, `{"schema":"wikiprofiles/histories","version":1}`;
//! every following line is one contributor. Registered contributors carry
//! `id` and/or `name`; anonymous ones carry `ip`. Months are
//! `[month_index, count]` pairs in ascending month order, timestamps are
//! second-precision UTC (`YYYY-MM-DDTHH:MM:SSZ`). Writers emit contributors
//! sorted by key, so the file is canonical.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::dump::{ContributorHistory, ContributorKey, ContributorKind, ContributorRef};
use crate::{Error, Result};

pub const HISTORIES_SCHEMA: &str = "wikiprofiles/histories";
const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ip: Option<String>,
    bot: bool,
    monthly_counts: Vec<(i32, u64)>,
    first_edit: String,
    last_edit: String,
    distinct_articles: u64,
}

fn format_ts(ts: DateTime<Utc>) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

fn parse_ts(s: &str) -> Result<DateTime<Utc>, String> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .map(|naive| naive.and_utc())
        .map_err(|e| format!("bad timestamp {s:?}: {e}"))
}

impl Record {
    fn from_history(h: &ContributorHistory) -> Self {
        let (id, name, ip) = match &h.contributor.kind {
            ContributorKind::Registered { id, name } => (*id, name.clone(), None),
            ContributorKind::Anonymous { ip } => (None, None, Some(ip.clone())),
        };
        Record {
            id,
            name,
            ip,
            bot: h.contributor.bot,
            monthly_counts: h.monthly_counts.iter().map(|(&m, &c)| (m, c)).collect(),
            first_edit: format_ts(h.first_edit),
            last_edit: format_ts(h.last_edit),
            distinct_articles: h.distinct_articles,
        }
    }

    fn into_history(self) -> Result<ContributorHistory, String> {
        let contributor = match (self.id, self.name, self.ip) {
            (None, None, Some(ip)) => {
                if self.bot {
                    return Err("anonymous contributors cannot be bots".into());
                }
                ContributorRef::anonymous(ip)
            }
            (id, name, None) if id.is_some() || name.is_some() => {
                if name.as_deref() == Some("") {
                    return Err("registered name must be non-empty".into());
                }
                ContributorRef::registered(id, name, self.bot)
            }
            (None, None, None) => return Err("contributor needs id, name, or ip".into()),
            _ => return Err("contributor cannot have both ip and id/name".into()),
        };
        let mut monthly_counts = BTreeMap::new();
        let mut prev: Option<i32> = None;
        for (month, count) in self.monthly_counts {
            if prev.is_some_and(|p| p >= month) {
                return Err(format!(
                    "monthly_counts must be strictly ascending at month {month}"
                ));
            }
            prev = Some(month);
            monthly_counts.insert(month, count);
        }
        let history = ContributorHistory {
            contributor,
            monthly_counts,
            first_edit: parse_ts(&self.first_edit)?,
            last_edit: parse_ts(&self.last_edit)?,
            distinct_articles: self.distinct_articles,
        };
        history.validate().map_err(|e| e.to_string())?;
        Ok(history)
    }
}

/// Serialize histories as canonical JSON lines (key-sorted, one per line).
pub fn write_histories(
    path: &Path,
    histories: &BTreeMap<ContributorKey, ContributorHistory>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        &serde_json::to_string(&Header {
            schema: HISTORIES_SCHEMA.to_string(),
            version: 1,
        })
        .expect("header serializes"),
    );
    out.push('\n');
    for history in histories.values() {
        out.push_str(
            &serde_json::to_string(&Record::from_history(history)).expect("record serializes"),
        );
        out.push('\n');
    }
    super::write_bytes(path, out.as_bytes())
}

/// Read a histories file, validating the schema header and every record's
/// structural invariants. Errors carry the line number and, for decode
/// failures, the offending field path.
pub fn read_histories(path: &Path) -> Result<BTreeMap<ContributorKey, ContributorHistory>> {
    let text = super::read_to_string(path)?;
    let display = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let (_, header_line) = lines
        .next()
        .ok_or_else(|| Error::schema(&display, 1, "schema", "empty file"))?;
    let header: Header = serde_json::from_str(header_line)
        .map_err(|e| Error::schema(&display, 1, "schema", e.to_string()))?;
    if header.schema != HISTORIES_SCHEMA || header.version != 1 {
        return Err(Error::schema(
            &display,
            1,
            "schema",
            format!(
                "expected {HISTORIES_SCHEMA} v1, found {} v{}",
                header.schema, header.version
            ),
        ));
    }

    let mut histories = BTreeMap::new();
    for (index, line) in lines {
        let line_no = index as u64 + 1;
        if line.is_empty() {
            continue;
        }
        let deserializer = &mut serde_json::Deserializer::from_str(line);
        let record: Record = serde_path_to_error::deserialize(deserializer)
            .map_err(|e| Error::schema(&display, line_no, e.path().to_string(), e.inner().to_string()))?;
        let history = record
            .into_history()
            .map_err(|message| Error::schema(&display, line_no, "record", message))?;
        if let Some(previous) = histories.insert(history.key(), history) {
            return Err(Error::schema(
                &display,
                line_no,
                "record",
                format!("duplicate contributor {}", previous.key()),
            ));
        }
    }
    Ok(histories)
}
