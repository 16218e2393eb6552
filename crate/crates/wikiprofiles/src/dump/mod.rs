//! MediaWiki `pages-meta-history` ingestion: domain types, compression
//! sniffing, a streaming XML parser, and per-contributor aggregation.

mod aggregate;
mod botlist;
mod parser;
mod read;

pub use aggregate::{aggregate_histories, aggregate_histories_sharded, HistoryAccumulator};
pub use botlist::{classify_bot, load_bot_list, parse_bot_list};
pub use parser::{parse_dump, DumpParser, IngestConfig, ParseStats};
pub use read::{decompress, open_dump, Compression};

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Datelike, Utc};

use crate::{Error, Result};

/// Identity carried by a revision's `<contributor>` element.
///
/// Registered contributors may omit either the numeric id or the username
/// (old dump schemas did both); at least one is always present.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContributorKind {
    Registered {
        id: Option<u64>,
        name: Option<String>,
    },
    Anonymous {
        ip: String,
    },
}

/// A revision author together with its bot classification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContributorRef {
    pub kind: ContributorKind,
    /// Always `false` for anonymous contributors.
    pub bot: bool,
}

impl ContributorRef {
    pub fn registered(id: Option<u64>, name: Option<impl Into<String>>, bot: bool) -> Self {
        ContributorRef {
            kind: ContributorKind::Registered {
                id,
                name: name.map(Into::into),
            },
            bot,
        }
    }

    pub fn anonymous(ip: impl Into<String>) -> Self {
        ContributorRef {
            kind: ContributorKind::Anonymous { ip: ip.into() },
            bot: false,
        }
    }

    pub fn is_registered(&self) -> bool {
        matches!(self.kind, ContributorKind::Registered { .. })
    }

    pub fn is_anonymous(&self) -> bool {
        matches!(self.kind, ContributorKind::Anonymous { .. })
    }

    /// Aggregation key: numeric id when present, else username, else IP.
    pub fn key(&self) -> ContributorKey {
        match &self.kind {
            ContributorKind::Registered { id: Some(id), .. } => ContributorKey::Id(*id),
            ContributorKind::Registered { id: None, name } => ContributorKey::Name(
                name.clone()
                    .expect("registered contributor carries an id or a name"),
            ),
            ContributorKind::Anonymous { ip } => ContributorKey::Ip(ip.clone()),
        }
    }
}

/// Canonical contributor identity used to aggregate, sort, and serialize.
///
/// The derived ordering (ids numerically, then names, then IPs
/// lexicographically) fixes the row order of every downstream artifact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContributorKey {
    Id(u64),
    Name(String),
    Ip(String),
}

impl ContributorKey {
    /// Parse the canonical `id:`/`name:`/`ip:` form produced by `Display`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("id:") {
            let id = rest
                .parse::<u64>()
                .map_err(|e| Error::Invalid(format!("bad contributor key {s:?}: {e}")))?;
            Ok(ContributorKey::Id(id))
        } else if let Some(rest) = s.strip_prefix("name:") {
            if rest.is_empty() {
                return Err(Error::Invalid(format!("bad contributor key {s:?}: empty name")));
            }
            Ok(ContributorKey::Name(rest.to_string()))
        } else if let Some(rest) = s.strip_prefix("ip:") {
            if rest.is_empty() {
                return Err(Error::Invalid(format!("bad contributor key {s:?}: empty ip")));
            }
            Ok(ContributorKey::Ip(rest.to_string()))
        } else {
            Err(Error::Invalid(format!(
                "bad contributor key {s:?}: expected id:/name:/ip: prefix"
            )))
        }
    }
}

impl fmt::Display for ContributorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContributorKey::Id(id) => write!(f, "id:{id}"),
            ContributorKey::Name(name) => write!(f, "name:{name}"),
            ContributorKey::Ip(ip) => write!(f, "ip:{ip}"),
        }
    }
}

/// One parsed `<revision>` element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionEvent {
    pub page_id: u64,
    pub namespace: i32,
    pub timestamp: DateTime<Utc>,
    pub contributor: ContributorRef,
    pub minor: bool,
}

/// Index of a UTC instant's calendar month on a single integer axis
/// (`year × 12 + month − 1`), the clock unit for all gap features.
pub fn month_index(ts: DateTime<Utc>) -> i32 {
    ts.year() * 12 + ts.month0() as i32
}

/// Per-contributor aggregate over all their revisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributorHistory {
    pub contributor: ContributorRef,
    /// Edit count per active month, keyed by [`month_index`]. Non-empty;
    /// every count ≥ 1.
    pub monthly_counts: BTreeMap<i32, u64>,
    pub first_edit: DateTime<Utc>,
    pub last_edit: DateTime<Utc>,
    /// Number of distinct pages touched (illustrative; never clustered on).
    pub distinct_articles: u64,
}

impl ContributorHistory {
    pub fn total_edits(&self) -> u64 {
        self.monthly_counts.values().sum()
    }

    pub fn active_months(&self) -> usize {
        self.monthly_counts.len()
    }

    pub fn key(&self) -> ContributorKey {
        self.contributor.key()
    }

    /// Check the structural invariants; used when deserializing histories
    /// from external files.
    pub fn validate(&self) -> Result<()> {
        if self.monthly_counts.is_empty() {
            return Err(Error::Invalid("history has no active months".into()));
        }
        if self.monthly_counts.values().any(|&c| c == 0) {
            return Err(Error::Invalid("history has a zero monthly count".into()));
        }
        if self.first_edit > self.last_edit {
            return Err(Error::Invalid(format!(
                "first_edit {} is after last_edit {}",
                self.first_edit, self.last_edit
            )));
        }
        let first_month = *self.monthly_counts.keys().next().unwrap();
        let last_month = *self.monthly_counts.keys().next_back().unwrap();
        if month_index(self.first_edit) != first_month {
            return Err(Error::Invalid(format!(
                "first_edit {} does not fall in the earliest active month",
                self.first_edit
            )));
        }
        if month_index(self.last_edit) != last_month {
            return Err(Error::Invalid(format!(
                "last_edit {} does not fall in the latest active month",
                self.last_edit
            )));
        }
        if self.distinct_articles == 0 {
            return Err(Error::Invalid("history touches no articles".into()));
        }
        if let ContributorKind::Registered { id: None, name: None } = self.contributor.kind {
            return Err(Error::Invalid(
                "registered contributor carries neither id nor name".into(),
            ));
        }
        if let ContributorKind::Registered { name: Some(name), .. } = &self.contributor.kind {
            if name.is_empty() {
                return Err(Error::Invalid("registered contributor has an empty name".into()));
            }
        }
        if self.contributor.is_anonymous() && self.contributor.bot {
            return Err(Error::Invalid("anonymous contributor flagged as bot".into()));
        }
        Ok(())
    }
}
