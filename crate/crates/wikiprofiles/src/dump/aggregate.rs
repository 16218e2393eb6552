//! Aggregation of revision events into per-contributor histories.
//!
//! Aggregation is a commutative fold: counts add, first/last timestamps
//! take min/max, page sets union, bot flags OR, and when several usernames
//! appear under one key the lexicographically smallest wins. Because every
//! combining operation is order-insensitive, histories are identical no
//! matter how the event stream is ordered or sharded.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};

use super::{month_index, ContributorHistory, ContributorKey, ContributorKind, ContributorRef, RevisionEvent};

/// In-progress history for one contributor key.
#[derive(Debug, Clone)]
pub struct HistoryAccumulator {
    contributor: ContributorRef,
    monthly: BTreeMap<i32, u64>,
    first: DateTime<Utc>,
    last: DateTime<Utc>,
    pages: BTreeSet<u64>,
}

impl HistoryAccumulator {
    pub fn new(event: &RevisionEvent) -> Self {
        HistoryAccumulator {
            contributor: event.contributor.clone(),
            monthly: BTreeMap::from([(month_index(event.timestamp), 1)]),
            first: event.timestamp,
            last: event.timestamp,
            pages: BTreeSet::from([event.page_id]),
        }
    }

    pub fn add(&mut self, event: &RevisionEvent) {
        *self.monthly.entry(month_index(event.timestamp)).or_insert(0) += 1;
        self.first = self.first.min(event.timestamp);
        self.last = self.last.max(event.timestamp);
        self.pages.insert(event.page_id);
        self.merge_identity(&event.contributor);
    }

    /// Fold another accumulator for the same key into this one.
    pub fn merge(&mut self, other: HistoryAccumulator) {
        for (month, count) in other.monthly {
            *self.monthly.entry(month).or_insert(0) += count;
        }
        self.first = self.first.min(other.first);
        self.last = self.last.max(other.last);
        self.pages.extend(other.pages);
        self.merge_identity(&other.contributor);
    }

    /// Identity fields are combined commutatively: bot flags OR together
    /// and, for id-keyed contributors whose revisions disagree on the
    /// username, the lexicographically smallest observed name is kept.
    fn merge_identity(&mut self, other: &ContributorRef) {
        self.contributor.bot |= other.bot;
        if let (
            ContributorKind::Registered { name, .. },
            ContributorKind::Registered { name: other_name, .. },
        ) = (&mut self.contributor.kind, &other.kind)
        {
            match (name.as_deref(), other_name.as_deref()) {
                (None, Some(_)) => name.clone_from(other_name),
                (Some(current), Some(candidate)) if candidate < current => {
                    name.clone_from(other_name)
                }
                _ => {}
            }
        }
    }

    pub fn finish(self) -> ContributorHistory {
        ContributorHistory {
            contributor: self.contributor,
            monthly_counts: self.monthly,
            first_edit: self.first,
            last_edit: self.last,
            distinct_articles: self.pages.len() as u64,
        }
    }
}

/// Aggregate events into histories, keyed canonically. Anonymous and bot
/// contributors are retained (and flagged); filtering happens downstream.
pub fn aggregate_histories(
    events: impl IntoIterator<Item = RevisionEvent>,
) -> BTreeMap<ContributorKey, ContributorHistory> {
    let mut map: BTreeMap<ContributorKey, HistoryAccumulator> = BTreeMap::new();
    for event in events {
        accumulate(&mut map, event);
    }
    map.into_iter().map(|(k, acc)| (k, acc.finish())).collect()
}

/// Aggregate via `shards` independent partial maps merged at the end.
/// Produces exactly the same result as [`aggregate_histories`] for any
/// shard count — the combining operations are commutative — which is the
/// property the tests pin down.
pub fn aggregate_histories_sharded(
    events: impl IntoIterator<Item = RevisionEvent>,
    shards: usize,
) -> BTreeMap<ContributorKey, ContributorHistory> {
    assert!(shards >= 1, "shard count must be positive");
    let mut shard_maps: Vec<BTreeMap<ContributorKey, HistoryAccumulator>> =
        vec![BTreeMap::new(); shards];
    for event in events {
        let shard = shard_of(&event.contributor.key(), shards);
        accumulate(&mut shard_maps[shard], event);
    }
    let mut merged: BTreeMap<ContributorKey, HistoryAccumulator> = BTreeMap::new();
    for shard_map in shard_maps {
        for (key, acc) in shard_map {
            match merged.entry(key) {
                Entry::Occupied(mut occupied) => occupied.get_mut().merge(acc),
                Entry::Vacant(vacant) => {
                    vacant.insert(acc);
                }
            }
        }
    }
    merged.into_iter().map(|(k, acc)| (k, acc.finish())).collect()
}

fn accumulate(map: &mut BTreeMap<ContributorKey, HistoryAccumulator>, event: RevisionEvent) {
    match map.entry(event.contributor.key()) {
        Entry::Occupied(mut occupied) => occupied.get_mut().add(&event),
        Entry::Vacant(vacant) => {
            vacant.insert(HistoryAccumulator::new(&event));
        }
    }
}

/// Deterministic shard routing (FNV-1a over the canonical key bytes;
/// never the std hasher, whose per-process seed would make shard contents
/// run-dependent even though the merged result is not).
fn shard_of(key: &ContributorKey, shards: usize) -> usize {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    match key {
        ContributorKey::Id(id) => {
            eat(&[0]);
            eat(&id.to_be_bytes());
        }
        ContributorKey::Name(name) => {
            eat(&[1]);
            eat(name.as_bytes());
        }
        ContributorKey::Ip(ip) => {
            eat(&[2]);
            eat(ip.as_bytes());
        }
    }
    (hash % shards as u64) as usize
}
