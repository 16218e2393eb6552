//! Streaming parser for MediaWiki `pages-meta-history` XML exports.
//!
//! The parser walks `<mediawiki>/<page>/<revision>` with a small state
//! machine over `quick-xml` pull events. Only the handful of leaf elements
//! the pipeline needs are captured; everything else — most importantly the
//! `<text>` revision bodies — is skipped with a constant-size scratch
//! buffer, so peak memory is independent of how much wikitext the dump
//! carries.
//!
//! Error policy: XML well-formedness problems abort parsing with a byte
//! offset (the file is corrupt); per-revision content problems (missing or
//! malformed timestamp, deleted or absent contributor, missing page id)
//! skip that revision and bump a counter in [`ParseStats`].

use std::collections::BTreeSet;
use std::io::BufRead;

use chrono::NaiveDateTime;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::{Error, Result};

use super::botlist::classify_bot;
use super::{ContributorRef, RevisionEvent};

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

/// Ingestion options: an optional namespace whitelist and the bot list
/// consulted for [`ContributorRef::bot`] flags.
#[derive(Debug, Clone, Default)]
pub struct IngestConfig {
    pub namespaces: Option<BTreeSet<i32>>,
    pub bot_list: BTreeSet<String>,
}

/// Counters accumulated while parsing one dump.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// `<page>` elements seen.
    pub pages: u64,
    /// Revision events emitted.
    pub revisions: u64,
    /// Revisions dropped because their timestamp was missing or malformed.
    pub skipped_bad_timestamp: u64,
    /// Revisions dropped because the contributor was deleted, absent,
    /// or structurally invalid (e.g. both an IP and a username).
    pub skipped_bad_contributor: u64,
    /// Revisions dropped because the enclosing page had no usable id.
    pub skipped_missing_page_id: u64,
    /// Revisions excluded by the namespace filter (not an error).
    pub filtered_namespace: u64,
}

impl ParseStats {
    /// Revisions dropped for content reasons (excludes namespace filtering).
    pub fn skipped_total(&self) -> u64 {
        self.skipped_bad_timestamp + self.skipped_bad_contributor + self.skipped_missing_page_id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    /// Before the root element.
    Start,
    InMediawiki,
    InPage,
    InRevision,
    InContributor,
    /// After `</mediawiki>`.
    Closed,
}

/// Leaf element currently being captured into the text accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Capture {
    PageNs,
    PageId,
    Timestamp,
    ContribId,
    ContribName,
    ContribIp,
}

/// Elements the state machine cares about; everything else is `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Element {
    Mediawiki,
    Page,
    Ns,
    Id,
    Revision,
    Timestamp,
    Contributor,
    Username,
    Ip,
    Minor,
    Other,
}

fn element_of(name: &[u8]) -> Element {
    match name {
        b"mediawiki" => Element::Mediawiki,
        b"page" => Element::Page,
        b"ns" => Element::Ns,
        b"id" => Element::Id,
        b"revision" => Element::Revision,
        b"timestamp" => Element::Timestamp,
        b"contributor" => Element::Contributor,
        b"username" => Element::Username,
        b"ip" => Element::Ip,
        b"minor" => Element::Minor,
        _ => Element::Other,
    }
}

/// Raw fields of the revision being assembled.
#[derive(Debug, Default)]
struct RevFields {
    timestamp: Option<String>,
    minor: bool,
    saw_contributor: bool,
    contributor_deleted: bool,
    contrib_id: Option<String>,
    contrib_name: Option<String>,
    contrib_ip: Option<String>,
}

/// Streaming iterator over the revision events of one dump.
///
/// Yields `Ok(event)` per usable `<revision>`; a well-formedness error
/// yields one `Err` and then the iterator fuses. Skip counters are
/// available through [`DumpParser::stats`] at any point.
pub struct DumpParser<R: BufRead> {
    reader: Reader<R>,
    config: IngestConfig,
    state: State,
    capture: Option<Capture>,
    text: String,
    buf: Vec<u8>,
    skip_buf: Vec<u8>,
    page_id: Option<u64>,
    page_id_seen: bool,
    page_ns: i32,
    rev: RevFields,
    stats: ParseStats,
    done: bool,
}

/// Parse a (decompressed) dump stream into revision events.
pub fn parse_dump<R: BufRead>(source: R, config: IngestConfig) -> DumpParser<R> {
    DumpParser {
        reader: Reader::from_reader(source),
        config,
        state: State::Start,
        capture: None,
        text: String::new(),
        buf: Vec::new(),
        skip_buf: Vec::new(),
        page_id: None,
        page_id_seen: false,
        page_ns: 0,
        rev: RevFields::default(),
        stats: ParseStats::default(),
        done: false,
    }
}

impl<R: BufRead> DumpParser<R> {
    pub fn stats(&self) -> &ParseStats {
        &self.stats
    }

    fn fatal_here(&mut self, message: impl Into<String>) -> Error {
        self.done = true;
        Error::Xml {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    /// Consume the subtree opened by `start`, reusing the scratch buffer
    /// (cleared per inner event, so memory stays bounded by the largest
    /// single node, not the subtree).
    fn skip_subtree(
        reader: &mut Reader<R>,
        skip_buf: &mut Vec<u8>,
        start: &BytesStart,
    ) -> std::result::Result<(), quick_xml::Error> {
        let end = start.to_end().into_owned();
        skip_buf.clear();
        reader.read_to_end_into(end.name(), skip_buf)?;
        Ok(())
    }

    fn begin_capture(&mut self, what: Capture) {
        self.capture = Some(what);
        self.text.clear();
    }

    /// Commit the accumulated text of a captured leaf element.
    fn commit_capture(&mut self, what: Capture) {
        let text = std::mem::take(&mut self.text);
        match what {
            Capture::PageNs => {
                // A missing or garbled <ns> falls back to the main namespace.
                self.page_ns = text.trim().parse().unwrap_or(0);
            }
            Capture::PageId => {
                self.page_id_seen = true;
                self.page_id = text.trim().parse::<u64>().ok().filter(|&id| id > 0);
            }
            Capture::Timestamp => self.rev.timestamp = Some(text),
            Capture::ContribId => self.rev.contrib_id = Some(text),
            Capture::ContribName => self.rev.contrib_name = Some(text),
            Capture::ContribIp => self.rev.contrib_ip = Some(text),
        }
    }

    /// Assemble an event from the fields gathered for the closing
    /// `<revision>`, or count why it cannot be used.
    fn finish_revision(&mut self) -> Option<RevisionEvent> {
        let rev = std::mem::take(&mut self.rev);
        let Some(page_id) = self.page_id else {
            self.stats.skipped_missing_page_id += 1;
            return None;
        };
        if let Some(filter) = &self.config.namespaces {
            if !filter.contains(&self.page_ns) {
                self.stats.filtered_namespace += 1;
                return None;
            }
        }
        let timestamp = rev
            .timestamp
            .as_deref()
            .and_then(|raw| NaiveDateTime::parse_from_str(raw.trim(), TIMESTAMP_FORMAT).ok());
        let Some(timestamp) = timestamp else {
            self.stats.skipped_bad_timestamp += 1;
            return None;
        };
        let Some(contributor) = Self::resolve_contributor(&rev, &self.config.bot_list) else {
            self.stats.skipped_bad_contributor += 1;
            return None;
        };
        self.stats.revisions += 1;
        Some(RevisionEvent {
            page_id,
            namespace: self.page_ns,
            timestamp: timestamp.and_utc(),
            contributor,
            minor: rev.minor,
        })
    }

    fn resolve_contributor(rev: &RevFields, bot_list: &BTreeSet<String>) -> Option<ContributorRef> {
        if rev.contributor_deleted || !rev.saw_contributor {
            return None;
        }
        let name = rev.contrib_name.as_deref().filter(|s| !s.is_empty());
        let ip = rev.contrib_ip.as_deref().filter(|s| !s.is_empty());
        let id = match rev.contrib_id.as_deref() {
            None => None,
            // A present-but-unparseable id invalidates the contributor.
            Some(raw) => Some(raw.trim().parse::<u64>().ok()?),
        };
        match (ip, id, name) {
            (Some(ip), None, None) => Some(ContributorRef::anonymous(ip)),
            (None, id, name) if id.is_some() || name.is_some() => {
                let bot = name.is_some_and(|n| classify_bot(n, bot_list));
                Some(ContributorRef::registered(id, name, bot))
            }
            // Both identity variants, or neither: structurally invalid.
            _ => None,
        }
    }
}

impl<R: BufRead> Iterator for DumpParser<R> {
    type Item = Result<RevisionEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Xml {
                        offset: self.reader.error_position(),
                        message: e.to_string(),
                    }));
                }
            };
            match event {
                Event::Decl(_) | Event::Comment(_) | Event::DocType(_) | Event::PI(_) => {}

                Event::Text(t) => {
                    let content = match t.xml10_content() {
                        Ok(c) => c,
                        Err(e) => return Some(Err(self.fatal_here(e.to_string()))),
                    };
                    if self.capture.is_some() {
                        self.text.push_str(&content);
                    } else if matches!(self.state, State::Start | State::Closed)
                        && !content.trim().is_empty()
                    {
                        return Some(Err(self.fatal_here("text outside the document root")));
                    }
                }

                Event::CData(t) => {
                    if self.capture.is_some() {
                        match t.decode() {
                            Ok(c) => self.text.push_str(&c),
                            Err(e) => return Some(Err(self.fatal_here(e.to_string()))),
                        }
                    }
                }

                Event::GeneralRef(r) => {
                    if self.capture.is_some() {
                        match r.resolve_char_ref() {
                            Ok(Some(c)) => self.text.push(c),
                            Ok(None) => {
                                let name = match r.decode() {
                                    Ok(n) => n,
                                    Err(e) => return Some(Err(self.fatal_here(e.to_string()))),
                                };
                                match name.as_ref() {
                                    "amp" => self.text.push('&'),
                                    "lt" => self.text.push('<'),
                                    "gt" => self.text.push('>'),
                                    "apos" => self.text.push('\''),
                                    "quot" => self.text.push('"'),
                                    // Undeclared entity: keep it verbatim
                                    // rather than guessing.
                                    other => {
                                        self.text.push('&');
                                        self.text.push_str(other);
                                        self.text.push(';');
                                    }
                                }
                            }
                            Err(e) => return Some(Err(self.fatal_here(e.to_string()))),
                        }
                    }
                }

                Event::Start(e) => {
                    if self.capture.is_some() {
                        // Markup nested inside a captured leaf: not part of
                        // any schema we accept; drop it wholesale.
                        if let Err(err) = Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                        {
                            return Some(Err(self.fatal_here(err.to_string())));
                        }
                        continue;
                    }
                    let el = element_of(e.local_name().as_ref());
                    match self.state {
                        State::Start => {
                            if el == Element::Mediawiki {
                                self.state = State::InMediawiki;
                            } else {
                                return Some(
                                    Err(self.fatal_here("root element is not <mediawiki>")),
                                );
                            }
                        }
                        State::InMediawiki => {
                            if el == Element::Page {
                                self.state = State::InPage;
                                self.page_id = None;
                                self.page_id_seen = false;
                                self.page_ns = 0;
                                self.stats.pages += 1;
                            } else if let Err(err) =
                                Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                            {
                                return Some(Err(self.fatal_here(err.to_string())));
                            }
                        }
                        State::InPage => match el {
                            Element::Ns => self.begin_capture(Capture::PageNs),
                            Element::Id if !self.page_id_seen => {
                                self.begin_capture(Capture::PageId)
                            }
                            Element::Revision => {
                                self.state = State::InRevision;
                                self.rev = RevFields::default();
                            }
                            _ => {
                                if let Err(err) =
                                    Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                                {
                                    return Some(Err(self.fatal_here(err.to_string())));
                                }
                            }
                        },
                        State::InRevision => match el {
                            Element::Timestamp => self.begin_capture(Capture::Timestamp),
                            Element::Contributor => {
                                self.rev.saw_contributor = true;
                                match e.try_get_attribute("deleted") {
                                    Ok(deleted) => {
                                        self.rev.contributor_deleted = deleted.is_some()
                                    }
                                    Err(err) => {
                                        return Some(Err(self.fatal_here(err.to_string())))
                                    }
                                }
                                self.state = State::InContributor;
                            }
                            Element::Minor => {
                                self.rev.minor = true;
                                if let Err(err) =
                                    Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                                {
                                    return Some(Err(self.fatal_here(err.to_string())));
                                }
                            }
                            // <text>, <comment>, <sha1>, nested <id>, ...:
                            // skipped without buffering.
                            _ => {
                                if let Err(err) =
                                    Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                                {
                                    return Some(Err(self.fatal_here(err.to_string())));
                                }
                            }
                        },
                        State::InContributor => match el {
                            Element::Username => self.begin_capture(Capture::ContribName),
                            Element::Id => self.begin_capture(Capture::ContribId),
                            Element::Ip => self.begin_capture(Capture::ContribIp),
                            _ => {
                                if let Err(err) =
                                    Self::skip_subtree(&mut self.reader, &mut self.skip_buf, &e)
                                {
                                    return Some(Err(self.fatal_here(err.to_string())));
                                }
                            }
                        },
                        State::Closed => {
                            return Some(Err(self.fatal_here("content after </mediawiki>")));
                        }
                    }
                }

                Event::Empty(e) => {
                    if self.capture.is_some() {
                        continue;
                    }
                    let el = element_of(e.local_name().as_ref());
                    match self.state {
                        State::Start => {
                            if el == Element::Mediawiki {
                                // <mediawiki/>: a valid, empty document.
                                self.state = State::Closed;
                            } else {
                                return Some(
                                    Err(self.fatal_here("root element is not <mediawiki>")),
                                );
                            }
                        }
                        State::InMediawiki => {
                            if el == Element::Page {
                                self.stats.pages += 1;
                            }
                        }
                        State::InPage => match el {
                            Element::Ns => self.page_ns = 0,
                            Element::Id if !self.page_id_seen => {
                                self.page_id_seen = true;
                                self.page_id = None;
                            }
                            Element::Revision => {
                                self.rev = RevFields::default();
                                if let Some(out) = self.finish_revision() {
                                    return Some(Ok(out));
                                }
                            }
                            _ => {}
                        },
                        State::InRevision => match el {
                            Element::Minor => self.rev.minor = true,
                            Element::Timestamp => self.rev.timestamp = Some(String::new()),
                            Element::Contributor => {
                                self.rev.saw_contributor = true;
                                match e.try_get_attribute("deleted") {
                                    Ok(deleted) => {
                                        self.rev.contributor_deleted = deleted.is_some()
                                    }
                                    Err(err) => {
                                        return Some(Err(self.fatal_here(err.to_string())))
                                    }
                                }
                            }
                            _ => {}
                        },
                        State::InContributor => match el {
                            Element::Username => self.rev.contrib_name = Some(String::new()),
                            Element::Id => self.rev.contrib_id = Some(String::new()),
                            Element::Ip => self.rev.contrib_ip = Some(String::new()),
                            _ => {}
                        },
                        State::Closed => {
                            return Some(Err(self.fatal_here("content after </mediawiki>")));
                        }
                    }
                }

                Event::End(_) => {
                    if let Some(cap) = self.capture.take() {
                        // With end-name checking on, the first End seen while
                        // capturing necessarily closes the captured leaf.
                        self.commit_capture(cap);
                        continue;
                    }
                    match self.state {
                        State::InContributor => self.state = State::InRevision,
                        State::InRevision => {
                            self.state = State::InPage;
                            if let Some(out) = self.finish_revision() {
                                return Some(Ok(out));
                            }
                        }
                        State::InPage => self.state = State::InMediawiki,
                        State::InMediawiki => self.state = State::Closed,
                        State::Start | State::Closed => {}
                    }
                }

                Event::Eof => {
                    self.done = true;
                    return match self.state {
                        State::Closed => None,
                        State::Start => {
                            Some(Err(self.fatal_here("empty document: no <mediawiki> root")))
                        }
                        _ => Some(Err(self.fatal_here("unexpected end of document"))),
                    };
                }
            }
        }
    }
}
