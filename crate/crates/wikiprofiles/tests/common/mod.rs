//! Shared fixtures for the integration suites: random unit-cube instances
//! for the clustering oracles and a hand-crafted dump exercising every
//! ingestion filter rule.

#![allow(dead_code)]

use std::fmt::Write as _;

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use wikiprofiles::cluster::DistanceMatrix;
use wikiprofiles::dump::ContributorKey;

pub fn euclid6(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `n` points drawn uniformly from the 6-D unit cube.
pub fn unit_cube_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 6]> {
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.0..1.0)))
        .collect()
}

pub fn distance_matrix(points: &[[f64; 6]]) -> DistanceMatrix {
    DistanceMatrix::from_fn(points.len(), |i, j| euclid6(&points[i], &points[j]))
}

/// One `<revision>` element; `contributor` is the inner XML of the
/// `<contributor>` node.
fn push_revision(xml: &mut String, rev_id: &mut u64, contributor: &str, ts: &str) {
    *rev_id += 1;
    write!(
        xml,
        "    <revision>\n      <id>{rev_id}</id>\n      <timestamp>{ts}</timestamp>\n      \
         <contributor>{contributor}</contributor>\n      <comment>fixture</comment>\n      \
         <text xml:space=\"preserve\">fixture edit</text>\n    </revision>\n"
    )
    .unwrap();
}

/// `count` revisions by `contributor` spread over one calendar month.
fn push_month(
    xml: &mut String,
    rev_id: &mut u64,
    contributor: &str,
    year: i32,
    month: u32,
    count: usize,
) {
    for i in 0..count {
        let day = (i % 27) + 1;
        let hour = i % 24;
        let ts = format!("{year:04}-{month:02}-{day:02}T{hour:02}:{:02}:00Z", i % 60);
        push_revision(xml, rev_id, contributor, &ts);
    }
}

fn open_page(xml: &mut String, title: &str, ns: i32, id: u64) {
    write!(
        xml,
        "  <page>\n    <title>{title}</title>\n    <ns>{ns}</ns>\n    <id>{id}</id>\n"
    )
    .unwrap();
}

fn close_page(xml: &mut String) {
    xml.push_str("  </page>\n");
}

/// A dump whose six contributors exercise every filter rule:
///
/// | contributor      | edits         | months           | fate                     |
/// |------------------|---------------|------------------|--------------------------|
/// | `Prolific` (id 1) | 40 + 40 + 40 | 2006-01, 02, 04  | kept                     |
/// | `10.0.0.1` (anon) | 150          | 2006-01..03      | dropped: anonymous       |
/// | `TidyBot` (id 2)  | 60 + 50      | 2006-02, 03      | dropped: bot suffix      |
/// | `OneBurst` (id 3) | 150          | 2007-06          | dropped: 1 active month  |
/// | `Boundary` (id 4) | 50 + 50      | 2007-01, 03      | dropped: exactly 100     |
/// | `JustOver` (id 5) | 50 + 51      | 2007-01, 03      | kept: 101 > 100          |
pub fn fixture_dump() -> String {
    let mut xml = String::from(
        "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\">\n  \
         <siteinfo>\n    <sitename>Fixturewiki</sitename>\n  </siteinfo>\n",
    );
    let mut rev_id = 0;
    let prolific = "<username>Prolific</username><id>1</id>";

    open_page(&mut xml, "Alpha", 0, 1);
    push_month(&mut xml, &mut rev_id, prolific, 2006, 1, 40);
    push_month(&mut xml, &mut rev_id, prolific, 2006, 2, 40);
    push_month(&mut xml, &mut rev_id, "<ip>10.0.0.1</ip>", 2006, 1, 50);
    close_page(&mut xml);

    open_page(&mut xml, "Beta", 0, 2);
    push_month(&mut xml, &mut rev_id, prolific, 2006, 4, 40);
    push_month(&mut xml, &mut rev_id, "<ip>10.0.0.1</ip>", 2006, 2, 50);
    push_month(&mut xml, &mut rev_id, "<ip>10.0.0.1</ip>", 2006, 3, 50);
    close_page(&mut xml);

    open_page(&mut xml, "Gamma", 0, 3);
    let tidybot = "<username>TidyBot</username><id>2</id>";
    push_month(&mut xml, &mut rev_id, tidybot, 2006, 2, 60);
    push_month(&mut xml, &mut rev_id, tidybot, 2006, 3, 50);
    push_month(
        &mut xml,
        &mut rev_id,
        "<username>OneBurst</username><id>3</id>",
        2007,
        6,
        150,
    );
    close_page(&mut xml);

    open_page(&mut xml, "Delta", 0, 4);
    let boundary = "<username>Boundary</username><id>4</id>";
    push_month(&mut xml, &mut rev_id, boundary, 2007, 1, 50);
    push_month(&mut xml, &mut rev_id, boundary, 2007, 3, 50);
    let justover = "<username>JustOver</username><id>5</id>";
    push_month(&mut xml, &mut rev_id, justover, 2007, 1, 50);
    push_month(&mut xml, &mut rev_id, justover, 2007, 3, 51);
    close_page(&mut xml);

    xml.push_str("</mediawiki>\n");
    xml
}

/// Keys that survive the registered / non-bot / `> 100` edits /
/// ≥ 2 active months filter on [`fixture_dump`].
pub fn fixture_expected_kept() -> Vec<ContributorKey> {
    vec![ContributorKey::Id(1), ContributorKey::Id(5)]
}

/// Total revision events the fixture parser must emit (no namespace filter).
pub const FIXTURE_REVISIONS: u64 = 40 + 40 + 40 + 150 + 110 + 150 + 100 + 101;
/// `<page>` elements in the fixture.
pub const FIXTURE_PAGES: u64 = 4;
