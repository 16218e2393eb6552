//! CSV serialization of planted archetype labels for synthetic cohorts.
//!
//! Two columns, `contributor,archetype`, preceded by a schema comment line.
//! Row order mirrors the cohort (and therefore the histories file once
//! sorted by key — the writer sorts for canonical output).

use std::path::Path;

use crate::dump::ContributorKey;
use crate::interpret::Archetype;
use crate::{Error, Result};

pub const LABELS_SCHEMA_LINE: &str = "# wikiprofiles/labels v1";

/// Serialize `(key, archetype)` pairs, sorted by key.
pub fn write_labels(path: &Path, labels: &[(ContributorKey, Archetype)]) -> Result<()> {
    let mut sorted: Vec<&(ContributorKey, Archetype)> = labels.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["contributor", "archetype"])
        .expect("writing to memory");
    for (key, label) in sorted {
        writer
            .write_record([key.to_string(), label.to_string()])
            .expect("writing to memory");
    }
    let body = writer.into_inner().expect("writing to memory");
    let mut out = format!("{LABELS_SCHEMA_LINE}\n").into_bytes();
    out.extend_from_slice(&body);
    super::write_bytes(path, &out)
}

/// Read a labels file back as a key → archetype map.
pub fn read_labels(path: &Path) -> Result<Vec<(ContributorKey, Archetype)>> {
    let text = super::read_to_string(path)?;
    let display = path.display().to_string();
    let Some((schema_line, body)) = text.split_once('\n') else {
        return Err(Error::schema(&display, 1, "schema", "empty file"));
    };
    if schema_line.trim_end() != LABELS_SCHEMA_LINE {
        return Err(Error::schema(
            &display,
            1,
            "schema",
            format!("expected {LABELS_SCHEMA_LINE:?}, found {schema_line:?}"),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::schema(&display, 2, "header", e.to_string()))?;
    if header != ["contributor", "archetype"].as_slice() {
        return Err(Error::schema(
            &display,
            2,
            "header",
            format!("expected contributor,archetype, found {header:?}"),
        ));
    }
    let mut labels = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let line = index as u64 + 3;
        let record = record.map_err(|e| Error::schema(&display, line, "row", e.to_string()))?;
        let key = ContributorKey::parse(record.get(0).unwrap_or_default())
            .map_err(|e| Error::schema(&display, line, "contributor", e.to_string()))?;
        let label = match record.get(1).unwrap_or_default() {
            "on-a-mission" => Archetype::OnAMission,
            "casual" => Archetype::Casual,
            "regular" => Archetype::Regular,
            "top" => Archetype::Top,
            other => {
                return Err(Error::schema(
                    &display,
                    line,
                    "archetype",
                    format!("unknown archetype {other:?}"),
                ))
            }
        };
        labels.push((key, label));
    }
    Ok(labels)
}
