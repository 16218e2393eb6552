//! CSV serialization of the filtered feature table.
//!
//! The first line is a schema comment (`# wikiprofiles/features v1`); the
//! second is the fixed header
//! `contributor,ratio,mean_gap,max_gap,num_cons,mean_month,sd,n_articles,total_edits`.
//! Real-valued columns are written in scientific notation with 17
//! significant digits (lossless for f64); `n_articles` and `total_edits`
//! are illustrative columns, never clustered on. Rows are sorted by
//! contributor key.

use std::path::Path;

use crate::dump::ContributorKey;
use crate::features::FeatureVector;
use crate::{Error, Result};

pub const FEATURES_SCHEMA_LINE: &str = "# wikiprofiles/features v1";
const HEADER: [&str; 9] = [
    "contributor",
    "ratio",
    "mean_gap",
    "max_gap",
    "num_cons",
    "mean_month",
    "sd",
    "n_articles",
    "total_edits",
];

/// One row of the feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub key: ContributorKey,
    pub features: FeatureVector,
    pub n_articles: u64,
    pub total_edits: u64,
}

/// Serialize rows to the canonical feature CSV.
pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(HEADER).expect("writing to memory");
    for row in rows {
        let v = &row.features;
        writer
            .write_record([
                row.key.to_string(),
                format!("{:.16e}", v.ratio),
                format!("{:.16e}", v.mean_gap),
                v.max_gap.to_string(),
                v.num_cons.to_string(),
                format!("{:.16e}", v.mean_month),
                format!("{:.16e}", v.sd),
                row.n_articles.to_string(),
                row.total_edits.to_string(),
            ])
            .expect("writing to memory");
    }
    let body = writer.into_inner().expect("writing to memory");
    let mut out = format!("{FEATURES_SCHEMA_LINE}\n").into_bytes();
    out.extend_from_slice(&body);
    super::write_bytes(path, &out)
}

fn field<'a>(record: &'a csv::StringRecord, index: usize) -> &'a str {
    record.get(index).unwrap_or_default()
}

fn parse_field<T: std::str::FromStr>(
    display: &str,
    line: u64,
    record: &csv::StringRecord,
    index: usize,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field(record, index).parse().map_err(|e| {
        Error::schema(
            display,
            line,
            HEADER[index],
            format!("cannot parse {:?}: {e}", field(record, index)),
        )
    })
}

/// Read a feature CSV back, validating the schema line and the header.
pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let text = super::read_to_string(path)?;
    let display = path.display().to_string();
    let Some((schema_line, body)) = text.split_once('\n') else {
        return Err(Error::schema(&display, 1, "schema", "empty file"));
    };
    if schema_line.trim_end() != FEATURES_SCHEMA_LINE {
        return Err(Error::schema(
            &display,
            1,
            "schema",
            format!("expected {FEATURES_SCHEMA_LINE:?}, found {schema_line:?}"),
        ));
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::schema(&display, 2, "header", e.to_string()))?;
    if header != HEADER.as_slice() {
        return Err(Error::schema(
            &display,
            2,
            "header",
            format!("expected {:?}, found {:?}", HEADER.join(","), header),
        ));
    }

    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        // +2 header lines, +1 for 1-based numbering.
        let line = index as u64 + 3;
        let record = record.map_err(|e| Error::schema(&display, line, "row", e.to_string()))?;
        if record.len() != HEADER.len() {
            return Err(Error::schema(
                &display,
                line,
                "row",
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        let key = ContributorKey::parse(field(&record, 0)).map_err(|e| {
            Error::schema(&display, line, "contributor", e.to_string())
        })?;
        let features = FeatureVector {
            ratio: parse_field(&display, line, &record, 1)?,
            mean_gap: parse_field(&display, line, &record, 2)?,
            max_gap: parse_field(&display, line, &record, 3)?,
            num_cons: parse_field(&display, line, &record, 4)?,
            mean_month: parse_field(&display, line, &record, 5)?,
            sd: parse_field(&display, line, &record, 6)?,
        };
        for (name, value) in [
            ("ratio", features.ratio),
            ("mean_gap", features.mean_gap),
            ("mean_month", features.mean_month),
            ("sd", features.sd),
        ] {
            if !value.is_finite() {
                return Err(Error::schema(
                    &display,
                    line,
                    name,
                    format!("non-finite value {value}"),
                ));
            }
        }
        rows.push(FeatureRow {
            key,
            features,
            n_articles: parse_field(&display, line, &record, 7)?,
            total_edits: parse_field(&display, line, &record, 8)?,
        });
    }
    Ok(rows)
}
