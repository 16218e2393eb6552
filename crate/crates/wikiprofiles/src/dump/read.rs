//! Transparent decompression of dump files, sniffed from magic bytes.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::{Error, Result};

/// Compression wrapping of a dump stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compression {
    /// Detect from magic bytes (gzip `1f 8b`, bzip2 `BZh`, else plain XML).
    #[default]
    Auto,
    Plain,
    Gzip,
    Bzip2,
}

impl std::str::FromStr for Compression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Compression::Auto),
            "plain" | "none" | "xml" => Ok(Compression::Plain),
            "gzip" | "gz" => Ok(Compression::Gzip),
            "bzip2" | "bz2" => Ok(Compression::Bzip2),
            other => Err(Error::Invalid(format!(
                "unknown compression {other:?} (expected auto, plain, gzip, or bzip2)"
            ))),
        }
    }
}

/// Wrap `reader` in the matching decoder. With [`Compression::Auto`] the
/// format is sniffed from the first bytes without consuming them.
pub fn decompress<R>(mut reader: R, hint: Compression) -> std::io::Result<Box<dyn BufRead + Send>>
where
    R: BufRead + Send + 'static,
{
    let kind = match hint {
        Compression::Auto => {
            let head = reader.fill_buf()?;
            if head.starts_with(&[0x1f, 0x8b]) {
                Compression::Gzip
            } else if head.starts_with(b"BZh") {
                Compression::Bzip2
            } else {
                Compression::Plain
            }
        }
        other => other,
    };
    Ok(match kind {
        Compression::Plain | Compression::Auto => Box::new(reader),
        // Multi-member decoders: Wikimedia ships multistream archives.
        Compression::Gzip => Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(reader))),
        Compression::Bzip2 => Box::new(BufReader::new(bzip2::bufread::MultiBzDecoder::new(reader))),
    })
}

/// Open a dump file with transparent decompression.
pub fn open_dump(path: &Path, hint: Compression) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    decompress(BufReader::new(file), hint).map_err(|e| Error::io(path, e))
}
