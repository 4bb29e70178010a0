//! CSV/JSON serialization helpers. Floating-point output carries 17
//! significant digits so that files round-trip to the bit.

use serde::Serializer;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::Result;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes an `f64` as a JSON number with 17 significant digits;
/// non-finite values become `null`.
pub fn sig17<S: Serializer>(x: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return serializer.serialize_none();
    }
    let n = serde_json::Number::from_str(&fmt17(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&n, serializer)
}

pub fn sig17_vec<S: Serializer>(xs: &[f64], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Wrap(f64);
    impl serde::Serialize for Wrap {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            sig17(&self.0, s)
        }
    }
    let mut seq = serializer.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&Wrap(x))?;
    }
    seq.end()
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV with a header row; every cell is already formatted.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
