//! CSV persistence for experiment tables.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;

/// Writes a header row and one record per row (RFC 4180 quoting).
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_reader(input);
    reader.deserialize().map(|r| r.map_err(Into::into)).collect()
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv writer emits utf-8"))
}
