//! CSV schemas for the SPI, AOI, and feature datasets.
//!
//! All files carry a header row and plain `.`-radix decimal numbers:
//!
//! * SPI: `board_id,component_id,pad_index,offset_x_um,offset_y_um,angle_deg,volume_pct`
//! * AOI: `board_id,component_id,spec_name,setting_id,designed_offset_x_um,designed_offset_y_um,designed_angle_deg,place_pressure_gf,tested_offset_x_um,tested_offset_y_um,tested_angle_deg`
//! * Features: `board_id,component_id,setting_id,spec_name,x1,...,x9,y_x,y_y,y_ang`
//!
//! Floats are written in shortest round-trip form, so a write/read cycle
//! reproduces every value bit-exactly.

use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use super::{DomainError, FeatureRow, PasteDeposit, PlacementRecord};

fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DomainError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(io_err(path, e)),
    };
    let mut out = Vec::new();
    for result in reader.deserialize() {
        let record: T = result.map_err(|e| csv_err(path, Some(&headers), &e))?;
        out.push(record);
    }
    Ok(out)
}

fn write_records<T: Serialize>(path: &Path, records: &[T]) -> Result<(), DomainError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for record in records {
        writer.serialize(record).map_err(|e| csv_err(path, None, &e))?;
    }
    writer
        .flush()
        .map_err(|e| DomainError::Io {
            path: path.display().to_string(),
            source: e,
        })
}

fn io_err(path: &Path, e: csv::Error) -> DomainError {
    DomainError::Csv {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    }
}

fn csv_err(path: &Path, headers: Option<&csv::StringRecord>, e: &csv::Error) -> DomainError {
    let line = match e.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    // Name the offending column when the parser reports a field index.
    let mut message = e.to_string();
    if let csv::ErrorKind::Deserialize { err, .. } = e.kind() {
        if let Some(column) = err
            .field()
            .and_then(|f| headers.and_then(|h| h.get(f as usize)))
        {
            message = format!("column {column}: {err}");
        }
    }
    DomainError::Csv {
        path: path.display().to_string(),
        line,
        message,
    }
}

pub fn read_spi_csv(path: &Path) -> Result<Vec<PasteDeposit>, DomainError> {
    read_records(path)
}

pub fn write_spi_csv(path: &Path, deposits: &[PasteDeposit]) -> Result<(), DomainError> {
    write_records(path, deposits)
}

pub fn read_aoi_csv(path: &Path) -> Result<Vec<PlacementRecord>, DomainError> {
    read_records(path)
}

pub fn write_aoi_csv(path: &Path, placements: &[PlacementRecord]) -> Result<(), DomainError> {
    write_records(path, placements)
}

pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureRow>, DomainError> {
    read_records(path)
}

pub fn write_features_csv(path: &Path, rows: &[FeatureRow]) -> Result<(), DomainError> {
    write_records(path, rows)
}
