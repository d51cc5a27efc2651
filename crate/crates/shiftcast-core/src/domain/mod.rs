//! Assembly-line data model and feature pipeline.
//!
//! The line produces two datasets per build: solder-paste inspection (SPI)
//! measures each printed deposit before placement, and pre-reflow optical
//! inspection (AOI) measures each placed component. One component sits on a
//! pair of pads, so it owns exactly two SPI deposits and one AOI record.
//!
//! Offsets are distances between centers: pad-pair center to paste-pair
//! center (SPI) and pad-pair center to component center (AOI). Angles are
//! rotations in degrees, counterclockwise-positive for both datasets. The
//! feature transform scales offsets and volume by the component's nominal
//! dimensions, leaving angles and pressure in native units.

mod csv_io;

pub use csv_io::{
    read_aoi_csv, read_features_csv, read_spi_csv, write_aoi_csv, write_features_csv,
    write_spi_csv,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the data model and the feature pipeline.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("component {board_id}/{component_id} has {count} deposits, expected 2")]
    MissingDeposit {
        board_id: String,
        component_id: String,
        count: usize,
    },
    #[error("component {board_id}/{component_id} has two deposits on pad {pad_index}")]
    DuplicatePad {
        board_id: String,
        component_id: String,
        pad_index: u8,
    },
    #[error("deposits for {expected} mixed with deposits for {found}")]
    MixedComponent { expected: String, found: String },
    #[error("component spec {name} has non-positive or inverted dimensions ({length_um} x {width_um} um)")]
    NonPositiveDimension {
        name: String,
        length_um: f64,
        width_um: f64,
    },
    #[error("non-finite value in {context}")]
    NonFiniteInput { context: String },
    #[error("unknown component spec {spec_name} referenced by {board_id}/{component_id}")]
    UnknownSpec {
        spec_name: String,
        board_id: String,
        component_id: String,
    },
    #[error("rows mix component specs: expected {expected}, found {found}")]
    MixedSpec { expected: String, found: String },
    #[error("pad_index {pad_index} out of range (must be 1 or 2)")]
    BadPadIndex { pad_index: u8 },
    #[error("setting_id {setting_id} out of range (must be 1..=33)")]
    BadSettingId { setting_id: u32 },
    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Resistor or capacitor chip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Resistor,
    Capacitor,
}

/// Nominal geometry of one component type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub name: String,
    pub kind: ComponentKind,
    /// Nominal length in micrometers (the X dimension).
    pub length_um: f64,
    /// Nominal width in micrometers (the Y dimension).
    pub width_um: f64,
}

impl ComponentSpec {
    pub fn new(
        name: &str,
        kind: ComponentKind,
        length_um: f64,
        width_um: f64,
    ) -> Result<Self, DomainError> {
        if !(length_um.is_finite() && width_um.is_finite()) {
            return Err(DomainError::NonFiniteInput {
                context: format!("dimensions of spec {name}"),
            });
        }
        if !(width_um > 0.0 && length_um >= width_um) {
            return Err(DomainError::NonPositiveDimension {
                name: name.to_string(),
                length_um,
                width_um,
            });
        }
        Ok(Self {
            name: name.to_string(),
            kind,
            length_um,
            width_um,
        })
    }
}

/// The six chip types used on the experiment board.
pub fn builtin_specs() -> Vec<ComponentSpec> {
    use ComponentKind::*;
    [
        ("R01005", Resistor, 400.0, 200.0),
        ("R0201", Resistor, 600.0, 300.0),
        ("R0402", Resistor, 1000.0, 500.0),
        ("C01005", Capacitor, 400.0, 200.0),
        ("C0201", Capacitor, 600.0, 300.0),
        ("C0402", Capacitor, 1000.0, 500.0),
    ]
    .into_iter()
    .map(|(name, kind, l, w)| ComponentSpec::new(name, kind, l, w).expect("builtin spec"))
    .collect()
}

/// Lookup table of component specs, keyed by name.
#[derive(Debug, Clone, Default)]
pub struct SpecTable {
    specs: BTreeMap<String, ComponentSpec>,
}

impl SpecTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table holding the six built-in chip types.
    pub fn builtin() -> Self {
        let mut table = Self::new();
        for spec in builtin_specs() {
            table.insert(spec);
        }
        table
    }

    pub fn insert(&mut self, spec: ComponentSpec) {
        self.specs.insert(spec.name.clone(), spec);
    }

    pub fn get(&self, name: &str) -> Option<&ComponentSpec> {
        self.specs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComponentSpec> {
        self.specs.values()
    }
}

/// One SPI measurement of one solder-paste deposit.
///
/// Offsets are the deposit center's distance from its pad center in
/// micrometers; `volume_pct` is the deposit volume as a percentage of the
/// ideal stencil volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PasteDeposit {
    pub board_id: String,
    pub component_id: String,
    /// 1 or 2; a component's two deposits carry distinct pad indices.
    pub pad_index: u8,
    pub offset_x_um: f64,
    pub offset_y_um: f64,
    pub angle_deg: f64,
    pub volume_pct: f64,
}

impl PasteDeposit {
    fn validate(&self) -> Result<(), DomainError> {
        if self.pad_index != 1 && self.pad_index != 2 {
            return Err(DomainError::BadPadIndex {
                pad_index: self.pad_index,
            });
        }
        let vals = [
            self.offset_x_um,
            self.offset_y_um,
            self.angle_deg,
            self.volume_pct,
        ];
        if vals.iter().any(|v| !v.is_finite()) || self.volume_pct <= 0.0 {
            return Err(DomainError::NonFiniteInput {
                context: format!("deposit {}/{}", self.board_id, self.component_id),
            });
        }
        Ok(())
    }
}

/// Designed placement parameters plus the AOI-tested position for one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub board_id: String,
    pub component_id: String,
    pub spec_name: String,
    /// Design-of-experiments setting this placement ran under (1..=33).
    pub setting_id: u32,
    pub designed_offset_x_um: f64,
    pub designed_offset_y_um: f64,
    pub designed_angle_deg: f64,
    pub place_pressure_gf: f64,
    pub tested_offset_x_um: f64,
    pub tested_offset_y_um: f64,
    pub tested_angle_deg: f64,
}

impl PlacementRecord {
    fn validate(&self) -> Result<(), DomainError> {
        if !(1..=33).contains(&self.setting_id) {
            return Err(DomainError::BadSettingId {
                setting_id: self.setting_id,
            });
        }
        let vals = [
            self.designed_offset_x_um,
            self.designed_offset_y_um,
            self.designed_angle_deg,
            self.place_pressure_gf,
            self.tested_offset_x_um,
            self.tested_offset_y_um,
            self.tested_angle_deg,
        ];
        if vals.iter().any(|v| !v.is_finite()) || self.place_pressure_gf < 0.0 {
            return Err(DomainError::NonFiniteInput {
                context: format!("placement {}/{}", self.board_id, self.component_id),
            });
        }
        Ok(())
    }
}

/// Names of the nine predictors, in feature-vector order.
pub const FEATURE_NAMES: [&str; 9] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"];

/// One fully joined observation: nine predictors and three shift targets.
///
/// `x1`/`x2` are the paste-pair center offsets scaled by component length and
/// width, `x3` the paste angle in degrees, `x4`/`x5` the mean and pad-1-minus-
/// pad-2 difference of deposit volume as fractions of ideal, `x6`/`x7` the
/// designed placement offsets scaled like `x1`/`x2`, `x8` the designed angle
/// in degrees and `x9` the place pressure in gram-force. Targets `y_x`/`y_y`
/// are tested-minus-designed offset ratios; `y_ang` is in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub board_id: String,
    pub component_id: String,
    pub setting_id: u32,
    pub spec_name: String,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
    pub x6: f64,
    pub x7: f64,
    pub x8: f64,
    pub x9: f64,
    pub y_x: f64,
    pub y_y: f64,
    pub y_ang: f64,
}

impl FeatureRow {
    /// The nine predictors as a feature vector.
    pub fn predictors(&self) -> [f64; 9] {
        [
            self.x1, self.x2, self.x3, self.x4, self.x5, self.x6, self.x7, self.x8, self.x9,
        ]
    }

    fn validate(&self) -> Result<(), DomainError> {
        let vals = [
            self.x1, self.x2, self.x3, self.x4, self.x5, self.x6, self.x7, self.x8, self.x9,
            self.y_x, self.y_y, self.y_ang,
        ];
        if vals.iter().any(|v| !v.is_finite()) || self.x4 <= 0.0 {
            return Err(DomainError::NonFiniteInput {
                context: format!("feature row {}/{}", self.board_id, self.component_id),
            });
        }
        Ok(())
    }
}

/// Orders a component's two deposits as (pad 1, pad 2).
pub fn pair_deposits(
    deposits: &[PasteDeposit],
) -> Result<(&PasteDeposit, &PasteDeposit), DomainError> {
    let Some(first) = deposits.first() else {
        return Err(DomainError::MissingDeposit {
            board_id: String::new(),
            component_id: String::new(),
            count: 0,
        });
    };
    for d in deposits {
        if d.board_id != first.board_id || d.component_id != first.component_id {
            return Err(DomainError::MixedComponent {
                expected: format!("{}/{}", first.board_id, first.component_id),
                found: format!("{}/{}", d.board_id, d.component_id),
            });
        }
    }
    if deposits.len() != 2 {
        return Err(DomainError::MissingDeposit {
            board_id: first.board_id.clone(),
            component_id: first.component_id.clone(),
            count: deposits.len(),
        });
    }
    let (a, b) = (&deposits[0], &deposits[1]);
    a.validate()?;
    b.validate()?;
    if a.pad_index == b.pad_index {
        return Err(DomainError::DuplicatePad {
            board_id: a.board_id.clone(),
            component_id: a.component_id.clone(),
            pad_index: a.pad_index,
        });
    }
    if a.pad_index == 1 {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

/// Builds a feature row from one deposit pair and its placement record.
///
/// The paste-pair center is the arithmetic mean of the two deposits' offsets,
/// and the pair angle is the mean of the two angles; the volume difference is
/// pad 1 minus pad 2.
pub fn featurize(
    pair: (&PasteDeposit, &PasteDeposit),
    placement: &PlacementRecord,
    spec: &ComponentSpec,
) -> Result<FeatureRow, DomainError> {
    let (pad1, pad2) = pair;
    pad1.validate()?;
    pad2.validate()?;
    placement.validate()?;
    if !(spec.width_um > 0.0 && spec.length_um > 0.0) {
        return Err(DomainError::NonPositiveDimension {
            name: spec.name.clone(),
            length_um: spec.length_um,
            width_um: spec.width_um,
        });
    }

    let row = FeatureRow {
        board_id: placement.board_id.clone(),
        component_id: placement.component_id.clone(),
        setting_id: placement.setting_id,
        spec_name: placement.spec_name.clone(),
        x1: (pad1.offset_x_um + pad2.offset_x_um) / 2.0 / spec.length_um,
        x2: (pad1.offset_y_um + pad2.offset_y_um) / 2.0 / spec.width_um,
        x3: (pad1.angle_deg + pad2.angle_deg) / 2.0,
        x4: (pad1.volume_pct + pad2.volume_pct) / 2.0 / 100.0,
        x5: (pad1.volume_pct - pad2.volume_pct) / 100.0,
        x6: placement.designed_offset_x_um / spec.length_um,
        x7: placement.designed_offset_y_um / spec.width_um,
        x8: placement.designed_angle_deg,
        x9: placement.place_pressure_gf,
        y_x: placement.tested_offset_x_um / spec.length_um
            - placement.designed_offset_x_um / spec.length_um,
        y_y: placement.tested_offset_y_um / spec.width_um
            - placement.designed_offset_y_um / spec.width_um,
        y_ang: placement.tested_angle_deg - placement.designed_angle_deg,
    };
    row.validate()?;
    Ok(row)
}

/// Why a placement produced no feature row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrphanReason {
    /// The component has `count` deposits instead of 2.
    MissingDeposits { count: usize },
    /// Both deposits claim the same pad index.
    DuplicatePad { pad_index: u8 },
}

/// A placement whose deposit pair is absent or unusable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrphanPlacement {
    pub board_id: String,
    pub component_id: String,
    pub reason: OrphanReason,
}

/// A deposit whose component has no placement record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrphanDeposit {
    pub board_id: String,
    pub component_id: String,
    pub pad_index: u8,
}

/// Join dropouts, reported rather than silently discarded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinDiagnostics {
    pub orphan_placements: Vec<OrphanPlacement>,
    pub orphan_deposits: Vec<OrphanDeposit>,
}

impl JoinDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.orphan_placements.is_empty() && self.orphan_deposits.is_empty()
    }
}

/// Joins SPI deposits with AOI placements into feature rows.
///
/// Emits one row per placement whose two deposits are present, ordered by
/// `(board_id, component_id)`. Placements without a usable deposit pair and
/// deposits without a placement are collected in [`JoinDiagnostics`]; an
/// unknown `spec_name` is an error.
pub fn join_spi_aoi(
    deposits: &[PasteDeposit],
    placements: &[PlacementRecord],
    specs: &SpecTable,
) -> Result<(Vec<FeatureRow>, JoinDiagnostics), DomainError> {
    let mut groups: BTreeMap<(&str, &str), Vec<PasteDeposit>> = BTreeMap::new();
    for d in deposits {
        groups
            .entry((d.board_id.as_str(), d.component_id.as_str()))
            .or_default()
            .push(d.clone());
    }

    let mut ordered: Vec<&PlacementRecord> = placements.iter().collect();
    ordered.sort_by(|a, b| {
        (a.board_id.as_str(), a.component_id.as_str())
            .cmp(&(b.board_id.as_str(), b.component_id.as_str()))
    });

    let mut rows = Vec::new();
    let mut diagnostics = JoinDiagnostics::default();
    let mut claimed: std::collections::BTreeSet<(&str, &str)> = std::collections::BTreeSet::new();

    for p in ordered {
        let spec = specs
            .get(&p.spec_name)
            .ok_or_else(|| DomainError::UnknownSpec {
                spec_name: p.spec_name.clone(),
                board_id: p.board_id.clone(),
                component_id: p.component_id.clone(),
            })?;
        let key = (p.board_id.as_str(), p.component_id.as_str());
        claimed.insert(key);
        let group = groups.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        match pair_deposits(group) {
            Ok(pair) => rows.push(featurize(pair, p, spec)?),
            Err(DomainError::MissingDeposit { count, .. }) => {
                diagnostics.orphan_placements.push(OrphanPlacement {
                    board_id: p.board_id.clone(),
                    component_id: p.component_id.clone(),
                    reason: OrphanReason::MissingDeposits { count },
                });
            }
            Err(DomainError::DuplicatePad { pad_index, .. }) => {
                diagnostics.orphan_placements.push(OrphanPlacement {
                    board_id: p.board_id.clone(),
                    component_id: p.component_id.clone(),
                    reason: OrphanReason::DuplicatePad { pad_index },
                });
            }
            Err(other) => return Err(other),
        }
    }

    for (key, group) in &groups {
        if !claimed.contains(key) {
            for d in group {
                diagnostics.orphan_deposits.push(OrphanDeposit {
                    board_id: d.board_id.clone(),
                    component_id: d.component_id.clone(),
                    pad_index: d.pad_index,
                });
            }
        }
    }

    Ok((rows, diagnostics))
}

/// Per-axis descriptive statistics in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisStats {
    pub avg: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Shift statistics for one DOE setting: X and Y in micrometers, angle in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSummary {
    pub setting_id: u32,
    pub shift_x_um: AxisStats,
    pub shift_y_um: AxisStats,
    pub shift_angle_deg: AxisStats,
    pub count: usize,
}

fn axis_stats(values: &[f64]) -> AxisStats {
    let n = values.len() as f64;
    let avg = values.iter().sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Sample standard deviation (n-1 denominator); exactly 0 for a single
    // observation or a constant sample.
    let std = if values.len() > 1 && min < max {
        (values.iter().map(|v| (v - avg) * (v - avg)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    AxisStats { avg, std, min, max }
}

/// Summarizes shifts per DOE setting, converting ratio targets back to
/// micrometers with the component dimensions.
///
/// All rows must belong to `spec`; groups are returned in ascending
/// `setting_id` order.
pub fn shift_summary(
    rows: &[FeatureRow],
    spec: &ComponentSpec,
) -> Result<Vec<ShiftSummary>, DomainError> {
    let mut grouped: BTreeMap<u32, Vec<&FeatureRow>> = BTreeMap::new();
    for row in rows {
        if row.spec_name != spec.name {
            return Err(DomainError::MixedSpec {
                expected: spec.name.clone(),
                found: row.spec_name.clone(),
            });
        }
        grouped.entry(row.setting_id).or_default().push(row);
    }

    Ok(grouped
        .into_iter()
        .map(|(setting_id, group)| {
            let xs: Vec<f64> = group.iter().map(|r| r.y_x * spec.length_um).collect();
            let ys: Vec<f64> = group.iter().map(|r| r.y_y * spec.width_um).collect();
            let angs: Vec<f64> = group.iter().map(|r| r.y_ang).collect();
            ShiftSummary {
                setting_id,
                shift_x_um: axis_stats(&xs),
                shift_y_um: axis_stats(&ys),
                shift_angle_deg: axis_stats(&angs),
                count: group.len(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests;
