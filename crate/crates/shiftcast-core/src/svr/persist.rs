//! Versioned JSON persistence for trained models.
//!
//! The file is self-describing: format version, kernel spec, training
//! hyperparameters, bias, support vectors, dual coefficients, and the
//! feature/target names the model was fitted on. Floats are written in
//! shortest round-trip form, so loading reproduces every coefficient
//! bit-exactly and reload-predict is bit-stable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{KernelSpec, SvrError, SvrModel};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    kernel: KernelSpec,
    c: f64,
    epsilon: f64,
    kkt_tolerance: f64,
    dimension: usize,
    bias: f64,
    support_vectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
    feature_names: Vec<String>,
    target_name: String,
    converged: bool,
}

pub fn save_model(path: &Path, model: &SvrModel) -> Result<(), SvrError> {
    model.validate()?;
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        kernel: model.kernel,
        c: model.c,
        epsilon: model.epsilon,
        kkt_tolerance: model.kkt_tolerance,
        dimension: model.dimension,
        bias: model.bias,
        support_vectors: model.support_vectors.clone(),
        betas: model.betas.clone(),
        feature_names: model.feature_names.clone(),
        target_name: model.target_name.clone(),
        converged: model.converged,
    };
    let mut json = serde_json::to_string_pretty(&file).map_err(|e| SvrError::ModelFormat {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    json.push('\n');
    fs::write(path, json).map_err(|e| SvrError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn load_model(path: &Path) -> Result<SvrModel, SvrError> {
    let text = fs::read_to_string(path).map_err(|e| SvrError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| SvrError::ModelFormat {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(SvrError::ModelFormat {
            path: path.display().to_string(),
            message: format!(
                "unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
                file.format_version
            ),
        });
    }
    let model = SvrModel {
        kernel: file.kernel,
        c: file.c,
        epsilon: file.epsilon,
        kkt_tolerance: file.kkt_tolerance,
        dimension: file.dimension,
        bias: file.bias,
        support_vectors: file.support_vectors,
        betas: file.betas,
        feature_names: file.feature_names,
        target_name: file.target_name,
        converged: file.converged,
    };
    model.validate()?;
    Ok(model)
}
