//! JSON model files.
//!
//! ```json
//! {
//!   "total_params": 2,
//!   "normalization": 1.0,
//!   "components": [{
//!     "field": "C", "dim": 4, "index": 1.0,
//!     "observable_spectrum": {"pauli": "1.0 ZI\n0.5 IZ"},
//!     "input_spectrum": {"pure": true, "trace": 1.0},
//!     "sector_params": 2
//!   }]
//! }
//! ```
//!
//! A size sequence for the trainability verdict wraps models as
//! `{"sequence": [{"ambient_dim": 4, "model": {...}}, ...]}`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::algebra::{FieldTag, JawsModel, SimpleComponent};
use crate::error::{JawsError, Result};
use crate::landscape::SizedModel;
use crate::simulator::{parse_pauli_text, spectrum_from_pauli};

#[derive(Deserialize)]
#[serde(untagged)]
enum PauliSpec {
    Text(String),
    Terms(Vec<(f64, String)>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ObservableSpec {
    Values(Vec<f64>),
    Pauli { pauli: PauliSpec },
}

fn default_trace() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputSpec {
    Values(Vec<f64>),
    Pure {
        pure: bool,
        #[serde(default = "default_trace")]
        trace: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    field: FieldTag,
    dim: usize,
    #[serde(default = "one")]
    index: f64,
    observable_spectrum: ObservableSpec,
    input_spectrum: InputSpec,
    sector_params: usize,
}

#[derive(Deserialize)]
#[serde(try_from = "RawComponent")]
struct ComponentFile(SimpleComponent);

impl TryFrom<RawComponent> for ComponentFile {
    type Error = String;

    fn try_from(r: RawComponent) -> std::result::Result<Self, String> {
        let obs = match r.observable_spectrum {
            ObservableSpec::Values(v) => v,
            ObservableSpec::Pauli { pauli } => {
                let terms = match pauli {
                    PauliSpec::Text(t) => parse_pauli_text(&t).map_err(|e| e.to_string())?,
                    PauliSpec::Terms(t) => t,
                };
                spectrum_from_pauli(&terms).map_err(|e| e.to_string())?
            }
        };
        let rho = match r.input_spectrum {
            InputSpec::Values(v) => v,
            InputSpec::Pure { pure: true, trace } => {
                let mut v = vec![0.0; r.dim];
                if let Some(x) = v.first_mut() {
                    *x = trace;
                }
                v
            }
            InputSpec::Pure { pure: false, .. } => {
                return Err("`pure: false` is not a spectrum; list the eigenvalues instead".into())
            }
        };
        SimpleComponent::new(r.field, r.dim, r.index, obs, rho, r.sector_params)
            .map(ComponentFile)
            .map_err(|e| e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    total_params: usize,
    #[serde(default = "one")]
    normalization: f64,
    components: Vec<ComponentFile>,
}

#[derive(Deserialize)]
#[serde(try_from = "RawModel")]
struct ModelFile(JawsModel);

impl TryFrom<RawModel> for ModelFile {
    type Error = String;

    fn try_from(r: RawModel) -> std::result::Result<Self, String> {
        JawsModel::new(
            r.components.into_iter().map(|c| c.0).collect(),
            r.total_params,
            r.normalization,
        )
        .map(ModelFile)
        .map_err(|e| e.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SizedFile {
    ambient_dim: f64,
    model: ModelFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    sequence: Vec<SizedFile>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let msg = inner.to_string();
        // serde_json appends the position; it is reported separately
        let message = match msg.rfind(" at line ") {
            Some(k) => msg[..k].to_string(),
            None => msg,
        };
        JawsError::ModelParse {
            line,
            column,
            field,
            message,
        }
    })
}

pub fn parse_model(text: &str) -> Result<JawsModel> {
    parse::<ModelFile>(text).map(|m| m.0)
}

pub fn parse_sequence(text: &str) -> Result<Vec<SizedModel>> {
    let s: SequenceFile = parse(text)?;
    Ok(s.sequence
        .into_iter()
        .map(|f| SizedModel {
            ambient_dim: f.ambient_dim,
            model: f.model.0,
        })
        .collect())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| JawsError::Io(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<JawsModel> {
    parse_model(&read(path)?)
}

pub fn load_sequence(path: &Path) -> Result<Vec<SizedModel>> {
    parse_sequence(&read(path)?)
}

/// Pretty JSON with explicit spectra, readable by [`parse_model`].
pub fn model_to_json(model: &JawsModel) -> String {
    serde_json::to_string_pretty(model).expect("model serializes")
}
