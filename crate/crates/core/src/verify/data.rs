//! Bundled data files. Each is compiled in; setting `REPCOUNT_DATA_DIR`
//! makes every lookup read `<dir>/<name>` from disk instead.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::VerifyError;
use crate::digit_automata::{json::dfao_from_json, Dfao};
use crate::linrep::{json::linrep_from_json, LinearRepresentation};

pub const DATA_DIR_ENV: &str = "REPCOUNT_DATA_DIR";

pub const TABLE1: &str = "table1.json";
pub const TABLE2: &str = "e_dfao_table2.json";
pub const PUBLISHED_LINREP: &str = "e_linrep_rank10.json";

const BUNDLED: [(&str, &str); 3] = [
    (TABLE1, include_str!("../../data/table1.json")),
    (TABLE2, include_str!("../../data/e_dfao_table2.json")),
    (PUBLISHED_LINREP, include_str!("../../data/e_linrep_rank10.json")),
];

/// Contents of a data file plus its SHA-256 digest in hex.
#[derive(Debug, Clone)]
pub struct DataFile {
    pub name: String,
    pub text: String,
    pub digest: String,
}

impl DataFile {
    fn new(name: String, text: String) -> Self {
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        Self { name, text, digest }
    }

    pub fn read(path: &Path) -> Result<Self, VerifyError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| VerifyError::Io { path: path.to_path_buf(), source })?;
        Ok(Self::new(path.display().to_string(), text))
    }
}

pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

pub fn load(name: &str) -> Result<DataFile, VerifyError> {
    if let Some(dir) = data_dir() {
        let mut file = DataFile::read(&dir.join(name))?;
        file.name = name.into();
        return Ok(file);
    }
    let (_, text) =
        BUNDLED.iter().find(|(n, _)| *n == name).ok_or_else(|| VerifyError::Data(format!("no bundled file {name}")))?;
    Ok(DataFile::new(name.into(), text.to_string()))
}

#[derive(Debug, Clone, Deserialize)]
pub struct Table1 {
    pub r: Vec<i64>,
    pub d: Vec<i64>,
}

pub fn parse_table1(file: &DataFile) -> Result<Table1, VerifyError> {
    let t: Table1 = serde_json::from_str(&file.text).map_err(|e| VerifyError::Data(format!("{}: {e}", file.name)))?;
    if t.r.len() != t.d.len() {
        return Err(VerifyError::Data(format!("{}: rows differ in length", file.name)));
    }
    Ok(t)
}

pub fn parse_dfao(file: &DataFile) -> Result<Dfao, VerifyError> {
    dfao_from_json(&file.text).map_err(|e| VerifyError::Data(format!("{}: {e}", file.name)))
}

pub fn parse_linrep(file: &DataFile) -> Result<LinearRepresentation, VerifyError> {
    linrep_from_json(&file.text).map_err(|e| VerifyError::Data(format!("{}: {e}", file.name)))
}
