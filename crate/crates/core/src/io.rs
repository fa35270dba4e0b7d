//! JSON matrix files and run reports.
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "kind": "state",
//!   "layout": [2, 2],
//!   "layout_tag": "sym(3)",            (bosonic states only)
//!   "entries": [[re, im], ...],         (row-major)
//!   "metadata": {"seed": 7, "provenance": "..."}
//! }
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every `f64`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::convert::BosonicState;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, SystemLayout};

pub const FORMAT_VERSION: u32 = 1;
pub const KIND_STATE: &str = "state";

/// Tolerance used when validating loaded states.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawMetadata {
    seed: Option<u64>,
    provenance: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    format_version: u32,
    kind: String,
    layout: Vec<usize>,
    layout_tag: Option<String>,
    entries: Vec<[f64; 2]>,
    metadata: Option<RawMetadata>,
}

/// Parsed, schema-checked contents of a matrix file.
#[derive(Clone, Debug)]
pub struct MatrixFile {
    pub layout: Vec<usize>,
    /// `Some(k)` for states on `A ⊗ Sym^k(C^2)`
    pub sym_k: Option<usize>,
    pub matrix: ComplexMatrix,
    pub metadata: Metadata,
}

/// A state loaded from disk.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Dense(DensityMatrix),
    Bosonic(BosonicState),
}

fn parse_tag(tag: &str) -> Option<usize> {
    tag.strip_prefix("sym(")?.strip_suffix(')')?.parse().ok()
}

fn schema_error(message: String) -> Error {
    Error::Parse { line: 0, column: 0, message }
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        if raw.format_version != FORMAT_VERSION {
            return Err(schema_error(format!("unsupported format_version {}", raw.format_version)));
        }
        if raw.kind != KIND_STATE {
            return Err(schema_error(format!("unsupported kind '{}'", raw.kind)));
        }
        if raw.layout.is_empty() || raw.layout.contains(&0) {
            return Err(schema_error(format!("invalid layout {:?}", raw.layout)));
        }
        let sym_k = match raw.layout_tag.as_deref() {
            None => None,
            Some(tag) => {
                let k = parse_tag(tag).ok_or_else(|| schema_error(format!("unknown layout_tag '{tag}'")))?;
                if raw.layout.len() != 2 || raw.layout[1] != k + 1 {
                    return Err(schema_error(format!("layout {:?} does not match tag {tag}", raw.layout)));
                }
                Some(k)
            }
        };
        let n: usize = raw.layout.iter().product();
        if raw.entries.len() != n * n {
            return Err(schema_error(format!("layout {:?} needs {} entries, found {}", raw.layout, n * n, raw.entries.len())));
        }
        let data = raw.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let matrix = ComplexMatrix::from_vec(n, n, data)?;
        let metadata = raw.metadata.map(|m| Metadata { seed: m.seed, provenance: m.provenance }).unwrap_or_default();
        Ok(Self { layout: raw.layout, sym_k, matrix, metadata })
    }

    /// Canonical text: one entry per line, 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"format_version\": {FORMAT_VERSION},");
        let _ = writeln!(s, "  \"kind\": \"{KIND_STATE}\",");
        let dims: Vec<String> = self.layout.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "  \"layout\": [{}],", dims.join(", "));
        if let Some(k) = self.sym_k {
            let _ = writeln!(s, "  \"layout_tag\": \"sym({k})\",");
        }
        s.push_str("  \"entries\": [\n");
        let entries = self.matrix.as_slice();
        for (i, z) in entries.iter().enumerate() {
            let sep = if i + 1 == entries.len() { "" } else { "," };
            let _ = writeln!(s, "    [{:.16e}, {:.16e}]{sep}", z.re, z.im);
        }
        s.push_str("  ],\n");
        s.push_str("  \"metadata\": {");
        let mut parts = Vec::new();
        if let Some(seed) = self.metadata.seed {
            parts.push(format!("\"seed\": {seed}"));
        }
        if let Some(p) = &self.metadata.provenance {
            parts.push(format!("\"provenance\": {}", serde_json::to_string(p).expect("string serializes")));
        }
        s.push_str(&parts.join(", "));
        s.push_str("}\n}\n");
        s
    }

    pub fn into_state(self) -> Result<LoadedState> {
        match self.sym_k {
            Some(k) => Ok(LoadedState::Bosonic(BosonicState::with_tolerance(self.layout[0], k, self.matrix, LOAD_TOL)?)),
            None => {
                let layout = SystemLayout::new(self.layout)?;
                Ok(LoadedState::Dense(DensityMatrix::with_tolerance(self.matrix, layout, LOAD_TOL)?))
            }
        }
    }
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixFile> {
    MatrixFile::parse(&std::fs::read_to_string(path)?)
}

/// Loads a dense state; bosonic files are rejected.
pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    match read_matrix_file(path)?.into_state()? {
        LoadedState::Dense(d) => Ok(d),
        LoadedState::Bosonic(_) => Err(Error::InvalidInput(format!("{} holds a bosonic state", path.display()))),
    }
}

pub fn load_any(path: &Path) -> Result<LoadedState> {
    read_matrix_file(path)?.into_state()
}

pub fn state_file(state: &DensityMatrix, metadata: Metadata) -> MatrixFile {
    MatrixFile { layout: state.layout().dims().to_vec(), sym_k: None, matrix: state.matrix().clone(), metadata }
}

pub fn bosonic_file(state: &BosonicState, metadata: Metadata) -> MatrixFile {
    MatrixFile {
        layout: vec![state.d_a(), state.k() + 1],
        sym_k: Some(state.k()),
        matrix: state.matrix().clone(),
        metadata,
    }
}

pub fn save_state(state: &DensityMatrix, path: &Path, metadata: Metadata) -> Result<()> {
    std::fs::write(path, state_file(state, metadata).to_json())?;
    Ok(())
}

pub fn save_bosonic(state: &BosonicState, path: &Path, metadata: Metadata) -> Result<()> {
    std::fs::write(path, bosonic_file(state, metadata).to_json())?;
    Ok(())
}

/// Outcome line of a command run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Feasible,
    Infeasible,
    Undecided,
    Pass,
    Fail,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Feasible => "FEASIBLE",
            RunStatus::Infeasible => "INFEASIBLE",
            RunStatus::Undecided => "UNDECIDED",
            RunStatus::Pass => "PASS",
            RunStatus::Fail => "FAIL",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Feasible | RunStatus::Pass => 0,
            RunStatus::Infeasible | RunStatus::Fail => 2,
            RunStatus::Undecided => 3,
        }
    }
}

impl From<crate::extend::Status> for RunStatus {
    fn from(s: crate::extend::Status) -> Self {
        match s {
            crate::extend::Status::Feasible => RunStatus::Feasible,
            crate::extend::Status::Infeasible => RunStatus::Infeasible,
            crate::extend::Status::Undecided => RunStatus::Undecided,
        }
    }
}

/// `key: value` report; the timing line always comes last so the rest can be
/// compared byte for byte across runs.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub status: RunStatus,
    pub fields: Vec<(String, String)>,
    pub certificates: Vec<String>,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, status: RunStatus) -> Self {
        Self { command: command.into(), status, fields: Vec::new(), certificates: Vec::new(), elapsed_ms: 0.0 }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    /// Everything except the timing line.
    pub fn body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "status: {}", self.status.as_str());
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k}: {v}");
        }
        for c in &self.certificates {
            let _ = writeln!(s, "certificate: {c}");
        }
        s
    }

    pub fn to_text(&self) -> String {
        format!("{}elapsed_ms: {:.3}\n", self.body(), self.elapsed_ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::{gen_random_extendible, Profile};

    #[test]
    fn round_trip_is_bit_exact() {
        let (rho, _) = gen_random_extendible(3, 3, 5, Profile::AllDiagrams).unwrap();
        let meta = Metadata { seed: Some(5), provenance: Some("gen \"k=3\"".into()) };
        let text = state_file(&rho, meta.clone()).to_json();
        let back = MatrixFile::parse(&text).unwrap();
        assert_eq!(back.matrix, *rho.matrix());
        assert_eq!(back.metadata, meta);
        assert_eq!(back.layout, vec![3, 2]);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn truncated_file_reports_position() {
        let (rho, _) = gen_random_extendible(2, 2, 1, Profile::AllDiagrams).unwrap();
        let text = state_file(&rho, Metadata::default()).to_json();
        let cut = &text[..text.len() / 2];
        match MatrixFile::parse(cut) {
            Err(Error::Parse { line, .. }) => assert!(line > 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_checks() {
        let mut entries = Vec::new();
        for i in 0..36 {
            entries.push(if i % 7 == 0 { "[0.16666666666666666, 0]" } else { "[0, 0]" });
        }
        let good = format!(
            "{{\"format_version\": 1, \"kind\": \"state\", \"layout\": [3, 2], \"entries\": [{}]}}",
            entries.join(",")
        );
        let f = MatrixFile::parse(&good).unwrap();
        assert!(matches!(f.into_state().unwrap(), LoadedState::Dense(_)));
        let short = good.replacen("[0, 0],", "", 1);
        assert!(MatrixFile::parse(&short).is_err());
        let bad_kind = good.replace("\"state\"", "\"blob\"");
        assert!(MatrixFile::parse(&bad_kind).is_err());
        let tagged = good.replace("\"layout\": [3, 2]", "\"layout\": [3, 2], \"layout_tag\": \"sym(1)\"");
        assert_eq!(MatrixFile::parse(&tagged).unwrap().sym_k, Some(1));
        let mistagged = good.replace("\"layout\": [3, 2]", "\"layout\": [3, 2], \"layout_tag\": \"sym(4)\"");
        assert!(MatrixFile::parse(&mistagged).is_err());
    }

    #[test]
    fn report_puts_timing_last() {
        let mut r = RunReport::new("check-sym --k 2", RunStatus::Infeasible);
        r.field("residual", "1e-1");
        r.elapsed_ms = 2.5;
        let t = r.to_text();
        assert!(t.starts_with(&r.body()));
        assert!(t.ends_with("elapsed_ms: 2.500\n"));
        assert_eq!(r.status.exit_code(), 2);
    }
}
