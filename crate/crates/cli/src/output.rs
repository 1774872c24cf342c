use serde::Serialize;
use serde_json::{json, Value};

use pslrack::field::Field;

pub const TOOL: &str = "pslrack";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleStatus {
    SymbolicOnly,
    OracleVerified,
    OracleFailed,
}

impl OracleStatus {
    pub fn from_check(passed: bool) -> OracleStatus {
        if passed {
            OracleStatus::OracleVerified
        } else {
            OracleStatus::OracleFailed
        }
    }

    /// Combines statuses: any failure wins, then any verification.
    pub fn join(self, other: OracleStatus) -> OracleStatus {
        use OracleStatus::*;
        match (self, other) {
            (OracleFailed, _) | (_, OracleFailed) => OracleFailed,
            (OracleVerified, _) | (_, OracleVerified) => OracleVerified,
            _ => SymbolicOnly,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OracleStatus::SymbolicOnly => "symbolic-only",
            OracleStatus::OracleVerified => "oracle-verified",
            OracleStatus::OracleFailed => "oracle-failed",
        }
    }
}

/// A finished command: the JSON payload plus its text renderings.
pub struct Report {
    pub command: &'static str,
    pub field: Option<Field>,
    pub status: OracleStatus,
    pub payload: Value,
    pub human: String,
    pub csv: Option<String>,
}

impl Report {
    pub fn schema_id(&self) -> String {
        format!("{TOOL}/{}/v1", self.command)
    }

    /// The envelope. `serde_json` maps are ordered, so keys come out sorted
    /// and the output is byte-for-byte reproducible.
    pub fn envelope(&self) -> Value {
        json!({
            "schema": self.schema_id(),
            "tool": { "name": TOOL, "version": VERSION },
            "command": self.command,
            "field": self.field.as_ref().map(field_json),
            "oracle_status": self.status,
            "payload": self.payload,
        })
    }

    pub fn render_human(&self) -> String {
        let field = match &self.field {
            Some(f) => format!(" | GF({}) = F_{}[x]/({})", f.q(), f.p(), f.modulus_string()),
            None => String::new(),
        };
        format!("{TOOL} {VERSION} | {}{field} | {}\n\n{}", self.command, self.status.as_str(), self.human)
    }
}

pub fn field_json(f: &Field) -> Value {
    json!({ "p": f.p(), "n": f.n(), "q": f.q(), "modulus": f.modulus_string() })
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Left-aligned text table with a rule under the header.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(width.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}
