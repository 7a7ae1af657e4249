//! Gate catalog with per-argument access modes, and access relations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineExpr, AffineMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Read,
    ReadWrite,
    Write,
}

impl Mode {
    pub fn writes(self) -> bool {
        !matches!(self, Mode::Read)
    }

    pub fn token(self) -> &'static str {
        match self {
            Mode::Read => "r",
            Mode::ReadWrite => "rw",
            Mode::Write => "w",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    Quantum,
    Classical,
}

impl Space {
    pub fn register(self) -> &'static str {
        match self {
            Space::Quantum => "q",
            Space::Classical => "c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateSignature {
    pub name: String,
    pub modes: Vec<Mode>,
    pub spaces: Vec<Space>,
    /// OpenQASM mnemonic; `None` means the gate cannot be emitted.
    pub qasm: Option<String>,
    /// Name used in loop listings.
    pub listing: String,
}

impl GateSignature {
    fn builtin(name: &str, args: &[(Mode, Space)], qasm: &str, listing: &str) -> Self {
        Self {
            name: name.to_string(),
            modes: args.iter().map(|a| a.0).collect(),
            spaces: args.iter().map(|a| a.1).collect(),
            qasm: Some(qasm.to_string()),
            listing: listing.to_string(),
        }
    }

    pub fn arity(&self) -> usize {
        self.modes.len()
    }

    pub fn quantum_arity(&self) -> usize {
        self.spaces.iter().filter(|s| **s == Space::Quantum).count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown gate `{0}`")]
    Unknown(String),
    #[error("catalog line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateCatalog {
    gates: BTreeMap<String, GateSignature>,
    aliases: BTreeMap<String, String>,
}

impl Default for GateCatalog {
    fn default() -> Self {
        Self::standard()
    }
}

impl GateCatalog {
    pub fn standard() -> Self {
        use Mode::*;
        use Space::*;
        let q_rw = [(ReadWrite, Quantum)];
        let ctl = [(Read, Quantum), (ReadWrite, Quantum)];
        let gates = [
            GateSignature::builtin("X", &q_rw, "x", "X"),
            GateSignature::builtin("Y", &q_rw, "y", "Y"),
            GateSignature::builtin("Z", &q_rw, "z", "Z"),
            GateSignature::builtin("H", &q_rw, "h", "H"),
            GateSignature::builtin("Measure", &[(ReadWrite, Quantum), (Write, Classical)], "measure", "MEASURE"),
            GateSignature::builtin("CNOT", &ctl, "cx", "CX"),
            GateSignature::builtin("CY", &ctl, "cy", "CY"),
            GateSignature::builtin("CZ", &ctl, "cz", "CZ"),
            GateSignature::builtin("Swap", &[(ReadWrite, Quantum), (ReadWrite, Quantum)], "swap", "SWAP"),
            GateSignature::builtin("Toffoli", &[(Read, Quantum), (Read, Quantum), (ReadWrite, Quantum)], "ccx", "CCX"),
        ];
        let aliases = [
            ("NOT", "X"),
            ("CX", "CNOT"),
            ("CCX", "Toffoli"),
            ("CCNOT", "Toffoli"),
            ("SWAP", "Swap"),
            ("MEASURE", "Measure"),
        ];
        Self {
            gates: gates.into_iter().map(|g| (g.name.clone(), g)).collect(),
            aliases: aliases.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    pub fn signature(&self, name: &str) -> Result<&GateSignature, CatalogError> {
        let canon = self.aliases.get(name).map(|s| s.as_str()).unwrap_or(name);
        self.gates.get(canon).ok_or_else(|| CatalogError::Unknown(name.to_string()))
    }

    pub fn insert(&mut self, sig: GateSignature) {
        self.gates.insert(sig.name.clone(), sig);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gates.keys().map(|s| s.as_str())
    }

    /// Find the gate whose OpenQASM mnemonic is `mn`.
    pub fn by_qasm(&self, mn: &str) -> Option<&GateSignature> {
        self.gates.values().find(|g| g.qasm.as_deref() == Some(mn))
    }

    /// Extend from a line-oriented description:
    /// `NAME ARITY MODE:SPACE ... [qasm=MNEMONIC]`, `#` starts a comment.
    /// MODE is `r`, `rw` or `w`; SPACE is `q` or `c`.
    pub fn extend_from_str(&mut self, text: &str) -> Result<usize, CatalogError> {
        let mut added = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| CatalogError::Format { line: i + 1, msg: msg.to_string() };
            let mut fields = line.split_whitespace();
            let name = fields.next().ok_or_else(|| err("missing name"))?;
            let arity: usize =
                fields.next().ok_or_else(|| err("missing arity"))?.parse().map_err(|_| err("arity is not a number"))?;
            let mut modes = Vec::new();
            let mut spaces = Vec::new();
            let mut qasm = None;
            for f in fields {
                if let Some(mn) = f.strip_prefix("qasm=") {
                    qasm = Some(mn.to_string());
                    continue;
                }
                let (m, s) = f.split_once(':').ok_or_else(|| err("expected MODE:SPACE"))?;
                modes.push(match m {
                    "r" => Mode::Read,
                    "rw" => Mode::ReadWrite,
                    "w" => Mode::Write,
                    _ => return Err(err("mode must be r, rw or w")),
                });
                spaces.push(match s {
                    "q" => Space::Quantum,
                    "c" => Space::Classical,
                    _ => return Err(err("space must be q or c")),
                });
            }
            if modes.len() != arity {
                return Err(err("argument count differs from arity"));
            }
            if !spaces.contains(&Space::Quantum) {
                return Err(err("gate must touch the quantum register"));
            }
            self.insert(GateSignature { name: name.to_string(), modes, spaces, qasm, listing: name.to_string() });
            added += 1;
        }
        Ok(added)
    }
}

/// One access of one gate argument, as a map from the statement domain to a
/// register index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRelation {
    pub statement: String,
    pub gate_position: usize,
    pub argument: usize,
    pub map: AffineMap,
    pub mode: Mode,
    pub space: Space,
}

impl fmt::Display for AccessRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}#{}.{} {} {}{}",
            self.statement,
            self.gate_position,
            self.argument,
            self.mode.token(),
            self.space.register(),
            self.map
        )
    }
}

/// One relation per argument of every gate in a statement body.
pub fn access_relations(
    statement: &str,
    iterators: &[String],
    gates: &[(&GateSignature, &[AffineExpr])],
) -> Vec<AccessRelation> {
    let mut out = Vec::new();
    for (pos, (sig, args)) in gates.iter().enumerate() {
        for (k, arg) in args.iter().enumerate() {
            out.push(AccessRelation {
                statement: statement.to_string(),
                gate_position: pos,
                argument: k,
                map: AffineMap::new(iterators.to_vec(), vec![arg.clone()]),
                mode: sig.modes[k],
                space: sig.spaces[k],
            });
        }
    }
    out
}
