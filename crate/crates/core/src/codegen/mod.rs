//! Loop-tree generation from scheduled scops, gate-stream flattening and
//! emission as loop listings or OpenQASM 2.0.

pub mod emit;
pub mod qasm;
pub mod scan;
pub mod stream;

use thiserror::Error;

use crate::affine::AffineError;

pub use emit::emit_loops;
pub use qasm::{emit_qasm, parse_qasm, PRELUDE};
pub use scan::{scan, AstNode, Bound, Guard, Leaf, LoopAst};
pub use stream::{flatten, GateStream, Op};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodegenError {
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error("schedule of `{0}` does not determine every iterator")]
    NotInvertible(String),
    #[error("loop bounds of `{0}` are unbounded")]
    Unbounded(String),
    #[error("gate `{gate}` has negative operand {value}")]
    NegativeOperand { gate: String, value: i64 },
    #[error("gate `{gate}` uses register entry {index} twice")]
    DuplicateOperand { gate: String, index: usize },
    #[error("// unsupported: gate `{0}` has no OpenQASM mnemonic")]
    UnsupportedGate(String),
    #[error("qasm line {line}: {msg}")]
    Qasm { line: usize, msg: String },
}
