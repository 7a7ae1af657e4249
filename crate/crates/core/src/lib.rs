//! Compiler toolchain for parameterized affine quantum circuits.
//!
//! AXL source is parsed ([`axl`]), assembled into a polyhedral program
//! ([`scop`]), analysed for dependences ([`deps`]), rescheduled
//! ([`transform`]), scanned into loops and flattened to a gate stream
//! ([`codegen`]), mapped onto a coupling graph ([`mapper`]) and measured
//! ([`harness`]).

pub mod affine;
pub mod axl;
pub mod codegen;
pub mod deps;
pub mod gates;
pub mod harness;
pub mod mapper;
pub mod par;
pub mod pipeline;
pub mod scop;
pub mod transform;

pub use affine::Binding;
pub use gates::GateCatalog;
pub use par::Execution;
pub use pipeline::{compile_program, compile_scop, compile_source, CompileError, Compiled};
pub use transform::TransformKind;
