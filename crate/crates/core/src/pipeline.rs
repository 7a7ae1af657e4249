//! End-to-end compilation of one codegen directive.

use thiserror::Error;

use crate::affine::Binding;
use crate::axl::{self, AxlError, Program};
use crate::codegen::{self, CodegenError, GateStream, LoopAst};
use crate::gates::GateCatalog;
use crate::scop::{assemble, Scop};
use crate::transform::{self, ScheduleOptions, ScheduleSolution, TransformError, TransformKind};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Axl(#[from] AxlError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error("directive {index} does not exist ({count} in file)")]
    NoDirective { index: usize, count: usize },
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub scop: Scop,
    pub solution: ScheduleSolution,
    pub ast: LoopAst,
    pub stream: GateStream,
}

impl Compiled {
    pub fn loops(&self) -> String {
        codegen::emit_loops(&self.ast, &self.scop.binding)
    }

    pub fn qasm(&self) -> Result<String, CodegenError> {
        codegen::emit_qasm(&self.stream)
    }
}

pub fn compile_scop(scop: &Scop, kind: TransformKind, opts: &ScheduleOptions) -> Result<Compiled, CompileError> {
    let solution = transform::schedule(scop, kind, opts)?;
    let ast = codegen::scan(scop, &solution)?;
    let stream = codegen::flatten(scop, &solution, &ast, &scop.binding)?;
    Ok(Compiled { scop: scop.clone(), solution, ast, stream })
}

/// Assemble directive `index`, overriding its binding and transform when given.
pub fn compile_program(
    program: &Program,
    index: usize,
    transform: Option<TransformKind>,
    overrides: &Binding,
    opts: &ScheduleOptions,
) -> Result<Compiled, CompileError> {
    if index >= program.directives.len() {
        return Err(CompileError::NoDirective { index, count: program.directives.len() });
    }
    let mut scop = assemble(program, index);
    for (k, v) in &overrides.0 {
        scop.binding.set(k, *v);
    }
    let kind = transform.unwrap_or(program.directives[index].transform);
    compile_scop(&scop, kind, opts)
}

pub fn compile_source(
    text: &str,
    catalog: &GateCatalog,
    index: usize,
    transform: Option<TransformKind>,
    overrides: &Binding,
    opts: &ScheduleOptions,
) -> Result<Compiled, CompileError> {
    let program = axl::load(text, catalog)?;
    compile_program(&program, index, transform, overrides, opts)
}
