//! OpenQASM 2.0 emission and a minimal reader for round trips.

use std::sync::Arc;

use super::stream::{GateStream, Op};
use super::CodegenError;
use crate::gates::GateCatalog;

pub const PRELUDE: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// Render a stream; fails on gates without a mnemonic.
pub fn emit_qasm(stream: &GateStream) -> Result<String, CodegenError> {
    let mut s = String::from(PRELUDE);
    if stream.qubit_count > 0 {
        s.push_str(&format!("qreg q[{}];\n", stream.qubit_count));
    }
    if stream.ops.iter().any(|o| !o.clbits().is_empty()) {
        s.push_str(&format!("creg c[{}];\n", stream.clbit_count));
    }
    for op in &stream.ops {
        let mn = op.gate.qasm.as_deref().ok_or_else(|| CodegenError::UnsupportedGate(op.gate.name.clone()))?;
        if mn == "measure" {
            s.push_str(&format!("measure q[{}] -> c[{}];\n", op.qubits()[0], op.clbits()[0]));
        } else {
            let args: Vec<String> = op.operands.iter().map(|q| format!("q[{q}]")).collect();
            s.push_str(&format!("{mn} {};\n", args.join(",")));
        }
    }
    Ok(s)
}

fn parse_ref(tok: &str, reg: char, line: usize) -> Result<usize, CodegenError> {
    let bad = || CodegenError::Qasm { line, msg: format!("expected {reg}[index], found `{tok}`") };
    let t = tok.trim();
    let inner =
        t.strip_prefix(reg).and_then(|r| r.strip_prefix('[')).and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    inner.trim().parse().map_err(|_| bad())
}

/// Read the subset of OpenQASM 2.0 produced by [`emit_qasm`]. Register
/// names must be `q` and `c`.
pub fn parse_qasm(text: &str, catalog: &GateCatalog) -> Result<GateStream, CodegenError> {
    let mut ops = Vec::new();
    let mut declared_q = 0;
    let mut declared_c = 0;
    let stmts = text.lines().enumerate().flat_map(|(i, l)| {
        let l = l.split("//").next().unwrap_or("");
        l.split(';').map(move |s| (i + 1, s.trim().to_string())).collect::<Vec<_>>()
    });
    for (line, st) in stmts {
        if st.is_empty() || st.starts_with("OPENQASM") || st.starts_with("include") || st.starts_with("barrier") {
            continue;
        }
        if let Some(r) = st.strip_prefix("qreg") {
            declared_q = parse_ref(r, 'q', line)?;
            continue;
        }
        if let Some(r) = st.strip_prefix("creg") {
            declared_c = parse_ref(r, 'c', line)?;
            continue;
        }
        let (mn, rest) = st
            .split_once(char::is_whitespace)
            .ok_or_else(|| CodegenError::Qasm { line, msg: format!("cannot read `{st}`") })?;
        let sig =
            catalog.by_qasm(mn).ok_or_else(|| CodegenError::Qasm { line, msg: format!("unknown gate `{mn}`") })?;
        let operands = if mn == "measure" {
            let (q, c) =
                rest.split_once("->").ok_or_else(|| CodegenError::Qasm { line, msg: "measure needs ->".into() })?;
            vec![parse_ref(q, 'q', line)?, parse_ref(c, 'c', line)?]
        } else {
            rest.split(',').map(|a| parse_ref(a, 'q', line)).collect::<Result<Vec<_>, _>>()?
        };
        if operands.len() != sig.arity() {
            return Err(CodegenError::Qasm { line, msg: format!("`{mn}` takes {} operands", sig.arity()) });
        }
        let k = ops.len() as i64;
        ops.push(Op { gate: Arc::new(sig.clone()), operands, timestamp: vec![k] });
    }
    let mut s = GateStream::from_ops(ops)?;
    s.qubit_count = s.qubit_count.max(declared_q);
    s.clbit_count = s.clbit_count.max(declared_c);
    Ok(s)
}
