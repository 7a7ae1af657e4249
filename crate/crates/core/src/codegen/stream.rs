//! Flat, time-stamped gate streams.

use std::sync::Arc;

use super::scan::{AstNode, LoopAst};
use super::CodegenError;
use crate::affine::Binding;
use crate::gates::{GateSignature, Space};
use crate::scop::Scop;
use crate::transform::ScheduleSolution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Op {
    pub gate: Arc<GateSignature>,
    /// Register indices in signature order; each lives in the space the
    /// signature gives for that position.
    pub operands: Vec<usize>,
    pub timestamp: Vec<i64>,
}

impl Op {
    pub fn new(gate: Arc<GateSignature>, operands: Vec<usize>) -> Self {
        Self { gate, operands, timestamp: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.gate.name
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.in_space(Space::Quantum)
    }

    pub fn clbits(&self) -> Vec<usize> {
        self.in_space(Space::Classical)
    }

    fn in_space(&self, sp: Space) -> Vec<usize> {
        self.operands.iter().zip(&self.gate.spaces).filter(|(_, s)| **s == sp).map(|(o, _)| *o).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateStream {
    pub ops: Vec<Op>,
    pub qubit_count: usize,
    pub clbit_count: usize,
}

impl GateStream {
    /// Check operands and size the registers as `1 + max index`.
    pub fn from_ops(ops: Vec<Op>) -> Result<Self, CodegenError> {
        let mut qubit_count = 0;
        let mut clbit_count = 0;
        for op in &ops {
            for sp in [Space::Quantum, Space::Classical] {
                let idx = op.in_space(sp);
                for (i, a) in idx.iter().enumerate() {
                    if idx[..i].contains(a) {
                        return Err(CodegenError::DuplicateOperand { gate: op.gate.name.clone(), index: *a });
                    }
                }
            }
            for q in op.qubits() {
                qubit_count = qubit_count.max(q + 1);
            }
            for c in op.clbits() {
                clbit_count = clbit_count.max(c + 1);
            }
        }
        Ok(Self { ops, qubit_count, clbit_count })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Sorted `(gate, operands)` list; equal for reorderings of one circuit.
    pub fn multiset(&self) -> Vec<(String, Vec<usize>)> {
        let mut v: Vec<(String, Vec<usize>)> =
            self.ops.iter().map(|o| (o.gate.name.clone(), o.operands.clone())).collect();
        v.sort();
        v
    }

    /// One line per op: `<timestamp> NAME a,b,...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for op in &self.ops {
            let ts: Vec<String> = op.timestamp.iter().map(|x| x.to_string()).collect();
            let args: Vec<String> =
                op.operands.iter().zip(&op.gate.spaces).map(|(o, sp)| format!("{}[{}]", sp.register(), o)).collect();
            s.push_str(&format!("<{}> {} {}\n", ts.join(","), op.gate.name, args.join(",")));
        }
        s
    }
}

/// Execute the loop tree under `binding`, checking exact domain membership
/// at each leaf.
pub fn flatten(
    scop: &Scop,
    sol: &ScheduleSolution,
    ast: &LoopAst,
    binding: &Binding,
) -> Result<GateStream, CodegenError> {
    let sigs: Vec<Arc<GateSignature>> = scop.nodes.iter().map(|n| Arc::new(n.gate.clone())).collect();
    let mut env = vec![0i64; ast.dims];
    let mut ops = Vec::new();
    let mut ctx = Exec { scop, sol, binding, sigs: &sigs };
    for r in &ast.roots {
        ctx.run(r, &mut env, &mut ops)?;
    }
    GateStream::from_ops(ops)
}

struct Exec<'a> {
    scop: &'a Scop,
    sol: &'a ScheduleSolution,
    binding: &'a Binding,
    sigs: &'a [Arc<GateSignature>],
}

impl Exec<'_> {
    fn run(&mut self, n: &AstNode, env: &mut Vec<i64>, ops: &mut Vec<Op>) -> Result<(), CodegenError> {
        match n {
            AstNode::Loop { dim, lower, upper, body } => {
                let lo = lower.eval(env, self.binding, true)?;
                let hi = upper.eval(env, self.binding, false)?;
                for v in lo..=hi {
                    env[*dim] = v;
                    for b in body {
                        self.run(b, env, ops)?;
                    }
                }
            }
            AstNode::Bind { dim, value, body } => {
                env[*dim] = value.eval(env, self.binding)?;
                for b in body {
                    self.run(b, env, ops)?;
                }
            }
            AstNode::Leaf(leaf) => {
                for g in &leaf.guards {
                    let v = env[g.dim];
                    if v < g.lower.eval(env, self.binding, true)? || v > g.upper.eval(env, self.binding, false)? {
                        return Ok(());
                    }
                }
                let point = leaf.point.iter().map(|e| e.eval(env, self.binding)).collect::<Result<Vec<_>, _>>()?;
                let node = &self.scop.nodes[leaf.node];
                if !node.domain.contains(&point, self.binding)? {
                    return Ok(());
                }
                let mut operands = Vec::with_capacity(node.args.len());
                for a in &node.args {
                    let v = a.eval(&point, self.binding)?;
                    if v < 0 {
                        return Err(CodegenError::NegativeOperand { gate: node.gate.name.clone(), value: v });
                    }
                    operands.push(v as usize);
                }
                ops.push(Op {
                    gate: self.sigs[leaf.node].clone(),
                    operands,
                    timestamp: self.sol.timestamp(leaf.node, &point),
                });
            }
        }
        Ok(())
    }
}
