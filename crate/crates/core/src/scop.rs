//! Program assembly: a codegen directive becomes a flat list of gate nodes,
//! each with its domain, operands and a padded multi-dimensional schedule.

use serde::Serialize;

use crate::affine::{AffineExpr, AffineMap, Binding, IntegerSet};
use crate::axl::{Body, Composition, Program};
use crate::gates::{access_relations, AccessRelation, GateSignature};

/// One gate of one statement. Statement instances expand to one node
/// instance per gate in the body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    pub statement: String,
    /// Position of the statement within the scop (assembly order).
    pub group: usize,
    pub gate_position: usize,
    pub gate: GateSignature,
    pub args: Vec<AffineExpr>,
    pub domain: IntegerSet,
    pub schedule: AffineMap,
}

impl Node {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn label(&self) -> String {
        if self.gate_position == 0 {
            self.statement.clone()
        } else {
            format!("{}.{}", self.statement, self.gate_position)
        }
    }

    pub fn access_relations(&self) -> Vec<AccessRelation> {
        let mut rels = access_relations(&self.statement, &self.domain.iterators, &[(&self.gate, &self.args)]);
        for r in &mut rels {
            r.gate_position = self.gate_position;
        }
        rels
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scop {
    pub params: Vec<String>,
    pub binding: Binding,
    pub nodes: Vec<Node>,
}

impl Scop {
    pub fn schedule_len(&self) -> usize {
        self.nodes.iter().map(|n| n.schedule.len()).max().unwrap_or(0)
    }

    pub fn statement_count(&self) -> usize {
        self.nodes.iter().map(|n| n.group + 1).max().unwrap_or(0)
    }

    /// Same scop under a different parameter binding.
    pub fn rebind(&self, binding: Binding) -> Self {
        Self { binding, ..self.clone() }
    }
}

fn body_schedules(body: &Body, iterators: &[String]) -> Vec<(usize, AffineMap)> {
    match body {
        Body::Gate(g) => vec![(*g, AffineMap::identity(iterators.to_vec()))],
        Body::Compose(items) => {
            let mut out = Vec::new();
            for (k, item) in items.iter().enumerate() {
                for (g, mut m) in body_schedules(item, iterators) {
                    m.outputs.push(AffineExpr::constant(k as i64));
                    out.push((g, m));
                }
            }
            out
        }
    }
}

fn comp_schedules(comp: &Composition, program: &Program) -> Vec<(usize, usize, AffineMap)> {
    match comp {
        Composition::Stmt(s) => {
            let st = &program.statements[*s];
            body_schedules(&st.body, st.iterators()).into_iter().map(|(g, m)| (*s, g, m)).collect()
        }
        Composition::Compose(items) => {
            let mut out = Vec::new();
            for (k, item) in items.iter().enumerate() {
                for (s, g, mut m) in comp_schedules(item, program) {
                    m.outputs.insert(0, AffineExpr::constant(k as i64));
                    out.push((s, g, m));
                }
            }
            out
        }
    }
}

/// Assemble directive `index` of `program`.
pub fn assemble(program: &Program, index: usize) -> Scop {
    let d = &program.directives[index];
    assemble_composition(program, &d.composition, d.binding.clone())
}

pub fn assemble_composition(program: &Program, comp: &Composition, binding: Binding) -> Scop {
    let raw = comp_schedules(comp, program);
    let len = raw.iter().map(|r| r.2.len()).max().unwrap_or(0);
    let mut groups: Vec<usize> = Vec::new();
    let mut nodes = Vec::new();
    for (s, g, m) in raw {
        if groups.last() != Some(&s) {
            groups.push(s);
        }
        let st = &program.statements[s];
        let gate = &st.gates[g];
        nodes.push(Node {
            statement: st.name.clone(),
            group: groups.len() - 1,
            gate_position: g,
            gate: gate.sig.clone(),
            args: gate.args.clone(),
            domain: st.domain.clone(),
            schedule: m.padded(len),
        });
    }
    Scop { params: program.params.clone(), binding, nodes }
}
