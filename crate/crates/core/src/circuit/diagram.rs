use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dynamics::TypedNeutralContext;
use crate::syntax::{Color, Mode, Name, Pattern, Program, Signature, Type};

pub type WireId = usize;

/// A bundle of wires shaped like a simple type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WireTree {
    Unit,
    Wire(WireId),
    Pair(Box<WireTree>, Box<WireTree>),
}

impl WireTree {
    pub fn leaves(&self) -> Vec<WireId> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<WireId>) {
        match self {
            WireTree::Unit => {}
            WireTree::Wire(w) => out.push(*w),
            WireTree::Pair(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    fn renumber(&self, map: &BTreeMap<WireId, WireId>) -> WireTree {
        match self {
            WireTree::Unit => WireTree::Unit,
            WireTree::Wire(w) => WireTree::Wire(map[w]),
            WireTree::Pair(a, b) => WireTree::Pair(Box::new(a.renumber(map)), Box::new(b.renumber(map))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateBox {
    pub gate: Name,
    pub inputs: Vec<WireId>,
    pub outputs: Vec<WireId>,
}

/// Gate applications in extraction order. Inputs are the free circuit
/// variables followed by any lambda-bound ports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub inputs: Vec<(String, WireTree)>,
    pub gates: Vec<GateBox>,
    pub outputs: WireTree,
    names: Vec<String>,
}

/// A diagram with wires renumbered by first appearance and names dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramShape {
    pub inputs: Vec<WireTree>,
    pub gates: Vec<(Name, Vec<WireId>, Vec<WireId>)>,
    pub outputs: WireTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("`{0}` is not a circuit type")]
    NonCircuitType(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(Name),
    #[error("unexpected `{0}` in a normal circuit")]
    Unexpected(String),
    #[error("unbound circuit variable `{0}`")]
    Unbound(Name),
}

impl Diagram {
    pub fn name(&self, w: WireId) -> &str {
        &self.names[w]
    }

    pub fn wire_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty() && self.names.is_empty()
    }

    pub fn output_wires(&self) -> Vec<WireId> {
        self.outputs.leaves()
    }

    /// Every wire is produced once and consumed at most once.
    pub fn check_linearity(&self) -> Result<(), String> {
        let mut produced = BTreeSet::new();
        let mut consumed = BTreeSet::new();
        let input_wires = self.inputs.iter().flat_map(|(_, t)| t.leaves());
        for w in input_wires.chain(self.gates.iter().flat_map(|g| g.outputs.iter().copied())) {
            if !produced.insert(w) {
                return Err(format!("wire `{}` is produced twice", self.name(w)));
            }
        }
        for w in self.gates.iter().flat_map(|g| g.inputs.iter().copied()).chain(self.outputs.leaves()) {
            if !produced.contains(&w) {
                return Err(format!("wire `{}` is consumed but never produced", self.name(w)));
            }
            if !consumed.insert(w) {
                return Err(format!("wire `{}` is consumed twice", self.name(w)));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> DiagramShape {
        let mut map = BTreeMap::new();
        let mut visit = |w: WireId| {
            let n = map.len();
            map.entry(w).or_insert(n);
        };
        for (_, t) in &self.inputs {
            t.leaves().into_iter().for_each(&mut visit);
        }
        for g in &self.gates {
            g.inputs.iter().chain(&g.outputs).copied().for_each(&mut visit);
        }
        self.outputs.leaves().into_iter().for_each(&mut visit);
        DiagramShape {
            inputs: self.inputs.iter().map(|(_, t)| t.renumber(&map)).collect(),
            gates: self
                .gates
                .iter()
                .map(|g| {
                    (
                        g.gate.clone(),
                        g.inputs.iter().map(|w| map[w]).collect(),
                        g.outputs.iter().map(|w| map[w]).collect(),
                    )
                })
                .collect(),
            outputs: self.outputs.renumber(&map),
        }
    }

    /// Equality up to the names of wires.
    pub fn isomorphic(&self, other: &Diagram) -> bool {
        self.shape() == other.shape()
    }
}

struct Extractor<'a> {
    sig: &'a Signature,
    names: Vec<String>,
    /// Generated names that a pattern binder may still replace.
    provisional: Vec<bool>,
    used: BTreeSet<String>,
    gates: Vec<GateBox>,
    inputs: Vec<(String, WireTree)>,
    env: Vec<(Name, WireTree)>,
}

impl Extractor<'_> {
    fn wire(&mut self, name: Option<String>) -> WireId {
        let provisional = name.is_none();
        let mut name = name.unwrap_or_else(|| format!("w{}", self.names.len()));
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        self.names.push(name);
        self.provisional.push(provisional);
        self.names.len() - 1
    }

    /// Fresh wires shaped like `ty`, named after `base` when given.
    fn tree(&mut self, ty: &Type, base: Option<&str>) -> Result<WireTree, DiagramError> {
        Ok(match ty {
            Type::Unit(Mode::Q) => WireTree::Unit,
            Type::Qubit => WireTree::Wire(self.wire(base.map(str::to_string))),
            Type::Tensor(a, b, Mode::Q) => {
                let l = self.tree(a, base.map(|s| format!("{s}.0")).as_deref())?;
                let r = self.tree(b, base.map(|s| format!("{s}.1")).as_deref())?;
                WireTree::Pair(Box::new(l), Box::new(r))
            }
            other => return Err(DiagramError::NonCircuitType(other.to_string())),
        })
    }

    /// Names a provisional wire after the binder that destructures it.
    fn adopt(&mut self, x: &Name, t: &WireTree) {
        if let WireTree::Wire(w) = t {
            if self.provisional[*w] && !self.used.contains(x.as_str()) {
                self.used.remove(&self.names[*w]);
                self.names[*w] = x.to_string();
                self.used.insert(x.to_string());
                self.provisional[*w] = false;
            }
        }
    }

    fn apply_gate(&mut self, g: &Name, input: WireTree) -> Result<WireTree, DiagramError> {
        let gt = self.sig.get(g).ok_or_else(|| DiagramError::UnknownGate(g.clone()))?;
        let out_ty = gt.output.as_type().clone();
        let outputs = self.tree(&out_ty, None)?;
        self.gates.push(GateBox { gate: g.clone(), inputs: input.leaves(), outputs: outputs.leaves() });
        Ok(outputs)
    }

    fn eval(&mut self, p: &Program) -> Result<WireTree, DiagramError> {
        match p {
            Program::Var(x, Color::Circuit) => self
                .env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| DiagramError::Unbound(x.clone())),
            Program::Unit(Color::Circuit) => Ok(WireTree::Unit),
            Program::Pair(a, b, Color::Circuit) => {
                let l = self.eval(a)?;
                let r = self.eval(b)?;
                Ok(WireTree::Pair(Box::new(l), Box::new(r)))
            }
            Program::App(g, k, Color::Circuit) => match &**g {
                Program::Gate(g) => {
                    let input = self.eval(k)?;
                    self.apply_gate(g, input)
                }
                other => Err(DiagramError::Unexpected(other.to_string())),
            },
            Program::Match { .. } => self.matching(p, |e, body| e.eval(body)),
            other => Err(DiagramError::Unexpected(other.to_string())),
        }
    }

    fn matching(
        &mut self,
        p: &Program,
        body: impl FnOnce(&mut Self, &Program) -> Result<WireTree, DiagramError>,
    ) -> Result<WireTree, DiagramError> {
        let Program::Match { scrutinee, pattern, scrutinee_color: Color::Circuit, .. } = p else {
            return Err(DiagramError::Unexpected(p.to_string()));
        };
        let t = self.eval(scrutinee)?;
        let k = self.env.len();
        match (pattern, t) {
            (Pattern::Unit(_), WireTree::Unit) => {}
            (Pattern::Pair(x, y, _), WireTree::Pair(a, b)) => {
                self.adopt(x, &a);
                self.adopt(y, &b);
                self.env.push((x.clone(), *a));
                self.env.push((y.clone(), *b));
            }
            (_, t) => return Err(DiagramError::Unexpected(format!("pattern over wires {:?}", t.leaves()))),
        }
        let r = body(self, pattern.body());
        self.env.truncate(k);
        r
    }

    /// Evaluates a circuit of arrow type: lambda binders become input ports.
    fn function(&mut self, ty: &Type, p: &Program) -> Result<WireTree, DiagramError> {
        let Type::Arrow(a, b, Mode::Q) = ty else {
            return self.eval(p);
        };
        match p {
            Program::Lam { binder, body, color: Color::Circuit, .. } => {
                let input = self.tree(a, Some(binder.as_str()))?;
                self.inputs.push((binder.to_string(), input.clone()));
                self.env.push((binder.clone(), input));
                let r = self.function(b, body);
                self.env.pop();
                r
            }
            Program::Gate(g) => {
                let input = self.tree(a, Some("in"))?;
                self.inputs.push(("in".into(), input.clone()));
                self.apply_gate(g, input)
            }
            Program::Match { .. } => self.matching(p, |e, body| e.function(ty, body)),
            other => Err(DiagramError::Unexpected(other.to_string())),
        }
    }
}

/// Reads a normal circuit of simple or circuit-arrow type as a diagram.
pub fn extract_diagram(
    sig: &Signature,
    psi: &TypedNeutralContext,
    v: &Program,
    ty: &Type,
) -> Result<Diagram, DiagramError> {
    if !(ty.is_simple() || matches!(ty, Type::Arrow(_, _, Mode::Q))) {
        return Err(DiagramError::NonCircuitType(ty.to_string()));
    }
    let mut e = Extractor {
        sig,
        names: Vec::new(),
        provisional: Vec::new(),
        used: BTreeSet::new(),
        gates: Vec::new(),
        inputs: Vec::new(),
        env: Vec::new(),
    };
    for (x, s) in psi.entries() {
        let t = e.tree(s.as_type(), Some(x.as_str()))?;
        e.inputs.push((x.to_string(), t.clone()));
        e.env.push((x.clone(), t));
    }
    let outputs = e.function(ty, v)?;
    Ok(Diagram { inputs: e.inputs, gates: e.gates, outputs, names: e.names })
}
