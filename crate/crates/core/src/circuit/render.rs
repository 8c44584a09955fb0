use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Diagram, WireId};

enum Producer {
    Input,
    Gate(usize),
}

struct Layout {
    /// Lane of each wire.
    lane: BTreeMap<WireId, usize>,
    lanes: usize,
    /// Column (1-based) of each gate.
    depth: Vec<usize>,
    /// Column where each wire starts and ends; `None` end means it leaves the
    /// diagram as an output.
    span: BTreeMap<WireId, (usize, Option<usize>)>,
    columns: usize,
}

fn layout(d: &Diagram) -> Layout {
    let mut lane = BTreeMap::new();
    let mut producer = BTreeMap::new();
    let mut lanes = 0;
    for (_, t) in &d.inputs {
        for w in t.leaves() {
            lane.insert(w, lanes);
            producer.insert(w, Producer::Input);
            lanes += 1;
        }
    }
    let mut depth = Vec::with_capacity(d.gates.len());
    let mut span = BTreeMap::new();
    for (i, g) in d.gates.iter().enumerate() {
        let col = 1 + g
            .inputs
            .iter()
            .map(|w| match producer.get(w) {
                Some(Producer::Gate(j)) => depth[*j],
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        depth.push(col);
        for w in &g.inputs {
            let start = match producer.get(w) {
                Some(Producer::Gate(j)) => depth[*j],
                _ => 0,
            };
            span.insert(*w, (start, Some(col)));
        }
        for (k, w) in g.outputs.iter().enumerate() {
            let l = match g.inputs.get(k) {
                Some(input) => lane[input],
                None => {
                    lanes += 1;
                    lanes - 1
                }
            };
            lane.insert(*w, l);
            producer.insert(*w, Producer::Gate(i));
        }
    }
    for (w, p) in &producer {
        span.entry(*w).or_insert_with(|| {
            let start = match p {
                Producer::Gate(j) => depth[*j],
                Producer::Input => 0,
            };
            (start, None)
        });
    }
    let columns = depth.iter().copied().max().unwrap_or(0);
    Layout { lane, lanes, depth, span, columns }
}

fn label(d: &Diagram, gate: usize, port: usize) -> String {
    let g = &d.gates[gate];
    if g.inputs.len().max(g.outputs.len()) > 1 {
        format!("[{} {}]", g.gate, port)
    } else {
        format!("[{}]", g.gate)
    }
}

/// Fixed-width drawing: one row per lane, gates placed in the column of
/// their depth.
pub fn render_ascii(d: &Diagram) -> String {
    if d.is_empty() {
        return String::new();
    }
    let lay = layout(d);
    let mut cells: BTreeMap<(usize, usize), String> = BTreeMap::new();
    for (i, g) in d.gates.iter().enumerate() {
        for (port, w) in g.inputs.iter().enumerate().chain(g.outputs.iter().enumerate()) {
            cells.insert((lay.lane[w], lay.depth[i]), label(d, i, port));
        }
    }
    let width = cells.values().map(|s| s.len()).max().unwrap_or(0) + 2;

    let mut left = vec![String::new(); lay.lanes];
    let mut right = vec![String::new(); lay.lanes];
    for (_, t) in &d.inputs {
        for w in t.leaves() {
            left[lay.lane[&w]] = d.name(w).to_string();
        }
    }
    for w in d.output_wires() {
        right[lay.lane[&w]] = d.name(w).to_string();
    }
    let margin = left.iter().map(|s| s.len()).max().unwrap_or(0);

    let alive = |lane: usize, col: usize| {
        lay.span.iter().any(|(w, (start, end))| lay.lane[w] == lane && *start < col && end.is_none_or(|e| col <= e))
    };

    let mut out = String::new();
    for l in 0..lay.lanes {
        let mut row = format!("{:<margin$} ", left[l]);
        for col in 1..=lay.columns {
            match cells.get(&(l, col)) {
                Some(text) => {
                    row.push('-');
                    row.push_str(text);
                    row.push_str(&"-".repeat(width - 1 - text.len()));
                }
                None if alive(l, col) => row.push_str(&"-".repeat(width)),
                None => row.push_str(&" ".repeat(width)),
            }
        }
        if !right[l].is_empty() {
            let _ = write!(row, "-- {}", right[l]);
        }
        out.push_str(row.trim_end());
        out.push('\n');
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph laid out left to right: gates are box nodes, wires are
/// labeled edges, inputs and outputs are plaintext terminals.
pub fn render_dot(d: &Diagram) -> String {
    let mut out = String::from("digraph circuit {\n  rankdir=LR;\n");
    if d.is_empty() {
        out.push_str("}\n");
        return out;
    }
    let mut source = BTreeMap::new();
    let mut n = 0;
    for (_, t) in &d.inputs {
        for w in t.leaves() {
            let id = format!("in{n}");
            n += 1;
            let _ = writeln!(out, "  {id} [shape=plaintext, label={}];", quote(d.name(w)));
            source.insert(w, id);
        }
    }
    for (i, g) in d.gates.iter().enumerate() {
        let _ = writeln!(out, "  g{i} [shape=box, label={}];", quote(g.gate.as_str()));
        for w in &g.outputs {
            source.insert(*w, format!("g{i}"));
        }
    }
    for (k, w) in d.output_wires().into_iter().enumerate() {
        let _ = writeln!(out, "  out{k} [shape=plaintext, label={}];", quote(d.name(w)));
    }
    for (i, g) in d.gates.iter().enumerate() {
        for w in &g.inputs {
            let _ = writeln!(out, "  {} -> g{i} [label={}];", source[w], quote(d.name(*w)));
        }
    }
    for (k, w) in d.output_wires().into_iter().enumerate() {
        let _ = writeln!(out, "  {} -> out{k} [label={}];", source[&w], quote(d.name(w)));
    }
    out.push_str("}\n");
    out
}
