//! Labeled deque graphs: a hamiltonian path of vertices plus typed edges,
//! each edge pairing the write of a deque item with its later read.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::automaton::{Class, DequeAutomaton, End, SymbolId};
use crate::cdl::{CdlReject, CdlScanner, CharLetter, CharWord};
use crate::normal_forms::{DequeOp, SimpleMove};
use crate::run::{decide, DecideError, Limits, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexLabel {
    Char(CharLetter),
    Input(char),
    Epsilon,
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Char(l) => write!(f, "{l}"),
            VertexLabel::Input(c) => write!(f, "{c}"),
            VertexLabel::Epsilon => f.write_str("ε"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub label: VertexLabel,
    /// Input position (1-based) the vertex belongs to.
    pub position: usize,
    /// 0 for the vertex of a consumed letter, 1, 2, … for the ε vertices
    /// inserted after it.
    pub offset: usize,
}

impl Vertex {
    /// `5`, `5'`, `5''`, …
    pub fn name(&self) -> String {
        format!("{}{}", self.position, "'".repeat(self.offset))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    /// 1-based vertex numbers along the hamiltonian path, `src < dst`.
    pub src: usize,
    pub dst: usize,
    pub class: Class,
    pub index: u32,
    /// Tape symbol name for run graphs.
    pub symbol: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDequeGraph {
    pub vertices: Vec<Vertex>,
    /// Sorted by source, then destination.
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {src}→{dst} is not oriented along the path or leaves it")]
    BadEdge { src: usize, dst: usize },
    #[error("vertex {0} is not the endpoint of exactly one edge")]
    Degree(usize),
    #[error("vertex {0} carries a label inconsistent with its edge")]
    Label(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgmReject {
    /// 1-based vertex where the walk blocked.
    pub vertex: usize,
}

impl LabeledDequeGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Labels in hamiltonian order.
    pub fn word(&self) -> Vec<VertexLabel> {
        self.vertices.iter().map(|v| v.label).collect()
    }

    fn sort_edges(&mut self) {
        self.edges.sort();
    }

    /// Checks the shape required of characteristic graphs: one edge endpoint
    /// per vertex and labels given by the edge type and index.
    pub fn validate_characteristic(&self) -> Result<(), GraphError> {
        let n = self.vertices.len();
        let mut degree = vec![0usize; n + 1];
        for e in &self.edges {
            if e.src == 0 || e.src >= e.dst || e.dst > n {
                return Err(GraphError::BadEdge {
                    src: e.src,
                    dst: e.dst,
                });
            }
            degree[e.src] += 1;
            degree[e.dst] += 1;
            let open = VertexLabel::Char(CharLetter::open(e.class, e.index));
            let close = VertexLabel::Char(CharLetter::close(e.class, e.index));
            if self.vertices[e.src - 1].label != open {
                return Err(GraphError::Label(e.src));
            }
            if self.vertices[e.dst - 1].label != close {
                return Err(GraphError::Label(e.dst));
            }
        }
        if let Some(v) = (1..=n).find(|&v| degree[v] != 1) {
            return Err(GraphError::Degree(v));
        }
        Ok(())
    }

    /// True when, among ff edges and among tt edges, any two intervals are
    /// nested or disjoint.
    pub fn stack_edges_nest(&self) -> bool {
        for class in [Class::FF, Class::TT] {
            let es: Vec<&Edge> = self.edges.iter().filter(|e| e.class == class).collect();
            for (i, a) in es.iter().enumerate() {
                for b in &es[i + 1..] {
                    let crossing = (a.src < b.src && b.src < a.dst && a.dst < b.dst)
                        || (b.src < a.src && a.src < b.dst && b.dst < a.dst);
                    if crossing {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Builds the graph of a DQ_k word by instrumenting the recognizer: every
/// open remembers its vertex, every close creates the edge.
pub fn build_ldg(w: &CharWord) -> Result<LabeledDequeGraph, CdlReject> {
    let mut scanner = CdlScanner::new();
    let mut sources: VecDeque<usize> = VecDeque::new();
    let mut edges = Vec::new();
    for (i, &l) in w.letters.iter().enumerate() {
        scanner.step(l)?;
        let v = i + 1;
        match (l.is_open(), l.end()) {
            (true, End::Front) => sources.push_front(v),
            (true, End::Tail) => sources.push_back(v),
            (false, end) => {
                let src = match end {
                    End::Front => sources.pop_front(),
                    End::Tail => sources.pop_back(),
                }
                .expect("scanner accepted the close");
                edges.push(Edge {
                    src,
                    dst: v,
                    class: l.class,
                    index: l.index,
                    symbol: None,
                });
            }
        }
    }
    scanner.finish()?;
    let mut g = LabeledDequeGraph {
        vertices: w
            .letters
            .iter()
            .enumerate()
            .map(|(i, &l)| Vertex {
                label: VertexLabel::Char(l),
                position: i + 1,
                offset: 0,
            })
            .collect(),
        edges,
    };
    g.sort_edges();
    Ok(g)
}

/// The characteristic word spelled by the vertex labels, if all labels are
/// characteristic letters.
pub fn word_of(g: &LabeledDequeGraph) -> Option<CharWord> {
    let letters = g
        .vertices
        .iter()
        .map(|v| match v.label {
            VertexLabel::Char(l) => Some(l),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    let k = letters.iter().map(|l| l.index).max().unwrap_or(1);
    Some(CharWord { letters, k })
}

/// Walks the path keeping the open edges in a deque: sources are pushed at
/// the write end of their type, destinations must find their own edge at
/// the read end.
pub fn dgm_accept(g: &LabeledDequeGraph) -> Result<Result<(), DgmReject>, GraphError> {
    g.validate_characteristic()?;
    let n = g.vertices.len();
    let mut role: Vec<Option<(usize, bool)>> = vec![None; n + 1];
    for (i, e) in g.edges.iter().enumerate() {
        role[e.src] = Some((i, true));
        role[e.dst] = Some((i, false));
    }
    let mut deque: VecDeque<usize> = VecDeque::new();
    for v in 1..=n {
        let (ei, is_src) = role[v].expect("validated degree");
        let class = g.edges[ei].class;
        if is_src {
            match class.write_end() {
                End::Front => deque.push_front(ei),
                End::Tail => deque.push_back(ei),
            }
        } else {
            let popped = match class.read_end() {
                End::Front => deque.pop_front(),
                End::Tail => deque.pop_back(),
            };
            if popped != Some(ei) {
                return Ok(Err(DgmReject { vertex: v }));
            }
        }
    }
    Ok(if deque.is_empty() {
        Ok(())
    } else {
        Err(DgmReject { vertex: n + 1 })
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunGraphError {
    #[error("machine must be simple and partitioned")]
    NotSimplePartitioned,
    #[error("word rejected")]
    Reject,
    #[error("search limit exceeded")]
    ResourceExceeded,
    #[error(transparent)]
    Decide(#[from] DecideError),
}

/// Graph of the first accepting computation found: a vertex per consumed
/// letter, an ε vertex per spontaneous move that touches the deque, and an
/// edge per stored symbol from its write to its read.
pub fn run_graph(m: &DequeAutomaton, w: &[char]) -> Result<LabeledDequeGraph, RunGraphError> {
    if !m.is_partitioned() || !m.is_simple() {
        return Err(RunGraphError::NotSimplePartitioned);
    }
    let trace = match decide(m, w, Limits::default())? {
        Verdict::Accept(t) => t,
        Verdict::Reject => return Err(RunGraphError::Reject),
        Verdict::ResourceExceeded => return Err(RunGraphError::ResourceExceeded),
    };
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut deque: VecDeque<(SymbolId, usize)> = VecDeque::new();
    let mut position = 0;
    let mut offset = 0;
    for step in &trace.steps {
        let t = &m.transitions[step.transition];
        let mv = SimpleMove::of(t).expect("simple");
        let label = match t.input {
            Some(c) => {
                position += 1;
                offset = 0;
                VertexLabel::Input(c)
            }
            None if mv.op == DequeOp::None => continue,
            None => {
                offset += 1;
                VertexLabel::Epsilon
            }
        };
        vertices.push(Vertex {
            label,
            position,
            offset,
        });
        let v = vertices.len();
        match mv.op {
            DequeOp::None => {}
            DequeOp::Write(End::Front, s) => deque.push_front((s, v)),
            DequeOp::Write(End::Tail, s) => deque.push_back((s, v)),
            DequeOp::Read(end, s) => {
                let (got, src) = match end {
                    End::Front => deque.pop_front(),
                    End::Tail => deque.pop_back(),
                }
                .expect("accepted trace");
                debug_assert_eq!(got, s);
                edges.push(Edge {
                    src,
                    dst: v,
                    class: m.symbol_class(s).expect("partitioned"),
                    index: s.0 as u32 + 1,
                    symbol: Some(m.symbol_name(s).to_string()),
                });
            }
        }
    }
    let mut g = LabeledDequeGraph { vertices, edges };
    g.sort_edges();
    Ok(g)
}

fn edge_caption(e: &Edge) -> String {
    match &e.symbol {
        Some(s) => s.clone(),
        None => format!("{}{}", e.class, e.index),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Which copy of the vertex each edge end attaches to.
fn rows(class: Class) -> (Row, Row) {
    match class {
        Class::FF => (Row::Front, Row::Front),
        Class::TT => (Row::Tail, Row::Tail),
        Class::FT => (Row::Front, Row::Tail),
        Class::TF => (Row::Tail, Row::Front),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Row {
    Tail,
    Front,
}

impl Row {
    fn prefix(self) -> char {
        match self {
            Row::Tail => 't',
            Row::Front => 'f',
        }
    }
}

/// Graphviz rendering of the unrolled cylinder: the tail row on top, the
/// front row below, dotted path lines, and pinned positions for `neato -n`.
pub fn emit_dot(g: &LabeledDequeGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph ldg {\n");
    out.push_str("  node [shape=circle, fontsize=10, width=0.45, fixedsize=true];\n");
    out.push_str("  edge [fontsize=9];\n");
    for (row, y) in [(Row::Tail, 100), (Row::Front, 0)] {
        for (i, v) in g.vertices.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {}{} [label=\"{}\", xlabel=\"{}\", pos=\"{},{}!\"];",
                row.prefix(),
                i + 1,
                escape(&v.label.to_string()),
                v.name(),
                60 * i,
                y
            );
        }
    }
    for i in 1..g.vertices.len() {
        for row in [Row::Tail, Row::Front] {
            let _ = writeln!(
                out,
                "  {p}{i} -> {p}{j} [style=dotted, arrowhead=none];",
                p = row.prefix(),
                j = i + 1
            );
        }
    }
    for i in 1..=g.vertices.len() {
        let _ = writeln!(out, "  t{i} -> f{i} [style=dotted, arrowhead=none, color=gray];");
    }
    for e in &g.edges {
        let (a, b) = rows(e.class);
        let _ = writeln!(
            out,
            "  {}{} -> {}{} [label=\"{}\", class=\"{}\"];",
            a.prefix(),
            e.src,
            b.prefix(),
            e.dst,
            escape(&edge_caption(e)),
            e.class
        );
    }
    out.push_str("}\n");
    out
}

const PITCH: usize = 56;
const MARGIN: usize = 40;
const TAIL_Y: usize = 90;
const FRONT_Y: usize = 190;
const RADIUS: usize = 13;

fn class_colour(c: Class) -> &'static str {
    match c {
        Class::FF => "#1f77b4",
        Class::FT => "#2ca02c",
        Class::TF => "#d62728",
        Class::TT => "#9467bd",
    }
}

/// SVG rendering of the same two-row layout. Stack edges arc outside their
/// row (ff below the front row, tt above the tail row); queue edges cross
/// between the rows.
pub fn emit_svg(g: &LabeledDequeGraph) -> String {
    let n = g.vertices.len().max(1);
    let width = 2 * MARGIN + PITCH * (n - 1);
    let height = FRONT_Y + TAIL_Y;
    let x = |v: usize| MARGIN + PITCH * (v - 1);
    let y = |r: Row| match r {
        Row::Tail => TAIL_Y,
        Row::Front => FRONT_Y,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    out.push_str("<g class=\"path\" stroke=\"#999\" stroke-dasharray=\"3,3\" fill=\"none\">\n");
    if g.vertices.len() > 1 {
        for row in [Row::Tail, Row::Front] {
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                x(1),
                y(row),
                x(g.vertices.len()),
                y(row)
            );
        }
    }
    for v in 1..=g.vertices.len() {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>",
            x(v),
            TAIL_Y + RADIUS,
            x(v),
            FRONT_Y - RADIUS
        );
    }
    out.push_str("</g>\n<g class=\"edges\" fill=\"none\" stroke-width=\"1.5\">\n");
    for e in &g.edges {
        let (a, b) = rows(e.class);
        let (x1, y1, x2, y2) = (x(e.src), y(a), x(e.dst), y(b));
        let colour = class_colour(e.class);
        let (path, lx, ly) = if a == b {
            let span = x2 - x1;
            let bulge = (span / 2).clamp(20, 70);
            let (cy, ly) = if a == Row::Tail {
                (y1 - RADIUS - bulge, y1 - RADIUS - bulge / 2 - 6)
            } else {
                (y1 + RADIUS + bulge, y1 + RADIUS + bulge / 2 + 12)
            };
            let sy = if a == Row::Tail { y1 - RADIUS } else { y1 + RADIUS };
            (
                format!("M {x1} {sy} C {x1} {cy} {x2} {cy} {x2} {sy}"),
                (x1 + x2) / 2,
                ly,
            )
        } else {
            let (sy, ey) = if a == Row::Front {
                (y1 - RADIUS, y2 + RADIUS)
            } else {
                (y1 + RADIUS, y2 - RADIUS)
            };
            (
                format!("M {x1} {sy} L {x2} {ey}"),
                (x1 + x2) / 2 + 4,
                (sy + ey) / 2,
            )
        };
        let _ = writeln!(
            out,
            "<path class=\"{}\" d=\"{path}\" stroke=\"{colour}\"/><text x=\"{lx}\" y=\"{ly}\" fill=\"{colour}\" text-anchor=\"middle\">{}</text>",
            e.class,
            escape(&edge_caption(e))
        );
    }
    out.push_str("</g>\n<g class=\"vertices\">\n");
    for (i, v) in g.vertices.iter().enumerate() {
        let label = escape(&v.label.to_string());
        for row in [Row::Tail, Row::Front] {
            let _ = writeln!(
                out,
                "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{RADIUS}\" fill=\"#fff\" stroke=\"#333\"/><text x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"9\">{label}</text>",
                cx = x(i + 1),
                cy = y(row),
                ty = y(row) + 3
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#666\" font-size=\"9\">{}</text>",
            x(i + 1),
            (TAIL_Y + FRONT_Y) / 2 + 3,
            v.name()
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> CharWord {
        CharWord::parse(s, None).unwrap()
    }

    #[test]
    fn smallest_graph() {
        let g = build_ldg(&word("ff+1 ff-1")).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(
            g.edges,
            [Edge {
                src: 1,
                dst: 2,
                class: Class::FF,
                index: 1,
                symbol: None
            }]
        );
        assert_eq!(dgm_accept(&g), Ok(Ok(())));
        assert_eq!(word_of(&g).unwrap().to_string(), "ff+1 ff-1");
    }

    #[test]
    fn def4_graph() {
        let w = word("tt+1 ff+1 tt+2 ff-1 ft+1 tt-2 ft+2 tt-1 ft-1 ft-2");
        let g = build_ldg(&w).unwrap();
        assert_eq!(g.len(), 10);
        let types: Vec<Class> = g.edges.iter().map(|e| e.class).collect();
        assert_eq!(types, [Class::TT, Class::FF, Class::TT, Class::FT, Class::FT]);
        assert_eq!(dgm_accept(&g), Ok(Ok(())));
        assert!(g.stack_edges_nest());
    }

    #[test]
    fn blocked_word_fails_at_same_position() {
        let err = build_ldg(&word("ff+1 ft+1 ff-1 ft-1")).unwrap_err();
        assert_eq!(err.position, 3);
    }

    #[test]
    fn crossing_queues_rejected_by_machine() {
        let letters = word("ft+1 tf+1 ft-1 tf-1").letters;
        let g = LabeledDequeGraph {
            vertices: letters
                .iter()
                .enumerate()
                .map(|(i, &l)| Vertex {
                    label: VertexLabel::Char(l),
                    position: i + 1,
                    offset: 0,
                })
                .collect(),
            edges: vec![
                Edge {
                    src: 1,
                    dst: 3,
                    class: Class::FT,
                    index: 1,
                    symbol: None,
                },
                Edge {
                    src: 2,
                    dst: 4,
                    class: Class::TF,
                    index: 1,
                    symbol: None,
                },
            ],
        };
        assert!(matches!(dgm_accept(&g), Ok(Err(_))));
    }

    #[test]
    fn structure_checked() {
        let g = LabeledDequeGraph {
            vertices: vec![
                Vertex {
                    label: VertexLabel::Char(CharLetter::open(Class::FF, 1)),
                    position: 1,
                    offset: 0,
                },
                Vertex {
                    label: VertexLabel::Char(CharLetter::close(Class::TT, 1)),
                    position: 2,
                    offset: 0,
                },
            ],
            edges: vec![Edge {
                src: 1,
                dst: 2,
                class: Class::FF,
                index: 1,
                symbol: None,
            }],
        };
        assert_eq!(dgm_accept(&g), Err(GraphError::Label(2)));
    }

    #[test]
    fn rendering_is_stable() {
        let g = build_ldg(&word(
            "tf+2 tt+1 ff+1 tt-1 ff-1 tf-2 ft+1 ft+1 ff+2 ft-1 ff+1 ft-1 ff-1 ff-2",
        ))
        .unwrap();
        assert_eq!(g.len(), 14);
        assert_eq!(g.edges.len(), 7);
        assert_eq!(emit_dot(&g), emit_dot(&g.clone()));
        assert_eq!(emit_svg(&g), emit_svg(&g.clone()));
        let dot = emit_dot(&g);
        assert_eq!(dot.matches("[label=").count(), 28 + 7);
    }

    #[test]
    fn ff_edge_stays_on_front_row() {
        let g = build_ldg(&word("ff+1 ff-1")).unwrap();
        assert!(emit_dot(&g).contains("f1 -> f2 [label=\"ff1\""));
    }
}
