//! Line-oriented text format for automata.
//!
//! ```text
//! # comment
//! alphabet: a b
//! tape: A:ff B:ff
//! states: q0 q1
//! initial: q0
//! final: q1
//! delay: 1
//! feature: empty-test
//! trans: q0 a - - q0 A -
//! trans-empty: q1 q2
//! trans-nonempty: q1 q3
//! trans-empty: q1 q4 A B
//! ```
//!
//! `trans` fields are `from input readFront readTail to writeFront writeTail`;
//! guarded moves take `from to`, optionally followed by `writeFront writeTail`;
//! `-` is ε and multi-symbol strings are dot-joined (`D.C`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{AutomatonError, Class, DequeAutomaton, Guard, StateId, SymbolId, TapeSymbol, Transition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid automaton: {0}")]
    Validation(#[from] AutomatonError),
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Field<'a> {
    text: &'a str,
    column: usize,
}

fn fields(body: &str, offset: usize) -> Vec<Field<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices().chain([(body.len(), ' ')]) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Field {
                    text: &body[s..i],
                    column: offset + body[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s != "-" && !s.contains(['.', ':'])
}

#[derive(Default)]
struct Draft {
    alphabet: Option<BTreeSet<char>>,
    tape: Option<Vec<TapeSymbol>>,
    states: Option<Vec<String>>,
    initial: Option<(String, usize, usize)>,
    finals: Option<Vec<(String, usize, usize)>>,
    delay: Option<usize>,
    empty_test: bool,
    moves: Vec<(usize, Vec<(String, usize)>, Guard)>,
}

/// Parses the text format. The result is in canonical order: states and
/// symbols sorted by name, transitions sorted by their printed line.
pub fn parse_da(text: &str) -> Result<DequeAutomaton, FormatError> {
    let mut d = Draft::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            return Err(err(line, 1, "expected `key: value`"));
        };
        let key = content[..colon].trim();
        let body = &content[colon + 1..];
        let offset = content[..colon + 1].chars().count();
        let fs = fields(body, offset);
        let once = |seen: bool| {
            if seen {
                Err(err(line, 1, format!("duplicate `{key}` section")))
            } else {
                Ok(())
            }
        };
        match key {
            "alphabet" => {
                once(d.alphabet.is_some())?;
                let mut set = BTreeSet::new();
                for f in &fs {
                    let mut cs = f.text.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) if c != '-' => {
                            set.insert(c);
                        }
                        _ => return Err(err(line, f.column, format!("`{}` is not a single letter", f.text))),
                    }
                }
                d.alphabet = Some(set);
            }
            "tape" => {
                once(d.tape.is_some())?;
                let mut tape = Vec::new();
                for f in &fs {
                    let (name, class) = match f.text.split_once(':') {
                        Some((n, c)) => {
                            let class: Class = c
                                .parse()
                                .map_err(|_| err(line, f.column, format!("unknown class `{c}`")))?;
                            (n, Some(class))
                        }
                        None => (f.text, None),
                    };
                    if !valid_name(name) {
                        return Err(err(line, f.column, format!("bad symbol name `{name}`")));
                    }
                    tape.push(TapeSymbol {
                        name: name.to_string(),
                        class,
                    });
                }
                d.tape = Some(tape);
            }
            "states" => {
                once(d.states.is_some())?;
                d.states = Some(fs.iter().map(|f| f.text.to_string()).collect());
            }
            "initial" => {
                once(d.initial.is_some())?;
                match &fs[..] {
                    [f] => d.initial = Some((f.text.to_string(), line, f.column)),
                    _ => return Err(err(line, offset + 1, "expected exactly one initial state")),
                }
            }
            "final" => {
                once(d.finals.is_some())?;
                d.finals = Some(fs.iter().map(|f| (f.text.to_string(), line, f.column)).collect());
            }
            "delay" => {
                once(d.delay.is_some())?;
                match &fs[..] {
                    [f] => {
                        d.delay = Some(
                            f.text
                                .parse()
                                .map_err(|_| err(line, f.column, "delay must be a positive integer"))?,
                        )
                    }
                    _ => return Err(err(line, offset + 1, "expected one delay value")),
                }
            }
            "feature" => {
                for f in &fs {
                    match f.text {
                        "empty-test" => d.empty_test = true,
                        other => return Err(err(line, f.column, format!("unknown feature `{other}`"))),
                    }
                }
            }
            "trans" | "trans-empty" | "trans-nonempty" => {
                let (want, guard) = match key {
                    "trans" => (7, Guard::None),
                    "trans-empty" => (2, Guard::Empty),
                    _ => (2, Guard::NonEmpty),
                };
                if fs.len() != want && !(guard != Guard::None && fs.len() == 4) {
                    let want = if guard == Guard::None { "7".to_string() } else { "2 or 4".to_string() };
                    return Err(err(
                        line,
                        offset + 1,
                        format!("`{key}` takes {want} fields, found {}", fs.len()),
                    ));
                }
                d.moves.push((
                    line,
                    fs.iter().map(|f| (f.text.to_string(), f.column)).collect(),
                    guard,
                ));
            }
            other => return Err(err(line, 1, format!("unknown section `{other}`"))),
        }
    }
    d.finish()
}

impl Draft {
    fn finish(self) -> Result<DequeAutomaton, FormatError> {
        let missing = |what: &str| err(0, 0, format!("missing `{what}` section"));
        let mut states = self.states.ok_or_else(|| missing("states"))?;
        states.sort();
        let mut tape = self.tape.unwrap_or_default();
        tape.sort_by(|a, b| a.name.cmp(&b.name));
        let alphabet = self.alphabet.unwrap_or_default();
        let state_of = |name: &str, line: usize, column: usize| {
            states
                .binary_search_by(|s| s.as_str().cmp(name))
                .map(StateId)
                .map_err(|_| err(line, column, format!("undeclared state `{name}`")))
        };
        let (iname, iline, icol) = self.initial.ok_or_else(|| missing("initial"))?;
        let initial = state_of(&iname, iline, icol)?;
        let finals = self
            .finals
            .unwrap_or_default()
            .iter()
            .map(|(n, l, c)| state_of(n, *l, *c))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let symbols: BTreeMap<&str, SymbolId> = tape
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), SymbolId(i as u16)))
            .collect();
        let tape_str = |text: &str, line: usize, column: usize| -> Result<Vec<SymbolId>, FormatError> {
            if text == "-" {
                return Ok(vec![]);
            }
            text.split('.')
                .map(|s| {
                    symbols
                        .get(s)
                        .copied()
                        .ok_or_else(|| err(line, column, format!("undeclared tape symbol `{s}`")))
                })
                .collect()
        };
        let mut transitions = Vec::new();
        for (line, fs, guard) in &self.moves {
            let line = *line;
            let t = if *guard == Guard::None {
                let input = match fs[1].0.as_str() {
                    "-" => None,
                    s => {
                        let mut cs = s.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) if alphabet.contains(&c) => Some(c),
                            _ => return Err(err(line, fs[1].1, format!("`{s}` is not a letter of the alphabet"))),
                        }
                    }
                };
                Transition {
                    from: state_of(&fs[0].0, line, fs[0].1)?,
                    input,
                    read_front: tape_str(&fs[2].0, line, fs[2].1)?,
                    read_tail: tape_str(&fs[3].0, line, fs[3].1)?,
                    to: state_of(&fs[4].0, line, fs[4].1)?,
                    write_front: tape_str(&fs[5].0, line, fs[5].1)?,
                    write_tail: tape_str(&fs[6].0, line, fs[6].1)?,
                    guard: Guard::None,
                }
            } else {
                Transition {
                    from: state_of(&fs[0].0, line, fs[0].1)?,
                    input: None,
                    read_front: vec![],
                    read_tail: vec![],
                    to: state_of(&fs[1].0, line, fs[1].1)?,
                    write_front: match fs.get(2) {
                        Some((text, col)) => tape_str(text, line, *col)?,
                        None => vec![],
                    },
                    write_tail: match fs.get(3) {
                        Some((text, col)) => tape_str(text, line, *col)?,
                        None => vec![],
                    },
                    guard: *guard,
                }
            };
            transitions.push(t);
        }
        let mut m = DequeAutomaton {
            input_alphabet: alphabet,
            tape,
            states,
            initial,
            finals,
            transitions,
            delay: self.delay.unwrap_or(1),
            allow_emptiness_test: self.empty_test,
        };
        m.validate()?;
        sort_transitions(&mut m);
        Ok(m)
    }
}

fn tape_field(m: &DequeAutomaton, s: &[SymbolId]) -> String {
    if s.is_empty() {
        "-".into()
    } else {
        m.tape_string(s)
    }
}

fn line_of(m: &DequeAutomaton, t: &Transition) -> String {
    match t.guard {
        Guard::None => format!(
            "trans: {} {} {} {} {} {} {}",
            m.state_name(t.from),
            t.input.map_or("-".to_string(), |c| c.to_string()),
            tape_field(m, &t.read_front),
            tape_field(m, &t.read_tail),
            m.state_name(t.to),
            tape_field(m, &t.write_front),
            tape_field(m, &t.write_tail),
        ),
        Guard::Empty | Guard::NonEmpty => {
            let key = if t.guard == Guard::Empty { "trans-empty" } else { "trans-nonempty" };
            let mut line = format!("{key}: {} {}", m.state_name(t.from), m.state_name(t.to));
            if !t.write_front.is_empty() || !t.write_tail.is_empty() {
                let _ = write!(line, " {} {}", tape_field(m, &t.write_front), tape_field(m, &t.write_tail));
            }
            line
        }
    }
}

fn sort_transitions(m: &mut DequeAutomaton) {
    let transitions = std::mem::take(&mut m.transitions);
    let mut keyed: Vec<(String, Transition)> = transitions
        .into_iter()
        .map(|t| (line_of(m, &t), t))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    m.transitions = keyed.into_iter().map(|(_, t)| t).collect();
}

/// Prints the text format with sorted states, symbols and transitions.
pub fn print_da(m: &DequeAutomaton) -> String {
    let mut out = String::new();
    let letters: Vec<String> = m.input_alphabet.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "alphabet: {}", letters.join(" "));
    let mut tape: Vec<String> = m
        .tape
        .iter()
        .map(|s| match s.class {
            Some(c) => format!("{}:{}", s.name, c),
            None => s.name.clone(),
        })
        .collect();
    tape.sort();
    let _ = writeln!(out, "tape: {}", tape.join(" "));
    let mut states = m.states.clone();
    states.sort();
    let _ = writeln!(out, "states: {}", states.join(" "));
    let _ = writeln!(out, "initial: {}", m.state_name(m.initial));
    let mut finals: Vec<&str> = m.finals.iter().map(|&f| m.state_name(f)).collect();
    finals.sort();
    let _ = writeln!(out, "final: {}", finals.join(" "));
    let _ = writeln!(out, "delay: {}", m.delay);
    if m.allow_emptiness_test {
        out.push_str("feature: empty-test\n");
    }
    let mut lines: Vec<String> = m.transitions.iter().map(|t| line_of(m, t)).collect();
    lines.sort();
    lines.dedup();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out.replace(": \n", ":\n")
}
