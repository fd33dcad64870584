//! Equivalence-preserving rewrites between automaton presentations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::automaton::{Class, DequeAutomaton, End, Guard, StateId, SymbolId, TapeSymbol, Transition};
use crate::run::{decide, Limits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFormError {
    #[error("transition {0} performs more than one deque operation")]
    NotSimple(usize),
    #[error("classed symbol `{symbol}` is used at the wrong end in transition {transition}")]
    ClassDiscipline { transition: usize, symbol: String },
}

/// The single deque operation of a simple move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DequeOp {
    None,
    Write(End, SymbolId),
    Read(End, SymbolId),
}

/// Short-form view of a simple transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleMove {
    pub from: StateId,
    pub input: Option<char>,
    pub op: DequeOp,
    pub to: StateId,
    pub guard: Guard,
}

impl SimpleMove {
    pub fn of(t: &Transition) -> Option<SimpleMove> {
        let op = match (
            &t.read_front[..],
            &t.read_tail[..],
            &t.write_front[..],
            &t.write_tail[..],
        ) {
            ([], [], [], []) => DequeOp::None,
            ([s], [], [], []) => DequeOp::Read(End::Front, *s),
            ([], [s], [], []) => DequeOp::Read(End::Tail, *s),
            ([], [], [s], []) => DequeOp::Write(End::Front, *s),
            ([], [], [], [s]) => DequeOp::Write(End::Tail, *s),
            _ => return None,
        };
        Some(SimpleMove {
            from: t.from,
            input: t.input,
            op,
            to: t.to,
            guard: t.guard,
        })
    }

    pub fn to_transition(&self) -> Transition {
        let mut t = Transition {
            from: self.from,
            input: self.input,
            read_front: vec![],
            read_tail: vec![],
            to: self.to,
            write_front: vec![],
            write_tail: vec![],
            guard: self.guard,
        };
        match self.op {
            DequeOp::None => {}
            DequeOp::Read(End::Front, s) => t.read_front.push(s),
            DequeOp::Read(End::Tail, s) => t.read_tail.push(s),
            DequeOp::Write(End::Front, s) => t.write_front.push(s),
            DequeOp::Write(End::Tail, s) => t.write_tail.push(s),
        }
        t
    }

    /// Short notation such as `(q0, a, q0, →A)`: arrows mark writes, the
    /// arrow's side marks the end (`→A` front write, `A←` tail write,
    /// `←A` front read, `A→` tail read).
    pub fn display<'a>(&'a self, m: &'a DequeAutomaton) -> impl fmt::Display + 'a {
        ShortForm { mv: self, m }
    }
}

struct ShortForm<'a> {
    mv: &'a SimpleMove,
    m: &'a DequeAutomaton,
}

impl fmt::Display for ShortForm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mv = self.mv;
        let input = mv.input.map_or("ε".to_string(), |c| c.to_string());
        let op = match mv.op {
            DequeOp::None => match mv.guard {
                Guard::None => "ε".to_string(),
                Guard::Empty => "[empty]".to_string(),
                Guard::NonEmpty => "[non-empty]".to_string(),
            },
            DequeOp::Write(End::Front, s) => format!("→{}", self.m.symbol_name(s)),
            DequeOp::Write(End::Tail, s) => format!("{}←", self.m.symbol_name(s)),
            DequeOp::Read(End::Front, s) => format!("←{}", self.m.symbol_name(s)),
            DequeOp::Read(End::Tail, s) => format!("{}→", self.m.symbol_name(s)),
        };
        write!(
            f,
            "({}, {}, {}, {})",
            self.m.state_name(mv.from),
            input,
            self.m.state_name(mv.to),
            op
        )
    }
}

pub(crate) fn fresh(taken: &mut HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

fn plain(from: StateId, input: Option<char>, to: StateId) -> Transition {
    Transition {
        from,
        input,
        read_front: vec![],
        read_tail: vec![],
        to,
        write_front: vec![],
        write_tail: vec![],
        guard: Guard::None,
    }
}

/// Splits every multi-operation move into a chain of single-operation moves.
///
/// Operations are sequenced as: front reads left to right, tail reads right
/// to left, front writes right to left, tail writes left to right. The input
/// letter stays on the first link.
pub fn to_simple(m: &DequeAutomaton) -> DequeAutomaton {
    let mut out = m.clone();
    out.transitions.clear();
    let mut taken: HashSet<String> = m.states.iter().cloned().collect();
    let mut max_ops = 1;
    for (ti, t) in m.transitions.iter().enumerate() {
        let mut ops = Vec::new();
        ops.extend(t.read_front.iter().map(|&s| DequeOp::Read(End::Front, s)));
        ops.extend(t.read_tail.iter().rev().map(|&s| DequeOp::Read(End::Tail, s)));
        ops.extend(t.write_front.iter().rev().map(|&s| DequeOp::Write(End::Front, s)));
        ops.extend(t.write_tail.iter().map(|&s| DequeOp::Write(End::Tail, s)));
        if ops.len() <= 1 {
            out.transitions.push(t.clone());
            continue;
        }
        max_ops = max_ops.max(ops.len());
        let mut from = t.from;
        let last = ops.len() - 1;
        for (j, op) in ops.into_iter().enumerate() {
            let to = if j == last {
                t.to
            } else {
                let name = fresh(&mut taken, &format!("{}~{}.{}", m.state_name(t.from), ti, j + 1));
                out.states.push(name);
                StateId(out.states.len() - 1)
            };
            let mv = SimpleMove {
                from,
                input: if j == 0 { t.input } else { None },
                op,
                to,
                guard: if j == 0 { t.guard } else { Guard::None },
            };
            out.transitions.push(mv.to_transition());
            from = to;
        }
    }
    if max_ops > 1 {
        out.delay = m.delay * (1 + max_ops);
    }
    out
}

/// Tags every tape symbol with one of the four classes by guessing, at each
/// write, the end it will be read from.
pub fn to_partitioned(m: &DequeAutomaton) -> Result<DequeAutomaton, NormalFormError> {
    let moves = m
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| SimpleMove::of(t).ok_or(NormalFormError::NotSimple(i)))
        .collect::<Result<Vec<_>, _>>()?;
    if m.is_partitioned() {
        for (i, mv) in moves.iter().enumerate() {
            let (end, s, write) = match mv.op {
                DequeOp::None => continue,
                DequeOp::Write(e, s) => (e, s, true),
                DequeOp::Read(e, s) => (e, s, false),
            };
            let class = m.symbol_class(s).expect("partitioned");
            let want = if write { class.write_end() } else { class.read_end() };
            if want != end {
                return Err(NormalFormError::ClassDiscipline {
                    transition: i,
                    symbol: m.symbol_name(s).to_string(),
                });
            }
        }
        return Ok(m.clone());
    }

    let classed = |s: SymbolId, c: Class| (s, c);
    let mut candidates = Vec::new();
    for mv in &moves {
        let variants: Vec<(SymbolId, Class)> = match mv.op {
            DequeOp::None => vec![],
            DequeOp::Write(End::Front, s) => vec![classed(s, Class::FF), classed(s, Class::FT)],
            DequeOp::Write(End::Tail, s) => vec![classed(s, Class::TF), classed(s, Class::TT)],
            DequeOp::Read(End::Front, s) => vec![classed(s, Class::FF), classed(s, Class::TF)],
            DequeOp::Read(End::Tail, s) => vec![classed(s, Class::FT), classed(s, Class::TT)],
        };
        candidates.push(variants);
    }

    let mut written = BTreeSet::new();
    let mut read = BTreeSet::new();
    for (mv, vars) in moves.iter().zip(&candidates) {
        for &v in vars {
            match mv.op {
                DequeOp::Write(..) => written.insert(v),
                DequeOp::Read(..) => read.insert(v),
                DequeOp::None => false,
            };
        }
    }
    let live: Vec<(SymbolId, Class)> = written.intersection(&read).copied().collect();
    let mut taken = HashSet::new();
    let tape: Vec<TapeSymbol> = live
        .iter()
        .map(|&(s, c)| TapeSymbol {
            name: fresh(&mut taken, &format!("{}_{}", m.symbol_name(s), c)),
            class: Some(c),
        })
        .collect();
    let id_of = |v: (SymbolId, Class)| {
        live.binary_search(&v)
            .ok()
            .map(|i| SymbolId(i as u16))
    };

    let mut out = m.clone();
    out.tape = tape;
    out.transitions.clear();
    for (mv, vars) in moves.iter().zip(&candidates) {
        if matches!(mv.op, DequeOp::None) {
            out.transitions.push(mv.to_transition());
            continue;
        }
        for &v in vars {
            let Some(id) = id_of(v) else { continue };
            let op = match mv.op {
                DequeOp::Write(e, _) => DequeOp::Write(e, id),
                DequeOp::Read(e, _) => DequeOp::Read(e, id),
                DequeOp::None => unreachable!(),
            };
            out.transitions.push(SimpleMove { op, ..mv.clone() }.to_transition());
        }
    }
    Ok(out)
}

fn symbol_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c == '.' || c == ':' || c.is_whitespace() { '_' } else { c })
        .collect()
}

/// Replaces emptiness tests by a bottom marker kept at the tail end.
///
/// A fresh initial state writes the marker; every move touching the tail
/// reads and rewrites it; an empty-test becomes a front read of the marker
/// and a non-empty test a front read of any ordinary symbol. Acceptance moves
/// to a fresh final state that removes the marker.
pub fn eliminate_emptiness_tests(m: &DequeAutomaton) -> DequeAutomaton {
    let accepts_empty = matches!(decide(m, &[], Limits::default()), Ok(v) if v.is_accept());

    let mut taken: HashSet<String> = m.states.iter().cloned().collect();
    let mut names: HashSet<String> = m.tape.iter().map(|s| s.name.clone()).collect();
    let z_name = fresh(&mut names, "Z");

    let mut out = m.clone();
    for s in &mut out.tape {
        s.class = None;
    }
    out.tape.push(TapeSymbol {
        name: z_name,
        class: None,
    });
    let z = SymbolId((out.tape.len() - 1) as u16);
    let start = StateId(out.states.len());
    out.states.push(fresh(&mut taken, "z0"));
    let accept = StateId(out.states.len());
    out.states.push(fresh(&mut taken, "zf"));

    let mut moves = vec![Transition {
        write_tail: vec![z],
        ..plain(start, None, m.initial)
    }];
    for t in &m.transitions {
        match t.guard {
            Guard::None => {
                let mut t = t.clone();
                if t.touches_tail() {
                    t.read_tail.push(z);
                    t.write_tail.push(z);
                }
                moves.push(t);
            }
            Guard::Empty => moves.push(Transition {
                read_front: vec![z],
                write_front: [&t.write_front[..], &t.write_tail[..], &[z]].concat(),
                ..plain(t.from, None, t.to)
            }),
            Guard::NonEmpty => {
                for a in 0..m.tape.len() {
                    let a = SymbolId(a as u16);
                    let mut mv = Transition {
                        read_front: vec![a],
                        write_front: [&t.write_front[..], &[a]].concat(),
                        ..plain(t.from, None, t.to)
                    };
                    if !t.write_tail.is_empty() {
                        mv.read_tail = vec![z];
                        mv.write_tail = [&t.write_tail[..], &[z]].concat();
                    }
                    moves.push(mv);
                }
            }
        }
    }
    for &f in &m.finals {
        moves.push(Transition {
            read_front: vec![z],
            ..plain(f, None, accept)
        });
    }
    out.transitions = moves;
    out.initial = start;
    out.finals = BTreeSet::from([accept]);
    if accepts_empty {
        out.finals.insert(start);
    }
    out.delay = m.delay + 1;
    out.allow_emptiness_test = false;
    out
}

/// One-state machine keeping the simulated state as a marker at both ends.
///
/// Markers are seeded by a chain of `p` spontaneous moves that starts with an
/// emptiness test and removed by another chain of `p` spontaneous moves, where
/// `p` is the delay of `m` after its own tests are eliminated. The result has
/// delay `2p`, so a cleanup can never be followed by a second seeding and a
/// run cannot restart once its markers are gone. The language is
/// `L(m) ∪ {ε}`.
pub fn to_stateless(m: &DequeAutomaton) -> DequeAutomaton {
    let m = if m.has_guarded_moves() {
        eliminate_emptiness_tests(m)
    } else {
        m.clone()
    };
    let d = m.delay.max(1);
    let mut names: HashSet<String> = m.tape.iter().map(|s| s.name.clone()).collect();
    let mut tape: Vec<TapeSymbol> = m
        .tape
        .iter()
        .map(|s| TapeSymbol {
            name: s.name.clone(),
            class: None,
        })
        .collect();
    let mut marker = |tape: &mut Vec<TapeSymbol>, name: String| {
        tape.push(TapeSymbol {
            name: fresh(&mut names, &name),
            class: None,
        });
        SymbolId((tape.len() - 1) as u16)
    };
    let hats: Vec<SymbolId> = m
        .states
        .iter()
        .map(|q| marker(&mut tape, format!("^{}", symbol_safe(q))))
        .collect();
    let hat = |q: StateId| hats[q.0];
    let seeds: Vec<SymbolId> = (1..d).map(|j| marker(&mut tape, format!("^seed{j}"))).collect();
    let ends: Vec<SymbolId> = (1..d).map(|j| marker(&mut tape, format!("^end{j}"))).collect();
    let p = StateId(0);
    let both = |read: Option<SymbolId>, write: Option<SymbolId>| Transition {
        read_front: read.into_iter().collect(),
        read_tail: read.into_iter().collect(),
        write_front: write.into_iter().collect(),
        write_tail: write.into_iter().collect(),
        ..plain(p, None, p)
    };

    let mut moves = Vec::new();
    let mut chain: Vec<Option<SymbolId>> = vec![None];
    chain.extend(seeds.iter().copied().map(Some));
    chain.push(Some(hat(m.initial)));
    for w in chain.windows(2) {
        moves.push(both(w[0], w[1]));
    }
    moves[0].guard = Guard::Empty;
    for t in &m.transitions {
        let mut rf = vec![hat(t.from)];
        rf.extend(&t.read_front);
        let mut rt = t.read_tail.clone();
        rt.push(hat(t.from));
        let mut wf = vec![hat(t.to)];
        wf.extend(&t.write_front);
        let mut wt = t.write_tail.clone();
        wt.push(hat(t.to));
        moves.push(Transition {
            from: p,
            input: t.input,
            read_front: rf,
            read_tail: rt,
            to: p,
            write_front: wf,
            write_tail: wt,
            guard: Guard::None,
        });
    }
    let mut tail: Vec<Option<SymbolId>> = ends.iter().copied().map(Some).collect();
    tail.push(None);
    for &f in &m.finals {
        moves.push(both(Some(hat(f)), tail[0]));
    }
    for w in tail.windows(2) {
        moves.push(both(w[0], w[1]));
    }
    DequeAutomaton {
        input_alphabet: m.input_alphabet.clone(),
        tape,
        states: vec!["p".to_string()],
        initial: p,
        finals: BTreeSet::from([p]),
        transitions: moves,
        delay: 2 * d,
        allow_emptiness_test: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Builder;
    use crate::run::{accepts, bounded_language};
    use crate::zoo;

    #[test]
    fn sum_double_write_is_split() {
        let m = zoo::triangular_da(true);
        let s = to_simple(&m);
        assert!(s.is_simple());
        let p1 = s.state_id("p1").unwrap();
        let first: Vec<_> = s
            .transitions
            .iter()
            .filter(|t| t.from == s.initial && t.input == Some('c'))
            .collect();
        let chained = first.iter().find(|t| t.to != p1 && s.state_name(t.to) != "p3").unwrap();
        assert_eq!(s.tape_string(&chained.write_front), "C");
        let second = s.transitions.iter().find(|t| t.from == chained.to).unwrap();
        assert_eq!(second.input, None);
        assert_eq!(s.tape_string(&second.write_front), "D");
        assert_eq!(second.to, p1);
    }

    #[test]
    fn simple_machine_unchanged() {
        let m = zoo::palindrome_da();
        let s = to_simple(&m);
        assert_eq!(s.transitions.len(), m.transitions.len());
        assert_eq!(s.delay, m.delay);
    }

    #[test]
    fn palindrome_partition_keeps_front_stack() {
        let m = to_partitioned(&to_simple(&zoo::palindrome_da())).unwrap();
        let names: Vec<_> = m.tape.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["A_ff", "B_ff"]);
        assert_eq!(m.transitions.len(), 6);
    }

    #[test]
    fn partition_requires_simple() {
        let m = zoo::triangular_da(true);
        assert!(matches!(to_partitioned(&m), Err(NormalFormError::NotSimple(_))));
    }

    #[test]
    fn partition_without_deque_ops() {
        let mut b = Builder::new("q");
        b.trans("q", Some('a'), &[], &[], "q", &[], &[]).final_state("q");
        let m = b.build().unwrap();
        let p = to_partitioned(&m).unwrap();
        assert!(p.tape.is_empty());
        assert_eq!(p.transitions, m.transitions);
    }

    #[test]
    fn empty_test_fires_only_on_bare_marker() {
        let mut b = Builder::new("s");
        b.emptiness_test(true)
            .trans("s", Some('a'), &[], &[], "t", &["X"], &[])
            .trans("t", Some('b'), &["X"], &[], "u", &[], &[])
            .guarded("u", Guard::Empty, "v")
            .trans("v", Some('c'), &[], &[], "v", &[], &[])
            .final_state("v")
            .delay(2);
        let m = b.build().unwrap();
        let e = eliminate_emptiness_tests(&m);
        assert!(!e.has_guarded_moves());
        assert!(accepts(&e, "ab"));
        assert!(accepts(&e, "abcc"));
        assert!(!accepts(&e, "a"));
        let trace = match decide(&e, &"abc".chars().collect::<Vec<_>>(), Limits::default()).unwrap() {
            crate::run::Verdict::Accept(t) => t,
            v => panic!("{v:?}"),
        };
        let v = e.state_id("v").unwrap();
        let u = e.state_id("u").unwrap();
        let hop = trace
            .steps
            .iter()
            .position(|s| s.config.state == v)
            .unwrap();
        assert!(hop > 0);
        assert_eq!(trace.steps[hop - 1].config.state, u);
        assert_eq!(e.tape_string(&trace.steps[hop - 1].config.deque), "Z");
    }

    #[test]
    fn stateless_adds_only_epsilon() {
        for m in [zoo::palindrome_da(), zoo::triangular_da(true), zoo::concat_pal_sum_with_test()] {
            let s = to_stateless(&m);
            assert_eq!(s.states.len(), 1);
            assert!(accepts(&s, ""));
            let mut lm = bounded_language(&m, 8);
            lm.insert(String::new());
            assert_eq!(bounded_language(&s, 8), lm);
        }
        assert!(!accepts(&to_stateless(&zoo::palindrome_da()), "aabb"));
    }

    #[test]
    fn stateless_round_trips_and_test_elimination_only_adds_concatenations() {
        let s = to_stateless(&zoo::palindrome_da());
        assert_eq!(s.validate(), Ok(()));
        let back = crate::format::parse_da(&crate::format::print_da(&s)).unwrap();
        assert_eq!(bounded_language(&back, 6), bounded_language(&s, 6));
        let plain = eliminate_emptiness_tests(&s);
        assert!(!plain.has_guarded_moves());
        let (lp, ls) = (bounded_language(&plain, 8), bounded_language(&s, 8));
        let extra: Vec<_> = lp.difference(&ls).collect();
        assert!(ls.is_subset(&lp));
        assert!(extra.iter().all(|w| (1..w.len()).any(|i| ls.contains(&w[..i]) && lp.contains(&w[i..]))), "{extra:?}");
    }
}
