//! Example machines and closure constructions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::automaton::{Builder, DequeAutomaton, Guard, StateId, SymbolId, TapeSymbol, Transition};
use crate::fa::{Nfa, RegexError};
use crate::normal_forms::{eliminate_emptiness_tests, fresh};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZooError {
    #[error("invalid replication schema: {0}")]
    InvalidSchema(#[from] RegexError),
    #[error("homomorphism erases `{0}`")]
    EmptyImage(char),
    #[error("homomorphism has no image for `{0}`")]
    Unmapped(char),
}

fn built(b: &Builder) -> DequeAutomaton {
    b.build().expect("zoo machine is well formed")
}

/// Even palindromes of positive length over {a, b}: push at the front,
/// guess the middle, pop from the front.
pub fn palindrome_da() -> DequeAutomaton {
    let mut b = Builder::new("q0");
    b.letters(['a', 'b'])
        .trans("q0", Some('a'), &[], &[], "q0", &["A"], &[])
        .trans("q0", Some('b'), &[], &[], "q0", &["B"], &[])
        .trans("q0", Some('a'), &["A"], &[], "q1", &[], &[])
        .trans("q0", Some('b'), &["B"], &[], "q1", &[], &[])
        .trans("q1", Some('a'), &["A"], &[], "q1", &[], &[])
        .trans("q1", Some('b'), &["B"], &[], "q1", &[], &[])
        .final_state("q1");
    built(&b)
}

/// Words `c^m` with `m` triangular.
///
/// Each block of the count is stored as a run of `C`s closed by a `D` at
/// the front and replayed from the tail. The printed variant consumes the
/// closing `D` spontaneously, which also admits lengths 2, 5, 9, …; the
/// corrected one reads a `c` with it.
pub fn triangular_da(corrected: bool) -> DequeAutomaton {
    let mut b = Builder::new("p0");
    b.letters(['c'])
        .trans("p0", Some('c'), &[], &[], "p1", &["D", "C"], &[])
        .trans("p0", Some('c'), &[], &[], "p3", &[], &[])
        .trans("p1", Some('c'), &[], &["C"], "p2", &["C"], &[])
        .trans("p1", Some('c'), &[], &["C"], "p3", &[], &[])
        .trans("p2", Some('c'), &[], &["D"], "p1", &["D", "C"], &[])
        .trans("p2", Some('c'), &[], &["C"], "p2", &["C"], &[])
        .trans("p3", Some('c'), &[], &["C"], "p3", &[], &[]);
    if corrected {
        b.trans("p3", Some('c'), &[], &["D"], "p3", &[], &[]).delay(1);
    } else {
        b.trans("p3", None, &[], &["D"], "p3", &[], &[]).delay(2);
    }
    b.final_state("p3");
    built(&b)
}

/// Palindrome machine followed by the corrected triangular machine, joined
/// by an emptiness test (still present).
pub fn concat_pal_sum_with_test() -> DequeAutomaton {
    concat_with_test(&palindrome_da(), &triangular_da(true))
}

pub fn concat_pal_sum_da() -> DequeAutomaton {
    eliminate_emptiness_tests(&concat_pal_sum_with_test())
}

/// `{u x u | u ∈ {a,b}⁺, x an even palindrome of positive length}`.
///
/// The border is queued at the tail, the palindrome uses the front as a
/// stack, and the border is finally read back from the front.
pub fn bordered_da() -> DequeAutomaton {
    let mut b = Builder::new("s0");
    b.letters(['a', 'b']);
    for (x, u, p) in [('a', "Ua", "A"), ('b', "Ub", "B")] {
        b.trans("s0", Some(x), &[], &[], "s", &[], &[u])
            .trans("s", Some(x), &[], &[], "s", &[], &[u])
            .trans("s", Some(x), &[], &[], "q0", &[p], &[])
            .trans("q0", Some(x), &[], &[], "q0", &[p], &[])
            .trans("q0", Some(x), &[p], &[], "q1", &[], &[])
            .trans("q1", Some(x), &[p], &[], "q1", &[], &[])
            .trans("q1", Some(x), &[u], &[], "r", &[], &[])
            .trans("r", Some(x), &[u], &[], "r", &[], &[]);
    }
    b.final_state("r");
    built(&b)
}

/// `{u (D u ∪ R uᴿ)⁺ | u ∈ {a,b}⁺}` over {a, b, D, R}.
///
/// `u` is stored at the tail end. A `D` keeps the orientation and compares
/// from the front, an `R` rotates the marker so the next copy is compared
/// from the tail. Each comparison re-stores the letters at the opposite end
/// for the next copy; the primed states compare without re-storing and
/// finish by removing the marker.
pub fn replica_da() -> DequeAutomaton {
    let mut b = Builder::new("qs");
    b.letters(['a', 'b', 'D', 'R']);
    for (x, s) in [('a', "a"), ('b', "b")] {
        b.trans("qs", Some(x), &[], &[], "q0", &[], &[s])
            .trans("q0", Some(x), &[], &[], "q0", &[], &[s])
            .trans("qF", Some(x), &[s], &[], "qF", &[], &[s])
            .trans("qT", Some(x), &[], &[s], "qT", &[s], &[])
            .trans("qF'", Some(x), &[s], &[], "qF'", &[], &[])
            .trans("qT'", Some(x), &[], &[s], "qT'", &[], &[]);
    }
    for to in ["qF", "qF'"] {
        b.trans("q0", Some('D'), &[], &[], to, &[], &["Z"])
            .trans("qF", Some('D'), &["Z"], &[], to, &[], &["Z"])
            .trans("qT", Some('D'), &[], &["Z"], to, &[], &["Z"]);
    }
    for to in ["qT", "qT'"] {
        b.trans("q0", Some('R'), &[], &[], to, &["Z"], &[])
            .trans("qF", Some('R'), &["Z"], &[], to, &["Z"], &[])
            .trans("qT", Some('R'), &[], &["Z"], to, &["Z"], &[]);
    }
    b.trans("qF'", None, &["Z"], &[], "qfin", &[], &[])
        .trans("qT'", None, &["Z"], &[], "qfin", &[], &[])
        .final_state("qfin")
        .delay(2);
    built(&b)
}

/// A replication schema: a regular set over {D, R}.
#[derive(Clone, Debug)]
pub struct ReplicaSchema {
    pub pattern: String,
    pub nfa: Nfa,
}

impl ReplicaSchema {
    pub fn parse(pattern: &str) -> Result<Self, ZooError> {
        let letters = BTreeSet::from(['D', 'R']);
        Ok(ReplicaSchema {
            pattern: pattern.to_string(),
            nfa: Nfa::from_regex(pattern, Some(&letters))?,
        })
    }
}

/// `{u · ρ_u(π) | u ∈ {a,b}⁺, π ∈ Π, π ≠ ε}` where `ρ_u(D) = u` and
/// `ρ_u(R) = uᴿ`: the replica machine restricted to `Π ⧢ Σ⁺`, with the
/// marker-reading moves made spontaneous.
pub fn replica_language_da(schema: &ReplicaSchema) -> DequeAutomaton {
    let sigma = BTreeSet::from(['a', 'b']);
    let filter = schema.nfa.shuffle_with_plus(&sigma);
    let mut m = intersect_regular(&replica_da(), &filter);
    for t in &mut m.transitions {
        if matches!(t.input, Some('D' | 'R')) {
            t.input = None;
        }
    }
    m.input_alphabet = sigma;
    m.delay += 1;
    m
}

/// Copies `m` into `out`, renaming clashing state and symbol names by
/// priming them. Returns the state and symbol translations.
fn embed(out: &mut DequeAutomaton, m: &DequeAutomaton) -> (Vec<StateId>, Vec<SymbolId>) {
    let mut state_names: HashSet<String> = out.states.iter().cloned().collect();
    let states: Vec<StateId> = m
        .states
        .iter()
        .map(|q| {
            out.states.push(fresh(&mut state_names, q));
            StateId(out.states.len() - 1)
        })
        .collect();
    let mut sym_names: HashSet<String> = out.tape.iter().map(|s| s.name.clone()).collect();
    let symbols: Vec<SymbolId> = m
        .tape
        .iter()
        .map(|s| {
            out.tape.push(TapeSymbol {
                name: fresh(&mut sym_names, &s.name),
                class: s.class,
            });
            SymbolId((out.tape.len() - 1) as u16)
        })
        .collect();
    for t in &m.transitions {
        let map = |v: &[SymbolId]| v.iter().map(|s| symbols[s.0 as usize]).collect();
        out.transitions.push(Transition {
            from: states[t.from.0],
            input: t.input,
            read_front: map(&t.read_front),
            read_tail: map(&t.read_tail),
            to: states[t.to.0],
            write_front: map(&t.write_front),
            write_tail: map(&t.write_tail),
            guard: t.guard,
        });
    }
    out.input_alphabet.extend(&m.input_alphabet);
    out.allow_emptiness_test |= m.allow_emptiness_test;
    (states, symbols)
}

fn empty_machine() -> DequeAutomaton {
    DequeAutomaton {
        input_alphabet: BTreeSet::new(),
        tape: vec![],
        states: vec![],
        initial: StateId(0),
        finals: BTreeSet::new(),
        transitions: vec![],
        delay: 1,
        allow_emptiness_test: false,
    }
}

/// Drops class tags unless every symbol has one.
fn normalize_classes(m: &mut DequeAutomaton) {
    if !m.is_partitioned() {
        for s in &mut m.tape {
            s.class = None;
        }
    }
}

fn add_state(m: &mut DequeAutomaton, base: &str) -> StateId {
    let mut taken: HashSet<String> = m.states.iter().cloned().collect();
    m.states.push(fresh(&mut taken, base));
    StateId(m.states.len() - 1)
}

fn guarded(from: StateId, guard: Guard, to: StateId) -> Transition {
    Transition {
        from,
        input: None,
        read_front: vec![],
        read_tail: vec![],
        to,
        write_front: vec![],
        write_tail: vec![],
        guard,
    }
}

/// Copies of the moves leaving `q`, re-rooted at `start`.
fn reroot(m: &DequeAutomaton, q: StateId, start: StateId) -> Vec<Transition> {
    m.transitions
        .iter()
        .filter(|t| t.from == q)
        .map(|t| Transition {
            from: start,
            ..t.clone()
        })
        .collect()
}

pub fn union(m1: &DequeAutomaton, m2: &DequeAutomaton) -> DequeAutomaton {
    let mut out = empty_machine();
    let start = add_state(&mut out, "u0");
    let (s1, _) = embed(&mut out, m1);
    let (s2, _) = embed(&mut out, m2);
    let i1 = s1[m1.initial.0];
    let i2 = s2[m2.initial.0];
    let mut extra = reroot(&out, i1, start);
    extra.extend(reroot(&out, i2, start));
    out.transitions.extend(extra);
    out.initial = start;
    out.finals = m1
        .finals
        .iter()
        .map(|f| s1[f.0])
        .chain(m2.finals.iter().map(|f| s2[f.0]))
        .collect();
    if m1.is_final(m1.initial) || m2.is_final(m2.initial) {
        out.finals.insert(start);
    }
    out.delay = m1.delay.max(m2.delay);
    normalize_classes(&mut out);
    out
}

/// Concatenation handing over to `m2` only when `m1` has emptied the deque.
pub fn concat_with_test(m1: &DequeAutomaton, m2: &DequeAutomaton) -> DequeAutomaton {
    let mut out = empty_machine();
    let (s1, _) = embed(&mut out, m1);
    let (s2, _) = embed(&mut out, m2);
    out.initial = s1[m1.initial.0];
    for f in &m1.finals {
        out.transitions.push(guarded(s1[f.0], Guard::Empty, s2[m2.initial.0]));
    }
    out.finals = m2.finals.iter().map(|f| s2[f.0]).collect();
    out.delay = m1.delay + m2.delay;
    out.allow_emptiness_test = true;
    normalize_classes(&mut out);
    out
}

pub fn concat(m1: &DequeAutomaton, m2: &DequeAutomaton) -> DequeAutomaton {
    eliminate_emptiness_tests(&concat_with_test(m1, m2))
}

/// Kleene star: a fresh accepting start state, and an emptiness-tested
/// return to it from every final state.
pub fn star_with_test(m: &DequeAutomaton) -> DequeAutomaton {
    let mut out = empty_machine();
    let start = add_state(&mut out, "k0");
    let (s, _) = embed(&mut out, m);
    let extra = reroot(&out, s[m.initial.0], start);
    out.transitions.extend(extra);
    for f in &m.finals {
        out.transitions.push(guarded(s[f.0], Guard::Empty, start));
    }
    out.initial = start;
    out.finals = m.finals.iter().map(|f| s[f.0]).collect();
    out.finals.insert(start);
    out.delay = 2 * m.delay;
    out.allow_emptiness_test = true;
    normalize_classes(&mut out);
    out
}

pub fn star(m: &DequeAutomaton) -> DequeAutomaton {
    eliminate_emptiness_tests(&star_with_test(m))
}

/// Product with a finite automaton; only reachable pairs are kept.
pub fn intersect_regular(m: &DequeAutomaton, a: &Nfa) -> DequeAutomaton {
    let mut out = m.clone();
    out.states.clear();
    out.transitions.clear();
    out.finals.clear();
    let outgoing = m.outgoing();
    let mut index: HashMap<(StateId, usize), StateId> = HashMap::new();
    let mut queue = vec![(m.initial, a.initial)];
    out.initial = product_state(&mut out, &mut index, m, m.initial, a.initial).0;
    while let Some((q, r)) = queue.pop() {
        let from = index[&(q, r)];
        if m.is_final(q) && a.finals.contains(&r) {
            out.finals.insert(from);
        }
        for &ti in &outgoing[q.0] {
            let t = &m.transitions[ti];
            let targets: Vec<usize> = match t.input {
                None => vec![r],
                Some(c) => a.successors(r, c).collect(),
            };
            for r2 in targets {
                let (to, new) = product_state(&mut out, &mut index, m, t.to, r2);
                if new {
                    queue.push((t.to, r2));
                }
                out.transitions.push(Transition {
                    from,
                    to,
                    ..t.clone()
                });
            }
        }
    }
    out
}

fn product_state(
    out: &mut DequeAutomaton,
    index: &mut HashMap<(StateId, usize), StateId>,
    m: &DequeAutomaton,
    q: StateId,
    r: usize,
) -> (StateId, bool) {
    if let Some(&id) = index.get(&(q, r)) {
        return (id, false);
    }
    out.states.push(format!("{}|{}", m.state_name(q), r));
    let id = StateId(out.states.len() - 1);
    index.insert((q, r), id);
    (id, true)
}

fn check_images(m: &DequeAutomaton, h: &BTreeMap<char, String>) -> Result<(), ZooError> {
    for &a in &m.input_alphabet {
        match h.get(&a) {
            None => return Err(ZooError::Unmapped(a)),
            Some(w) if w.is_empty() => return Err(ZooError::EmptyImage(a)),
            Some(_) => {}
        }
    }
    Ok(())
}

/// Replaces every letter `a` by the word `h(a)`, spelling it out through
/// fresh intermediate states.
pub fn non_erasing_hom(m: &DequeAutomaton, h: &BTreeMap<char, String>) -> Result<DequeAutomaton, ZooError> {
    check_images(m, h)?;
    let mut out = m.clone();
    out.transitions.clear();
    out.input_alphabet = m
        .input_alphabet
        .iter()
        .flat_map(|a| h[a].chars())
        .collect();
    let mut taken: HashSet<String> = m.states.iter().cloned().collect();
    for (ti, t) in m.transitions.iter().enumerate() {
        let Some(a) = t.input else {
            out.transitions.push(t.clone());
            continue;
        };
        let word: Vec<char> = h[&a].chars().collect();
        let mut from = t.from;
        for (j, &c) in word.iter().enumerate() {
            if j == 0 {
                let to = if word.len() == 1 {
                    t.to
                } else {
                    out.states
                        .push(fresh(&mut taken, &format!("{}~h{}.1", m.state_name(t.from), ti)));
                    StateId(out.states.len() - 1)
                };
                out.transitions.push(Transition {
                    input: Some(c),
                    to,
                    ..t.clone()
                });
                from = to;
            } else {
                let to = if j + 1 == word.len() {
                    t.to
                } else {
                    out.states.push(fresh(
                        &mut taken,
                        &format!("{}~h{}.{}", m.state_name(t.from), ti, j + 1),
                    ));
                    StateId(out.states.len() - 1)
                };
                out.transitions.push(Transition {
                    from,
                    input: Some(c),
                    read_front: vec![],
                    read_tail: vec![],
                    to,
                    write_front: vec![],
                    write_tail: vec![],
                    guard: Guard::None,
                });
                from = to;
            }
        }
    }
    Ok(out)
}

/// `g⁻¹(L(M))`: reading a letter `a` loads `g(a)` into the finite control,
/// which is then fed to the simulated machine by spontaneous moves.
pub fn inverse_hom(m: &DequeAutomaton, g: &BTreeMap<char, String>) -> DequeAutomaton {
    let images: BTreeMap<char, Vec<char>> = g.iter().map(|(&a, w)| (a, w.chars().collect())).collect();
    let mut out = m.clone();
    out.transitions.clear();
    out.input_alphabet = images.keys().copied().collect();
    let mut taken: HashSet<String> = m.states.iter().cloned().collect();

    // Buffer state (q, a, i): the simulated machine is in q and still has to
    // read images[a][i..].
    let mut buffer: HashMap<(StateId, char, usize), StateId> = HashMap::new();
    for q in 0..m.states.len() {
        for (&a, w) in &images {
            for i in 0..w.len() {
                let name = fresh(&mut taken, &format!("{}[{}:{}]", m.states[q], a, i));
                out.states.push(name);
                buffer.insert((StateId(q), a, i), StateId(out.states.len() - 1));
            }
        }
    }
    let at = |q: StateId, a: char, i: usize| -> StateId {
        if i == images[&a].len() {
            q
        } else {
            buffer[&(q, a, i)]
        }
    };
    for q in 0..m.states.len() {
        let q = StateId(q);
        for &a in images.keys() {
            out.transitions.push(Transition {
                from: q,
                input: Some(a),
                read_front: vec![],
                read_tail: vec![],
                to: at(q, a, 0),
                write_front: vec![],
                write_tail: vec![],
                guard: Guard::None,
            });
        }
    }
    for t in &m.transitions {
        match t.input {
            None => {
                out.transitions.push(Transition {
                    input: None,
                    ..t.clone()
                });
                for (&a, w) in &images {
                    for i in 0..w.len() {
                        out.transitions.push(Transition {
                            from: buffer[&(t.from, a, i)],
                            to: buffer[&(t.to, a, i)],
                            ..t.clone()
                        });
                    }
                }
            }
            Some(c) => {
                for (&a, w) in &images {
                    for (i, &x) in w.iter().enumerate() {
                        if x == c {
                            out.transitions.push(Transition {
                                from: buffer[&(t.from, a, i)],
                                input: None,
                                to: at(t.to, a, i + 1),
                                ..t.clone()
                            });
                        }
                    }
                }
            }
        }
    }
    let longest = images.values().map(Vec::len).max().unwrap_or(0);
    out.delay = (longest + 1) * m.delay;
    out
}

/// Machine with a single non-deque loop, accepting `a*`.
pub fn a_star_da() -> DequeAutomaton {
    let mut b = Builder::new("q0");
    b.letters(['a'])
        .trans("q0", Some('a'), &[], &[], "q0", &[], &[])
        .final_state("q0");
    built(&b)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 8] = [
    "palindrome",
    "triangular",
    "concat-pal-sum",
    "concat-pal-sum-test",
    "bordered",
    "replica",
    "replica-language",
    "a-star",
];

/// Looks up a zoo machine; `corrected` only affects `triangular`, `schema`
/// only `replica-language` (default `D(D|R)*`).
pub fn by_name(name: &str, corrected: bool, schema: Option<&str>) -> Option<Result<DequeAutomaton, ZooError>> {
    Some(Ok(match name {
        "palindrome" => palindrome_da(),
        "triangular" => triangular_da(corrected),
        "concat-pal-sum" => concat_pal_sum_da(),
        "concat-pal-sum-test" => concat_pal_sum_with_test(),
        "bordered" => bordered_da(),
        "replica" => replica_da(),
        "replica-language" => {
            return Some(ReplicaSchema::parse(schema.unwrap_or("D(D|R)*")).map(|s| replica_language_da(&s)))
        }
        "a-star" => a_star_da(),
        _ => return None,
    }))
}
