//! Move relation and the exhaustive nondeterministic run engine.
//!
//! Runs are cut as soon as they perform `p` consecutive spontaneous moves,
//! where `p` is the automaton's declared delay. Under that cut the set of
//! configurations reachable on a fixed word is finite, so a rejection is
//! definitive.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{DequeAutomaton, Guard, StateId, SymbolId, Transition};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub position: usize,
    /// Front is index 0.
    pub deque: Vec<SymbolId>,
}

impl Configuration {
    pub fn initial(m: &DequeAutomaton) -> Self {
        Configuration {
            state: m.initial,
            position: 0,
            deque: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// Index into the automaton's transition list.
    pub transition: usize,
    pub config: Configuration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub input: Vec<char>,
    pub steps: Vec<Step>,
    pub accepted: bool,
}

impl RunTrace {
    /// Configuration after the last step, or the initial one.
    pub fn last_config(&self, m: &DequeAutomaton) -> Configuration {
        self.steps
            .last()
            .map(|s| s.config.clone())
            .unwrap_or_else(|| Configuration::initial(m))
    }

    /// Length of the longest block of consecutive spontaneous moves.
    pub fn longest_spontaneous_run(&self) -> usize {
        let mut prev = 0;
        let mut best = 0;
        let mut cur = 0;
        for s in &self.steps {
            if s.config.position == prev {
                cur += 1;
                best = best.max(cur);
            } else {
                cur = 0;
            }
            prev = s.config.position;
        }
        best
    }

    /// One line per configuration, starting with the initial one.
    pub fn render(&self, m: &DequeAutomaton) -> Vec<String> {
        let show = |c: &Configuration| {
            let rest: String = self.input[c.position..].iter().collect();
            format!(
                "({}, {}, {})",
                m.state_name(c.state),
                if rest.is_empty() { "ε".to_string() } else { rest },
                m.tape_string(&c.deque)
            )
        };
        let mut lines = vec![show(&Configuration::initial(m))];
        for s in &self.steps {
            let t = &m.transitions[s.transition];
            let a = t.input.map(String::from).unwrap_or_else(|| "ε".into());
            lines.push(format!("  --{a}--> {}", show(&s.config)));
        }
        lines
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept(RunTrace),
    Reject,
    ResourceExceeded,
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept(_))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on distinct configurations explored.
    pub max_configurations: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("input letter `{0}` is not in the input alphabet")]
    LetterNotInAlphabet(char),
    #[error("automaton does not enable emptiness tests")]
    TestsNotEnabled,
}

/// Applies `t` to `cfg`, or returns `None` when the move does not fire.
pub fn apply_move(cfg: &Configuration, t: &Transition, word: &[char]) -> Option<Configuration> {
    if t.from != cfg.state {
        return None;
    }
    let position = match t.input {
        Some(a) => {
            if word.get(cfg.position) != Some(&a) {
                return None;
            }
            cfg.position + 1
        }
        None => cfg.position,
    };
    match t.guard {
        Guard::None => {}
        Guard::Empty if !cfg.deque.is_empty() => return None,
        Guard::NonEmpty if cfg.deque.is_empty() => return None,
        _ => {}
    }
    let deque = rewrite_deque(&cfg.deque, t)?;
    Some(Configuration {
        state: t.to,
        position,
        deque,
    })
}

/// The deque part of a move: `read_front · middle · read_tail` becomes
/// `write_front · middle · write_tail`.
pub fn rewrite_deque(deque: &[SymbolId], t: &Transition) -> Option<Vec<SymbolId>> {
    let (lf, lt) = (t.read_front.len(), t.read_tail.len());
    if deque.len() < lf + lt {
        return None;
    }
    if deque[..lf] != t.read_front[..] || deque[deque.len() - lt..] != t.read_tail[..] {
        return None;
    }
    let middle = &deque[lf..deque.len() - lt];
    let mut out = Vec::with_capacity(t.write_front.len() + middle.len() + t.write_tail.len());
    out.extend_from_slice(&t.write_front);
    out.extend_from_slice(middle);
    out.extend_from_slice(&t.write_tail);
    Some(out)
}

fn check_word(m: &DequeAutomaton, w: &[char]) -> Result<(), DecideError> {
    match w.iter().find(|a| !m.input_alphabet.contains(a)) {
        Some(&a) => Err(DecideError::LetterNotInAlphabet(a)),
        None => Ok(()),
    }
}

type MemoKey = (StateId, usize, Vec<SymbolId>);

struct Search<'a> {
    m: &'a DequeAutomaton,
    word: &'a [char],
    out: Vec<Vec<usize>>,
    // Smallest spontaneous-run counter with which a configuration was explored.
    seen: HashMap<MemoKey, usize>,
    path: Vec<Step>,
    budget: Option<usize>,
    exceeded: bool,
}

impl Search<'_> {
    fn accepting(&self, c: &Configuration) -> bool {
        self.m.is_final(c.state) && c.position == self.word.len() && c.deque.is_empty()
    }

    fn dfs(&mut self, cfg: &Configuration, spont: usize) -> bool {
        if self.accepting(cfg) {
            return true;
        }
        let key = (cfg.state, cfg.position, cfg.deque.clone());
        match self.seen.get(&key) {
            Some(&s) if s <= spont => return false,
            _ => {}
        }
        self.seen.insert(key, spont);
        if let Some(b) = self.budget {
            if self.seen.len() > b {
                self.exceeded = true;
                return false;
            }
        }
        let p = self.m.delay;
        for k in 0..self.out[cfg.state.0].len() {
            let ti = self.out[cfg.state.0][k];
            let t = &self.m.transitions[ti];
            let next_spont = if t.is_spontaneous() { spont + 1 } else { 0 };
            if next_spont >= p {
                continue;
            }
            if let Some(next) = apply_move(cfg, t, self.word) {
                self.path.push(Step {
                    transition: ti,
                    config: next.clone(),
                });
                if self.dfs(&next, next_spont) {
                    return true;
                }
                self.path.pop();
                if self.exceeded {
                    return false;
                }
            }
        }
        false
    }
}

/// Decides membership of `w`, returning a witness run on acceptance.
pub fn decide(m: &DequeAutomaton, w: &[char], limits: Limits) -> Result<Verdict, DecideError> {
    check_word(m, w)?;
    let mut s = Search {
        m,
        word: w,
        out: m.outgoing(),
        seen: HashMap::new(),
        path: Vec::new(),
        budget: limits.max_configurations,
        exceeded: false,
    };
    let start = Configuration::initial(m);
    if s.dfs(&start, 0) {
        return Ok(Verdict::Accept(RunTrace {
            input: w.to_vec(),
            steps: s.path,
            accepted: true,
        }));
    }
    Ok(if s.exceeded {
        Verdict::ResourceExceeded
    } else {
        Verdict::Reject
    })
}

/// [`decide`] for automata that use guarded emptiness tests.
pub fn decide_with_emptiness_test(
    m: &DequeAutomaton,
    w: &[char],
    limits: Limits,
) -> Result<Verdict, DecideError> {
    if !m.allow_emptiness_test {
        return Err(DecideError::TestsNotEnabled);
    }
    decide(m, w, limits)
}

/// Convenience wrapper: accepts iff [`decide`] finds an accepting run.
pub fn accepts(m: &DequeAutomaton, w: &str) -> bool {
    let w: Vec<char> = w.chars().collect();
    matches!(decide(m, &w, Limits::default()), Ok(Verdict::Accept(_)))
}

// Configurations after a prefix, without the input position, keyed to the
// smallest spontaneous-run counter that reaches them.
type Frontier = HashMap<(StateId, Vec<SymbolId>), usize>;

fn closure(m: &DequeAutomaton, out: &[Vec<usize>], start: Frontier) -> Frontier {
    let mut best = start;
    let mut queue: VecDeque<((StateId, Vec<SymbolId>), usize)> =
        best.iter().map(|(k, v)| (k.clone(), *v)).collect();
    // Counters only grow along spontaneous edges, so BFS order finds minima first
    // among configurations discovered from the same layer; re-queue on improvement.
    while let Some(((q, deque), c)) = queue.pop_front() {
        if best.get(&(q, deque.clone())).is_some_and(|&b| b < c) {
            continue;
        }
        if c + 1 >= m.delay {
            continue;
        }
        for &ti in &out[q.0] {
            let t = &m.transitions[ti];
            if !t.is_spontaneous() {
                continue;
            }
            let cfg = Configuration {
                state: q,
                position: 0,
                deque: deque.clone(),
            };
            if let Some(n) = apply_move(&cfg, t, &[]) {
                let key = (n.state, n.deque);
                if best.get(&key).is_none_or(|&b| c + 1 < b) {
                    best.insert(key.clone(), c + 1);
                    queue.push_back((key, c + 1));
                }
            }
        }
    }
    best
}

fn frontier_accepts(m: &DequeAutomaton, f: &Frontier) -> bool {
    f.keys().any(|(q, d)| m.is_final(*q) && d.is_empty())
}

/// The accepted words of length at most `n`, computed by a prefix-tree
/// exploration that carries the full set of reachable configurations.
pub fn bounded_language(m: &DequeAutomaton, n: usize) -> BTreeSet<String> {
    let out = m.outgoing();
    let letters: Vec<char> = m.input_alphabet.iter().copied().collect();
    let mut accepted = BTreeSet::new();
    let mut start = Frontier::new();
    start.insert((m.initial, Vec::new()), 0);
    let mut stack = vec![(String::new(), closure(m, &out, start))];
    while let Some((prefix, frontier)) = stack.pop() {
        if frontier_accepts(m, &frontier) {
            accepted.insert(prefix.clone());
        }
        if prefix.chars().count() == n {
            continue;
        }
        for &a in &letters {
            let mut next = Frontier::new();
            let word = [a];
            for (q, deque) in frontier.keys() {
                let cfg = Configuration {
                    state: *q,
                    position: 0,
                    deque: deque.clone(),
                };
                for &ti in &out[q.0] {
                    let t = &m.transitions[ti];
                    if t.input != Some(a) {
                        continue;
                    }
                    if let Some(c) = apply_move(&cfg, t, &word) {
                        next.insert((c.state, c.deque), 0);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            let mut p = prefix.clone();
            p.push(a);
            stack.push((p, closure(m, &out, next)));
        }
    }
    accepted
}

/// All words over the automaton's input alphabet of length at most `n`, in
/// length-lexicographic order.
pub fn all_words(alphabet: &BTreeSet<char>, n: usize) -> Vec<String> {
    let letters: Vec<char> = alphabet.iter().copied().collect();
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for &a in &letters {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
