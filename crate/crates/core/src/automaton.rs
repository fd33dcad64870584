//! Deque automata: alphabets, transitions and the well-formedness rules.
//!
//! The deque is stored as a plain string of tape symbols. Its front is the
//! left end and its tail is the right end; a transition reads `read_front`
//! as a prefix and `read_tail` as a suffix of that string, then writes
//! `write_front` as a new prefix and `write_tail` as a new suffix.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Index of a state in [`DequeAutomaton::states`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of a tape symbol in [`DequeAutomaton::tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u16);

/// The four ways a deque item can travel: written at one end, read at one end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    /// Front stack: written and read at the front.
    FF,
    /// Front-to-tail queue.
    FT,
    /// Tail-to-front queue.
    TF,
    /// Tail stack.
    TT,
}

/// One end of the deque.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Front,
    Tail,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::FF, Class::FT, Class::TF, Class::TT];

    pub fn write_end(self) -> End {
        match self {
            Class::FF | Class::FT => End::Front,
            Class::TF | Class::TT => End::Tail,
        }
    }

    pub fn read_end(self) -> End {
        match self {
            Class::FF | Class::TF => End::Front,
            Class::FT | Class::TT => End::Tail,
        }
    }

    pub fn from_ends(write: End, read: End) -> Class {
        match (write, read) {
            (End::Front, End::Front) => Class::FF,
            (End::Front, End::Tail) => Class::FT,
            (End::Tail, End::Front) => Class::TF,
            (End::Tail, End::Tail) => Class::TT,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::FF => "ff",
            Class::FT => "ft",
            Class::TF => "tf",
            Class::TT => "tt",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ff" => Ok(Class::FF),
            "ft" => Ok(Class::FT),
            "tf" => Ok(Class::TF),
            "tt" => Ok(Class::TT),
            other => Err(format!("unknown class `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TapeSymbol {
    pub name: String,
    pub class: Option<Class>,
}

/// Extra applicability condition on a spontaneous, deque-neutral move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Guard {
    #[default]
    None,
    /// Fires only when the deque is empty.
    Empty,
    /// Fires only when the deque is not empty.
    NonEmpty,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub input: Option<char>,
    pub read_front: Vec<SymbolId>,
    pub read_tail: Vec<SymbolId>,
    pub to: StateId,
    pub write_front: Vec<SymbolId>,
    pub write_tail: Vec<SymbolId>,
    pub guard: Guard,
}

impl Transition {
    /// Number of single-symbol deque operations the move performs.
    pub fn op_count(&self) -> usize {
        self.read_front.len() + self.read_tail.len() + self.write_front.len() + self.write_tail.len()
    }

    pub fn is_spontaneous(&self) -> bool {
        self.input.is_none()
    }

    pub fn touches_front(&self) -> bool {
        !self.read_front.is_empty() || !self.write_front.is_empty()
    }

    pub fn touches_tail(&self) -> bool {
        !self.read_tail.is_empty() || !self.write_tail.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("tape symbol index {0} out of range")]
    SymbolOutOfRange(u16),
    #[error("duplicate tape symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("input letter `{0}` is not in the input alphabet")]
    LetterNotInAlphabet(char),
    #[error("delay must be at least 1")]
    ZeroDelay,
    #[error("tape alphabet is partially classed: `{0}` has no class")]
    PartialClasses(String),
    #[error("guarded move {0} must be spontaneous and must not read")]
    BadGuardedMove(usize),
    #[error("guarded move {0} requires the emptiness-test feature")]
    TestsNotEnabled(usize),
    #[error("too many tape symbols")]
    TooManySymbols,
}

/// A quasi-real-time deque automaton with acceptance by final state and empty deque.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DequeAutomaton {
    pub input_alphabet: BTreeSet<char>,
    pub tape: Vec<TapeSymbol>,
    pub states: Vec<String>,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub transitions: Vec<Transition>,
    pub delay: usize,
    pub allow_emptiness_test: bool,
}

impl DequeAutomaton {
    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        &self.tape[s.0 as usize].name
    }

    pub fn symbol_class(&self, s: SymbolId) -> Option<Class> {
        self.tape[s.0 as usize].class
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.tape
            .iter()
            .position(|s| s.name == name)
            .map(|i| SymbolId(i as u16))
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    /// True when every tape symbol carries a class tag.
    pub fn is_partitioned(&self) -> bool {
        self.tape.iter().all(|s| s.class.is_some())
    }

    /// True when every move performs at most one single-symbol deque operation.
    pub fn is_simple(&self) -> bool {
        self.transitions.iter().all(|t| t.op_count() <= 1)
    }

    pub fn has_guarded_moves(&self) -> bool {
        self.transitions.iter().any(|t| t.guard != Guard::None)
    }

    /// Renders a tape string as dot-joined symbol names, `ε` when empty.
    pub fn tape_string(&self, syms: &[SymbolId]) -> String {
        if syms.is_empty() {
            "ε".to_string()
        } else {
            syms.iter()
                .map(|s| self.symbol_name(*s))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Outgoing transition indices for every state.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.from.0].push(i);
        }
        out
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        if self.delay == 0 {
            return Err(AutomatonError::ZeroDelay);
        }
        let n = self.states.len();
        if self.initial.0 >= n {
            return Err(AutomatonError::StateOutOfRange(self.initial.0));
        }
        if let Some(f) = self.finals.iter().find(|f| f.0 >= n) {
            return Err(AutomatonError::StateOutOfRange(f.0));
        }
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s.as_str()) {
                return Err(AutomatonError::DuplicateState(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.tape {
            if !seen.insert(s.name.as_str()) {
                return Err(AutomatonError::DuplicateSymbol(s.name.clone()));
            }
        }
        if self.tape.len() > u16::MAX as usize {
            return Err(AutomatonError::TooManySymbols);
        }
        if self.tape.iter().any(|s| s.class.is_some()) {
            if let Some(s) = self.tape.iter().find(|s| s.class.is_none()) {
                return Err(AutomatonError::PartialClasses(s.name.clone()));
            }
        }
        let m = self.tape.len();
        for (i, t) in self.transitions.iter().enumerate() {
            for q in [t.from, t.to] {
                if q.0 >= n {
                    return Err(AutomatonError::StateOutOfRange(q.0));
                }
            }
            if let Some(a) = t.input {
                if !self.input_alphabet.contains(&a) {
                    return Err(AutomatonError::LetterNotInAlphabet(a));
                }
            }
            for s in t
                .read_front
                .iter()
                .chain(&t.read_tail)
                .chain(&t.write_front)
                .chain(&t.write_tail)
            {
                if s.0 as usize >= m {
                    return Err(AutomatonError::SymbolOutOfRange(s.0));
                }
            }
            if t.guard != Guard::None {
                if t.input.is_some() || !t.read_front.is_empty() || !t.read_tail.is_empty() {
                    return Err(AutomatonError::BadGuardedMove(i));
                }
                if !self.allow_emptiness_test {
                    return Err(AutomatonError::TestsNotEnabled(i));
                }
            }
        }
        Ok(())
    }
}

/// Name-based construction of automata; states, symbols and letters are
/// registered on first mention.
#[derive(Clone, Debug)]
pub struct Builder {
    input_alphabet: BTreeSet<char>,
    tape: Vec<TapeSymbol>,
    symbol_index: HashMap<String, SymbolId>,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    initial: String,
    finals: BTreeSet<String>,
    transitions: Vec<Transition>,
    delay: usize,
    allow_emptiness_test: bool,
}

impl Builder {
    pub fn new(initial: &str) -> Self {
        let mut b = Builder {
            input_alphabet: BTreeSet::new(),
            tape: Vec::new(),
            symbol_index: HashMap::new(),
            states: Vec::new(),
            state_index: HashMap::new(),
            initial: initial.to_string(),
            finals: BTreeSet::new(),
            transitions: Vec::new(),
            delay: 1,
            allow_emptiness_test: false,
        };
        b.state(initial);
        b
    }

    pub fn letters(&mut self, letters: impl IntoIterator<Item = char>) -> &mut Self {
        self.input_alphabet.extend(letters);
        self
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.state_index.get(name) {
            return id;
        }
        let id = StateId(self.states.len());
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        id
    }

    pub fn symbol(&mut self, name: &str) -> SymbolId {
        if let Some(&id) = self.symbol_index.get(name) {
            return id;
        }
        let id = SymbolId(self.tape.len() as u16);
        self.tape.push(TapeSymbol {
            name: name.to_string(),
            class: None,
        });
        self.symbol_index.insert(name.to_string(), id);
        id
    }

    pub fn classed_symbol(&mut self, name: &str, class: Class) -> SymbolId {
        let id = self.symbol(name);
        self.tape[id.0 as usize].class = Some(class);
        id
    }

    pub fn final_state(&mut self, name: &str) -> &mut Self {
        self.state(name);
        self.finals.insert(name.to_string());
        self
    }

    pub fn delay(&mut self, p: usize) -> &mut Self {
        self.delay = p;
        self
    }

    pub fn emptiness_test(&mut self, on: bool) -> &mut Self {
        self.allow_emptiness_test = on;
        self
    }

    fn syms(&mut self, names: &[&str]) -> Vec<SymbolId> {
        names.iter().map(|n| self.symbol(n)).collect()
    }

    /// Adds the move `(from, input, read_front, read_tail, to, write_front, write_tail)`.
    #[allow(clippy::too_many_arguments)]
    pub fn trans(
        &mut self,
        from: &str,
        input: Option<char>,
        read_front: &[&str],
        read_tail: &[&str],
        to: &str,
        write_front: &[&str],
        write_tail: &[&str],
    ) -> &mut Self {
        let t = Transition {
            from: self.state(from),
            input,
            read_front: self.syms(read_front),
            read_tail: self.syms(read_tail),
            to: self.state(to),
            write_front: self.syms(write_front),
            write_tail: self.syms(write_tail),
            guard: Guard::None,
        };
        if let Some(a) = input {
            self.input_alphabet.insert(a);
        }
        self.transitions.push(t);
        self
    }

    /// Adds a spontaneous move that fires only under `guard`.
    pub fn guarded(&mut self, from: &str, guard: Guard, to: &str) -> &mut Self {
        let t = Transition {
            from: self.state(from),
            input: None,
            read_front: vec![],
            read_tail: vec![],
            to: self.state(to),
            write_front: vec![],
            write_tail: vec![],
            guard,
        };
        self.transitions.push(t);
        self
    }

    pub fn build(&self) -> Result<DequeAutomaton, AutomatonError> {
        let finals = self
            .finals
            .iter()
            .map(|f| {
                self.state_index
                    .get(f)
                    .copied()
                    .ok_or_else(|| AutomatonError::UnknownState(f.clone()))
            })
            .collect::<Result<_, _>>()?;
        let m = DequeAutomaton {
            input_alphabet: self.input_alphabet.clone(),
            tape: self.tape.clone(),
            states: self.states.clone(),
            initial: self.state_index[&self.initial],
            finals,
            transitions: self.transitions.clone(),
            delay: self.delay,
            allow_emptiness_test: self.allow_emptiness_test,
        };
        m.validate()?;
        Ok(m)
    }
}
