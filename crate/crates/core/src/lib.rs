//! Quasi-real-time deque automata and the characteristic deque languages.
//!
//! The deque is stored as a string whose left end is the *front* and whose
//! right end is the *tail*.

pub mod automaton;
pub mod cancellation;
pub mod cdl;
pub mod characterization;
pub mod crosscheck;
pub mod decomposition;
pub mod fa;
pub mod format;
pub mod graphs;
pub mod normal_forms;
pub mod run;
pub mod zoo;

pub use automaton::{Builder, Class, DequeAutomaton, End, Guard, StateId, SymbolId, TapeSymbol, Transition};
pub use cdl::{CharLetter, CharWord, Polarity};
pub use run::{accepts, decide, Configuration, Limits, RunTrace, Verdict};
