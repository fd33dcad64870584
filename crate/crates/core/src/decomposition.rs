//! Dyck and AntiDyck recognizers and the row decomposition of DQ_k into a
//! shuffle of two stack languages intersected with a queue constraint.

use std::collections::VecDeque;

use thiserror::Error;

use crate::automaton::Class;
use crate::cdl::{CharLetter, CharWord, Polarity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("letter `{letter}` at position {position} is outside the {language} alphabet")]
pub struct AlphabetViolation {
    pub letter: CharLetter,
    pub position: usize,
    pub language: &'static str,
}

fn violation(letters: &[CharLetter], ok: impl Fn(CharLetter) -> bool, language: &'static str) -> Result<(), AlphabetViolation> {
    match letters.iter().position(|&l| !ok(l)) {
        Some(i) => Err(AlphabetViolation {
            letter: letters[i],
            position: i + 1,
            language,
        }),
        None => Ok(()),
    }
}

fn class_name(class: Class) -> &'static str {
    match class {
        Class::FF => "Dyck_ff",
        Class::TT => "Dyck_tt",
        Class::FT => "Adyck_ft",
        Class::TF => "Adyck_tf",
    }
}

/// LIFO matching over a single stack class.
pub fn member_dyck(letters: &[CharLetter], class: Class) -> Result<bool, AlphabetViolation> {
    violation(letters, |l| l.class == class, class_name(class))?;
    let mut stack = Vec::new();
    for l in letters {
        match l.polarity {
            Polarity::Open => stack.push(l.index),
            Polarity::Close => {
                if stack.pop() != Some(l.index) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(stack.is_empty())
}

/// FIFO matching over a single queue class.
pub fn member_anti_dyck(letters: &[CharLetter], class: Class) -> Result<bool, AlphabetViolation> {
    violation(letters, |l| l.class == class, class_name(class))?;
    Ok(fifo(letters))
}

fn fifo(letters: &[CharLetter]) -> bool {
    let mut queue = VecDeque::new();
    for l in letters {
        match l.polarity {
            Polarity::Open => queue.push_back(l.index),
            Polarity::Close => {
                if queue.pop_front() != Some(l.index) {
                    return false;
                }
            }
        }
    }
    queue.is_empty()
}

/// Letters of the front row: ff, ft-opens and tf-closes.
pub fn in_front_row(l: CharLetter) -> bool {
    match l.class {
        Class::FF => true,
        Class::TT => false,
        Class::FT => l.polarity == Polarity::Open,
        Class::TF => l.polarity == Polarity::Close,
    }
}

/// Stack words of `class` interleaved with other row letters that occur
/// only while the stack is empty.
fn row_member(letters: &[CharLetter], class: Class) -> bool {
    let mut stack = Vec::new();
    for l in letters {
        if l.class != class {
            if !stack.is_empty() {
                return false;
            }
            continue;
        }
        match l.polarity {
            Polarity::Open => stack.push(l.index),
            Polarity::Close => {
                if stack.pop() != Some(l.index) {
                    return false;
                }
            }
        }
    }
    stack.is_empty()
}

pub fn member_h1(letters: &[CharLetter]) -> Result<bool, AlphabetViolation> {
    violation(letters, in_front_row, "H1")?;
    Ok(row_member(letters, Class::FF))
}

pub fn member_h2(letters: &[CharLetter]) -> Result<bool, AlphabetViolation> {
    violation(letters, |l| !in_front_row(l), "H2")?;
    Ok(row_member(letters, Class::TT))
}

/// The queue residue (ff and tt letters erased) must split into blocks, each
/// a FIFO-balanced word of one queue class.
///
/// Blocks cannot straddle a class change and FIFO-balanced words are closed
/// under concatenation, so splitting at every class change is exact.
pub fn member_h3(letters: &[CharLetter]) -> bool {
    let residue: Vec<CharLetter> = letters
        .iter()
        .copied()
        .filter(|l| matches!(l.class, Class::FT | Class::TF))
        .collect();
    residue
        .chunk_by(|a, b| a.class == b.class)
        .all(fifo)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowProjection {
    pub front_row: CharWord,
    pub tail_row: CharWord,
    pub queue_word: CharWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub projection: RowProjection,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
}

impl DecompositionReport {
    pub fn member(&self) -> bool {
        self.h1 && self.h2 && self.h3
    }
}

pub fn project(w: &CharWord) -> RowProjection {
    let part = |f: &dyn Fn(CharLetter) -> bool| CharWord {
        letters: w.letters.iter().copied().filter(|&l| f(l)).collect(),
        k: w.k,
    };
    RowProjection {
        front_row: part(&in_front_row),
        tail_row: part(&|l| !in_front_row(l)),
        queue_word: part(&|l| matches!(l.class, Class::FT | Class::TF)),
    }
}

pub fn decompose(w: &CharWord) -> DecompositionReport {
    let projection = project(w);
    DecompositionReport {
        h1: row_member(&projection.front_row.letters, Class::FF),
        h2: row_member(&projection.tail_row.letters, Class::TT),
        h3: member_h3(&projection.queue_word.letters),
        projection,
    }
}

/// Membership in DQ_k through the decomposition.
pub fn decomposition_member(letters: &[CharLetter]) -> bool {
    let front: Vec<_> = letters.iter().copied().filter(|&l| in_front_row(l)).collect();
    let tail: Vec<_> = letters.iter().copied().filter(|&l| !in_front_row(l)).collect();
    row_member(&front, Class::FF) && row_member(&tail, Class::TT) && member_h3(letters)
}
