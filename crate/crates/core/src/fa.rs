//! Small nondeterministic finite automata over `char`, built from a
//! restricted regular-expression syntax: letters, `|`, `*`, `+`, `?`,
//! parentheses and `ε`. Whitespace is ignored.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegexError {
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("unbalanced parenthesis")]
    Unbalanced,
    #[error("letter `{0}` is not allowed here")]
    ForeignLetter(char),
}

/// ε-free NFA with a single initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub edges: Vec<(usize, char, usize)>,
}

#[derive(Default)]
struct Thompson {
    states: usize,
    eps: Vec<(usize, usize)>,
    edges: Vec<(usize, char, usize)>,
}

#[derive(Clone)]
enum Ast {
    Empty,
    Letter(char),
    Cat(Box<Ast>, Box<Ast>),
    Alt(Box<Ast>, Box<Ast>),
    Star(Box<Ast>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    letters: Option<&'a BTreeSet<char>>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn alt(&mut self) -> Result<Ast, RegexError> {
        let mut left = self.cat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let right = self.cat()?;
            left = Ast::Alt(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn cat(&mut self) -> Result<Ast, RegexError> {
        let mut acc = Ast::Empty;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let item = self.postfix()?;
            acc = match acc {
                Ast::Empty => item,
                a => Ast::Cat(Box::new(a), Box::new(item)),
            };
        }
        Ok(acc)
    }

    fn postfix(&mut self) -> Result<Ast, RegexError> {
        let mut a = self.atom()?;
        while let Some(c) = self.peek() {
            a = match c {
                '*' => Ast::Star(Box::new(a)),
                '+' => Ast::Cat(Box::new(a.clone()), Box::new(Ast::Star(Box::new(a)))),
                '?' => Ast::Alt(Box::new(a), Box::new(Ast::Empty)),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Ast, RegexError> {
        let Some(&(offset, c)) = self.chars.get(self.pos) else {
            return Err(RegexError::Unbalanced);
        };
        self.pos += 1;
        match c {
            '(' => {
                let inner = self.alt()?;
                if self.peek() != Some(')') {
                    return Err(RegexError::Unbalanced);
                }
                self.pos += 1;
                Ok(inner)
            }
            'ε' => Ok(Ast::Empty),
            c if c.is_alphanumeric() => {
                if let Some(allowed) = self.letters {
                    if !allowed.contains(&c) {
                        return Err(RegexError::ForeignLetter(c));
                    }
                }
                Ok(Ast::Letter(c))
            }
            found => Err(RegexError::Unexpected { found, offset }),
        }
    }
}

impl Thompson {
    fn node(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn build(&mut self, a: &Ast) -> (usize, usize) {
        match a {
            Ast::Empty => {
                let s = self.node();
                (s, s)
            }
            Ast::Letter(c) => {
                let (s, t) = (self.node(), self.node());
                self.edges.push((s, *c, t));
                (s, t)
            }
            Ast::Cat(x, y) => {
                let (s1, t1) = self.build(x);
                let (s2, t2) = self.build(y);
                self.eps.push((t1, s2));
                (s1, t2)
            }
            Ast::Alt(x, y) => {
                let s = self.node();
                let (s1, t1) = self.build(x);
                let (s2, t2) = self.build(y);
                let t = self.node();
                self.eps.extend([(s, s1), (s, s2), (t1, t), (t2, t)]);
                (s, t)
            }
            Ast::Star(x) => {
                let s = self.node();
                let (s1, t1) = self.build(x);
                self.eps.extend([(s, s1), (t1, s)]);
                (s, s)
            }
        }
    }

    fn closure(&self, q: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(x) = stack.pop() {
            for &(a, b) in &self.eps {
                if a == x && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }
}

impl Nfa {
    /// Parses `pattern`; when `letters` is given every letter must belong to it.
    pub fn from_regex(pattern: &str, letters: Option<&BTreeSet<char>>) -> Result<Nfa, RegexError> {
        let mut p = Parser {
            chars: pattern
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            letters,
        };
        let ast = p.alt()?;
        if let Some(&(offset, found)) = p.chars.get(p.pos) {
            return Err(if found == ')' {
                RegexError::Unbalanced
            } else {
                RegexError::Unexpected { found, offset }
            });
        }
        let mut t = Thompson::default();
        let (start, accept) = t.build(&ast);

        let closures: Vec<_> = (0..t.states).map(|q| t.closure(q)).collect();
        let mut edges = BTreeSet::new();
        let mut finals = BTreeSet::new();
        for q in 0..t.states {
            for &r in &closures[q] {
                if r == accept {
                    finals.insert(q);
                }
                for &(a, c, b) in &t.edges {
                    if a == r {
                        edges.insert((q, c, b));
                    }
                }
            }
        }
        Ok(Nfa {
            states: t.states,
            initial: start,
            finals,
            edges: edges.into_iter().collect(),
        }
        .trim())
    }

    /// Removes states unreachable from the initial state and renumbers.
    fn trim(self) -> Nfa {
        let mut reach = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for &(a, _, b) in &self.edges {
                if a == q && reach.insert(b) {
                    stack.push(b);
                }
            }
        }
        let index: BTreeMap<usize, usize> = reach.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        Nfa {
            states: index.len(),
            initial: index[&self.initial],
            finals: self.finals.iter().filter_map(|q| index.get(q).copied()).collect(),
            edges: self
                .edges
                .iter()
                .filter(|(a, _, _)| index.contains_key(a))
                .map(|&(a, c, b)| (index[&a], c, index[&b]))
                .collect(),
        }
    }

    pub fn successors(&self, q: usize, c: char) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |&&(a, x, _)| a == q && x == c)
            .map(|&(_, _, b)| b)
    }

    pub fn accepts(&self, w: &str) -> bool {
        let mut cur = BTreeSet::from([self.initial]);
        for c in w.chars() {
            cur = cur.iter().flat_map(|&q| self.successors(q, c)).collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    pub fn letters(&self) -> BTreeSet<char> {
        self.edges.iter().map(|&(_, c, _)| c).collect()
    }

    /// Shuffle with `Σ⁺`: any interleaving of a word of this language with a
    /// nonempty word over `sigma`.
    pub fn shuffle_with_plus(&self, sigma: &BTreeSet<char>) -> Nfa {
        // State (q, seen) with seen ∈ {0, 1}.
        let id = |q: usize, seen: usize| 2 * q + seen;
        let mut edges = Vec::new();
        for &(a, c, b) in &self.edges {
            for seen in 0..2 {
                edges.push((id(a, seen), c, id(b, seen)));
            }
        }
        for q in 0..self.states {
            for &c in sigma {
                edges.push((id(q, 0), c, id(q, 1)));
                edges.push((id(q, 1), c, id(q, 1)));
            }
        }
        Nfa {
            states: 2 * self.states,
            initial: id(self.initial, 0),
            finals: self.finals.iter().map(|&q| id(q, 1)).collect(),
            edges,
        }
        .trim()
    }
}
