//! Homomorphic characterization: a simple partitioned machine M yields an
//! alphabet Θ of its transitions, a projection g onto deque operations, a
//! local language R of well-chained transition sequences and a projection h
//! onto input letters with L(M) = h(g⁻¹(DQ_k) ∩ R).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{DequeAutomaton, End, Guard};
use crate::cdl::{is_member, rho_reduce, CdlScanner, CharLetter, CharWord};
use crate::normal_forms::{DequeOp, SimpleMove};
use crate::run::{bounded_language, RunTrace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterizationError {
    #[error("machine must be simple and partitioned, without emptiness tests")]
    NotSimplePartitioned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationTriple {
    /// Θ: one letter per transition, named `t0`, `t1`, …
    pub theta: Vec<String>,
    pub g: Vec<Option<CharLetter>>,
    pub h: Vec<Option<char>>,
    pub first: BTreeSet<usize>,
    pub pairs: BTreeSet<(usize, usize)>,
    pub last: BTreeSet<usize>,
    pub contains_epsilon: bool,
    pub k: u32,
    pub p: usize,
}

pub fn characterize(m: &DequeAutomaton) -> Result<CharacterizationTriple, CharacterizationError> {
    if !m.is_partitioned() || m.has_guarded_moves() {
        return Err(CharacterizationError::NotSimplePartitioned);
    }
    let moves = m
        .transitions
        .iter()
        .map(SimpleMove::of)
        .collect::<Option<Vec<_>>>()
        .ok_or(CharacterizationError::NotSimplePartitioned)?;
    let g = moves
        .iter()
        .map(|mv| match mv.op {
            DequeOp::None => None,
            DequeOp::Write(_, s) => Some(CharLetter::open(m.symbol_class(s).unwrap(), s.0 as u32 + 1)),
            DequeOp::Read(_, s) => Some(CharLetter::close(m.symbol_class(s).unwrap(), s.0 as u32 + 1)),
        })
        .collect();
    let ts = &m.transitions;
    let mut pairs = BTreeSet::new();
    for (i, a) in ts.iter().enumerate() {
        for (j, b) in ts.iter().enumerate() {
            if a.to == b.from {
                pairs.insert((i, j));
            }
        }
    }
    Ok(CharacterizationTriple {
        theta: (0..ts.len()).map(|i| format!("t{i}")).collect(),
        g,
        h: ts.iter().map(|t| t.input).collect(),
        first: (0..ts.len()).filter(|&i| ts[i].from == m.initial).collect(),
        pairs,
        last: (0..ts.len()).filter(|&i| m.is_final(ts[i].to)).collect(),
        contains_epsilon: m.is_final(m.initial),
        k: m.tape.len() as u32,
        p: m.delay,
    })
}

impl CharacterizationTriple {
    pub fn in_r(&self, theta: &[usize]) -> bool {
        match (theta.first(), theta.last()) {
            (None, _) => self.contains_epsilon,
            (Some(f), Some(l)) => {
                self.first.contains(f)
                    && self.last.contains(l)
                    && theta.windows(2).all(|p| self.pairs.contains(&(p[0], p[1])))
            }
            _ => unreachable!(),
        }
    }

    pub fn g_image(&self, theta: &[usize]) -> Vec<CharLetter> {
        theta.iter().filter_map(|&t| self.g[t]).collect()
    }

    pub fn h_image(&self, theta: &[usize]) -> String {
        theta.iter().filter_map(|&t| self.h[t]).collect()
    }

    /// Tables of Θ, g, h and R.
    pub fn render(&self, m: &DequeAutomaton) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k = {}, p = {}", self.k, self.p);
        out.push_str("theta:\n");
        for (i, name) in self.theta.iter().enumerate() {
            let mv = SimpleMove::of(&m.transitions[i]).expect("simple");
            let g = self.g[i].map_or("ε".to_string(), |l| l.to_string());
            let h = self.h[i].map_or("ε".to_string(), |c| c.to_string());
            let _ = writeln!(out, "  {name:<5} {:<28} g={g:<6} h={h}", mv.display(m).to_string());
        }
        let names = |set: &BTreeSet<usize>| {
            set.iter().map(|&i| self.theta[i].as_str()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "first: {}", names(&self.first));
        let _ = writeln!(out, "last: {}", names(&self.last));
        let _ = writeln!(out, "epsilon: {}", self.contains_epsilon);
        out.push_str("pairs:\n");
        for i in 0..self.theta.len() {
            let next: BTreeSet<usize> = self
                .pairs
                .range((i, 0)..=(i, usize::MAX))
                .map(|&(_, j)| j)
                .collect();
            if !next.is_empty() {
                let _ = writeln!(out, "  {} -> {}", self.theta[i], names(&next));
            }
        }
        out
    }
}

/// Θ-word of an accepting run: the sequence of transitions taken.
pub fn trace_to_theta(trace: &RunTrace) -> Vec<usize> {
    trace.steps.iter().map(|s| s.transition).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub n: usize,
    pub generated: BTreeSet<String>,
    pub expected: BTreeSet<String>,
    /// In L(M) but not generated.
    pub missing: Vec<String>,
    /// Generated but not in L(M).
    pub extra: Vec<String>,
    /// Θ-prefixes with a run of at least p consecutive h-erased letters.
    pub erasing_violations: usize,
    /// R-words on which DQ_k membership of the g-image and DQ_2
    /// membership of its ρ-image disagree.
    pub rho_disagreements: usize,
    pub rho_checked: usize,
    pub theta_words: usize,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.erasing_violations == 0
            && self.rho_disagreements == 0
    }
}

struct Walk<'a> {
    t: &'a CharacterizationTriple,
    n: usize,
    max_theta: usize,
    by_first: Vec<Vec<usize>>,
    report: CharacterizationReport,
    gword: Vec<CharLetter>,
    hword: String,
    hlen: usize,
}

impl Walk<'_> {
    fn visit(&mut self, last: Option<usize>, scanner: &CdlScanner, erased: usize, depth: usize) {
        let complete = match last {
            None => self.t.contains_epsilon,
            Some(l) => self.t.last.contains(&l),
        };
        if complete {
            self.report.theta_words += 1;
            let in_dq = scanner.is_empty();
            let via_rho = is_member(
                &rho_reduce(&CharWord {
                    letters: self.gword.clone(),
                    k: self.t.k.max(1),
                })
                .letters,
            );
            self.report.rho_checked += 1;
            if in_dq != via_rho {
                self.report.rho_disagreements += 1;
            }
            if in_dq {
                self.report.generated.insert(self.hword.clone());
            }
        }
        if depth == self.max_theta {
            return;
        }
        let next: Vec<usize> = match last {
            None => self.t.first.iter().copied().collect(),
            Some(l) => self.by_first[l].clone(),
        };
        for x in next {
            let consumes = self.t.h[x].is_some();
            if consumes && self.hlen == self.n {
                continue;
            }
            let erased = if consumes { 0 } else { erased + 1 };
            if erased >= self.t.p {
                self.report.erasing_violations += 1;
                continue;
            }
            let mut s = scanner.clone();
            if let Some(l) = self.t.g[x] {
                if s.step(l).is_err() {
                    continue;
                }
                self.gword.push(l);
            }
            if let Some(c) = self.t.h[x] {
                self.hword.push(c);
                self.hlen += 1;
            }
            self.visit(Some(x), &s, erased, depth + 1);
            if self.t.h[x].is_some() {
                self.hword.pop();
                self.hlen -= 1;
            }
            if self.t.g[x].is_some() {
                self.gword.pop();
            }
        }
    }
}

/// Compares `h(g⁻¹(DQ_k) ∩ R)` with `L(M)` on words of length at most `n`,
/// enumerating Θ-words of length at most `p·(n+1)` along R and pruning
/// g-images the recognizer blocks on.
pub fn verify_characterization(m: &DequeAutomaton, t: &CharacterizationTriple, n: usize) -> CharacterizationReport {
    let mut by_first = vec![Vec::new(); t.theta.len()];
    for &(a, b) in &t.pairs {
        by_first[a].push(b);
    }
    let mut walk = Walk {
        t,
        n,
        max_theta: t.p * (n + 1),
        by_first,
        report: CharacterizationReport {
            n,
            generated: BTreeSet::new(),
            expected: bounded_language(m, n),
            missing: vec![],
            extra: vec![],
            erasing_violations: 0,
            rho_disagreements: 0,
            rho_checked: 0,
            theta_words: 0,
        },
        gword: vec![],
        hword: String::new(),
        hlen: 0,
    };
    walk.visit(None, &CdlScanner::new(), 0, 0);
    let mut r = walk.report;
    r.missing = r.expected.difference(&r.generated).cloned().collect();
    r.extra = r.generated.difference(&r.expected).cloned().collect();
    r
}

/// Whether every transition of `m` respects its symbol's class ends.
pub fn respects_classes(m: &DequeAutomaton) -> bool {
    m.transitions.iter().all(|t| {
        t.guard == Guard::None
            && t.write_front.iter().all(|&s| m.symbol_class(s).map(|c| c.write_end()) == Some(End::Front))
            && t.write_tail.iter().all(|&s| m.symbol_class(s).map(|c| c.write_end()) == Some(End::Tail))
            && t.read_front.iter().all(|&s| m.symbol_class(s).map(|c| c.read_end()) == Some(End::Front))
            && t.read_tail.iter().all(|&s| m.symbol_class(s).map(|c| c.read_end()) == Some(End::Tail))
    })
}
