//! Cancellation rewriting: deciding DQ_k membership by deleting matched
//! open/close pairs until the word is empty.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automaton::Class;
use crate::cdl::{CharLetter, CharWord, Polarity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Front stack pair, the first ff-close of the word.
    CR1,
    /// Tail stack pair, the first tt-close of the word.
    CR2,
    /// ft queue pair at the start of the word.
    CR3,
    /// tf queue pair at the start of the word.
    CR4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A rule instance located in a word: positions are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub open: usize,
    pub close: usize,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub open_pos: usize,
    pub close_pos: usize,
    pub before: CharWord,
    pub after: CharWord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Random(u64),
    Exhaustive,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leftmost" => Ok(Strategy::Leftmost),
            "exhaustive" => Ok(Strategy::Exhaustive),
            _ => s
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(Strategy::Random)
                .ok_or_else(|| format!("unknown strategy `{s}` (leftmost, random:SEED, exhaustive)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    ReducedToEmpty(Vec<ReductionStep>),
    Stuck {
        residual: CharWord,
        steps: Vec<ReductionStep>,
    },
}

impl Reduction {
    pub fn is_empty(&self) -> bool {
        matches!(self, Reduction::ReducedToEmpty(_))
    }

    pub fn steps(&self) -> &[ReductionStep] {
        match self {
            Reduction::ReducedToEmpty(s) | Reduction::Stuck { steps: s, .. } => s,
        }
    }
}

fn is(l: CharLetter, class: Class, polarity: Polarity) -> bool {
    l.class == class && l.polarity == polarity
}

/// Letters that may sit between an ff pair: everything that lives at the tail.
fn tail_side(l: CharLetter) -> bool {
    is(l, Class::FT, Polarity::Close) || is(l, Class::TF, Polarity::Open) || l.class == Class::TT
}

fn front_side(l: CharLetter) -> bool {
    is(l, Class::FT, Polarity::Open) || is(l, Class::TF, Polarity::Close) || l.class == Class::FF
}

fn stack_site(w: &[CharLetter], class: Class, between: fn(CharLetter) -> bool, rule: Rule) -> Option<Site> {
    let close = w.iter().position(|&l| is(l, class, Polarity::Close))?;
    let open = w[..close].iter().rposition(|&l| !between(l))?;
    (w[open] == w[close].mate()).then_some(Site { open, close, rule })
}

fn queue_site(w: &[CharLetter], class: Class, rule: Rule) -> Option<Site> {
    let first = *w.first()?;
    if !is(first, class, Polarity::Open) {
        return None;
    }
    let close = w.iter().position(|&l| !is(l, class, Polarity::Open))?;
    (w[close] == first.mate()).then_some(Site { open: 0, close, rule })
}

/// Every rule instance in `w`, ordered by open position then close position.
///
/// Each rule has at most one instance: the ff pair of CR1 must close at the
/// first ff-close with only tail-side letters in between, so its open is the
/// nearest letter before it that is not tail-side; symmetrically for CR2;
/// CR3 and CR4 are anchored at the start.
pub fn sites(w: &[CharLetter]) -> Vec<Site> {
    let mut out: Vec<Site> = [
        stack_site(w, Class::FF, tail_side, Rule::CR1),
        stack_site(w, Class::TT, front_side, Rule::CR2),
        queue_site(w, Class::FT, Rule::CR3),
        queue_site(w, Class::TF, Rule::CR4),
    ]
    .into_iter()
    .flatten()
    .collect();
    out.sort();
    out
}

fn delete(w: &[CharLetter], s: Site) -> Vec<CharLetter> {
    w.iter()
        .enumerate()
        .filter(|&(i, _)| i != s.open && i != s.close)
        .map(|(_, &l)| l)
        .collect()
}

fn step_record(w: &CharWord, s: Site) -> ReductionStep {
    ReductionStep {
        rule: s.rule,
        open_pos: s.open,
        close_pos: s.close,
        before: w.clone(),
        after: CharWord {
            letters: delete(&w.letters, s),
            k: w.k,
        },
    }
}

pub fn applicable_steps(w: &CharWord) -> Vec<ReductionStep> {
    sites(&w.letters).into_iter().map(|s| step_record(w, s)).collect()
}

/// Reduction by always taking the first site; no step records.
pub fn reduces_leftmost(letters: &[CharLetter]) -> bool {
    let mut w = letters.to_vec();
    while !w.is_empty() {
        match sites(&w).first() {
            Some(&s) => w = delete(&w, s),
            None => return false,
        }
    }
    true
}

/// Whether some order of rule applications empties the word.
pub fn reduces_exhaustive(letters: &[CharLetter]) -> bool {
    search(letters, &mut HashSet::new()).is_some()
}

fn search(w: &[CharLetter], dead: &mut HashSet<Vec<CharLetter>>) -> Option<Vec<Site>> {
    if w.is_empty() {
        return Some(vec![]);
    }
    if dead.contains(w) {
        return None;
    }
    for s in sites(w) {
        if let Some(mut rest) = search(&delete(w, s), dead) {
            rest.push(s);
            return Some(rest);
        }
    }
    dead.insert(w.to_vec());
    None
}

fn replay(w: &CharWord, sites: impl IntoIterator<Item = Site>) -> (CharWord, Vec<ReductionStep>) {
    let mut cur = w.clone();
    let mut steps = Vec::new();
    for s in sites {
        let st = step_record(&cur, s);
        cur = st.after.clone();
        steps.push(st);
    }
    (cur, steps)
}

pub fn reduce(w: &CharWord, strategy: Strategy) -> Reduction {
    let (residual, steps) = match strategy {
        Strategy::Exhaustive => match search(&w.letters, &mut HashSet::new()) {
            Some(mut path) => {
                path.reverse();
                replay(w, path)
            }
            None => {
                let (residual, steps) = run(w, |s| s.first().copied());
                return Reduction::Stuck { residual, steps };
            }
        },
        Strategy::Leftmost => run(w, |s| s.first().copied()),
        Strategy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run(w, |s| s.choose(&mut rng).copied())
        }
    };
    if residual.is_empty() {
        Reduction::ReducedToEmpty(steps)
    } else {
        Reduction::Stuck { residual, steps }
    }
}

fn run(w: &CharWord, mut pick: impl FnMut(&[Site]) -> Option<Site>) -> (CharWord, Vec<ReductionStep>) {
    let mut cur = w.clone();
    let mut steps = Vec::new();
    while let Some(s) = pick(&sites(&cur.letters)) {
        let st = step_record(&cur, s);
        cur = st.after.clone();
        steps.push(st);
    }
    (cur, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdl::is_member;

    fn word(s: &str) -> CharWord {
        CharWord::parse(s, None).unwrap()
    }

    fn rules(s: &str) -> Vec<Rule> {
        sites(&word(s).letters).into_iter().map(|s| s.rule).collect()
    }

    #[test]
    fn both_stack_rules_apply() {
        assert_eq!(rules("ff+1 tt+1 ff-1 tt-1"), [Rule::CR1, Rule::CR2]);
    }

    #[test]
    fn queue_rule_at_start() {
        let s = sites(&word("ft+1 ft+2 ft-1 ft-2").letters);
        assert_eq!(
            s,
            [Site {
                open: 0,
                close: 2,
                rule: Rule::CR3
            }]
        );
        assert!(rules("").is_empty());
    }

    #[test]
    fn def4_word_reduces_in_five_steps() {
        let w = word("tt+1 ff+1 tt+2 ff-1 ft+1 tt-2 ft+2 tt-1 ft-1 ft-2");
        for strategy in [Strategy::Leftmost, Strategy::Random(7), Strategy::Exhaustive] {
            let r = reduce(&w, strategy);
            assert!(r.is_empty(), "{strategy:?}");
            assert_eq!(r.steps().len(), 5);
            for st in r.steps() {
                assert_eq!(st.after.len() + 2, st.before.len());
            }
        }
    }

    #[test]
    fn stuck_words() {
        let r = reduce(&word("ff+1 ff-2"), Strategy::Leftmost);
        assert!(matches!(r, Reduction::Stuck { ref residual, .. } if residual.len() == 2));
        let w = word("ft+1 tf+1 ft-1 tf-1");
        assert!(!reduce(&w, Strategy::Exhaustive).is_empty());
        assert!(!is_member(&w.letters));
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("random:42".parse(), Ok(Strategy::Random(42)));
        assert_eq!("leftmost".parse(), Ok(Strategy::Leftmost));
        assert!("random:x".parse::<Strategy>().is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let w = word("ff+1 tt+1 ff-1 tt-1");
        assert_eq!(reduce(&w, Strategy::Random(3)), reduce(&w, Strategy::Random(3)));
    }
}
