//! The characteristic alphabet Δ_k, the one-state recognizer of the
//! characteristic deque language, bounded enumeration and the k → 2 reduction.
//!
//! Letters are written `<class><polarity><index>`, e.g. `ff+3` or `tt-1`.
//! An open letter writes an item of its class at the class's write end, a
//! close letter reads the matching item from the class's read end.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automaton::{Class, End};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Open,
    Close,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharLetter {
    pub class: Class,
    pub polarity: Polarity,
    pub index: u32,
}

impl CharLetter {
    pub const fn open(class: Class, index: u32) -> Self {
        CharLetter {
            class,
            polarity: Polarity::Open,
            index,
        }
    }

    pub const fn close(class: Class, index: u32) -> Self {
        CharLetter {
            class,
            polarity: Polarity::Close,
            index,
        }
    }

    pub fn is_open(self) -> bool {
        self.polarity == Polarity::Open
    }

    /// The letter with the opposite polarity.
    pub fn mate(self) -> Self {
        CharLetter {
            polarity: match self.polarity {
                Polarity::Open => Polarity::Close,
                Polarity::Close => Polarity::Open,
            },
            ..self
        }
    }

    /// Deque end this letter operates on.
    pub fn end(self) -> End {
        match self.polarity {
            Polarity::Open => self.class.write_end(),
            Polarity::Close => self.class.read_end(),
        }
    }

    pub fn item(self) -> DequeItem {
        DequeItem {
            class: self.class,
            index: self.index,
        }
    }
}

impl fmt::Display for CharLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_open() { '+' } else { '-' };
        write!(f, "{}{}{}", self.class, sign, self.index)
    }
}

impl FromStr for CharLetter {
    type Err = CdlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CdlError::BadToken(s.to_string());
        if s.len() < 4 || !s.is_char_boundary(2) {
            return Err(bad());
        }
        let class: Class = s[..2].parse().map_err(|_| bad())?;
        let polarity = match &s[2..3] {
            "+" => Polarity::Open,
            "-" => Polarity::Close,
            _ => return Err(bad()),
        };
        let digits = &s[3..];
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: u32 = digits.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(CharLetter {
            class,
            polarity,
            index,
        })
    }
}

/// A tape symbol of the characteristic recognizer, e.g. `FT_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DequeItem {
    pub class: Class,
    pub index: u32,
}

impl fmt::Display for DequeItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.class.as_str().to_uppercase(), self.index)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdlError {
    #[error("malformed token `{0}` (expected e.g. `ff+1`)")]
    BadToken(String),
    #[error("letter `{letter}` exceeds k = {k}")]
    IndexOutOfRange { letter: CharLetter, k: u32 },
    #[error("k must be at least 1")]
    ZeroK,
}

/// A word over Δ_k.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharWord {
    pub letters: Vec<CharLetter>,
    pub k: u32,
}

impl CharWord {
    pub fn new(letters: Vec<CharLetter>, k: u32) -> Result<Self, CdlError> {
        if k == 0 {
            return Err(CdlError::ZeroK);
        }
        if let Some(&letter) = letters.iter().find(|l| l.index > k) {
            return Err(CdlError::IndexOutOfRange { letter, k });
        }
        Ok(CharWord { letters, k })
    }

    /// Parses whitespace-separated tokens. Without an explicit `k` the
    /// largest index in the word is used (at least 1).
    pub fn parse(text: &str, k: Option<u32>) -> Result<Self, CdlError> {
        let letters = text
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<CharLetter>, _>>()?;
        let k = k.unwrap_or_else(|| letters.iter().map(|l| l.index).max().unwrap_or(1));
        CharWord::new(letters, k)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for CharWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub fn format_letters(letters: &[CharLetter]) -> String {
    if letters.is_empty() {
        return "ε".into();
    }
    letters
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_deque(items: &[DequeItem]) -> String {
    if items.is_empty() {
        return "ε".into();
    }
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// All 8k letters of Δ_k in ascending order.
pub fn alphabet(k: u32) -> Vec<CharLetter> {
    let mut out = Vec::with_capacity(8 * k as usize);
    for class in Class::ALL {
        for polarity in [Polarity::Open, Polarity::Close] {
            for index in 1..=k {
                out.push(CharLetter {
                    class,
                    polarity,
                    index,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// A close letter found the wrong item (or none) at its read end.
    Mismatch {
        expected: DequeItem,
        found: Option<DequeItem>,
        end: End,
    },
    /// The whole word was read but items remain.
    Leftover(Vec<DequeItem>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdlReject {
    /// 1-based position of the blocking letter; `len + 1` for leftovers.
    pub position: usize,
    pub reason: RejectReason,
}

impl fmt::Display for CdlReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            RejectReason::Mismatch {
                expected,
                found,
                end,
            } => {
                let end = match end {
                    End::Front => "front",
                    End::Tail => "tail",
                };
                let found = found.map_or("nothing".to_string(), |i| i.to_string());
                write!(
                    f,
                    "blocked at position {}: expected {expected} at {end}, found {found}",
                    self.position
                )
            }
            RejectReason::Leftover(items) => write!(
                f,
                "deque not empty at end of word: {}",
                format_deque(items)
            ),
        }
    }
}

/// Incremental simulation of the deterministic characteristic recognizer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CdlScanner {
    deque: VecDeque<DequeItem>,
    read: usize,
}

impl CdlScanner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deque(&self) -> Vec<DequeItem> {
        self.deque.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.deque.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deque.is_empty()
    }

    /// Letters consumed so far.
    pub fn position(&self) -> usize {
        self.read
    }

    pub fn step(&mut self, letter: CharLetter) -> Result<(), CdlReject> {
        let item = letter.item();
        let end = letter.end();
        if letter.is_open() {
            match end {
                End::Front => self.deque.push_front(item),
                End::Tail => self.deque.push_back(item),
            }
        } else {
            let found = match end {
                End::Front => self.deque.front(),
                End::Tail => self.deque.back(),
            }
            .copied();
            if found != Some(item) {
                return Err(CdlReject {
                    position: self.read + 1,
                    reason: RejectReason::Mismatch {
                        expected: item,
                        found,
                        end,
                    },
                });
            }
            match end {
                End::Front => self.deque.pop_front(),
                End::Tail => self.deque.pop_back(),
            };
        }
        self.read += 1;
        Ok(())
    }

    pub fn finish(&self) -> Result<(), CdlReject> {
        if self.deque.is_empty() {
            Ok(())
        } else {
            Err(CdlReject {
                position: self.read + 1,
                reason: RejectReason::Leftover(self.deque()),
            })
        }
    }
}

/// Deque contents after each letter of an accepted word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdlAccept {
    pub trace: Vec<Vec<DequeItem>>,
}

/// Membership in DQ_k by a single deterministic scan.
pub fn member_dq(w: &CharWord) -> Result<CdlAccept, CdlReject> {
    let mut s = CdlScanner::new();
    let mut trace = Vec::with_capacity(w.len());
    for &l in &w.letters {
        s.step(l)?;
        trace.push(s.deque());
    }
    s.finish()?;
    Ok(CdlAccept { trace })
}

/// Allocation-light membership test.
pub fn is_member(letters: &[CharLetter]) -> bool {
    let mut s = CdlScanner::new();
    letters.iter().all(|&l| s.step(l).is_ok()) && s.is_empty()
}

/// Deque after the first `i` letters, front first.
pub fn deque_after_prefix(w: &CharWord, i: usize) -> Result<Vec<DequeItem>, CdlReject> {
    let mut s = CdlScanner::new();
    for &l in w.letters.iter().take(i) {
        s.step(l)?;
    }
    Ok(s.deque())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub k: u32,
    pub max_len: usize,
    /// Members of DQ_k in length-lexicographic order.
    pub words: Vec<CharWord>,
    /// `counts[l]` is the number of members of length `l`.
    pub counts: Vec<usize>,
}

/// Every member of DQ_k of length at most `n`.
///
/// Only prefixes that are blocked, or whose deque cannot be emptied within
/// the remaining length, are cut; deadlocked but unblocked prefixes stay
/// until the length bound ends them.
pub fn enumerate_dq(k: u32, n: usize) -> Result<Enumeration, CdlError> {
    if k == 0 {
        return Err(CdlError::ZeroK);
    }
    let sigma = alphabet(k);
    let mut words = vec![CharWord {
        letters: vec![],
        k,
    }];
    let mut counts = vec![0; n + 1];
    counts[0] = 1;
    let mut layer = vec![(Vec::<CharLetter>::new(), CdlScanner::new())];
    for len in 1..=n {
        let mut next = Vec::new();
        for (prefix, scanner) in &layer {
            for &l in &sigma {
                let mut s = scanner.clone();
                if s.step(l).is_err() || s.len() > n - len {
                    continue;
                }
                let mut p = prefix.clone();
                p.push(l);
                if s.is_empty() {
                    counts[len] += 1;
                    words.push(CharWord {
                        letters: p.clone(),
                        k,
                    });
                }
                next.push((p, s));
            }
        }
        layer = next;
    }
    Ok(Enumeration {
        k,
        max_len: n,
        words,
        counts,
    })
}

/// Image of one letter under the reduction to Δ_2.
///
/// Opens map to `a_1 a_2^j`. Stack closes read the group back in reverse,
/// `a_2^j a_1`; queue closes read it in arrival order, `a_1 a_2^j`.
pub fn rho_letter(l: CharLetter) -> Vec<CharLetter> {
    let first = CharLetter { index: 1, ..l };
    let second = CharLetter { index: 2, ..l };
    let reps = l.index as usize;
    let fifo = matches!(l.class, Class::FT | Class::TF);
    let mut out = Vec::with_capacity(reps + 1);
    if l.is_open() || fifo {
        out.push(first);
        out.extend(std::iter::repeat_n(second, reps));
    } else {
        out.extend(std::iter::repeat_n(second, reps));
        out.push(first);
    }
    out
}

/// Letterwise homomorphism Δ_k → Δ_2 with ρ⁻¹(DQ_2) = DQ_k.
pub fn rho_reduce(w: &CharWord) -> CharWord {
    CharWord {
        letters: w.letters.iter().flat_map(|&l| rho_letter(l)).collect(),
        k: 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> CharWord {
        CharWord::parse(s, None).unwrap()
    }

    const DEF4: &str = "tt+1 ff+1 tt+2 ff-1 ft+1 tt-2 ft+2 tt-1 ft-1 ft-2";
    const FIG3: &str =
        "tf+2 tt+1 ff+1 tt-1 ff-1 tf-2 ft+1 ft+1 ff+2 ft-1 ff+1 ft-1 ff-1 ff-2";

    #[test]
    fn token_round_trip() {
        for l in alphabet(3) {
            assert_eq!(l.to_string().parse::<CharLetter>().unwrap(), l);
        }
        for bad in ["ff+0", "fx+1", "ff*1", "ff+", "ff+1a", "ff-+1"] {
            assert!(bad.parse::<CharLetter>().is_err(), "{bad}");
        }
    }

    #[test]
    fn index_bound_checked() {
        assert!(matches!(
            CharWord::parse("ff+3", Some(2)),
            Err(CdlError::IndexOutOfRange { .. })
        ));
        assert_eq!(word("ff+3 ff-3").k, 3);
    }

    #[test]
    fn reference_words_accepted() {
        assert!(member_dq(&word(DEF4)).is_ok());
        assert!(member_dq(&word(FIG3)).is_ok());
    }

    #[test]
    fn blocked_close_reports_position() {
        let r = member_dq(&word("ff+1 ft+1 ff-1 ft-1")).unwrap_err();
        assert_eq!(r.position, 3);
        assert_eq!(
            r.reason,
            RejectReason::Mismatch {
                expected: DequeItem {
                    class: Class::FF,
                    index: 1
                },
                found: Some(DequeItem {
                    class: Class::FT,
                    index: 1
                }),
                end: End::Front,
            }
        );
    }

    #[test]
    fn leftover_reported_after_last_letter() {
        let r = member_dq(&word("ft+1 tf+1")).unwrap_err();
        assert_eq!(r.position, 3);
        assert!(matches!(r.reason, RejectReason::Leftover(ref v) if v.len() == 2));
    }

    #[test]
    fn prefix_deques() {
        let fig3 = word(FIG3);
        assert_eq!(format_deque(&deque_after_prefix(&fig3, 4).unwrap()), "FF_1 TF_2");
        assert!(deque_after_prefix(&fig3, 0).unwrap().is_empty());
        assert_eq!(
            format_deque(&deque_after_prefix(&word(DEF4), 3).unwrap()),
            "FF_1 TT_1 TT_2"
        );
        assert!(deque_after_prefix(&word("ff+1 ft+1 ff-1"), 3).is_err());
    }

    #[test]
    fn small_counts() {
        let e = enumerate_dq(1, 4).unwrap();
        assert_eq!(e.counts, vec![1, 0, 4, 0, 32]);
        let len2: Vec<String> = e.words[1..5].iter().map(|w| w.to_string()).collect();
        assert_eq!(len2, ["ff+1 ff-1", "ft+1 ft-1", "tf+1 tf-1", "tt+1 tt-1"]);
    }

    #[test]
    fn enumeration_is_length_lex_sorted() {
        let e = enumerate_dq(2, 4).unwrap();
        for pair in e.words.windows(2) {
            let (a, b) = (&pair[0].letters, &pair[1].letters);
            assert!(a.len() < b.len() || (a.len() == b.len() && a < b));
        }
    }

    #[test]
    fn rho_images() {
        let open = rho_letter("ff+3".parse().unwrap());
        assert_eq!(format_letters(&open), "ff+1 ff+2 ff+2 ff+2");
        let close = rho_letter("ff-3".parse().unwrap());
        assert_eq!(format_letters(&close), "ff-2 ff-2 ff-2 ff-1");
        let qclose = rho_letter("ft-2".parse().unwrap());
        assert_eq!(format_letters(&qclose), "ft-1 ft-2 ft-2");
    }

    #[test]
    fn uniform_rho_breaks_queues() {
        // With closes mapped to a_2^j a_1 for every class, a single ft pair
        // from DQ_3 would leave DQ_2.
        let w = word("ft+3 ft-3");
        assert!(is_member(&w.letters));
        let uniform = word("ft+1 ft+2 ft+2 ft+2 ft-2 ft-2 ft-2 ft-1");
        assert!(!is_member(&uniform.letters));
        assert!(is_member(&rho_reduce(&w).letters));
    }
}
