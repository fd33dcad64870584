//! Exhaustive agreement check of the four DQ_k deciders.

use crate::cancellation::reduces_leftmost;
use crate::cdl::{alphabet, is_member, CharLetter, CharWord};
use crate::decomposition::decomposition_member;
use crate::graphs::build_ldg;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub recognizer: bool,
    pub cancellation: bool,
    pub decomposition: bool,
    pub graph: bool,
}

impl Verdicts {
    pub fn of(letters: &[CharLetter], k: u32) -> Verdicts {
        Verdicts {
            recognizer: is_member(letters),
            cancellation: reduces_leftmost(letters),
            decomposition: decomposition_member(letters),
            graph: build_ldg(&CharWord {
                letters: letters.to_vec(),
                k,
            })
            .is_ok(),
        }
    }

    pub fn agree(&self) -> bool {
        self.recognizer == self.cancellation
            && self.recognizer == self.decomposition
            && self.recognizer == self.graph
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub k: u32,
    pub n: usize,
    pub words_checked: u64,
    /// Members per length, by the recognizer.
    pub members: Vec<u64>,
    pub disagreements: u64,
    pub first_disagreement: Option<(CharWord, Verdicts)>,
}

/// Runs all four deciders on every word over Δ_k of length at most `n`.
pub fn crosscheck(k: u32, n: usize) -> CrosscheckReport {
    let sigma = alphabet(k);
    let mut report = CrosscheckReport {
        k,
        n,
        words_checked: 0,
        members: vec![0; n + 1],
        disagreements: 0,
        first_disagreement: None,
    };
    for len in 0..=n {
        let mut digits = vec![0usize; len];
        let mut word: Vec<CharLetter> = vec![sigma[0]; len];
        loop {
            let v = Verdicts::of(&word, k);
            report.words_checked += 1;
            if v.recognizer {
                report.members[len] += 1;
            }
            if !v.agree() {
                report.disagreements += 1;
                if report.first_disagreement.is_none() {
                    report.first_disagreement = Some((
                        CharWord {
                            letters: word.clone(),
                            k,
                        },
                        v,
                    ));
                }
            }
            // Odometer increment, last position fastest.
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < sigma.len() {
                    word[i] = sigma[digits[i]];
                    break;
                }
                digits[i] = 0;
                word[i] = sigma[0];
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX || len == 0 {
                break;
            }
        }
    }
    report
}
