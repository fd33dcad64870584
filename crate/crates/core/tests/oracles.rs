//! Expected values from independent oracles, and sample words read directly
//! out of the LaTeX source in `paper.md`.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;

use dequelang::cancellation::{reduce, Strategy};
use dequelang::cdl::{deque_after_prefix, enumerate_dq, format_deque, member_dq, rho_reduce, CharWord, RejectReason};
use dequelang::fa::Nfa;
use dequelang::format::{parse_da, print_da};
use dequelang::graphs::{build_ldg, word_of};
use dequelang::normal_forms::{to_partitioned, to_simple};
use dequelang::run::{apply_move, bounded_language, decide, Configuration, Limits, Verdict};
use dequelang::zoo::{self, ReplicaSchema};
use dequelang::{Class, DequeAutomaton};

fn source_text() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../paper.md")).expect("paper.md")
}

/// Translates letter macros such as `\tto_1` or `\ftc1` into tokens.
fn latex_tokens(latex: &str) -> String {
    let re = Regex::new(r"\\(ffc|ftc|tfc|ttc|tto|ff|ft|tf)_?(\d+)").unwrap();
    re.captures_iter(latex)
        .map(|c| {
            let (class, sign) = match &c[1] {
                "ff" => ("ff", '+'),
                "ft" => ("ft", '+'),
                "tf" => ("tf", '+'),
                "tto" => ("tt", '+'),
                other => (&other[..2], '-'),
            };
            format!("{class}{sign}{}", &c[2])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The first display-math line after `marker`.
fn math_after(text: &str, marker: &str) -> String {
    let at = text.find(marker).expect(marker);
    let rest = &text[at + marker.len()..];
    let start = rest.find('$').unwrap() + 1;
    let end = start + rest[start..].find('$').unwrap();
    rest[start..end].to_string()
}

fn words(letters: &[char], n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |&c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn is_even_pal(w: &str) -> bool {
    !w.is_empty() && w.len().is_multiple_of(2) && w.chars().all(|c| "ab".contains(c)) && w.chars().eq(w.chars().rev())
}

fn is_triangular(w: &str) -> bool {
    let n = w.len();
    w.chars().all(|c| c == 'c') && (1..=n).any(|m| m * (m + 1) / 2 == n)
}

fn oracle_set(letters: &[char], n: usize, pred: impl Fn(&str) -> bool) -> BTreeSet<String> {
    words(letters, n).into_iter().filter(|w| pred(w)).collect()
}

fn splits_into(w: &str, pred: &dyn Fn(&str) -> bool) -> bool {
    let n = w.len();
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for j in 1..=n {
        ok[j] = (0..j).any(|i| ok[i] && pred(&w[i..j]));
    }
    ok[n]
}

#[test]
fn def4_word_from_text() {
    let text = source_text();
    let word = latex_tokens(&math_after(&text, "To illustrate, word"));
    assert_eq!(word, "tt+1 ff+1 tt+2 ff-1 ft+1 tt-2 ft+2 tt-1 ft-1 ft-2");
    let w = CharWord::parse(&word, None).unwrap();
    assert!(member_dq(&w).is_ok());
    let r = reduce(&w, Strategy::Leftmost);
    assert!(r.is_empty());
    assert_eq!(r.steps().len(), 5);
    assert_eq!(format_deque(&deque_after_prefix(&w, 3).unwrap()), "FF_1 TT_1 TT_2");
    let g = build_ldg(&w).unwrap();
    assert_eq!(g.len(), 10);
    let classes: Vec<Class> = g.edges.iter().map(|e| e.class).collect();
    assert_eq!(classes, [Class::TT, Class::FF, Class::TT, Class::FT, Class::FT]);
}

#[test]
fn graph_word_from_text() {
    let text = source_text();
    let word = latex_tokens(&math_after(&text, "The word defined by the graph is"));
    assert_eq!(word, "tf+2 tt+1 ff+1 tt-1 ff-1 tf-2 ft+1 ft+1 ff+2 ft-1 ff+1 ft-1 ff-1 ff-2");
    let w = CharWord::parse(&word, None).unwrap();
    let g = build_ldg(&w).unwrap();
    assert_eq!(g.len(), 14);
    assert_eq!(g.edges.len(), 7);
    assert_eq!(word_of(&g).unwrap().letters, w.letters);

    // The text lists the deque tail first.
    let caption = math_after(&text, "The deque content after reading the prefix");
    let prefix = latex_tokens(&caption);
    assert_eq!(prefix, "tf+2 tt+1 ff+1 tt-1");
    let listed = Regex::new(r"is \$\\TF_2\\FF_1\$").unwrap();
    assert!(listed.is_match(&text));
    assert_eq!(format_deque(&deque_after_prefix(&w, 4).unwrap()), "FF_1 TF_2");
}

#[test]
fn rho_from_text() {
    let text = source_text();
    assert!(text.contains(r"a_1 a_2^j $, for every"));
    assert!(text.contains(r"a_2^j\, a_1$, for every"));
    let w = CharWord::parse("ff+3 ff-3", Some(3)).unwrap();
    assert_eq!(
        rho_reduce(&w).to_string(),
        "ff+1 ff+2 ff+2 ff+2 ff-2 ff-2 ff-2 ff-1"
    );
}

#[test]
fn replica_run_follows_the_text() {
    let text = source_text();
    let start = text.find("An example of computation is").unwrap();
    let block = &text[start..start + text[start..].find(r"\end{array}").unwrap()];
    let cfg = Regex::new(r"\(q_(\{?[^,]+?\}?|\\textit\{fin\}),([A-Za-z\\]+),([A-Za-z\\]+)\)").unwrap();
    let name = |s: &str| match s {
        "0" => "q0",
        "F" => "qF",
        "T" => "qT",
        r"\textit{fin}" => "qfin",
        other => panic!("state {other}"),
    };
    let primed = Regex::new(r"\(q'_([FT]),").unwrap();
    let mut expected: Vec<(String, String, String)> = cfg
        .captures_iter(block)
        .map(|c| (name(&c[1]).to_string(), c[2].replace(r"\varepsilon", ""), c[3].replace(r"\varepsilon", "")))
        .collect();
    for c in primed.captures_iter(block) {
        let rest = &block[c.get(0).unwrap().end()..];
        let inner: Vec<&str> = rest[..rest.find(')').unwrap()].split(',').collect();
        expected.push((format!("q{}'", &c[1]), inner[0].replace(r"\varepsilon", ""), inner[1].replace(r"\varepsilon", "")));
    }
    assert_eq!(expected.len(), 11);

    let m = zoo::replica_da();
    let word = "abbDabbDabbRbbaRbba";
    let input: Vec<char> = word.chars().collect();
    let Verdict::Accept(trace) = decide(&m, &input, Limits::default()).unwrap() else {
        panic!("rejected");
    };
    let mut seen: Vec<(String, String, String)> = vec![];
    for s in &trace.steps {
        let c = &s.config;
        let deque = if c.deque.is_empty() { String::new() } else { m.tape_string(&c.deque).replace('.', "") };
        seen.push((m.state_name(c.state).to_string(), word[c.position..].to_string(), deque));
    }
    for e in &expected {
        if e.1 == word {
            continue;
        }
        assert!(seen.contains(e), "{e:?} not on the run");
    }
}

#[test]
fn first_moves_of_the_figure_machines() {
    let pal = zoo::palindrome_da();
    let t = &pal.transitions[0];
    let cfg = Configuration::initial(&pal);
    let w: Vec<char> = "abba".chars().collect();
    let next = apply_move(&cfg, t, &w).unwrap();
    assert_eq!((next.position, pal.tape_string(&next.deque)), (1, "A".to_string()));

    let tri = zoo::triangular_da(true);
    let w: Vec<char> = "ccc".chars().collect();
    let t = tri.transitions.iter().find(|t| t.write_front.len() == 2).unwrap();
    let next = apply_move(&Configuration::initial(&tri), t, &w).unwrap();
    assert_eq!(tri.tape_string(&next.deque), "D.C");
    assert_eq!(tri.state_name(next.state), "p1");

    // Split into two chained moves that leave the same string.
    let simple = to_simple(&tri);
    let Verdict::Accept(trace) = decide(&simple, &w, Limits::default()).unwrap() else {
        panic!("rejected");
    };
    assert_eq!(simple.tape_string(&trace.steps[1].config.deque), "D.C");
}

#[test]
fn figure_machine_file() {
    let text = print_da(&zoo::palindrome_da());
    assert_eq!(text.lines().filter(|l| l.starts_with("trans:")).count(), 6);
    let back = parse_da(&text).unwrap();
    assert_eq!(print_da(&back), text);
    let sum = print_da(&zoo::triangular_da(true));
    assert!(sum.contains("trans: p0 c - - p1 D.C -"));
}

#[test]
fn small_counts_by_brute_force() {
    let e = enumerate_dq(1, 4).unwrap();
    let two: Vec<String> = e.words.iter().filter(|w| w.len() == 2).map(|w| w.to_string()).collect();
    assert_eq!(two, ["ff+1 ff-1", "ft+1 ft-1", "tf+1 tf-1", "tt+1 tt-1"]);
    assert_eq!(e.counts[4], 32);
}

#[test]
fn blocked_positions() {
    let w = CharWord::parse("ff+1 ft+1 ff-1 ft-1", None).unwrap();
    let r = member_dq(&w).unwrap_err();
    assert_eq!(r.position, 3);
    assert!(matches!(r.reason, RejectReason::Mismatch { .. }));
    let stuck = CharWord::parse("ft+1 tf+1", None).unwrap();
    assert!(member_dq(&stuck).is_err());
    assert!(!reduce(&CharWord::parse("ft+1 tf+1 ft-1 tf-1", None).unwrap(), Strategy::Exhaustive).is_empty());
}

#[test]
fn triangular_variants() {
    let corrected = bounded_language(&zoo::triangular_da(true), 30);
    assert_eq!(corrected, oracle_set(&['c'], 30, is_triangular));
    let printed: Vec<usize> = bounded_language(&zoo::triangular_da(false), 20).iter().map(String::len).collect();
    assert_eq!(printed, [1, 2, 5, 9, 14, 20]);
    let normal = to_partitioned(&to_simple(&zoo::triangular_da(true))).unwrap();
    assert_eq!(bounded_language(&normal, 30), corrected);
    let pal = to_simple(&zoo::palindrome_da());
    assert_eq!(bounded_language(&pal, 10), oracle_set(&['a', 'b'], 10, is_even_pal));
}

#[test]
fn combinators_against_set_algebra() {
    const N: usize = 10;
    let abc = ['a', 'b', 'c'];
    let (pal, tri) = (zoo::palindrome_da(), zoo::triangular_da(true));
    let p: &dyn Fn(&str) -> bool = &is_even_pal;
    let t: &dyn Fn(&str) -> bool = &is_triangular;
    for (m1, m2, f1, f2) in [(&pal, &tri, p, t), (&tri, &pal, t, p)] {
        let u = bounded_language(&zoo::union(m1, m2), N);
        assert_eq!(u, oracle_set(&abc, N, |w| f1(w) || f2(w)));
        let c = bounded_language(&zoo::concat(m1, m2), N);
        assert_eq!(c, oracle_set(&abc, N, |w| (1..w.len()).any(|i| f1(&w[..i]) && f2(&w[i..]))));
    }
    for (m, f) in [(&pal, p), (&tri, t)] {
        let s = bounded_language(&zoo::star(m), N);
        assert_eq!(s, oracle_set(&abc, N, |w| splits_into(w, f)));
    }
    let shape = Regex::new("^a*b*a*$").unwrap();
    let i = bounded_language(&zoo::intersect_regular(&pal, &Nfa::from_regex("a*b*a*", None).unwrap()), N);
    assert_eq!(i, oracle_set(&['a', 'b'], N, |w| is_even_pal(w) && shape.is_match(w)));
    let odd = Regex::new("^c(cc)*$").unwrap();
    let i = bounded_language(&zoo::intersect_regular(&tri, &Nfa::from_regex("c(cc)*", None).unwrap()), 30);
    assert_eq!(i, oracle_set(&['c'], 30, |w| is_triangular(w) && odd.is_match(w)));
}

#[test]
fn homomorphisms_against_images() {
    let pal = zoo::palindrome_da();
    let g = BTreeMap::from([('x', "ab".to_string()), ('y', "ba".to_string())]);
    let apply = |w: &str, h: &BTreeMap<char, String>| w.chars().map(|c| h[&c].clone()).collect::<String>();
    let inv = bounded_language(&zoo::inverse_hom(&pal, &g), 6);
    assert_eq!(inv, oracle_set(&['x', 'y'], 6, |w| is_even_pal(&apply(w, &g))));

    let h = BTreeMap::from([('a', "ab".to_string()), ('b', "c".to_string())]);
    let img = bounded_language(&zoo::non_erasing_hom(&pal, &h).unwrap(), 10);
    let expect: BTreeSet<String> = bounded_language(&pal, 10)
        .iter()
        .map(|w| apply(w, &h))
        .filter(|w| w.len() <= 10)
        .collect();
    assert_eq!(img, expect);
}

#[test]
fn bordered_against_pattern() {
    let oracle = |w: &str| {
        (1..w.len()).any(|k| {
            2 * k < w.len() && w[..k] == w[w.len() - k..] && is_even_pal(&w[k..w.len() - k])
        })
    };
    assert_eq!(bounded_language(&zoo::bordered_da(), 10), oracle_set(&['a', 'b'], 10, oracle));
}

/// `u · ρ_u(π)` for some `u ∈ {a,b}⁺` and `π` matching the schema.
fn in_replica_language(w: &str, schema: &Regex) -> bool {
    fn blocks(rest: &str, u: &str, rev: &str, pi: &mut String, schema: &Regex) -> bool {
        if rest.is_empty() {
            return schema.is_match(pi);
        }
        for (mark, copy) in [('D', u), ('R', rev)] {
            if let Some(r) = rest.strip_prefix(copy) {
                pi.push(mark);
                let ok = blocks(r, u, rev, pi, schema);
                pi.pop();
                if ok {
                    return true;
                }
            }
        }
        false
    }
    (1..=w.len()).any(|k| {
        let u = &w[..k];
        let rev: String = u.chars().rev().collect();
        blocks(&w[k..], u, &rev, &mut String::new(), schema)
    })
}

#[test]
fn replica_languages_against_pattern() {
    for pattern in ["D(D|R)*", "DR", "(DR)+", "R?D"] {
        let schema = Regex::new(&format!("^({pattern})$")).unwrap();
        let m = zoo::replica_language_da(&ReplicaSchema::parse(pattern).unwrap());
        let got = bounded_language(&m, 9);
        assert_eq!(got, oracle_set(&['a', 'b'], 9, |w| in_replica_language(w, &schema)), "{pattern}");
    }
}

#[test]
fn replica_examples() {
    let m = zoo::replica_da();
    let dec = |w: &str| matches!(decide(&m, &w.chars().collect::<Vec<_>>(), Limits::default()), Ok(Verdict::Accept(_)));
    assert!(dec("abDab"));
    assert!(!dec("abDba"));
    assert!(dec("abRba"));
}

#[test]
fn machines_reject_the_obvious() {
    let as_set = |m: &DequeAutomaton, w: &str| bounded_language(m, w.len()).contains(w);
    assert!(!as_set(&zoo::palindrome_da(), "aba"));
    assert!(!as_set(&zoo::concat_pal_sum_da(), "abba"));
    assert!(as_set(&zoo::bordered_da(), "abaaab"));
    assert!(as_set(&zoo::bordered_da(), "aaaa"));
}
