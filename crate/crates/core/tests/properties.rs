use std::collections::HashMap;

use proptest::prelude::*;
use proptest::sample::select;

use dequelang::automaton::{SymbolId, Transition};
use dequelang::cancellation::{applicable_steps, reduce, Strategy as Order};
use dequelang::cdl::{alphabet, enumerate_dq, is_member, member_dq, CharLetter, CharWord, Polarity};
use dequelang::characterization::{characterize, respects_classes, trace_to_theta};
use dequelang::decomposition::{decompose, in_front_row, member_h3, project};
use dequelang::format::{parse_da, print_da};
use dequelang::graphs::{build_ldg, dgm_accept, run_graph, word_of, VertexLabel};
use dequelang::normal_forms::{to_partitioned, to_simple, SimpleMove};
use dequelang::run::{apply_move, decide, Configuration, Limits, Verdict};
use dequelang::{zoo, Class, DequeAutomaton};

fn letters(k: u32, max: usize) -> impl Strategy<Value = Vec<CharLetter>> {
    prop::collection::vec(select(alphabet(k)), 0..=max)
}

fn members(k: u32, n: usize) -> impl Strategy<Value = CharWord> {
    select(enumerate_dq(k, n).unwrap().words)
}

fn machines() -> Vec<DequeAutomaton> {
    vec![
        zoo::palindrome_da(),
        zoo::triangular_da(true),
        zoo::triangular_da(false),
        zoo::concat_pal_sum_da(),
        zoo::bordered_da(),
        zoo::replica_da(),
    ]
}

fn machine() -> impl Strategy<Value = DequeAutomaton> {
    select(machines())
}

fn word_for(m: &DequeAutomaton, max: usize) -> impl Strategy<Value = Vec<char>> {
    let sigma: Vec<char> = m.input_alphabet.iter().copied().collect();
    prop::collection::vec(select(sigma), 0..=max)
}

fn machine_and_word() -> impl Strategy<Value = (DequeAutomaton, Vec<char>)> {
    machine().prop_flat_map(|m| {
        let w = word_for(&m, 10);
        (Just(m), w)
    })
}

fn symbols(n: usize, max: usize) -> impl Strategy<Value = Vec<SymbolId>> {
    prop::collection::vec((0..n as u16).prop_map(SymbolId), 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moves_need_disjoint_segments(
        (m, ti, deque) in machine().prop_flat_map(|m| {
            let (n, k) = (m.transitions.len(), m.tape.len());
            (Just(m), 0..n, symbols(k, 5))
        }),
    ) {
        let t: &Transition = &m.transitions[ti];
        let cfg = Configuration { state: t.from, position: 0, deque: deque.clone() };
        let word: Vec<char> = t.input.into_iter().collect();
        let a = apply_move(&cfg, t, &word);
        if deque.len() < t.read_front.len() + t.read_tail.len() {
            prop_assert!(a.is_none());
        }
        prop_assert_eq!(a, apply_move(&cfg, t, &word));
    }

    #[test]
    fn accepting_traces_obey_contract((m, w) in machine_and_word()) {
        if let Verdict::Accept(t) = decide(&m, &w, Limits::default()).unwrap() {
            prop_assert!(t.longest_spontaneous_run() < m.delay);
            let last = t.last_config(&m);
            prop_assert!(m.is_final(last.state));
            prop_assert_eq!(last.position, w.len());
            prop_assert!(last.deque.is_empty());
        }
    }

    #[test]
    fn simple_form_is_simple(m in machine()) {
        let s = to_simple(&m);
        prop_assert!(s.transitions.iter().all(|t| SimpleMove::of(t).is_some()));
        let p = to_partitioned(&s).unwrap();
        prop_assert!(respects_classes(&p));
    }

    #[test]
    fn recognizer_is_deterministic(w in letters(2, 10)) {
        let w = CharWord { letters: w, k: 2 };
        prop_assert_eq!(member_dq(&w), member_dq(&w));
    }

    #[test]
    fn members_are_balanced(w in members(2, 6)) {
        prop_assert_eq!(w.len() % 2, 0);
        let mut balance: HashMap<(Class, u32), i32> = HashMap::new();
        for l in &w.letters {
            *balance.entry((l.class, l.index)).or_default() += if l.polarity == Polarity::Open { 1 } else { -1 };
        }
        prop_assert!(balance.values().all(|&b| b == 0));
    }

    #[test]
    fn random_orders_agree_with_leftmost(w in letters(2, 8), seed in any::<u64>()) {
        let w = CharWord { letters: w, k: 2 };
        let leftmost = reduce(&w, Order::Leftmost).is_empty();
        prop_assert_eq!(leftmost, is_member(&w.letters));
        prop_assert_eq!(reduce(&w, Order::Random(seed)).is_empty(), leftmost);
    }

    #[test]
    fn steps_preserve_non_membership(w in letters(2, 8)) {
        let w = CharWord { letters: w, k: 2 };
        if !is_member(&w.letters) {
            for s in applicable_steps(&w) {
                prop_assert!(!is_member(&s.after.letters), "{} -> {}", w, s.after);
            }
        }
    }

    #[test]
    fn successful_reductions_halve(w in members(2, 6), seed in any::<u64>()) {
        let r = reduce(&w, Order::Random(seed));
        prop_assert!(r.is_empty());
        prop_assert_eq!(r.steps().len(), w.len() / 2);
    }

    #[test]
    fn projections_partition_the_word(w in letters(2, 10)) {
        let w = CharWord { letters: w, k: 2 };
        let p = project(&w);
        prop_assert_eq!(p.front_row.len() + p.tail_row.len(), w.len());
        let (mut f, mut t) = (p.front_row.letters.iter(), p.tail_row.letters.iter());
        for l in &w.letters {
            let next = if in_front_row(*l) { f.next() } else { t.next() };
            prop_assert_eq!(next, Some(l));
        }
    }

    #[test]
    fn h3_ignores_stack_letters(
        w in letters(2, 8),
        extra in prop::collection::vec((0usize..9, select(alphabet(2).into_iter().filter(|l| matches!(l.class, Class::FF | Class::TT)).collect::<Vec<_>>())), 0..4),
    ) {
        let mut v = w.clone();
        for (at, l) in extra {
            v.insert(at.min(v.len()), l);
        }
        prop_assert_eq!(member_h3(&w), member_h3(&v));
        prop_assert_eq!(decompose(&CharWord { letters: w.clone(), k: 2 }).member(), is_member(&w));
    }

    #[test]
    fn graphs_of_members(w in members(2, 6)) {
        let g = build_ldg(&w).unwrap();
        prop_assert_eq!(dgm_accept(&g), Ok(Ok(())));
        prop_assert!(g.stack_edges_nest());
        prop_assert_eq!(word_of(&g).map(|v| v.letters), Some(w.letters));
    }

    #[test]
    fn format_round_trips(m in machine()) {
        for form in [m.clone(), to_simple(&m)] {
            let text = print_da(&form);
            let back = parse_da(&text).unwrap();
            prop_assert_eq!(print_da(&back), text);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn run_graph_counts(u in prop::collection::vec(select(vec!['a', 'b']), 1..5), cs in 0usize..3) {
        let m = to_partitioned(&to_simple(&zoo::concat_pal_sum_with_test())).unwrap();
        let mut w: Vec<char> = u.clone();
        w.extend(u.iter().rev());
        let sizes = [1, 3, 6];
        w.extend(std::iter::repeat_n('c', sizes[cs]));
        let Verdict::Accept(trace) = decide(&m, &w, Limits::default()).unwrap() else {
            panic!("rejects {w:?}");
        };
        let writes = trace.steps.iter().filter(|s| {
            let t = &m.transitions[s.transition];
            !t.write_front.is_empty() || !t.write_tail.is_empty()
        }).count();
        let g = run_graph(&m, &w).unwrap();
        let inputs = g.vertices.iter().filter(|v| matches!(v.label, VertexLabel::Input(_))).count();
        prop_assert_eq!(inputs, w.len());
        prop_assert_eq!(g.edges.len(), writes);
    }

    #[test]
    fn traces_map_into_the_characterization(u in prop::collection::vec(select(vec!['a', 'b']), 1..6)) {
        let m = to_partitioned(&zoo::palindrome_da()).unwrap();
        let t = characterize(&m).unwrap();
        let mut w = u.clone();
        w.extend(u.iter().rev());
        let Verdict::Accept(trace) = decide(&m, &w, Limits::default()).unwrap() else {
            panic!("rejects {w:?}");
        };
        let theta = trace_to_theta(&trace);
        prop_assert!(t.in_r(&theta));
        prop_assert!(is_member(&t.g_image(&theta)));
        prop_assert_eq!(t.h_image(&theta), w.iter().collect::<String>());
    }
}
