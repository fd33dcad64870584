//! Browser bindings: characteristic-word checking with its deque graph,
//! cancellation traces, and run graphs of the example machines.

use wasm_bindgen::prelude::*;

use dequelang::cancellation::{reduce, Strategy};
use dequelang::cdl::{format_deque, member_dq, CharWord};
use dequelang::graphs::{build_ldg, emit_svg, run_graph};
use dequelang::normal_forms::{to_partitioned, to_simple};
use dequelang::run::{decide, Limits, Verdict};
use dequelang::zoo;

#[wasm_bindgen(getter_with_clone)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub accepted: bool,
    /// Plain-text report, one item per line.
    pub report: String,
    /// Rendered graph, empty when there is none.
    pub svg: String,
}

fn failure(report: impl ToString) -> Outcome {
    Outcome {
        accepted: false,
        report: report.to_string(),
        svg: String::new(),
    }
}

/// Membership in DQ_k with the deque contents after each letter.
#[wasm_bindgen]
pub fn check_word(tokens: &str) -> Outcome {
    let w = match CharWord::parse(tokens, None) {
        Ok(w) => w,
        Err(e) => return failure(format!("parse error: {e}")),
    };
    match member_dq(&w) {
        Ok(acc) => {
            let mut report = String::from("accepted\n");
            for (l, d) in w.letters.iter().zip(&acc.trace) {
                report.push_str(&format!("{l}  {}\n", format_deque(d)));
            }
            let svg = build_ldg(&w).map(|g| emit_svg(&g)).unwrap_or_default();
            Outcome {
                accepted: true,
                report,
                svg,
            }
        }
        Err(r) => failure(format!("rejected: {r}")),
    }
}

/// Cancellation trace; `seed` of 0 selects the leftmost strategy.
#[wasm_bindgen]
pub fn reduce_word(tokens: &str, seed: u32) -> Outcome {
    let w = match CharWord::parse(tokens, None) {
        Ok(w) => w,
        Err(e) => return failure(format!("parse error: {e}")),
    };
    let strategy = if seed == 0 {
        Strategy::Leftmost
    } else {
        Strategy::Random(seed as u64)
    };
    let r = reduce(&w, strategy);
    let mut report = format!("{w}\n");
    for s in r.steps() {
        report.push_str(&format!("{} -> {}\n", s.rule, if s.after.letters.is_empty() { "ε".to_string() } else { s.after.to_string() }));
    }
    report.push_str(if r.is_empty() { "reduced to ε\n" } else { "stuck\n" });
    Outcome {
        accepted: r.is_empty(),
        report,
        svg: String::new(),
    }
}

/// Names accepted by [`run_example`], newline separated.
#[wasm_bindgen]
pub fn example_names() -> String {
    zoo::NAMES.join("\n")
}

/// Runs an example machine on `word` and draws the graph of the accepting
/// computation of its simple partitioned form.
#[wasm_bindgen]
pub fn run_example(name: &str, word: &str) -> Outcome {
    let m = match zoo::by_name(name, true, None) {
        Some(Ok(m)) => m,
        Some(Err(e)) => return failure(e),
        None => return failure(format!("unknown machine `{name}`")),
    };
    let input: Vec<char> = word.chars().collect();
    let limits = Limits {
        max_configurations: Some(200_000),
    };
    let trace = match decide(&m, &input, limits) {
        Ok(Verdict::Accept(t)) => t,
        Ok(Verdict::Reject) => return failure("rejected"),
        Ok(Verdict::ResourceExceeded) => return failure("search limit reached"),
        Err(e) => return failure(e),
    };
    let mut report = String::from("accepted\n");
    for line in trace.render(&m) {
        report.push_str(&line);
        report.push('\n');
    }
    let svg = to_partitioned(&to_simple(&m))
        .ok()
        .and_then(|s| run_graph(&s, &input).ok())
        .map(|g| emit_svg(&g))
        .unwrap_or_default();
    Outcome {
        accepted: true,
        report,
        svg,
    }
}
