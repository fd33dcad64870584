use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dequelang::cancellation::{reduce, Reduction, Strategy};
use dequelang::cdl::{self, format_deque, member_dq, CharWord};
use dequelang::characterization::{characterize, verify_characterization};
use dequelang::crosscheck::crosscheck;
use dequelang::decomposition::decompose;
use dequelang::format::{parse_da, print_da};
use dequelang::graphs::{build_ldg, emit_dot, emit_svg, run_graph, LabeledDequeGraph};
use dequelang::normal_forms::{eliminate_emptiness_tests, to_partitioned, to_simple, to_stateless};
use dequelang::run::{decide, Limits, Verdict};
use dequelang::{zoo, DequeAutomaton};

#[derive(Parser)]
#[command(name = "dequelang", version, about = "Deque automata and characteristic deque languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Svg,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Simple,
    Partitioned,
    Stateless,
    NoEmptyTest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Printed,
    Corrected,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an automaton accepts a word.
    Run {
        file: PathBuf,
        /// Input word; `-` or an empty string is the empty word.
        word: String,
        #[arg(long)]
        trace: bool,
        /// Stop after exploring this many configurations.
        #[arg(long)]
        max_configs: Option<usize>,
    },
    /// Membership in DQ_k.
    MemberCdl {
        #[arg(short)]
        k: Option<u32>,
        tokens: String,
        #[arg(long)]
        trace: bool,
    },
    /// Reduce a characteristic word with the cancellation rules.
    Reduce {
        tokens: String,
        #[arg(short)]
        k: Option<u32>,
        /// leftmost, random:SEED or exhaustive
        #[arg(long, default_value = "leftmost")]
        strategy: String,
        #[arg(long)]
        trace: bool,
    },
    /// Row projections and the three sub-languages.
    Decompose {
        tokens: String,
        #[arg(short)]
        k: Option<u32>,
    },
    /// Labeled deque graph of a characteristic word.
    Graph {
        tokens: String,
        #[arg(short)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: GraphFormat,
    },
    /// Graph of an accepting computation; the machine is made simple and
    /// partitioned first when needed.
    GraphRun {
        file: PathBuf,
        word: String,
        #[arg(long, value_enum, default_value = "text")]
        format: GraphFormat,
    },
    /// All members of DQ_k up to length n.
    Enumerate {
        #[arg(short)]
        k: u32,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Image of a word under the reduction to Δ_2.
    Rho {
        #[arg(short)]
        k: Option<u32>,
        tokens: String,
    },
    /// Rewrite an automaton into a normal form.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum)]
        form: Form,
    },
    /// Print an example machine.
    Zoo {
        /// One of the names printed by `--list`.
        name: Option<String>,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: Variant,
        /// Replication schema over {D, R} for `replica-language`.
        #[arg(long)]
        schema: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Build the characterization of a simple partitioned automaton.
    Characterize {
        file: PathBuf,
        /// Print the Θ, g, R and h tables.
        #[arg(long)]
        emit: bool,
    },
    /// Check the characterization against the automaton up to length n.
    VerifyCharacterization {
        file: PathBuf,
        #[arg(short)]
        n: usize,
    },
    /// Compare the four DQ_k deciders on every word up to length n.
    Crosscheck {
        #[arg(short)]
        k: u32,
        #[arg(short)]
        n: usize,
    },
}

struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type Outcome = Result<bool, Fail>;

fn word_arg(tokens: &str, k: Option<u32>) -> Result<CharWord, Fail> {
    Ok(CharWord::parse(tokens, k)?)
}

fn load(path: &PathBuf) -> Result<DequeAutomaton, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))?;
    parse_da(&text).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

/// Brings a machine into simple partitioned form, optionally removing
/// emptiness tests first.
fn prepare(mut m: DequeAutomaton, drop_tests: bool) -> Result<DequeAutomaton, Fail> {
    if drop_tests && m.has_guarded_moves() {
        m = eliminate_emptiness_tests(&m);
    }
    if !m.is_simple() {
        m = to_simple(&m);
    }
    if !m.is_partitioned() {
        m = to_partitioned(&m)?;
    }
    Ok(m)
}

fn input_word(w: &str) -> Vec<char> {
    if w == "-" || w == "ε" {
        vec![]
    } else {
        w.chars().collect()
    }
}

fn print_graph(g: &LabeledDequeGraph, format: GraphFormat) {
    match format {
        GraphFormat::Dot => print!("{}", emit_dot(g)),
        GraphFormat::Svg => print!("{}", emit_svg(g)),
        GraphFormat::Text => {
            let names: Vec<String> = g.vertices.iter().map(|v| format!("{}:{}", v.name(), v.label)).collect();
            println!("vertices: {}", names.join(" "));
            for e in &g.edges {
                let caption = match &e.symbol {
                    Some(s) => format!("{} ({})", s, e.class),
                    None => format!("{}{}", e.class, e.index),
                };
                println!(
                    "edge {} -> {} {}",
                    g.vertices[e.src - 1].name(),
                    g.vertices[e.dst - 1].name(),
                    caption
                );
            }
        }
    }
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Run {
            file,
            word,
            trace,
            max_configs,
        } => {
            let m = load(&file)?;
            let w = input_word(&word);
            let limits = Limits {
                max_configurations: max_configs,
            };
            match decide(&m, &w, limits)? {
                Verdict::Accept(t) => {
                    println!("accept");
                    if trace {
                        for line in t.render(&m) {
                            println!("{line}");
                        }
                    }
                    Ok(true)
                }
                Verdict::Reject => {
                    println!("reject");
                    Ok(false)
                }
                Verdict::ResourceExceeded => Err(Fail("resource limit exceeded".into())),
            }
        }
        Command::MemberCdl { k, tokens, trace } => {
            let w = word_arg(&tokens, k)?;
            match member_dq(&w) {
                Ok(acc) => {
                    println!("accept");
                    if trace {
                        for (l, d) in w.letters.iter().zip(&acc.trace) {
                            println!("  {l:<6} {}", format_deque(d));
                        }
                    }
                    Ok(true)
                }
                Err(r) => {
                    println!("reject: {r}");
                    Ok(false)
                }
            }
        }
        Command::Reduce {
            tokens,
            k,
            strategy,
            trace,
        } => {
            let w = word_arg(&tokens, k)?;
            let strategy: Strategy = strategy.parse().map_err(Fail)?;
            let r = reduce(&w, strategy);
            if trace {
                for s in r.steps() {
                    println!(
                        "{} {}/{}: {} => {}",
                        s.rule,
                        s.open_pos + 1,
                        s.close_pos + 1,
                        s.before,
                        s.after
                    );
                }
            }
            match r {
                Reduction::ReducedToEmpty(steps) => {
                    println!("reduced to ε in {} steps", steps.len());
                    Ok(true)
                }
                Reduction::Stuck { residual, steps } => {
                    println!("stuck after {} steps: {}", steps.len(), residual);
                    Ok(false)
                }
            }
        }
        Command::Decompose { tokens, k } => {
            let w = word_arg(&tokens, k)?;
            let r = decompose(&w);
            println!("front row: {}", r.projection.front_row);
            println!("tail row: {}", r.projection.tail_row);
            println!("queue residue: {}", r.projection.queue_word);
            println!("H1: {}", r.h1);
            println!("H2: {}", r.h2);
            println!("H3: {}", r.h3);
            println!("member: {}", r.member());
            Ok(r.member())
        }
        Command::Graph { tokens, k, format } => {
            let w = word_arg(&tokens, k)?;
            match build_ldg(&w) {
                Ok(g) => {
                    print_graph(&g, format);
                    Ok(true)
                }
                Err(r) => {
                    println!("reject: {r}");
                    Ok(false)
                }
            }
        }
        Command::GraphRun { file, word, format } => {
            let m = prepare(load(&file)?, false)?;
            match run_graph(&m, &input_word(&word)) {
                Ok(g) => {
                    print_graph(&g, format);
                    Ok(true)
                }
                Err(dequelang::graphs::RunGraphError::Reject) => {
                    println!("reject");
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Enumerate { k, n, count_only } => {
            let e = cdl::enumerate_dq(k, n)?;
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            let listing = e.words.iter().filter(|_| !count_only).map(|w| w.to_string());
            let counts = e.counts.iter().enumerate().map(|(len, c)| format!("length {len}: {c}"));
            for line in listing.chain(counts) {
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            let _ = out.flush();
            Ok(true)
        }
        Command::Rho { k, tokens } => {
            let w = word_arg(&tokens, k)?;
            println!("{}", cdl::rho_reduce(&w));
            Ok(true)
        }
        Command::Normalize { file, form } => {
            let m = load(&file)?;
            let out = match form {
                Form::Simple => to_simple(&m),
                Form::Partitioned => to_partitioned(&to_simple(&m))?,
                Form::Stateless => to_stateless(&m),
                Form::NoEmptyTest => eliminate_emptiness_tests(&m),
            };
            print!("{}", print_da(&out));
            Ok(true)
        }
        Command::Zoo {
            name,
            variant,
            schema,
            list,
        } => {
            if list {
                for n in zoo::NAMES {
                    println!("{n}");
                }
                return Ok(true);
            }
            let name = name.ok_or_else(|| Fail("missing machine name (see --list)".into()))?;
            let corrected = matches!(variant, Variant::Corrected);
            let m = zoo::by_name(&name, corrected, schema.as_deref())
                .ok_or_else(|| Fail(format!("unknown machine `{name}` (see --list)")))??;
            print!("{}", print_da(&m));
            Ok(true)
        }
        Command::Characterize { file, emit } => {
            let m = prepare(load(&file)?, true)?;
            let t = characterize(&m)?;
            if emit {
                print!("{}", t.render(&m));
            } else {
                println!(
                    "theta: {} letters, k = {}, p = {}, {} pairs",
                    t.theta.len(),
                    t.k,
                    t.p,
                    t.pairs.len()
                );
            }
            Ok(true)
        }
        Command::VerifyCharacterization { file, n } => {
            let m = prepare(load(&file)?, true)?;
            let t = characterize(&m)?;
            let r = verify_characterization(&m, &t, n);
            println!("words in L(M) up to length {n}: {}", r.expected.len());
            println!("words generated: {}", r.generated.len());
            println!("theta words checked: {}", r.theta_words);
            println!("erasing violations: {}", r.erasing_violations);
            println!("rho disagreements: {} of {}", r.rho_disagreements, r.rho_checked);
            for w in &r.missing {
                println!("missing: {}", if w.is_empty() { "ε" } else { w });
            }
            for w in &r.extra {
                println!("extra: {}", if w.is_empty() { "ε" } else { w });
            }
            println!("{}", if r.holds() { "holds" } else { "fails" });
            Ok(r.holds())
        }
        Command::Crosscheck { k, n } => {
            let r = crosscheck(k, n);
            for (len, c) in r.members.iter().enumerate() {
                println!("length {len}: {c}");
            }
            println!("words checked: {}", r.words_checked);
            match &r.first_disagreement {
                None => {
                    println!("all four deciders agree");
                    Ok(true)
                }
                Some((w, v)) => {
                    println!(
                        "disagreement on {w}: recognizer={} cancellation={} decomposition={} graph={}",
                        v.recognizer, v.cancellation, v.decomposition, v.graph
                    );
                    println!("disagreements: {}", r.disagreements);
                    Ok(false)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
