//! Corpus-driven agreement suite: both levels of every checker, back-and-forth
//! against HHPB, and the memory-encoding lemma oracles over reachable states.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::encoding::{process_auto_concurrent, Encoder};
use crate::equiv::{
    check_back_and_forth_with, check_process_with, check_structure_with, EquivError, Options, Relation,
};
use crate::memenc::{
    check_generated_iso, check_id_causality_iso, check_ids_once_per_memory, check_poset_single_max,
    check_unique_ids, encode_memory,
};
use crate::rccs::{backward_steps, coherent_process_with, forward_steps_from, lift, FoRule, RProcess};
use crate::syntax::{parse_with, print, Label, Name, ParseError, Process, SumMode};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub left: Process,
    pub right: Process,
}

impl Pair {
    pub fn new(left: Process, right: Process) -> Pair {
        Pair { left, right }
    }
}

/// Parses `P1 ; P2` lines; blank lines and `#` comments are skipped. Sums
/// may have arbitrary operands.
pub fn parse_corpus(text: &str) -> Result<Vec<Pair>, CorpusError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((l, r)) = line.split_once(';') else {
            return Err(CorpusError::Syntax {
                line: k + 1,
                message: "expected `P1 ; P2`".into(),
            });
        };
        let p = |s: &str| {
            parse_with(s.trim(), SumMode::General)
                .map_err(|source| CorpusError::Parse { line: k + 1, source })
        };
        out.push(Pair::new(p(l)?, p(r)?));
    }
    Ok(out)
}

/// The worked examples: auto-concurrency, sums of parallel compositions,
/// duplicated branches, the replayed synchronisation and the empty process.
pub fn example_corpus() -> Vec<Pair> {
    let text = "\
a.a | b ; a | a | b
(a|(b+c)) + (a|b) + ((a+c)|b) ; (a|(b+c)) + ((a+c)|b)
a.(b+b) ; a.b + a.b
a.b | c.'a ; a.b | c.'a
0 ; 0
a.b ; a.b
";
    parse_corpus(text).expect("built-in corpus parses")
}

/// Random guarded processes over `{a, b, c}` with a bounded number of prefixes.
pub struct Generator {
    rng: ChaCha8Rng,
    pub max_actions: usize,
    pub restrict_probability: f64,
}

const NAMES: [&str; 3] = ["a", "b", "c"];

impl Generator {
    pub fn new(seed: u64) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_actions: 5,
            restrict_probability: 0.2,
        }
    }

    fn label(&mut self) -> Label {
        let n = NAMES.choose(&mut self.rng).expect("non-empty");
        if self.rng.gen_bool(0.5) {
            Label::input(n)
        } else {
            Label::output(n)
        }
    }

    fn name(&mut self) -> Name {
        Name::new(NAMES.choose(&mut self.rng).expect("non-empty")).expect("valid name")
    }

    /// A process with at most `budget` prefixes.
    pub fn process(&mut self, budget: usize) -> Process {
        if budget == 0 {
            return Process::Nil;
        }
        if self.rng.gen_bool(self.restrict_probability) {
            let inner = self.process(budget);
            let name = self.name();
            return Process::restrict(inner, [name]);
        }
        match self.rng.gen_range(0..4) {
            0 => Process::Nil,
            1 => {
                let l = self.label();
                Process::prefix(l, self.process(budget - 1))
            }
            2 => {
                let k = self.rng.gen_range(0..=budget);
                Process::par(self.process(k), self.process(budget - k))
            }
            _ if budget >= 2 => {
                let k = self.rng.gen_range(0..=budget - 2);
                let (l1, l2) = (self.label(), self.label());
                Process::sum(
                    Process::prefix(l1, self.process(k)),
                    Process::prefix(l2, self.process(budget - 2 - k)),
                )
            }
            _ => {
                let l = self.label();
                Process::prefix(l, Process::Nil)
            }
        }
    }

    /// A small rewrite of `p`, often but not always equivalent.
    pub fn variant(&mut self, p: &Process) -> Process {
        for _ in 0..8 {
            let q = self.rewrite(p);
            if q.action_count() <= self.max_actions && q.is_guarded() {
                return q;
            }
        }
        p.clone()
    }

    fn rewrite(&mut self, p: &Process) -> Process {
        let rule = self.rng.gen_range(0..5);
        match (rule, p) {
            (0, Process::Par(l, r)) => Process::par((**r).clone(), (**l).clone()),
            (0, Process::Sum(l, r)) => Process::sum((**r).clone(), (**l).clone()),
            (1, Process::Prefix(..)) => Process::sum(p.clone(), p.clone()),
            (2, Process::Prefix(l, q)) => Process::prefix(self.label_like(l), (**q).clone()),
            (3, Process::Par(l, r))
                if matches!(**l, Process::Prefix(..)) && matches!(**r, Process::Prefix(..)) =>
            {
                // interleaving instead of concurrency
                let (Process::Prefix(a, p1), Process::Prefix(b, q1)) = (&**l, &**r) else {
                    unreachable!()
                };
                Process::sum(
                    Process::prefix(a.clone(), Process::par((**p1).clone(), (**r).clone())),
                    Process::prefix(b.clone(), Process::par((**l).clone(), (**q1).clone())),
                )
            }
            (_, Process::Prefix(l, q)) => Process::prefix(l.clone(), self.rewrite(q)),
            (_, Process::Par(l, r)) => {
                if self.rng.gen_bool(0.5) {
                    Process::par(self.rewrite(l), (**r).clone())
                } else {
                    Process::par((**l).clone(), self.rewrite(r))
                }
            }
            (_, Process::Sum(l, r)) => {
                if self.rng.gen_bool(0.5) {
                    Process::sum(self.rewrite(l), (**r).clone())
                } else {
                    Process::sum((**l).clone(), self.rewrite(r))
                }
            }
            (_, Process::Restrict(q, names)) => Process::restrict(self.rewrite(q), names.iter().cloned()),
            (_, Process::Nil) => Process::Nil,
        }
    }

    fn label_like(&mut self, l: &Label) -> Label {
        if self.rng.gen_bool(0.5) {
            l.complement().unwrap_or_else(|| l.clone())
        } else {
            self.label()
        }
    }

    /// `count` pairs; about half pair a process with a rewrite of itself.
    pub fn pairs(&mut self, count: usize) -> Vec<Pair> {
        (0..count)
            .map(|_| {
                let n = self.rng.gen_range(0..=self.max_actions);
                let p = self.process(n);
                let q = if self.rng.gen_bool(0.5) {
                    self.variant(&p)
                } else {
                    let m = self.rng.gen_range(0..=self.max_actions);
                    self.process(m)
                };
                Pair::new(p, q)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationOutcome {
    pub relation: Relation,
    pub structure: bool,
    pub process: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairOutcome {
    pub left: String,
    pub right: String,
    pub outcomes: Vec<RelationOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub pairs: usize,
    pub checks: usize,
    pub agreements: usize,
    pub disagreements: Vec<PairOutcome>,
    pub results: Vec<PairOutcome>,
}

impl LevelReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares the process-level checkers with the structure-level ones on the
/// encodings, for all four relations.
pub fn run_level_agreement(corpus: &[Pair], opts: &Options) -> Result<LevelReport, EquivError> {
    let mut enc = Encoder::new();
    let mut report = LevelReport {
        pairs: corpus.len(),
        checks: 0,
        agreements: 0,
        disagreements: Vec::new(),
        results: Vec::new(),
    };
    for pair in corpus {
        let (c1, c2) = (enc.encode(&pair.left), enc.encode(&pair.right));
        let mut outcomes = Vec::new();
        for rel in Relation::ALL {
            let structure = check_structure_with(&c1, &c2, rel, opts)?.holds;
            let process = check_process_with(&pair.left, &pair.right, rel, opts)?.holds;
            report.checks += 1;
            if structure == process {
                report.agreements += 1;
            }
            outcomes.push(RelationOutcome {
                relation: rel,
                structure,
                process,
            });
        }
        let outcome = PairOutcome {
            left: print(&pair.left),
            right: print(&pair.right),
            outcomes,
        };
        if outcome.outcomes.iter().any(|o| o.structure != o.process) {
            report.disagreements.push(outcome.clone());
        }
        report.results.push(outcome);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct BfOutcome {
    pub left: String,
    pub right: String,
    pub back_and_forth: bool,
    pub hhpb: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BfReport {
    pub pairs: usize,
    /// Pairs where neither process has auto-concurrency.
    pub filtered: usize,
    pub agreements: usize,
    pub disagreements: Vec<BfOutcome>,
    /// Auto-concurrent pairs on which the two verdicts differ; recorded only.
    pub auto_concurrent_gaps: Vec<BfOutcome>,
}

impl BfReport {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Back-and-forth bisimulation against HHPB, asserted only for processes
/// without auto-concurrency.
pub fn run_bf_agreement(corpus: &[Pair], opts: &Options) -> Result<BfReport, EquivError> {
    let mut report = BfReport {
        pairs: corpus.len(),
        filtered: 0,
        agreements: 0,
        disagreements: Vec::new(),
        auto_concurrent_gaps: Vec::new(),
    };
    for pair in corpus {
        let back_and_forth = check_back_and_forth_with(&pair.left, &pair.right, opts)?.holds;
        let hhpb = check_process_with(&pair.left, &pair.right, Relation::Hhpb, opts)?.holds;
        let outcome = BfOutcome {
            left: print(&pair.left),
            right: print(&pair.right),
            back_and_forth,
            hhpb,
        };
        let auto =
            process_auto_concurrent(&pair.left).is_some() || process_auto_concurrent(&pair.right).is_some();
        if auto {
            if back_and_forth != hhpb {
                report.auto_concurrent_gaps.push(outcome);
            }
            continue;
        }
        report.filtered += 1;
        if back_and_forth == hhpb {
            report.agreements += 1;
        } else {
            report.disagreements.push(outcome);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaTally {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    /// First few failing states, with the reason.
    pub counterexamples: Vec<String>,
}

impl LemmaTally {
    fn new(name: &str) -> LemmaTally {
        LemmaTally {
            name: name.into(),
            ..LemmaTally::default()
        }
    }

    fn record(&mut self, state: &RProcess, outcome: Result<(), String>) {
        self.checked += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(why) if self.counterexamples.len() < 5 => {
                self.counterexamples.push(format!("{state}: {why}"))
            }
            Err(_) => {}
        }
    }

    pub fn clean(&self) -> bool {
        self.checked == self.passed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub processes: usize,
    pub depth: usize,
    pub states: usize,
    pub lemmas: Vec<LemmaTally>,
    /// Coherence preservation under the alternative forking rule; informational.
    pub variant_coherence: LemmaTally,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.lemmas.iter().all(LemmaTally::clean)
    }
}

/// Every state reachable within `depth` forward steps, in discovery order.
fn reachable(root: &RProcess, depth: usize, id_base: u32) -> Vec<RProcess> {
    let mut seen: HashSet<RProcess> = HashSet::from([root.clone()]);
    let mut order = vec![root.clone()];
    let mut queue = VecDeque::from([(root.clone(), 0)]);
    while let Some((r, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for step in forward_steps_from(&r, id_base) {
            if seen.insert(step.target.clone()) {
                order.push(step.target.clone());
                queue.push_back((step.target, d + 1));
            }
        }
    }
    order
}

fn preserves_coherence(r: &RProcess, rule: FoRule, id_base: u32) -> Result<(), String> {
    if !coherent_process_with(r, rule) {
        return Ok(());
    }
    let steps = forward_steps_from(r, id_base)
        .into_iter()
        .chain(backward_steps(r));
    for step in steps {
        if !coherent_process_with(&step.target, rule) {
            return Err(format!("{} leads to incoherent {}", step.transition, step.target));
        }
    }
    Ok(())
}

/// Applies the memory-encoding oracles to every state within `depth` steps of
/// each corpus process.
pub fn run_lemma_suite(processes: &[Process], depth: usize, opts: &Options) -> LemmaReport {
    let names = [
        "coherence preservation",
        "identifiers occur once per memory",
        "single maximal configuration",
        "generated configuration",
        "global identifier injectivity",
        "identifier causality",
    ];
    let mut lemmas: Vec<LemmaTally> = names.iter().map(|n| LemmaTally::new(n)).collect();
    let mut variant = LemmaTally::new("coherence preservation (variant forking rule)");
    let mut states = 0;
    for p in processes {
        for r in reachable(&lift(p), depth, opts.id_base) {
            states += 1;
            let d = encode_memory(&r);
            lemmas[0].record(&r, preserves_coherence(&r, FoRule::Printed, opts.id_base));
            lemmas[1].record(&r, check_ids_once_per_memory(&r));
            lemmas[2].record(&r, check_poset_single_max(&d));
            lemmas[3].record(&r, check_generated_iso(&r));
            lemmas[4].record(&r, check_unique_ids(&d));
            lemmas[5].record(&r, check_id_causality_iso(&r));
            variant.record(&r, preserves_coherence(&r, FoRule::Variant, opts.id_base));
        }
    }
    LemmaReport {
        processes: processes.len(),
        depth,
        states,
        lemmas,
        variant_coherence: variant,
    }
}

/// Distinct processes of a corpus, in first-occurrence order.
pub fn corpus_processes(corpus: &[Pair]) -> Vec<Process> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pair in corpus {
        for p in [&pair.left, &pair.right] {
            if seen.insert(p.clone()) {
                out.push(p.clone());
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub corpus: String,
    pub levels: LevelReport,
    pub back_and_forth: BfReport,
    pub lemmas: LemmaReport,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.levels.all_agree() && self.back_and_forth.all_agree() && self.lemmas.all_pass()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let t2 = &self.levels;
        let t1 = &self.back_and_forth;
        writeln!(out, "corpus: {}", self.corpus).ok();
        writeln!(out, "{:<48} {:>10} {:>10}", "check", "agree", "total").ok();
        writeln!(
            out,
            "{:<48} {:>10} {:>10}",
            "process level vs structure level", t2.agreements, t2.checks
        )
        .ok();
        writeln!(
            out,
            "{:<48} {:>10} {:>10}",
            "back-and-forth vs hhpb (no auto-concurrency)", t1.agreements, t1.filtered
        )
        .ok();
        writeln!(
            out,
            "{:<48} {:>10}",
            "auto-concurrent gaps recorded",
            t1.auto_concurrent_gaps.len()
        )
        .ok();
        let l = &self.lemmas;
        writeln!(out, "lemma oracles over {} states (depth {}):", l.states, l.depth).ok();
        for t in l.lemmas.iter().chain([&l.variant_coherence]) {
            writeln!(out, "  {:<46} {:>10} {:>10}", t.name, t.passed, t.checked).ok();
        }
        for d in &t2.disagreements {
            writeln!(out, "disagreement: {} vs {}", d.left, d.right).ok();
        }
        for d in &t1.disagreements {
            writeln!(out, "back-and-forth mismatch: {} vs {}", d.left, d.right).ok();
        }
        for t in &l.lemmas {
            for c in &t.counterexamples {
                writeln!(out, "{} fails at {c}", t.name).ok();
            }
        }
        out
    }
}

pub fn run_all(label: &str, corpus: &[Pair], depth: usize, opts: &Options) -> Result<Report, EquivError> {
    Ok(Report {
        corpus: label.into(),
        levels: run_level_agreement(corpus, opts)?,
        back_and_forth: run_bf_agreement(corpus, opts)?,
        lemmas: run_lemma_suite(&corpus_processes(corpus), depth, opts),
    })
}
