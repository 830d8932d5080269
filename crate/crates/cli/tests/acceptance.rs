//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use ccs_hhpb::conf::{self, ConfStructure, Event, ProductLabel};
use ccs_hhpb::crosscheck::{self, Generator, Pair};
use ccs_hhpb::encoding::encode;
use ccs_hhpb::equiv::{check_back_and_forth, check_process, check_structure, Relation};
use ccs_hhpb::ident::Ident;
use ccs_hhpb::memenc::{address, encode_memory};
use ccs_hhpb::rccs::{lift, parse_trace, replay, Direction};
use ccs_hhpb::syntax::{parse, parse_with, Label, Process, SumMode};

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.pass = false;
            self.notes.push(format!("failed: {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn p(s: &str) -> Process {
    parse_with(s, SumMode::General).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ccs-hhpb"))
}

/// A structure written out by hand: labels per event and configurations as index lists.
fn figure(labels: &[&str], configs: &[&[usize]]) -> ConfStructure {
    let events = (0..labels.len() as u32).map(Event::Atom).collect();
    let labels = labels
        .iter()
        .map(|l| ProductLabel::Single(Label::parse(l).unwrap()))
        .collect();
    ConfStructure::new(
        events,
        labels,
        configs.iter().map(|x| x.iter().copied().collect()),
    )
    .unwrap()
}

fn criterion_1(o: &mut Outcome) {
    let figures = [
        ("a + a", figure(&["a", "a"], &[&[], &[0], &[1]])),
        ("a | a", figure(&["a", "a"], &[&[], &[0], &[1], &[0, 1]])),
        (
            "'a | a.b",
            figure(
                &["'a", "a", "b", "tau"],
                &[&[], &[0], &[1], &[3], &[0, 1], &[1, 2], &[2, 3], &[0, 1, 2]],
            ),
        ),
        (
            "a.a | b",
            figure(&["a", "a", "b"], &[&[], &[0], &[2], &[0, 1], &[0, 2], &[0, 1, 2]]),
        ),
        (
            "a | a | b",
            figure(
                &["a", "a", "b"],
                &[&[], &[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]],
            ),
        ),
    ];
    for (text, expected) in figures {
        let start = Instant::now();
        let c = encode(&p(text));
        let took = start.elapsed();
        o.require(
            conf::iso(&c, &expected).is_some(),
            format!("{text} matches its figure"),
        );
        o.require(
            took < Duration::from_secs(1),
            format!("{text} encodes within 1 s"),
        );
        o.note(format!("{text}: {} configurations", c.configs().len()));
    }
}

fn criterion_2(o: &mut Outcome) {
    let (l, r) = (p("a.a | b"), p("a | a | b"));
    let (c1, c2) = (encode(&l), encode(&r));
    let hpb_s = check_structure(&c1, &c2, Relation::Hpb).unwrap().holds;
    let hpb_p = check_process(&l, &r, Relation::Hpb).unwrap().holds;
    let hh_s = check_structure(&c1, &c2, Relation::Hhpb).unwrap();
    let hh_p = check_process(&l, &r, Relation::Hhpb).unwrap();
    o.note(format!(
        "hpb: structure {hpb_s}, process {hpb_p}; hhpb: structure {}, process {}",
        hh_s.holds, hh_p.holds
    ));
    o.require(hpb_s && hpb_p, "HPB holds at both levels");
    o.require(!hh_s.holds && !hh_p.holds, "HHPB fails at both levels");
    let undo = hh_s
        .play
        .iter()
        .chain(&hh_p.play)
        .any(|s| s.attack.direction == Direction::Backward && s.attack.label == "a");
    if let Some(last) = hh_s.play.last() {
        o.note(format!("structure witness ends with: {}", last.attack));
    }
    o.require(undo, "witness undoes an a-event");
}

fn sums_pair() -> (Process, Process) {
    (p("(a|(b+c)) + (a|b) + ((a+c)|b)"), p("(a|(b+c)) + ((a+c)|b)"))
}

fn criterion_3(o: &mut Outcome) {
    let start = Instant::now();
    let (l, r) = sums_pair();
    let (c1, c2) = (encode(&l), encode(&r));
    for (rel, expected) in [(Relation::Hpb, true), (Relation::Hhpb, false)] {
        let s = check_structure(&c1, &c2, rel).unwrap();
        let q = check_process(&l, &r, rel).unwrap();
        o.note(format!(
            "{rel}: structure {} ({} triples), process {} ({} triples)",
            s.holds, s.universe, q.holds, q.universe
        ));
        o.require(
            s.holds == expected && q.holds == expected,
            format!("{rel} is {expected} at both levels"),
        );
    }
    o.require(start.elapsed() < Duration::from_secs(60), "within 60 s");
}

fn criterion_4(o: &mut Outcome) {
    let start = Instant::now();
    let (l, r) = (p("a.(b+b)"), p("a.b + a.b"));
    let s = check_structure(&encode(&l), &encode(&r), Relation::Hhpb)
        .unwrap()
        .holds;
    let q = check_process(&l, &r, Relation::Hhpb).unwrap().holds;
    o.require(s && q, "HHPB at both levels");
    o.require(start.elapsed() < Duration::from_secs(5), "within 5 s");
}

fn criterion_5(o: &mut Outcome) {
    let start = Instant::now();
    let (l, r) = (p("a.a | b"), p("a | a | b"));
    o.require(
        check_back_and_forth(&l, &r).unwrap().holds,
        "back-and-forth holds on the auto-concurrent pair",
    );
    o.require(
        !check_process(&l, &r, Relation::Hhpb).unwrap().holds,
        "HHPB fails on the auto-concurrent pair",
    );
    let corpus = Generator::new(SEED).pairs(200);
    let report = crosscheck::run_bf_agreement(&corpus, &Default::default()).unwrap();
    o.note(format!(
        "{} of {} pairs without auto-concurrency agree; {} auto-concurrent gaps recorded",
        report.agreements,
        report.filtered,
        report.auto_concurrent_gaps.len()
    ));
    o.require(report.filtered >= 100, "at least 100 filtered pairs");
    o.require(report.all_agree(), "full agreement");
    o.require(start.elapsed() < Duration::from_secs(600), "within 10 min");
}

fn criterion_6(o: &mut Outcome) {
    let start = Instant::now();
    let trace = "fwd 1:c; fwd 2:tau; fwd 3:b";
    let out = bin()
        .args(["simulate", "a.b|c.'a", "--trace", trace])
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let last = stdout.lines().last().unwrap_or("");
    let expected = "(<3,b,0>.<2,a,0>.<^>.<> |> 0) | (<2,'a,0>.<1,c,0>.<^>.<> |> 0)";
    o.require(
        out.status.code() == Some(0) && last == expected,
        format!("final state `{last}`"),
    );

    let states = replay(&lift(&p("a.b|c.'a")), &parse_trace(trace).unwrap()).unwrap();
    let last_state = states.last().unwrap();
    let d = encode_memory(last_state);
    let mut ids: Vec<String> = d.ids().iter().map(Ident::to_string).collect();
    ids.sort();
    let sizes: Vec<usize> = d.base().configs().iter().map(|x| x.len()).collect();
    o.require(
        sizes == [0, 1, 2, 3] && ids == ["1", "2", "3"],
        "memory encoding is a 4-chain with ids 1, 2, 3",
    );

    let a = address(last_state).unwrap();
    o.require(
        a.structure.configs().len() == 11,
        "origin structure has 11 configurations",
    );
    let shape: Vec<(String, bool, bool)> = a
        .config
        .iter()
        .map(|e| match &a.structure.events()[e] {
            Event::Pair(l, r) => (a.structure.label(e).to_string(), l.is_some(), r.is_some()),
            _ => ("?".into(), false, false),
        })
        .collect();
    let mut shape = shape;
    shape.sort();
    let want = vec![
        ("b".to_string(), true, false),
        ("c".to_string(), false, true),
        ("tau".to_string(), true, true),
    ];
    o.require(
        shape == want,
        format!("address is {{(*,c), (a,'a), (b,*)}}, got {shape:?}"),
    );
    let dot = bin()
        .args(["address", "a.b|c.'a", "--trace", trace, "--dot"])
        .output()
        .unwrap();
    let dot = String::from_utf8(dot.stdout).unwrap();
    o.require(
        dot.matches("lightgray").count() == 4,
        "DOT fills the four configurations of the address path",
    );
    o.require(start.elapsed() < Duration::from_secs(1), "within 1 s");
}

fn full_corpus() -> Vec<Pair> {
    let mut corpus = crosscheck::example_corpus();
    corpus.extend(Generator::new(SEED).pairs(200));
    corpus
}

fn criterion_7(o: &mut Outcome) {
    let start = Instant::now();
    let report = crosscheck::run_level_agreement(&full_corpus(), &Default::default()).unwrap();
    o.note(format!(
        "{} of {} checks agree over {} pairs",
        report.agreements, report.checks, report.pairs
    ));
    o.require(report.all_agree(), "process and structure levels agree");
    o.require(start.elapsed() < Duration::from_secs(900), "within 15 min");
}

fn criterion_8(o: &mut Outcome) {
    let start = Instant::now();
    let processes = crosscheck::corpus_processes(&full_corpus());
    let report = crosscheck::run_lemma_suite(&processes, 4, &Default::default());
    for t in &report.lemmas {
        o.note(format!("{}: {}/{}", t.name, t.passed, t.checked));
        o.require(t.clean(), format!("{} has no counterexample", t.name));
        if let Some(c) = t.counterexamples.first() {
            o.note(format!("first counterexample: {c}"));
        }
    }
    let v = &report.variant_coherence;
    o.note(format!("(informational) {}: {}/{}", v.name, v.passed, v.checked));
    o.require(start.elapsed() < Duration::from_secs(600), "within 10 min");
}

fn small_structures() -> Vec<(String, ConfStructure)> {
    let mut texts: Vec<String> = [
        "0",
        "a",
        "a + b",
        "a.b",
        "a | b",
        "a.a | b",
        "a | a | b",
        "'a | a.b",
        "a.(b+b)",
        "a.b + a.b",
        "a.b + b.a",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut g = Generator::new(SEED + 1);
    for _ in 0..40 {
        texts.push(g.process(4).to_string());
    }
    let mut out: Vec<(String, ConfStructure)> = Vec::new();
    for t in texts {
        let c = encode(&parse(&t).unwrap());
        if c.event_count() <= 6 && !out.iter().any(|(_, d)| conf::iso(&c, d).is_some()) {
            out.push((t, c));
        }
    }
    out
}

fn criterion_9(o: &mut Outcome) {
    let start = Instant::now();
    let structures = small_structures();
    let mut products = 0;
    let mut checks = 0;
    for (t1, c1) in &structures {
        for (t2, c2) in &structures {
            if c1.event_count() + c2.event_count() <= 6 {
                products += 1;
                o.require(
                    common::naive_product(c1, c2) == common::library_product(c1, c2),
                    format!("product of {t1} and {t2}"),
                );
            }
            if c1.event_count() > 4 || c2.event_count() > 4 || c1.event_count() != c2.event_count() {
                continue;
            }
            for rel in Relation::ALL {
                checks += 1;
                let v = check_structure(c1, c2, rel).unwrap();
                o.require(
                    v.holds == common::naive_check(c1, c2, rel),
                    format!("{rel} on {t1} / {t2}"),
                );
                if v.holds {
                    let ok = common::validate_structure_relation(c1, c2, rel, &v.relation);
                    o.require(ok.is_ok(), format!("{rel} witness on {t1} / {t2}: {ok:?}"));
                }
            }
        }
    }
    let (c1, c2) = (encode(&p("a.a | b")), encode(&p("a | a | b")));
    let fix = check_structure(&c1, &c2, Relation::WfHhpb).unwrap().holds;
    match common::enumerate_relations(&c1, &c2, Relation::WfHhpb, 20) {
        Some(all) => o.require(
            all == fix,
            "wfhhpb on the auto-concurrent pair matches relation enumeration",
        ),
        None => o.require(false, "relation enumeration feasible"),
    }
    o.note(format!(
        "{} structures, {products} products, {checks} fixpoint checks",
        structures.len()
    ));
    o.require(start.elapsed() < Duration::from_secs(300), "within 5 min");
}

fn criterion_10(o: &mut Outcome) {
    let run = || {
        bin()
            .args([
                "crosscheck",
                "--corpus",
                "examples",
                "--corpus",
                &format!("random:{SEED}:200"),
                "--depth",
                "4",
                "--json",
            ])
            .output()
            .unwrap()
            .stdout
    };
    let (a, b) = (run(), run());
    o.require(!a.is_empty() && a == b, "byte-identical JSON reports");
    let lib = || {
        crosscheck::run_all("x", &full_corpus(), 2, &Default::default())
            .unwrap()
            .to_json()
    };
    o.require(lib() == lib(), "library reports are identical");
}

type Criterion = (&'static str, fn(&mut Outcome));

fn main() {
    let criteria: [Criterion; 10] = [
        ("figure reproduction", criterion_1),
        ("auto-concurrent pair verdicts", criterion_2),
        ("sums of parallel compositions", criterion_3),
        ("duplicated branch", criterion_4),
        ("back-and-forth boundary", criterion_5),
        ("replay, memory encoding and address", criterion_6),
        ("process level agrees with structure level", criterion_7),
        ("lemma oracles", criterion_8),
        ("naive oracles", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let mut o = Outcome::new();
        let start = Instant::now();
        run(&mut o);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status} {name} ({:.2?})",
            k + 1,
            start.elapsed()
        );
        for n in &o.notes {
            println!("    {n}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
