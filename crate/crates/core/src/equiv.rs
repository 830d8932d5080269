//! History-preserving bisimulations and their hereditary and weak-function
//! variants, on configuration structures and on CCS through reversible
//! memories, plus back-and-forth bisimulation of reversible processes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::bits::EventSet;
use crate::conf::{self, Causality, ConfStructure};
use crate::game::{self, Arena, Round, TooLarge};
use crate::ident::Ident;
use crate::memenc::encode_memory;
use crate::rccs::{explore, lift, Direction, RProcess, RccsError, StateGraph, Transition};
use crate::syntax::Process;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Hpb,
    Hhpb,
    WfHpb,
    WfHhpb,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Hpb, Relation::Hhpb, Relation::WfHpb, Relation::WfHhpb];

    pub fn hereditary(self) -> bool {
        matches!(self, Relation::Hhpb | Relation::WfHhpb)
    }

    pub fn weak_function(self) -> bool {
        matches!(self, Relation::WfHpb | Relation::WfHhpb)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Hpb => "hpb",
            Relation::Hhpb => "hhpb",
            Relation::WfHpb => "wfhpb",
            Relation::WfHhpb => "wfhhpb",
        })
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Relation, String> {
        match s {
            "hpb" => Ok(Relation::Hpb),
            "hhpb" => Ok(Relation::Hhpb),
            "wfhpb" => Ok(Relation::WfHpb),
            "wfhhpb" => Ok(Relation::WfHhpb),
            _ => Err(format!(
                "unknown relation `{s}` (expected hpb, hhpb, wfhpb or wfhhpb)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("triple universe exceeds the limit of {0} (raise CCS_HHPB_MAX_TRIPLES)")]
    TooManyTriples(usize),
    #[error(transparent)]
    Rccs(#[from] RccsError),
}

impl From<TooLarge> for EquivError {
    fn from(e: TooLarge) -> EquivError {
        EquivError::TooManyTriples(e.0)
    }
}

/// Resource limits and the identifier policy used for process-level checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub max_triples: usize,
    /// Fresh identifiers are the smallest unused ones at or above this base.
    pub id_base: u32,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            max_triples: 1_000_000,
            id_base: 1,
        }
    }
}

impl Options {
    /// Defaults, with the triple limit taken from `CCS_HHPB_MAX_TRIPLES` when set.
    pub fn from_env() -> Options {
        let mut o = Options::default();
        if let Some(n) = std::env::var("CCS_HHPB_MAX_TRIPLES")
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            o.max_triples = n;
        }
        o
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Left,
    Right,
}

/// An attacker move: one side adds or removes an event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub party: Party,
    pub direction: Direction,
    pub label: String,
    /// The event (structures) or identifier (processes) involved.
    pub event: String,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.party {
            Party::Left => "left",
            Party::Right => "right",
        };
        let verb = match self.direction {
            Direction::Forward => "performs",
            Direction::Backward => "undoes",
        };
        write!(f, "{who} {verb} {} ({})", self.label, self.event)
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// One round of a refutation, rendered for people.
#[derive(Clone, Debug, Serialize)]
pub struct PlayStep {
    pub position: String,
    pub attack: Move,
    pub reply: Option<String>,
}

/// Outcome of a check. On success `relation` is a bisimulation containing
/// the initial triple; on failure `play` is a shortest winning attack.
#[derive(Clone, Debug)]
pub struct Verdict<T> {
    pub holds: bool,
    pub universe: usize,
    pub relation: Vec<T>,
    pub play: Vec<PlayStep>,
}

impl<T> Verdict<T> {
    /// Human-readable account of the refutation.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        for (k, step) in self.play.iter().enumerate() {
            out.push_str(&format!("{}. at {}: {}", k + 1, step.position, step.attack));
            match &step.reply {
                Some(r) => out.push_str(&format!(", answered by moving to {r}\n")),
                None => out.push_str(", which the other side cannot match\n"),
            }
        }
        out
    }
}

fn build_verdict<N: Clone, T>(
    solved: game::Solved<N, Move>,
    describe: impl Fn(&N) -> String,
    export: impl Fn(&N) -> T,
) -> Verdict<T> {
    let holds = solved.root_survives();
    let relation = solved.surviving_relation().iter().map(&export).collect();
    let play = solved
        .refutation()
        .into_iter()
        .map(|Round { from, attack, reply }| PlayStep {
            position: describe(&from),
            attack,
            reply: reply.as_ref().map(&describe),
        })
        .collect();
    Verdict {
        holds,
        universe: solved.nodes.len(),
        relation,
        play,
    }
}

/// Sorted pairs `(left, right)` forming a bijection.
pub type Pairs = Vec<(u32, u32)>;

fn with_pair(f: &Pairs, a: u32, b: u32) -> Pairs {
    let mut g = f.clone();
    g.push((a, b));
    g.sort_unstable();
    g
}

fn without_left(f: &Pairs, a: u32) -> Pairs {
    f.iter().copied().filter(|&(x, _)| x != a).collect()
}

fn image(f: &Pairs, a: u32) -> Option<u32> {
    f.iter().find(|&&(x, _)| x == a).map(|&(_, y)| y)
}

/// A triple of two configurations and a bijection between them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructTriple {
    pub left: EventSet,
    pub right: EventSet,
    pub map: Pairs,
}

/// One-step extensions and retractions of every configuration.
struct Covers {
    forward: Vec<Vec<(usize, usize)>>,
    backward: Vec<Vec<(usize, usize)>>,
}

impl Covers {
    fn of(c: &ConfStructure) -> Covers {
        let mut forward = vec![Vec::new(); c.configs().len()];
        let mut backward = vec![Vec::new(); c.configs().len()];
        for (k, x) in c.configs().iter().enumerate() {
            for e in 0..c.event_count() {
                if x.contains(e) {
                    if let Some(y) = c.config_index(&x.without(e)) {
                        backward[k].push((e, y));
                    }
                } else if let Some(y) = c.config_index(&x.with(e)) {
                    forward[k].push((e, y));
                }
            }
        }
        Covers { forward, backward }
    }
}

struct Side<'a> {
    c: &'a ConfStructure,
    covers: Covers,
    order: Vec<Option<Rc<Causality>>>,
}

impl<'a> Side<'a> {
    fn new(c: &'a ConfStructure) -> Side<'a> {
        Side {
            c,
            covers: Covers::of(c),
            order: vec![None; c.configs().len()],
        }
    }

    fn order(&mut self, x: usize) -> Rc<Causality> {
        if self.order[x].is_none() {
            let o = conf::causality(self.c, &self.c.configs()[x]).expect("index of a configuration");
            self.order[x] = Some(Rc::new(o));
        }
        Rc::clone(self.order[x].as_ref().expect("just filled"))
    }
}

/// Label-preserving bijection that reflects and preserves causality.
fn order_iso(c1: &ConfStructure, o1: &Causality, c2: &ConfStructure, o2: &Causality, g: &Pairs) -> bool {
    if g.iter()
        .any(|&(a, b)| c1.label(a as usize) != c2.label(b as usize))
    {
        return false;
    }
    g.iter().all(|&(a, b)| {
        g.iter()
            .all(|&(d, e)| o1.leq(a as usize, d as usize) == o2.leq(b as usize, e as usize))
    })
}

/// Every label- and order-isomorphic bijection between two configurations.
fn all_order_isos(c1: &ConfStructure, o1: &Causality, c2: &ConfStructure, o2: &Causality) -> Vec<Pairs> {
    let left = o1.members().to_vec();
    let right = o2.members().to_vec();
    if left.len() != right.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut partial: Pairs = Vec::new();
    let mut used = vec![false; right.len()];
    extend_iso(c1, o1, c2, o2, &left, &right, &mut partial, &mut used, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_iso(
    c1: &ConfStructure,
    o1: &Causality,
    c2: &ConfStructure,
    o2: &Causality,
    left: &[usize],
    right: &[usize],
    partial: &mut Pairs,
    used: &mut [bool],
    out: &mut Vec<Pairs>,
) {
    let k = partial.len();
    if k == left.len() {
        let mut g = partial.clone();
        g.sort_unstable();
        out.push(g);
        return;
    }
    let a = left[k];
    for (t, &b) in right.iter().enumerate() {
        if used[t] || c1.label(a) != c2.label(b) {
            continue;
        }
        let fits = partial.iter().all(|&(d, e)| {
            o1.leq(a, d as usize) == o2.leq(b, e as usize) && o1.leq(d as usize, a) == o2.leq(e as usize, b)
        });
        if fits {
            used[t] = true;
            partial.push((a as u32, b as u32));
            extend_iso(c1, o1, c2, o2, left, right, partial, used, out);
            partial.pop();
            used[t] = false;
        }
    }
}

struct StructArena<'a> {
    rel: Relation,
    left: Side<'a>,
    right: Side<'a>,
    isos: HashMap<(usize, usize), Rc<Vec<Pairs>>>,
}

type StructNode = (usize, usize, Pairs);

impl StructArena<'_> {
    fn valid(&mut self, y1: usize, y2: usize, g: &Pairs) -> bool {
        let (o1, o2) = (self.left.order(y1), self.right.order(y2));
        order_iso(self.left.c, &o1, self.right.c, &o2, g)
    }

    fn isos(&mut self, y1: usize, y2: usize) -> Rc<Vec<Pairs>> {
        if let Some(v) = self.isos.get(&(y1, y2)) {
            return Rc::clone(v);
        }
        let (o1, o2) = (self.left.order(y1), self.right.order(y2));
        let v = Rc::new(all_order_isos(self.left.c, &o1, self.right.c, &o2));
        self.isos.insert((y1, y2), Rc::clone(&v));
        v
    }

    fn mv(&self, party: Party, direction: Direction, e: usize) -> Move {
        let c = match party {
            Party::Left => self.left.c,
            Party::Right => self.right.c,
        };
        Move {
            party,
            direction,
            label: c.label(e).to_string(),
            event: format!("event {e}"),
        }
    }

    /// Answers for the left party moving along `(e1, y1)`.
    fn answer_left(&mut self, x2: usize, f: &Pairs, e1: usize, y1: usize, dir: Direction) -> Vec<StructNode> {
        let covers = match dir {
            Direction::Forward => self.right.covers.forward[x2].clone(),
            Direction::Backward => self.right.covers.backward[x2].clone(),
        };
        let mut out = Vec::new();
        for (e2, y2) in covers {
            if self.rel.weak_function() {
                for g in self.isos(y1, y2).iter() {
                    out.push((y1, y2, g.clone()));
                }
                continue;
            }
            let g = match dir {
                Direction::Forward => with_pair(f, e1 as u32, e2 as u32),
                Direction::Backward => {
                    if image(f, e1 as u32) != Some(e2 as u32) {
                        continue;
                    }
                    without_left(f, e1 as u32)
                }
            };
            if self.valid(y1, y2, &g) {
                out.push((y1, y2, g));
            }
        }
        out
    }

    fn answer_right(
        &mut self,
        x1: usize,
        f: &Pairs,
        e2: usize,
        y2: usize,
        dir: Direction,
    ) -> Vec<StructNode> {
        let covers = match dir {
            Direction::Forward => self.left.covers.forward[x1].clone(),
            Direction::Backward => self.left.covers.backward[x1].clone(),
        };
        let mut out = Vec::new();
        for (e1, y1) in covers {
            if self.rel.weak_function() {
                for g in self.isos(y1, y2).iter() {
                    out.push((y1, y2, g.clone()));
                }
                continue;
            }
            let g = match dir {
                Direction::Forward => with_pair(f, e1 as u32, e2 as u32),
                Direction::Backward => {
                    if image(f, e1 as u32) != Some(e2 as u32) {
                        continue;
                    }
                    without_left(f, e1 as u32)
                }
            };
            if self.valid(y1, y2, &g) {
                out.push((y1, y2, g));
            }
        }
        out
    }
}

impl Arena for StructArena<'_> {
    type Node = StructNode;
    type Move = Move;

    fn obligations(&mut self, (x1, x2, f): &StructNode) -> Vec<(Move, Vec<StructNode>)> {
        let mut dirs = vec![Direction::Forward];
        if self.rel.hereditary() {
            dirs.push(Direction::Backward);
        }
        let mut out = Vec::new();
        for dir in dirs {
            let moves1 = match dir {
                Direction::Forward => self.left.covers.forward[*x1].clone(),
                Direction::Backward => self.left.covers.backward[*x1].clone(),
            };
            for (e1, y1) in moves1 {
                let answers = self.answer_left(*x2, f, e1, y1, dir);
                out.push((self.mv(Party::Left, dir, e1), answers));
            }
            let moves2 = match dir {
                Direction::Forward => self.right.covers.forward[*x2].clone(),
                Direction::Backward => self.right.covers.backward[*x2].clone(),
            };
            for (e2, y2) in moves2 {
                let answers = self.answer_right(*x1, f, e2, y2, dir);
                out.push((self.mv(Party::Right, dir, e2), answers));
            }
        }
        out
    }
}

fn describe_config(c: &ConfStructure, x: &EventSet) -> String {
    let parts: Vec<String> = x.iter().map(|e| format!("{}#{e}", c.label(e))).collect();
    format!("{{{}}}", parts.join(","))
}

/// Decides whether two configuration structures are related by `rel`.
pub fn check_structure(
    c1: &ConfStructure,
    c2: &ConfStructure,
    rel: Relation,
) -> Result<Verdict<StructTriple>, EquivError> {
    check_structure_with(c1, c2, rel, &Options::default())
}

pub fn check_structure_with(
    c1: &ConfStructure,
    c2: &ConfStructure,
    rel: Relation,
    opts: &Options,
) -> Result<Verdict<StructTriple>, EquivError> {
    let (Some(r1), Some(r2)) = (
        c1.config_index(&EventSet::new()),
        c2.config_index(&EventSet::new()),
    ) else {
        return Ok(Verdict {
            holds: false,
            universe: 0,
            relation: Vec::new(),
            play: Vec::new(),
        });
    };
    let mut arena = StructArena {
        rel,
        left: Side::new(c1),
        right: Side::new(c2),
        isos: HashMap::new(),
    };
    let solved = game::solve(&mut arena, (r1, r2, Vec::new()), opts.max_triples)?;
    let describe = |(x1, x2, f): &StructNode| {
        let map: Vec<String> = f.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        format!(
            "({}, {}, [{}])",
            describe_config(c1, &c1.configs()[*x1]),
            describe_config(c2, &c2.configs()[*x2]),
            map.join(",")
        )
    };
    let export = |(x1, x2, f): &StructNode| StructTriple {
        left: c1.configs()[*x1].clone(),
        right: c2.configs()[*x2].clone(),
        map: f.clone(),
    };
    Ok(build_verdict(solved, describe, export))
}

/// The forgotten memory encoding of a reachable state, with identifiers.
pub struct MemoryView {
    pub structure: ConfStructure,
    pub ids: Vec<u32>,
    by_id: BTreeMap<u32, usize>,
}

impl MemoryView {
    pub fn of(r: &RProcess) -> MemoryView {
        let d = encode_memory(r);
        let ids: Vec<u32> = d
            .ids()
            .iter()
            .map(|i| match i {
                Ident::Nat(n) => *n,
                other => panic!("memory encodings carry natural identifiers, found {other}"),
            })
            .collect();
        let by_id = ids.iter().enumerate().map(|(e, &i)| (i, e)).collect();
        MemoryView {
            structure: d.base().clone(),
            ids,
            by_id,
        }
    }

    pub fn event(&self, id: u32) -> Option<usize> {
        self.by_id.get(&id).copied()
    }
}

/// Whether an identifier map is an isomorphism of the two memory encodings.
pub fn is_memory_iso(v1: &MemoryView, v2: &MemoryView, g: &Pairs) -> bool {
    if g.len() != v1.ids.len() || g.len() != v2.ids.len() {
        return false;
    }
    let mut map = vec![usize::MAX; v1.ids.len()];
    let mut hit = vec![false; v2.ids.len()];
    for &(a, b) in g {
        let (Some(e1), Some(e2)) = (v1.event(a), v2.event(b)) else {
            return false;
        };
        if map[e1] != usize::MAX || hit[e2] || v1.structure.label(e1) != v2.structure.label(e2) {
            return false;
        }
        map[e1] = e2;
        hit[e2] = true;
    }
    let (s1, s2) = (&v1.structure, &v2.structure);
    s1.configs().len() == s2.configs().len()
        && s1
            .configs()
            .iter()
            .all(|x| s2.is_config(&x.iter().map(|e| map[e]).collect()))
}

/// Triple of reachable states and an identifier bijection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProcTriple {
    pub left: RProcess,
    pub right: RProcess,
    pub map: Pairs,
}

struct ProcSide {
    graph: StateGraph,
    views: Vec<Option<Rc<MemoryView>>>,
}

impl ProcSide {
    fn new(graph: StateGraph) -> ProcSide {
        let n = graph.states.len();
        ProcSide {
            graph,
            views: vec![None; n],
        }
    }

    fn view(&mut self, s: usize) -> Rc<MemoryView> {
        if self.views[s].is_none() {
            self.views[s] = Some(Rc::new(MemoryView::of(&self.graph.states[s])));
        }
        Rc::clone(self.views[s].as_ref().expect("just filled"))
    }

    fn moves(&self, s: usize, dir: Direction) -> Vec<(Transition, usize)> {
        match dir {
            Direction::Forward => self.graph.forward[s].clone(),
            Direction::Backward => self.graph.backward[s].clone(),
        }
    }
}

struct ProcArena {
    rel: Relation,
    left: ProcSide,
    right: ProcSide,
    isos: HashMap<(usize, usize), Rc<Vec<Pairs>>>,
}

type ProcNode = (usize, usize, Pairs);

impl ProcArena {
    fn valid(&mut self, s1: usize, s2: usize, g: &Pairs) -> bool {
        let (v1, v2) = (self.left.view(s1), self.right.view(s2));
        is_memory_iso(&v1, &v2, g)
    }

    fn isos(&mut self, s1: usize, s2: usize) -> Rc<Vec<Pairs>> {
        if let Some(v) = self.isos.get(&(s1, s2)) {
            return Rc::clone(v);
        }
        let (v1, v2) = (self.left.view(s1), self.right.view(s2));
        let all = conf::all_isos(&v1.structure, &v2.structure)
            .into_iter()
            .map(|m| {
                let mut g: Pairs = m
                    .iter()
                    .enumerate()
                    .map(|(e, &t)| (v1.ids[e], v2.ids[t]))
                    .collect();
                g.sort_unstable();
                g
            })
            .collect();
        let v = Rc::new(all);
        self.isos.insert((s1, s2), Rc::clone(&v));
        v
    }

    /// Answers when `party` moved along `t` to `target`, the other side
    /// being at `other` and the current map `f` read left to right.
    fn answers(
        &mut self,
        party: Party,
        t: &Transition,
        target: usize,
        other: usize,
        f: &Pairs,
    ) -> Vec<ProcNode> {
        let replies = match party {
            Party::Left => self.right.moves(other, t.direction),
            Party::Right => self.left.moves(other, t.direction),
        };
        let mut out = Vec::new();
        for (u, reply) in replies {
            if u.label != t.label {
                continue;
            }
            let (s1, s2, i, j) = match party {
                Party::Left => (target, reply, t.id, u.id),
                Party::Right => (reply, target, u.id, t.id),
            };
            if self.rel.weak_function() {
                for g in self.isos(s1, s2).iter() {
                    out.push((s1, s2, g.clone()));
                }
                continue;
            }
            let g = match t.direction {
                Direction::Forward => with_pair(f, i, j),
                Direction::Backward => {
                    if image(f, i) != Some(j) {
                        continue;
                    }
                    without_left(f, i)
                }
            };
            if self.valid(s1, s2, &g) {
                out.push((s1, s2, g));
            }
        }
        out
    }
}

impl Arena for ProcArena {
    type Node = ProcNode;
    type Move = Move;

    fn obligations(&mut self, (s1, s2, f): &ProcNode) -> Vec<(Move, Vec<ProcNode>)> {
        let mut dirs = vec![Direction::Forward];
        if self.rel.hereditary() {
            dirs.push(Direction::Backward);
        }
        let mut out = Vec::new();
        for dir in dirs {
            for (t, target) in self.left.moves(*s1, dir) {
                let answers = self.answers(Party::Left, &t, target, *s2, f);
                out.push((proc_move(Party::Left, &t), answers));
            }
            for (t, target) in self.right.moves(*s2, dir) {
                let answers = self.answers(Party::Right, &t, target, *s1, f);
                out.push((proc_move(Party::Right, &t), answers));
            }
        }
        out
    }
}

fn proc_move(party: Party, t: &Transition) -> Move {
    Move {
        party,
        direction: t.direction,
        label: t.label.to_string(),
        event: format!("id {}", t.id),
    }
}

/// Decides the relation between two CCS processes through reversible memories.
pub fn check_process(p1: &Process, p2: &Process, rel: Relation) -> Result<Verdict<ProcTriple>, EquivError> {
    check_process_with(p1, p2, rel, &Options::default())
}

pub fn check_process_with(
    p1: &Process,
    p2: &Process,
    rel: Relation,
    opts: &Options,
) -> Result<Verdict<ProcTriple>, EquivError> {
    let g1 = state_graph(p1, opts)?;
    let g2 = state_graph(p2, opts)?;
    let mut arena = ProcArena {
        rel,
        left: ProcSide::new(g1),
        right: ProcSide::new(g2),
        isos: HashMap::new(),
    };
    let solved = game::solve(&mut arena, (0, 0, Vec::new()), opts.max_triples)?;
    let (l, r) = (&arena.left.graph.states, &arena.right.graph.states);
    let describe = |(s1, s2, f): &ProcNode| {
        let map: Vec<String> = f.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        format!("({}, {}, [{}])", l[*s1], r[*s2], map.join(","))
    };
    let export = |(s1, s2, f): &ProcNode| ProcTriple {
        left: l[*s1].clone(),
        right: r[*s2].clone(),
        map: f.clone(),
    };
    Ok(build_verdict(solved, describe, export))
}

fn state_graph(p: &Process, opts: &Options) -> Result<StateGraph, EquivError> {
    explore(&lift(p), opts.id_base, opts.max_triples).map_err(|e| match e {
        RccsError::TooManyStates(n) => EquivError::TooManyTriples(n),
        other => EquivError::Rccs(other),
    })
}

struct BfArena {
    left: StateGraph,
    right: StateGraph,
}

impl Arena for BfArena {
    type Node = (usize, usize);
    type Move = Move;

    fn obligations(&mut self, &(s1, s2): &(usize, usize)) -> Vec<(Move, Vec<(usize, usize)>)> {
        let mut out = Vec::new();
        for dir in [Direction::Forward, Direction::Backward] {
            let (m1, m2) = match dir {
                Direction::Forward => (&self.left.forward[s1], &self.right.forward[s2]),
                Direction::Backward => (&self.left.backward[s1], &self.right.backward[s2]),
            };
            for (t, a) in m1 {
                let answers = m2
                    .iter()
                    .filter(|(u, _)| u.label == t.label)
                    .map(|(_, b)| (*a, *b))
                    .collect();
                out.push((proc_move(Party::Left, t), answers));
            }
            for (t, b) in m2 {
                let answers = m1
                    .iter()
                    .filter(|(u, _)| u.label == t.label)
                    .map(|(_, a)| (*a, *b))
                    .collect();
                out.push((proc_move(Party::Right, t), answers));
            }
        }
        out
    }
}

/// Back-and-forth bisimulation: transitions matched by label, in both directions.
pub fn check_back_and_forth(p1: &Process, p2: &Process) -> Result<Verdict<(RProcess, RProcess)>, EquivError> {
    check_back_and_forth_with(p1, p2, &Options::default())
}

pub fn check_back_and_forth_with(
    p1: &Process,
    p2: &Process,
    opts: &Options,
) -> Result<Verdict<(RProcess, RProcess)>, EquivError> {
    let mut arena = BfArena {
        left: state_graph(p1, opts)?,
        right: state_graph(p2, opts)?,
    };
    let solved = game::solve(&mut arena, (0, 0), opts.max_triples)?;
    let (l, r) = (&arena.left.states, &arena.right.states);
    let describe = |(s1, s2): &(usize, usize)| format!("({}, {})", l[*s1], r[*s2]);
    let export = |(s1, s2): &(usize, usize)| (l[*s1].clone(), r[*s2].clone());
    Ok(build_verdict(solved, describe, export))
}
