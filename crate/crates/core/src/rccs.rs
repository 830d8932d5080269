//! Reversible CCS: memories, threads, the forward/backward transition
//! relation, memory coherence and origins.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::syntax::{print, Label, Name, ParseError, Process};

/// Which arm of a sum was committed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The discarded arm of a sum together with the position of the taken one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alt {
    pub side: Side,
    pub proc: Process,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemEvent {
    pub id: u32,
    pub label: Label,
    pub alt: Option<Alt>,
}

impl MemEvent {
    /// The process the event is undone into: `λ.P`, `λ.P + Q` or `Q + λ.P`.
    pub fn rebuild(&self, p: Process) -> Process {
        let prefixed = Process::prefix(self.label.clone(), p);
        match &self.alt {
            None => prefixed,
            Some(Alt {
                side: Side::Left,
                proc,
            }) => Process::sum(prefixed, proc.clone()),
            Some(Alt {
                side: Side::Right,
                proc,
            }) => Process::sum(proc.clone(), prefixed),
        }
    }
}

impl fmt::Display for MemEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alt = match &self.alt {
            None => "0".to_string(),
            Some(Alt {
                side: Side::Left,
                proc,
            }) => print(proc),
            Some(Alt {
                side: Side::Right,
                proc,
            }) => format!("{}+_", parenthesized(proc)),
        };
        write!(f, "<{},{},{}>", self.id, self.label, alt)
    }
}

fn parenthesized(p: &Process) -> String {
    match p {
        Process::Nil | Process::Prefix(..) => print(p),
        _ => format!("({})", print(p)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemItem {
    Fork,
    Event(MemEvent),
}

/// A memory stack, stored bottom-first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Memory {
    items: Vec<MemItem>,
}

impl Memory {
    pub fn empty() -> Memory {
        Memory::default()
    }

    /// Builds a memory from items listed top-first, as they are printed.
    pub fn from_top(items: impl IntoIterator<Item = MemItem>) -> Memory {
        let mut items: Vec<MemItem> = items.into_iter().collect();
        items.reverse();
        Memory { items }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Items bottom-first.
    pub fn items(&self) -> &[MemItem] {
        &self.items
    }

    pub fn top(&self) -> Option<&MemItem> {
        self.items.last()
    }

    pub fn pushed(&self, item: MemItem) -> Memory {
        let mut items = self.items.clone();
        items.push(item);
        Memory { items }
    }

    pub fn popped(&self) -> Memory {
        let mut items = self.items.clone();
        items.pop();
        Memory { items }
    }

    /// Memory events bottom-first.
    pub fn events(&self) -> impl Iterator<Item = &MemEvent> + '_ {
        self.items.iter().filter_map(|it| match it {
            MemItem::Event(e) => Some(e),
            MemItem::Fork => None,
        })
    }

    pub fn ids(&self) -> BTreeSet<u32> {
        self.events().map(|e| e.id).collect()
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in self.items.iter().rev() {
            match item {
                MemItem::Fork => f.write_str("<^>.")?,
                MemItem::Event(e) => write!(f, "{e}.")?,
            }
        }
        f.write_str("<>")
    }
}

/// A reversible process. `Restrict` and `Choice` remember the memory of the
/// thread they were distributed from so that undoing can fold them back.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RProcess {
    Thread(Memory, Process),
    Par(Box<RProcess>, Box<RProcess>),
    Restrict {
        inner: Box<RProcess>,
        names: BTreeSet<Name>,
        base: Option<Memory>,
    },
    /// A sum committed to an arm that is not a prefix; `taken` runs that arm.
    Choice {
        taken: Box<RProcess>,
        discarded: Process,
        side: Side,
        base: Memory,
    },
}

impl RProcess {
    pub fn ids(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for m in self.memories() {
            out.extend(m.ids());
        }
        out
    }

    /// Memories of every thread, left to right.
    pub fn memories(&self) -> Vec<&Memory> {
        let mut out = Vec::new();
        self.collect_memories(&mut out);
        out
    }

    fn collect_memories<'a>(&'a self, out: &mut Vec<&'a Memory>) {
        match self {
            RProcess::Thread(m, _) => out.push(m),
            RProcess::Par(l, r) => {
                l.collect_memories(out);
                r.collect_memories(out);
            }
            RProcess::Restrict { inner, .. } => inner.collect_memories(out),
            RProcess::Choice { taken, .. } => taken.collect_memories(out),
        }
    }
}

impl fmt::Display for RProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RProcess::Thread(m, p) => write!(f, "{m} |> {}", print(p)),
            RProcess::Par(l, r) => write!(f, "({l}) | ({r})"),
            RProcess::Restrict { inner, names, .. } => {
                let names: Vec<&str> = names.iter().map(Name::as_str).collect();
                write!(f, "({inner})\\{{{}}}", names.join(","))
            }
            RProcess::Choice {
                taken,
                discarded,
                side: Side::Left,
                ..
            } => {
                write!(f, "[{taken}] + {}", parenthesized(discarded))
            }
            RProcess::Choice {
                taken,
                discarded,
                side: Side::Right,
                ..
            } => {
                write!(f, "{} + [{taken}]", parenthesized(discarded))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub id: u32,
    pub label: Label,
    pub direction: Direction,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        };
        write!(f, "{dir} {}:{}", self.id, self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub transition: Transition,
    pub target: RProcess,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RccsError {
    #[error("no transition {0} from the current state")]
    NoSuchTransition(Transition),
    #[error("identifier {0} is already in use")]
    IdInUse(u32),
    #[error("state does not roll back to an empty memory")]
    NotReachable,
    #[error("state space exceeds {0} states")]
    TooManyStates(usize),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// `∅ ▷ p`.
pub fn lift(p: &Process) -> RProcess {
    RProcess::Thread(Memory::empty(), p.clone())
}

/// Distributes `m` over parallel compositions and restrictions of `p`.
pub fn norm_thread(m: Memory, p: &Process) -> RProcess {
    match p {
        Process::Par(l, r) => {
            let forked = m.pushed(MemItem::Fork);
            RProcess::Par(
                Box::new(norm_thread(forked.clone(), l)),
                Box::new(norm_thread(forked, r)),
            )
        }
        Process::Restrict(q, names) => RProcess::Restrict {
            inner: Box::new(norm_thread(m.clone(), q)),
            names: names.clone(),
            base: Some(m),
        },
        _ => RProcess::Thread(m, p.clone()),
    }
}

/// Applies memory distribution exhaustively.
pub fn normalize(r: &RProcess) -> RProcess {
    match r {
        RProcess::Thread(m, p) => norm_thread(m.clone(), p),
        RProcess::Par(l, rr) => RProcess::Par(Box::new(normalize(l)), Box::new(normalize(rr))),
        RProcess::Restrict { inner, names, base } => RProcess::Restrict {
            inner: Box::new(normalize(inner)),
            names: names.clone(),
            base: base.clone(),
        },
        RProcess::Choice {
            taken,
            discarded,
            side,
            base,
        } => RProcess::Choice {
            taken: Box::new(normalize(taken)),
            discarded: discarded.clone(),
            side: *side,
            base: base.clone(),
        },
    }
}

/// Reads `r` back as a single thread when distribution can be undone all the way up.
pub fn fold(r: &RProcess) -> Option<(Memory, Process)> {
    match r {
        RProcess::Thread(m, p) => Some((m.clone(), p.clone())),
        RProcess::Par(l, rr) => {
            let (ml, pl) = fold(l)?;
            let (mr, pr) = fold(rr)?;
            if ml != mr || ml.top() != Some(&MemItem::Fork) {
                return None;
            }
            Some((ml.popped(), Process::par(pl, pr)))
        }
        RProcess::Restrict { inner, names, base } => {
            let base = base.as_ref()?;
            let (m, p) = fold(inner)?;
            (&m == base).then(|| (m, Process::Restrict(Box::new(p), names.clone())))
        }
        RProcess::Choice {
            taken,
            discarded,
            side,
            base,
        } => {
            let (m, p) = fold(taken)?;
            if &m != base {
                return None;
            }
            let sum = match side {
                Side::Left => Process::sum(p, discarded.clone()),
                Side::Right => Process::sum(discarded.clone(), p),
            };
            Some((m, sum))
        }
    }
}

fn blocked(label: &Label, names: &BTreeSet<Name>) -> bool {
    label.name().is_some_and(|a| names.contains(a))
}

/// Forward moves of a normalized process, all using identifier `i`.
fn fwd(r: &RProcess, i: u32) -> Vec<(Label, RProcess)> {
    match r {
        RProcess::Thread(m, p) => fwd_thread(m, p, i),
        RProcess::Par(l, rr) => {
            let left = fwd(l, i);
            let right = fwd(rr, i);
            let mut out = Vec::new();
            for (a, l2) in &left {
                out.push((a.clone(), RProcess::Par(Box::new(l2.clone()), rr.clone())));
            }
            for (b, r2) in &right {
                out.push((b.clone(), RProcess::Par(l.clone(), Box::new(r2.clone()))));
            }
            for (a, l2) in &left {
                for (b, r2) in &right {
                    if a.complements(b) {
                        out.push((
                            Label::Tau,
                            RProcess::Par(Box::new(l2.clone()), Box::new(r2.clone())),
                        ));
                    }
                }
            }
            out
        }
        RProcess::Restrict { inner, names, base } => fwd(inner, i)
            .into_iter()
            .filter(|(a, _)| !blocked(a, names))
            .map(|(a, s)| {
                (
                    a,
                    RProcess::Restrict {
                        inner: Box::new(s),
                        names: names.clone(),
                        base: base.clone(),
                    },
                )
            })
            .collect(),
        RProcess::Choice {
            taken,
            discarded,
            side,
            base,
        } => fwd(taken, i)
            .into_iter()
            .map(|(a, s)| {
                let choice = RProcess::Choice {
                    taken: Box::new(s),
                    discarded: discarded.clone(),
                    side: *side,
                    base: base.clone(),
                };
                (a, choice)
            })
            .collect(),
    }
}

fn fwd_thread(m: &Memory, p: &Process, i: u32) -> Vec<(Label, RProcess)> {
    match p {
        Process::Nil => Vec::new(),
        Process::Prefix(a, q) => {
            let e = MemEvent {
                id: i,
                label: a.clone(),
                alt: None,
            };
            vec![(a.clone(), norm_thread(m.pushed(MemItem::Event(e)), q))]
        }
        Process::Sum(l, r) => {
            let mut out = fwd_arm(m, l, r, Side::Left, i);
            out.extend(fwd_arm(m, r, l, Side::Right, i));
            out
        }
        Process::Par(..) | Process::Restrict(..) => fwd(&norm_thread(m.clone(), p), i),
    }
}

fn fwd_arm(m: &Memory, taken: &Process, other: &Process, side: Side, i: u32) -> Vec<(Label, RProcess)> {
    match taken {
        Process::Prefix(a, q) => {
            let alt = Some(Alt {
                side,
                proc: other.clone(),
            });
            let e = MemEvent {
                id: i,
                label: a.clone(),
                alt,
            };
            vec![(a.clone(), norm_thread(m.pushed(MemItem::Event(e)), q))]
        }
        _ => fwd(&norm_thread(m.clone(), taken), i)
            .into_iter()
            .map(|(a, s)| {
                let choice = RProcess::Choice {
                    taken: Box::new(s),
                    discarded: other.clone(),
                    side,
                    base: m.clone(),
                };
                (a, choice)
            })
            .collect(),
    }
}

/// Smallest identifier at or above `base` that `r` does not use.
pub fn fresh_id(r: &RProcess, base: u32) -> u32 {
    let used = r.ids();
    (base..)
        .find(|i| !used.contains(i))
        .expect("identifiers are unbounded")
}

fn forward(r: &RProcess, i: u32) -> Vec<Step> {
    fwd(&normalize(r), i)
        .into_iter()
        .map(|(label, target)| Step {
            transition: Transition {
                id: i,
                label,
                direction: Direction::Forward,
            },
            target,
        })
        .collect()
}

/// Forward transitions, with the smallest unused identifier (from 1).
pub fn forward_steps(r: &RProcess) -> Vec<Step> {
    forward_steps_from(r, 1)
}

/// Forward transitions using the smallest unused identifier at or above `base`.
pub fn forward_steps_from(r: &RProcess, base: u32) -> Vec<Step> {
    forward(r, fresh_id(r, base))
}

/// Forward transitions using identifier `id`, which must be unused.
pub fn forward_steps_with_id(r: &RProcess, id: u32) -> Result<Vec<Step>, RccsError> {
    if r.ids().contains(&id) {
        return Err(RccsError::IdInUse(id));
    }
    Ok(forward(r, id))
}

/// Backward moves of a normalized process.
fn bwd(r: &RProcess) -> Vec<(u32, Label, RProcess)> {
    if let Some((m, p)) = fold(r) {
        if let Some(MemItem::Event(e)) = m.top() {
            let rest = m.popped();
            assert!(
                !rest.ids().contains(&e.id),
                "identifier {} repeated in one memory",
                e.id
            );
            return vec![(e.id, e.label.clone(), norm_thread(rest, &e.rebuild(p)))];
        }
    }
    match r {
        RProcess::Thread(..) => Vec::new(),
        RProcess::Par(l, rr) => {
            let left = bwd(l);
            let right = bwd(rr);
            let (left_ids, right_ids) = (l.ids(), rr.ids());
            let mut out = Vec::new();
            for (i, a, l2) in &left {
                if !right_ids.contains(i) {
                    out.push((*i, a.clone(), RProcess::Par(Box::new(l2.clone()), rr.clone())));
                }
            }
            for (i, b, r2) in &right {
                if !left_ids.contains(i) {
                    out.push((*i, b.clone(), RProcess::Par(l.clone(), Box::new(r2.clone()))));
                }
            }
            for (i, a, l2) in &left {
                for (j, b, r2) in &right {
                    if i == j && a.complements(b) {
                        let both = RProcess::Par(Box::new(l2.clone()), Box::new(r2.clone()));
                        out.push((*i, Label::Tau, both));
                    }
                }
            }
            out
        }
        RProcess::Restrict { inner, names, base } => bwd(inner)
            .into_iter()
            .filter(|(_, a, _)| !blocked(a, names))
            .map(|(i, a, s)| {
                (
                    i,
                    a,
                    RProcess::Restrict {
                        inner: Box::new(s),
                        names: names.clone(),
                        base: base.clone(),
                    },
                )
            })
            .collect(),
        RProcess::Choice {
            taken,
            discarded,
            side,
            base,
        } => bwd(taken)
            .into_iter()
            .map(|(i, a, s)| {
                let choice = RProcess::Choice {
                    taken: Box::new(s),
                    discarded: discarded.clone(),
                    side: *side,
                    base: base.clone(),
                };
                // Once every action of the taken arm is undone the sum is uncommitted again.
                let settled = match fold(&choice) {
                    Some((m, p)) if &m == base => RProcess::Thread(m, p),
                    _ => choice,
                };
                (i, a, settled)
            })
            .collect(),
    }
}

pub fn backward_steps(r: &RProcess) -> Vec<Step> {
    bwd(&normalize(r))
        .into_iter()
        .map(|(id, label, target)| Step {
            transition: Transition {
                id,
                label,
                direction: Direction::Backward,
            },
            target,
        })
        .collect()
}

/// Premise used by the fork rule of memory coherence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FoRule {
    /// `⟨↑⟩.m ⌢ ⟨↑⟩.m` whenever `m ⌢ ∅`.
    #[default]
    Printed,
    /// The printed rule plus dropping a fork on one side only, so threads
    /// split at different depths can still be compared.
    Variant,
}

pub fn coherent(m1: &Memory, m2: &Memory) -> bool {
    coherent_with(m1, m2, FoRule::Printed)
}

pub fn coherent_with(m1: &Memory, m2: &Memory, rule: FoRule) -> bool {
    Coherence::new(rule).holds(m1, m2)
}

/// Derivability of `m1 ⌢ m2`, memoised on the pair of remaining stacks.
struct Coherence {
    rule: FoRule,
    memo: HashMap<(Memory, Memory), bool>,
}

impl Coherence {
    fn new(rule: FoRule) -> Coherence {
        Coherence {
            rule,
            memo: HashMap::new(),
        }
    }

    fn holds(&mut self, m1: &Memory, m2: &Memory) -> bool {
        let key = (m1.clone(), m2.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.derive(m1, m2);
        self.memo.insert(key, v);
        v
    }

    fn derive(&mut self, m1: &Memory, m2: &Memory) -> bool {
        if m1.is_empty() && m2.is_empty() {
            return true;
        }
        // ev. on either side
        for (top, rest, other) in [(m1.top(), m1.popped(), m2), (m2.top(), m2.popped(), m1)] {
            if let Some(MemItem::Event(e)) = top {
                if !rest.ids().contains(&e.id) && !other.ids().contains(&e.id) && self.holds(&rest, other) {
                    return true;
                }
            }
        }
        match (m1.top(), m2.top()) {
            (Some(MemItem::Event(e1)), Some(MemItem::Event(e2))) => {
                let (r1, r2) = (m1.popped(), m2.popped());
                e1.id == e2.id
                    && e1.label.complements(&e2.label)
                    && !r1.ids().contains(&e1.id)
                    && !r2.ids().contains(&e1.id)
                    && self.holds(&r1, &r2)
            }
            (Some(MemItem::Fork), Some(MemItem::Fork)) => {
                let (r1, r2) = (m1.popped(), m2.popped());
                if r1 == r2 && self.holds(&r1, &Memory::empty()) {
                    return true;
                }
                self.rule == FoRule::Variant && (self.holds(&r1, m2) || self.holds(m1, &r2))
            }
            (Some(MemItem::Fork), _) if self.rule == FoRule::Variant => self.holds(&m1.popped(), m2),
            (_, Some(MemItem::Fork)) if self.rule == FoRule::Variant => self.holds(m1, &m2.popped()),
            _ => false,
        }
    }
}

/// A process is coherent when its memories are pairwise coherent, or when its
/// only memory is coherent with ∅.
pub fn coherent_process(r: &RProcess) -> bool {
    coherent_process_with(r, FoRule::Printed)
}

pub fn coherent_process_with(r: &RProcess, rule: FoRule) -> bool {
    let r = normalize(r);
    let mems = r.memories();
    let mut check = Coherence::new(rule);
    if let [only] = mems.as_slice() {
        return check.holds(only, &Memory::empty());
    }
    mems.iter()
        .enumerate()
        .all(|(k, m1)| mems[k + 1..].iter().all(|m2| check.holds(m1, m2)))
}

/// The process reached by undoing every memory event.
pub fn origin(r: &RProcess) -> Result<Process, RccsError> {
    let trail = rollback(r)?;
    let last = trail.last().map_or_else(|| normalize(r), |s| s.target.clone());
    match fold(&last) {
        Some((m, p)) if m.is_empty() => Ok(p),
        _ => Err(RccsError::NotReachable),
    }
}

/// Backward steps from `r` until no memory event is left, taking the first
/// available step each time.
pub fn rollback(r: &RProcess) -> Result<Vec<Step>, RccsError> {
    let mut current = normalize(r);
    let mut trail = Vec::new();
    while !current.ids().is_empty() {
        let step = backward_steps(&current)
            .into_iter()
            .next()
            .ok_or(RccsError::NotReachable)?;
        current = step.target.clone();
        trail.push(step);
    }
    Ok(trail)
}

/// Strict order on identifiers induced by stacking within memories.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IdOrder {
    pub ids: BTreeSet<u32>,
    pub less: BTreeSet<(u32, u32)>,
}

impl IdOrder {
    pub fn lt(&self, i: u32, j: u32) -> bool {
        self.less.contains(&(i, j))
    }

    pub fn leq(&self, i: u32, j: u32) -> bool {
        i == j || self.lt(i, j)
    }
}

pub fn id_causality(r: &RProcess) -> IdOrder {
    let mut order = IdOrder::default();
    for m in r.memories() {
        let ids: Vec<u32> = m.events().map(|e| e.id).collect();
        order.ids.extend(ids.iter().copied());
        for (k, &below) in ids.iter().enumerate() {
            for &above in &ids[k + 1..] {
                order.less.insert((below, above));
            }
        }
    }
    loop {
        let extra: Vec<(u32, u32)> = order
            .less
            .iter()
            .flat_map(|&(a, b)| {
                order
                    .less
                    .range((b, 0)..=(b, u32::MAX))
                    .map(move |&(_, c)| (a, c))
            })
            .filter(|p| !order.less.contains(p))
            .collect();
        if extra.is_empty() {
            return order;
        }
        order.less.extend(extra);
    }
}

/// One line of a trace script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub direction: Direction,
    pub id: u32,
    pub label: Label,
}

/// Parses `fwd i:act` / `bwd i:act` entries separated by `;` or newlines.
pub fn parse_trace(script: &str) -> Result<Vec<TraceStep>, RccsError> {
    let mut steps = Vec::new();
    for (line, entry) in script.split([';', '\n']).enumerate() {
        let entry = entry.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let err = |message: &str| RccsError::Trace {
            line: line + 1,
            message: message.to_string(),
        };
        let (dir, rest) = entry
            .split_once(char::is_whitespace)
            .ok_or_else(|| err("expected `fwd` or `bwd`"))?;
        let direction = match dir {
            "fwd" => Direction::Forward,
            "bwd" => Direction::Backward,
            _ => return Err(err("expected `fwd` or `bwd`")),
        };
        let (id, label) = rest
            .trim()
            .split_once(':')
            .ok_or_else(|| err("expected `id:action`"))?;
        let id = id
            .trim()
            .parse()
            .map_err(|_| err("identifier is not a natural number"))?;
        let label = Label::parse(label)?;
        steps.push(TraceStep { direction, id, label });
    }
    Ok(steps)
}

/// Performs one scripted step; ties go to the first matching transition.
pub fn apply(r: &RProcess, step: &TraceStep) -> Result<RProcess, RccsError> {
    let transition = Transition {
        id: step.id,
        label: step.label.clone(),
        direction: step.direction,
    };
    let candidates = match step.direction {
        Direction::Forward => forward_steps_with_id(r, step.id)?,
        Direction::Backward => backward_steps(r),
    };
    candidates
        .into_iter()
        .find(|s| s.transition == transition)
        .map(|s| s.target)
        .ok_or(RccsError::NoSuchTransition(transition))
}

/// Every state visited by the script, starting with `r` normalized.
pub fn replay(r: &RProcess, script: &[TraceStep]) -> Result<Vec<RProcess>, RccsError> {
    let mut states = vec![normalize(r)];
    for step in script {
        let next = apply(states.last().expect("nonempty"), step)?;
        states.push(next);
    }
    Ok(states)
}

/// Reachable states from a root, explored in both directions.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub states: Vec<RProcess>,
    pub forward: Vec<Vec<(Transition, usize)>>,
    pub backward: Vec<Vec<(Transition, usize)>>,
}

pub fn explore(root: &RProcess, id_base: u32, max_states: usize) -> Result<StateGraph, RccsError> {
    let root = normalize(root);
    let mut index: HashMap<RProcess, usize> = HashMap::new();
    let mut graph = StateGraph {
        states: vec![root.clone()],
        forward: vec![Vec::new()],
        backward: vec![Vec::new()],
    };
    index.insert(root, 0);
    let mut queue = VecDeque::from([0]);
    while let Some(k) = queue.pop_front() {
        let state = graph.states[k].clone();
        let steps = forward_steps_from(&state, id_base)
            .into_iter()
            .chain(backward_steps(&state));
        for step in steps {
            let target = match index.get(&step.target) {
                Some(&t) => t,
                None => {
                    if graph.states.len() >= max_states {
                        return Err(RccsError::TooManyStates(max_states));
                    }
                    let t = graph.states.len();
                    index.insert(step.target.clone(), t);
                    graph.states.push(step.target);
                    graph.forward.push(Vec::new());
                    graph.backward.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            match step.transition.direction {
                Direction::Forward => graph.forward[k].push((step.transition, target)),
                Direction::Backward => graph.backward[k].push((step.transition, target)),
            }
        }
    }
    Ok(graph)
}
