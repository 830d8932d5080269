//! Configuration structures: events, labels and families of configurations,
//! the derived causal order, and the operations used to interpret CCS.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::EventSet;
use crate::syntax::{Label, Name};

/// Event identity. Atoms come from prefixing, pairs from products (with `None`
/// standing for the undefined side) and injections from coproducts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Atom(u32),
    Pair(Option<Arc<Event>>, Option<Arc<Event>>),
    Inj(u8, Arc<Event>),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Atom(k) => write!(f, "e{k}"),
            Event::Pair(l, r) => {
                let side = |s: &Option<Arc<Event>>| s.as_ref().map_or("*".to_string(), |e| e.to_string());
                write!(f, "({},{})", side(l), side(r))
            }
            Event::Inj(i, e) => write!(f, "in{i}.{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProductLabel {
    Single(Label),
    Pair(Box<ProductLabel>, Box<ProductLabel>),
    Bottom,
}

impl ProductLabel {
    pub fn action(&self) -> Option<&Label> {
        match self {
            ProductLabel::Single(l) => Some(l),
            _ => None,
        }
    }
}

impl From<Label> for ProductLabel {
    fn from(l: Label) -> ProductLabel {
        ProductLabel::Single(l)
    }
}

impl fmt::Display for ProductLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductLabel::Single(l) => write!(f, "{l}"),
            ProductLabel::Pair(a, b) => write!(f, "({a},{b})"),
            ProductLabel::Bottom => f.write_str("bot"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfError {
    #[error("not a configuration of the structure: {0:?}")]
    NotAConfiguration(EventSet),
    #[error("relabeling is undefined on event {0}")]
    PartialRelabeling(Event),
    #[error("event {0} does not belong to the structure")]
    UnknownEvent(Event),
    #[error("malformed structure: {0}")]
    Malformed(String),
}

/// A finite configuration structure. Events are addressed by their index;
/// configurations are kept sorted (smaller first) and deduplicated.
#[derive(Clone, Debug)]
pub struct ConfStructure {
    events: Vec<Event>,
    labels: Vec<ProductLabel>,
    configs: Vec<EventSet>,
    index: HashMap<EventSet, usize>,
    positions: HashMap<Event, usize>,
}

impl PartialEq for ConfStructure {
    fn eq(&self, other: &ConfStructure) -> bool {
        self.events == other.events && self.labels == other.labels && self.configs == other.configs
    }
}

impl Eq for ConfStructure {}

impl ConfStructure {
    pub fn new(
        events: Vec<Event>,
        labels: Vec<ProductLabel>,
        configs: impl IntoIterator<Item = EventSet>,
    ) -> Result<ConfStructure, ConfError> {
        if events.len() != labels.len() {
            return Err(ConfError::Malformed("one label per event is required".into()));
        }
        let positions: HashMap<Event, usize> =
            events.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        if positions.len() != events.len() {
            return Err(ConfError::Malformed("duplicate events".into()));
        }
        let configs: BTreeSet<EventSet> = configs.into_iter().collect();
        if let Some(bad) = configs.iter().find(|x| x.iter().any(|e| e >= events.len())) {
            return Err(ConfError::NotAConfiguration(bad.clone()));
        }
        Ok(ConfStructure::assemble(events, labels, configs, positions))
    }

    fn assemble(
        events: Vec<Event>,
        labels: Vec<ProductLabel>,
        configs: BTreeSet<EventSet>,
        positions: HashMap<Event, usize>,
    ) -> ConfStructure {
        let configs: Vec<EventSet> = configs.into_iter().collect();
        let index = configs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        ConfStructure {
            events,
            labels,
            configs,
            index,
            positions,
        }
    }

    fn build(events: Vec<Event>, labels: Vec<ProductLabel>, configs: BTreeSet<EventSet>) -> ConfStructure {
        let positions = events.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        ConfStructure::assemble(events, labels, configs, positions)
    }

    /// The empty structure: no events, the single configuration ∅.
    pub fn zero() -> ConfStructure {
        ConfStructure::build(Vec::new(), Vec::new(), [EventSet::new()].into_iter().collect())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn labels(&self) -> &[ProductLabel] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &ProductLabel {
        &self.labels[e]
    }

    pub fn configs(&self) -> &[EventSet] {
        &self.configs
    }

    pub fn config_index(&self, x: &EventSet) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_config(&self, x: &EventSet) -> bool {
        self.index.contains_key(x)
    }

    pub fn position(&self, e: &Event) -> Option<usize> {
        self.positions.get(e).copied()
    }

    pub fn all_events(&self) -> EventSet {
        (0..self.events.len()).collect()
    }

    /// Events belonging to no configuration.
    pub fn unused_events(&self) -> EventSet {
        let used = self.configs.iter().fold(EventSet::new(), |acc, x| acc.union(x));
        self.all_events().difference(&used)
    }

    pub fn maximal_configs(&self) -> Vec<EventSet> {
        self.configs
            .iter()
            .filter(|x| !self.configs.iter().any(|y| y.len() > x.len() && x.is_subset(y)))
            .cloned()
            .collect()
    }

    /// Sorted multiset of labels of a set of events.
    pub fn label_multiset(&self, x: &EventSet) -> Vec<&ProductLabel> {
        let mut v: Vec<&ProductLabel> = x.iter().map(|e| &self.labels[e]).collect();
        v.sort();
        v
    }

    /// Drops unused events, renumbering the rest in their current order.
    fn compact(self) -> ConfStructure {
        let unused = self.unused_events();
        if unused.is_empty() {
            return self;
        }
        let keep: Vec<usize> = (0..self.events.len()).filter(|e| !unused.contains(*e)).collect();
        let mut renumber = vec![usize::MAX; self.events.len()];
        for (new, &old) in keep.iter().enumerate() {
            renumber[old] = new;
        }
        let events = keep.iter().map(|&e| self.events[e].clone()).collect();
        let labels = keep.iter().map(|&e| self.labels[e].clone()).collect();
        let configs = self
            .configs
            .iter()
            .map(|x| x.iter().map(|e| renumber[e]).collect())
            .collect();
        ConfStructure::build(events, labels, configs)
    }
}

/// The first axiom found violated, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Finiteness {
        config: EventSet,
        event: usize,
    },
    CoincidenceFreeness {
        config: EventSet,
        events: (usize, usize),
    },
    FiniteCompleteness {
        family: Vec<EventSet>,
        bound: Option<EventSet>,
    },
    Stability {
        x: EventSet,
        y: EventSet,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Finiteness { config, event } => {
                write!(f, "finiteness fails for event {event} in {config:?}")
            }
            Violation::CoincidenceFreeness { config, events } => write!(
                f,
                "coincidence freeness fails: no sub-configuration of {config:?} separates {} and {}",
                events.0, events.1
            ),
            Violation::FiniteCompleteness { family, bound } => {
                write!(
                    f,
                    "finite completeness fails: union of {family:?} (bounded by {bound:?}) is missing"
                )
            }
            Violation::Stability { x, y } => {
                write!(
                    f,
                    "stability fails: union of {x:?} and {y:?} is a configuration, intersection is not"
                )
            }
        }
    }
}

/// Checks the four axioms in order and reports the first failure.
pub fn validate(c: &ConfStructure) -> Result<(), Violation> {
    let configs = c.configs();
    for x in configs {
        for e in x.iter() {
            if !configs.iter().any(|z| z.contains(e) && z.is_subset(x)) {
                return Err(Violation::Finiteness {
                    config: x.clone(),
                    event: e,
                });
            }
        }
    }
    for x in configs {
        let members = x.to_vec();
        for (i, &d) in members.iter().enumerate() {
            for &e in &members[i + 1..] {
                let separated = configs
                    .iter()
                    .any(|z| z.is_subset(x) && (z.contains(d) != z.contains(e)));
                if !separated {
                    return Err(Violation::CoincidenceFreeness {
                        config: x.clone(),
                        events: (d, e),
                    });
                }
            }
        }
    }
    // The empty family is bounded as soon as there is a configuration; pairwise
    // closure under bounded unions then covers every finite family.
    if !configs.is_empty() && !c.is_config(&EventSet::new()) {
        return Err(Violation::FiniteCompleteness {
            family: Vec::new(),
            bound: configs.first().cloned(),
        });
    }
    for (i, x) in configs.iter().enumerate() {
        for y in &configs[i + 1..] {
            let u = x.union(y);
            if !c.is_config(&u) {
                if let Some(bound) = configs.iter().find(|z| u.is_subset(z)) {
                    return Err(Violation::FiniteCompleteness {
                        family: vec![x.clone(), y.clone()],
                        bound: Some(bound.clone()),
                    });
                }
            }
        }
    }
    for (i, x) in configs.iter().enumerate() {
        for y in &configs[i + 1..] {
            if c.is_config(&x.union(y)) && !c.is_config(&x.intersection(y)) {
                return Err(Violation::Stability {
                    x: x.clone(),
                    y: y.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Causal order on the events of one configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Causality {
    members: Vec<usize>,
    /// `below[k]` holds every `d` with `d ≤ members[k]`, including itself.
    below: Vec<EventSet>,
}

impl Causality {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    fn slot(&self, e: usize) -> Option<usize> {
        self.members.binary_search(&e).ok()
    }

    pub fn leq(&self, d: usize, e: usize) -> bool {
        self.slot(e).is_some_and(|k| self.below[k].contains(d))
    }

    pub fn lt(&self, d: usize, e: usize) -> bool {
        d != e && self.leq(d, e)
    }

    pub fn concurrent(&self, d: usize, e: usize) -> bool {
        !self.lt(d, e) && !self.lt(e, d)
    }

    /// Events strictly below `e`.
    pub fn causes(&self, e: usize) -> EventSet {
        self.slot(e)
            .map_or_else(EventSet::new, |k| self.below[k].without(e))
    }

    /// All strict pairs `(d, e)` with `d < e`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, &e) in self.members.iter().enumerate() {
            for d in self.below[k].iter() {
                if d != e {
                    out.push((d, e));
                }
            }
        }
        out.sort();
        out
    }
}

pub fn causality(c: &ConfStructure, x: &EventSet) -> Result<Causality, ConfError> {
    if !c.is_config(x) {
        return Err(ConfError::NotAConfiguration(x.clone()));
    }
    let subs: Vec<&EventSet> = c.configs().iter().filter(|y| y.is_subset(x)).collect();
    let members = x.to_vec();
    let below = members
        .iter()
        .map(|&e| {
            subs.iter()
                .filter(|y| y.contains(e))
                .fold(x.clone(), |acc, y| acc.intersection(y))
        })
        .collect();
    Ok(Causality { members, below })
}

/// Which factor events a product event projects to.
pub type Projection = (Option<usize>, Option<usize>);

/// Product of two structures, keeping every event of `E1 ×⋆ E2`.
pub fn product(c1: &ConfStructure, c2: &ConfStructure) -> ConfStructure {
    product_filtered(c1, c2, |_| true).0
}

/// Product restricted to the events accepted by `keep`, together with the
/// projection of each surviving event. Configurations are grown from ∅ one
/// event at a time; every candidate set is checked against the product
/// conditions directly.
pub fn product_filtered(
    c1: &ConfStructure,
    c2: &ConfStructure,
    keep: impl Fn(Projection) -> bool,
) -> (ConfStructure, Vec<Projection>) {
    let mut projections: Vec<Projection> = Vec::new();
    projections.extend((0..c1.event_count()).map(|i| (Some(i), None)));
    projections.extend((0..c2.event_count()).map(|j| (None, Some(j))));
    for i in 0..c1.event_count() {
        projections.extend((0..c2.event_count()).map(|j| (Some(i), Some(j))));
    }
    projections.retain(|&p| keep(p));

    let events: Vec<Event> = projections
        .iter()
        .map(|&(l, r)| {
            Event::Pair(
                l.map(|i| Arc::new(c1.events()[i].clone())),
                r.map(|j| Arc::new(c2.events()[j].clone())),
            )
        })
        .collect();
    let labels: Vec<ProductLabel> = projections
        .iter()
        .map(|&(l, r)| match (l, r) {
            (Some(i), None) => c1.label(i).clone(),
            (None, Some(j)) => c2.label(j).clone(),
            (Some(i), Some(j)) => {
                ProductLabel::Pair(Box::new(c1.label(i).clone()), Box::new(c2.label(j).clone()))
            }
            (None, None) => unreachable!("(*,*) is not a product event"),
        })
        .collect();

    let checker = ProductCheck {
        c1,
        c2,
        projections: &projections,
    };
    let mut configs = BTreeSet::new();
    let mut queue = VecDeque::new();
    if checker.admits(&EventSet::new()) {
        configs.insert(EventSet::new());
        queue.push_back(EventSet::new());
    }
    while let Some(x) = queue.pop_front() {
        let (used1, used2) = checker.projections_of(&x);
        for (e, &(l, r)) in projections.iter().enumerate() {
            if x.contains(e) {
                continue;
            }
            if l.is_some_and(|i| used1.contains(i)) || r.is_some_and(|j| used2.contains(j)) {
                continue;
            }
            let y = x.with(e);
            if !configs.contains(&y) && checker.admits(&y) {
                configs.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    (ConfStructure::build(events, labels, configs), projections)
}

/// The product conditions on a candidate set of product events.
pub(crate) struct ProductCheck<'a> {
    pub c1: &'a ConfStructure,
    pub c2: &'a ConfStructure,
    pub projections: &'a [Projection],
}

impl ProductCheck<'_> {
    pub fn projections_of(&self, x: &EventSet) -> (EventSet, EventSet) {
        let mut p1 = EventSet::new();
        let mut p2 = EventSet::new();
        for e in x.iter() {
            let (l, r) = self.projections[e];
            if let Some(i) = l {
                p1.insert(i);
            }
            if let Some(j) = r {
                p2.insert(j);
            }
        }
        (p1, p2)
    }

    fn injective(&self, x: &EventSet) -> bool {
        let mut seen1 = EventSet::new();
        let mut seen2 = EventSet::new();
        for e in x.iter() {
            let (l, r) = self.projections[e];
            if let Some(i) = l {
                if seen1.contains(i) {
                    return false;
                }
                seen1.insert(i);
            }
            if let Some(j) = r {
                if seen2.contains(j) {
                    return false;
                }
                seen2.insert(j);
            }
        }
        true
    }

    fn projects_into_factors(&self, z: &EventSet) -> bool {
        let (p1, p2) = self.projections_of(z);
        self.c1.is_config(&p1) && self.c2.is_config(&p2)
    }

    pub fn admits(&self, x: &EventSet) -> bool {
        if !self.injective(x) || !self.projects_into_factors(x) {
            return false;
        }
        let members = x.to_vec();
        let k = members.len();
        if k <= 1 {
            return true;
        }
        // Sub-sets of x whose projections are configurations of the factors.
        let witnesses: Vec<u64> = (0u64..(1 << k))
            .filter(|&mask| {
                let z: EventSet = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| members[b])
                    .collect();
                self.projects_into_factors(&z)
            })
            .collect();
        let covered = witnesses.iter().fold(0u64, |acc, m| acc | m);
        if covered != (1u64 << k) - 1 {
            return false;
        }
        (0..k).all(|a| (a + 1..k).all(|b| witnesses.iter().any(|m| ((m >> a) & 1) != ((m >> b) & 1))))
    }
}

/// Replaces the labeling; `r` must cover every event.
pub fn relabel(c: &ConfStructure, r: &HashMap<Event, ProductLabel>) -> Result<ConfStructure, ConfError> {
    let labels = c
        .events()
        .iter()
        .map(|e| {
            r.get(e)
                .cloned()
                .ok_or_else(|| ConfError::PartialRelabeling(e.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(relabel_with(c, labels))
}

pub(crate) fn relabel_with(c: &ConfStructure, labels: Vec<ProductLabel>) -> ConfStructure {
    ConfStructure::build(c.events.clone(), labels, c.configs.iter().cloned().collect())
}

/// Keeps the configurations included in `keep`, then drops unused events.
pub fn restrict_events(c: &ConfStructure, keep: &HashSet<Event>) -> Result<ConfStructure, ConfError> {
    if let Some(stray) = keep.iter().find(|e| c.position(e).is_none()) {
        return Err(ConfError::UnknownEvent(stray.clone()));
    }
    let keep: EventSet = keep.iter().filter_map(|e| c.position(e)).collect();
    Ok(restrict_to(c, &keep))
}

pub(crate) fn restrict_to(c: &ConfStructure, keep: &EventSet) -> ConfStructure {
    let configs = c.configs.iter().filter(|x| x.is_subset(keep)).cloned().collect();
    ConfStructure::build(c.events.clone(), c.labels.clone(), configs).compact()
}

fn blocked(label: &ProductLabel, names: &BTreeSet<Name>) -> bool {
    match label {
        ProductLabel::Single(l) => l.name().is_some_and(|a| names.contains(a)),
        _ => false,
    }
}

/// Removes every event labelled by a restricted name or its complement.
pub fn restrict_names(c: &ConfStructure, names: &BTreeSet<Name>) -> ConfStructure {
    let keep: EventSet = (0..c.event_count())
        .filter(|&e| !blocked(c.label(e), names))
        .collect();
    restrict_to(c, &keep)
}

/// Synchronisation relabeling of a product label; `Bottom` marks events that
/// parallel composition discards.
pub fn sync_label(label: &ProductLabel) -> ProductLabel {
    match label {
        ProductLabel::Single(l) => ProductLabel::Single(l.clone()),
        ProductLabel::Pair(a, b) => match (a.action(), b.action()) {
            (Some(x), Some(y)) if x.complements(y) => ProductLabel::Single(Label::Tau),
            _ => ProductLabel::Bottom,
        },
        ProductLabel::Bottom => ProductLabel::Bottom,
    }
}

fn pair_label(c1: &ConfStructure, c2: &ConfStructure, (l, r): Projection) -> ProductLabel {
    match (l, r) {
        (Some(i), None) => c1.label(i).clone(),
        (None, Some(j)) => c2.label(j).clone(),
        (Some(i), Some(j)) => {
            ProductLabel::Pair(Box::new(c1.label(i).clone()), Box::new(c2.label(j).clone()))
        }
        (None, None) => ProductLabel::Bottom,
    }
}

pub fn parallel(c1: &ConfStructure, c2: &ConfStructure) -> ConfStructure {
    let keep = |p: Projection| sync_label(&pair_label(c1, c2, p)) != ProductLabel::Bottom;
    let (prod, projections) = product_filtered(c1, c2, keep);
    let labels = projections
        .iter()
        .map(|&p| sync_label(&pair_label(c1, c2, p)))
        .collect();
    let relabelled = relabel_with(&prod, labels);
    let all = relabelled.all_events();
    restrict_to(&relabelled, &all)
}

pub fn coproduct(c1: &ConfStructure, c2: &ConfStructure) -> ConfStructure {
    let n1 = c1.event_count();
    let events = c1
        .events()
        .iter()
        .map(|e| Event::Inj(1, Arc::new(e.clone())))
        .chain(c2.events().iter().map(|e| Event::Inj(2, Arc::new(e.clone()))))
        .collect();
    let labels = c1.labels().iter().chain(c2.labels()).cloned().collect();
    let configs = c1
        .configs()
        .iter()
        .cloned()
        .chain(c2.configs().iter().map(|x| x.iter().map(|e| e + n1).collect()))
        .collect();
    ConfStructure::build(events, labels, configs)
}

/// The atom `prefix` adds on top of `c`: one more than the largest atom tag.
pub fn fresh_atom(c: &ConfStructure) -> Event {
    let next = c
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::Atom(k) => Some(k + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    Event::Atom(next)
}

pub fn prefix(label: Label, c: &ConfStructure) -> ConfStructure {
    let fresh = fresh_atom(c);
    let n = c.event_count();
    let mut events = c.events().to_vec();
    events.push(fresh);
    let mut labels = c.labels().to_vec();
    labels.push(ProductLabel::Single(label));
    let mut configs: BTreeSet<EventSet> = c.configs().iter().map(|x| x.with(n)).collect();
    configs.insert(EventSet::new());
    ConfStructure::build(events, labels, configs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutoConcurrency {
    pub config: EventSet,
    pub first: usize,
    pub second: usize,
}

/// Finds two distinct concurrent events with the same label in one configuration.
pub fn auto_concurrent(c: &ConfStructure) -> Option<AutoConcurrency> {
    for x in c.configs() {
        let members = x.to_vec();
        if members.len() < 2 {
            continue;
        }
        let order = causality(c, x).expect("x is a configuration");
        for (i, &d) in members.iter().enumerate() {
            for &e in &members[i + 1..] {
                if c.label(d) == c.label(e) && order.concurrent(d, e) {
                    return Some(AutoConcurrency {
                        config: x.clone(),
                        first: d,
                        second: e,
                    });
                }
            }
        }
    }
    None
}

/// The structure generated by `x`: its events and every configuration below it.
pub fn generate(c: &ConfStructure, x: &EventSet) -> Result<ConfStructure, ConfError> {
    if !c.is_config(x) {
        return Err(ConfError::NotAConfiguration(x.clone()));
    }
    let members = x.to_vec();
    let renumber: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let events = members.iter().map(|&e| c.events()[e].clone()).collect();
    let labels = members.iter().map(|&e| c.label(e).clone()).collect();
    let configs = c
        .configs()
        .iter()
        .filter(|y| y.is_subset(x))
        .map(|y| y.iter().map(|e| renumber[&e]).collect())
        .collect();
    Ok(ConfStructure::build(events, labels, configs))
}

/// A label-preserving bijection carrying the configurations of `c1` exactly
/// onto those of `c2`, as `map[e1] = e2`.
pub fn iso(c1: &ConfStructure, c2: &ConfStructure) -> Option<Vec<usize>> {
    let mut found = None;
    isos_until(c1, c2, |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

/// Every isomorphism between the two structures.
pub fn all_isos(c1: &ConfStructure, c2: &ConfStructure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    isos_until(c1, c2, |m| {
        out.push(m.to_vec());
        true
    });
    out
}

/// Backtracking search; `visit` returns false to stop early.
fn isos_until(c1: &ConfStructure, c2: &ConfStructure, mut visit: impl FnMut(&[usize]) -> bool) {
    let n = c1.event_count();
    if n != c2.event_count() || c1.configs().len() != c2.configs().len() {
        return;
    }
    let signature = |c: &ConfStructure, e: usize| {
        let containing: Vec<&EventSet> = c.configs().iter().filter(|x| x.contains(e)).collect();
        let least = containing.iter().map(|x| x.len()).min().unwrap_or(0);
        (c.label(e).clone(), containing.len(), least)
    };
    let sig1: Vec<_> = (0..n).map(|e| signature(c1, e)).collect();
    let sig2: Vec<_> = (0..n).map(|e| signature(c2, e)).collect();
    let mut s1 = sig1.clone();
    let mut s2 = sig2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return;
    }
    let size_profile = |c: &ConfStructure| {
        let mut v: Vec<usize> = c.configs().iter().map(EventSet::len).collect();
        v.sort();
        v
    };
    if size_profile(c1) != size_profile(c2) {
        return;
    }
    // Assign events in order of their smallest containing configuration so
    // configurations complete (and get checked) early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| (sig1[e].2, e));
    let mut rank = vec![0; n];
    for (k, &e) in order.iter().enumerate() {
        rank[e] = k;
    }
    let mut completes_at: Vec<Vec<&EventSet>> = vec![Vec::new(); n];
    for x in c1.configs() {
        if let Some(last) = x.iter().map(|e| rank[e]).max() {
            completes_at[last].push(x);
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut search = Search {
        c2,
        sig1: &sig1,
        sig2: &sig2,
        order: &order,
        completes_at: &completes_at,
    };
    search.go(0, &mut map, &mut used, &mut visit);
}

struct Search<'a, S> {
    c2: &'a ConfStructure,
    sig1: &'a [S],
    sig2: &'a [S],
    order: &'a [usize],
    completes_at: &'a [Vec<&'a EventSet>],
}

impl<S: PartialEq> Search<'_, S> {
    fn go(
        &mut self,
        k: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == self.order.len() {
            return visit(map);
        }
        let e = self.order[k];
        for t in 0..self.sig2.len() {
            if used[t] || self.sig1[e] != self.sig2[t] {
                continue;
            }
            map[e] = t;
            let consistent = self.completes_at[k]
                .iter()
                .all(|x| self.c2.is_config(&x.iter().map(|d| map[d]).collect()));
            if consistent {
                used[t] = true;
                let carry_on = self.go(k + 1, map, used, visit);
                used[t] = false;
                if !carry_on {
                    map[e] = usize::MAX;
                    return false;
                }
            }
            map[e] = usize::MAX;
        }
        true
    }
}
