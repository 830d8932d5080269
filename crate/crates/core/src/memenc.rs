//! Memories as identified structures, addresses of reversible states in the
//! encoding of their origin, and the checks relating the two.

use std::sync::Arc;

use crate::bits::EventSet;
use crate::conf::{self, ConfStructure, Event, ProductLabel};
use crate::encoding::Encoder;
use crate::ident::{iparallel, Ident, IdentStructure};
use crate::rccs::{
    self, fold, forward_steps_with_id, id_causality, normalize, MemItem, Memory, RProcess, RccsError, Side,
    Transition,
};
use crate::syntax::Process;

/// Encodes one memory stack: every memory event sits above the previous top.
pub fn encode_stack(m: &Memory) -> IdentStructure {
    let mut events: Vec<Event> = Vec::new();
    let mut labels: Vec<ProductLabel> = Vec::new();
    let mut ids = Vec::new();
    let mut configs = vec![EventSet::new()];
    for item in m.items() {
        if let MemItem::Event(e) = item {
            let k = events.len();
            events.push(Event::Atom(k as u32));
            labels.push(ProductLabel::Single(e.label.clone()));
            ids.push(Ident::Nat(e.id));
            let top = configs.last().expect("nonempty").with(k);
            configs.push(top);
        }
    }
    let base = ConfStructure::new(events, labels, configs).expect("well-formed chain");
    IdentStructure::new(base, ids).expect("one id per event")
}

pub fn encode_memory(r: &RProcess) -> IdentStructure {
    match r {
        RProcess::Thread(m, _) => encode_stack(m),
        RProcess::Par(l, rr) => iparallel(&encode_memory(l), &encode_memory(rr)),
        RProcess::Restrict { inner, .. } => encode_memory(inner),
        RProcess::Choice { taken, .. } => encode_memory(taken),
    }
}

/// A reversible state seen as a configuration of the encoding of its origin.
#[derive(Clone, Debug)]
pub struct Address {
    pub origin: Process,
    pub structure: ConfStructure,
    pub config: EventSet,
    /// Forward trace from the origin, each transition with the event it adds.
    pub trace: Vec<(Transition, usize)>,
}

/// An event of the origin's encoding located by a memory, with the
/// identifier it carries there.
#[derive(Clone, Debug)]
struct Located {
    event: Event,
    id: u32,
}

fn first_memory(node: &RProcess) -> &Memory {
    node.memories()[0]
}

/// The memory event pushed directly above `m0` in the subtree.
fn event_above<'a>(node: &'a RProcess, m0: &Memory) -> &'a rccs::MemEvent {
    match &first_memory(node).items()[m0.len()] {
        MemItem::Event(e) => e,
        MemItem::Fork => panic!("expected a memory event above the thread's base"),
    }
}

/// Events of `⟦p⟧` already performed in `node`, which was distributed from a
/// thread `m0 ▷ p`.
fn locate(enc: &mut Encoder, p: &Process, node: &RProcess, m0: &Memory) -> Vec<Located> {
    if matches!(node, RProcess::Thread(m, q) if m == m0 && q == p) {
        return Vec::new();
    }
    match p {
        Process::Nil => Vec::new(),
        Process::Prefix(_, q) => {
            let e = event_above(node, m0);
            let atom = conf::fresh_atom(&enc.encode(q));
            let above = m0.pushed(MemItem::Event(e.clone()));
            let mut out = vec![Located {
                event: atom,
                id: e.id,
            }];
            out.extend(locate(enc, q, node, &above));
            out
        }
        Process::Sum(l, r) => {
            let (side, inner) = match node {
                RProcess::Choice {
                    taken, side, base, ..
                } if base == m0 => (*side, locate_arm(enc, *side, l, r, taken, m0)),
                _ => {
                    let side = event_above(node, m0)
                        .alt
                        .as_ref()
                        .expect("sum arms record their side")
                        .side;
                    (side, locate_arm(enc, side, l, r, node, m0))
                }
            };
            let tag = match side {
                Side::Left => 1,
                Side::Right => 2,
            };
            inner
                .into_iter()
                .map(|x| Located {
                    event: Event::Inj(tag, Arc::new(x.event)),
                    ..x
                })
                .collect()
        }
        Process::Par(l, r) => {
            let RProcess::Par(nl, nr) = node else {
                panic!("parallel body not distributed")
            };
            let forked = m0.pushed(MemItem::Fork);
            let left = locate(enc, l, nl, &forked);
            let right = locate(enc, r, nr, &forked);
            let mut out = Vec::new();
            for x in &left {
                match right.iter().find(|y| y.id == x.id) {
                    Some(y) => out.push(Located {
                        event: Event::Pair(Some(Arc::new(x.event.clone())), Some(Arc::new(y.event.clone()))),
                        id: x.id,
                    }),
                    None => out.push(Located {
                        event: Event::Pair(Some(Arc::new(x.event.clone())), None),
                        ..x.clone()
                    }),
                }
            }
            for y in right.iter().filter(|y| !left.iter().any(|x| x.id == y.id)) {
                out.push(Located {
                    event: Event::Pair(None, Some(Arc::new(y.event.clone()))),
                    ..y.clone()
                });
            }
            out
        }
        Process::Restrict(q, _) => {
            let RProcess::Restrict { inner, .. } = node else {
                panic!("restriction not distributed")
            };
            locate(enc, q, inner, m0)
        }
    }
}

fn locate_arm(
    enc: &mut Encoder,
    side: Side,
    l: &Process,
    r: &Process,
    node: &RProcess,
    m0: &Memory,
) -> Vec<Located> {
    let arm = match side {
        Side::Left => l,
        Side::Right => r,
    };
    locate(enc, arm, node, m0)
}

/// The configuration of `structure` that a state of `origin` occupies.
fn locate_config(
    enc: &mut Encoder,
    origin: &Process,
    structure: &ConfStructure,
    state: &RProcess,
) -> Result<EventSet, RccsError> {
    let mut x = EventSet::new();
    for found in locate(enc, origin, state, &Memory::empty()) {
        let e = structure.position(&found.event).ok_or(RccsError::NotReachable)?;
        x.insert(e);
    }
    if structure.is_config(&x) {
        Ok(x)
    } else {
        Err(RccsError::NotReachable)
    }
}

/// Rolls `r` back to its origin, replays the trail forward and maps every
/// forward transition to the event of the origin's encoding it adds.
pub fn address(r: &RProcess) -> Result<Address, RccsError> {
    let r = normalize(r);
    let trail = rccs::rollback(&r)?;
    let mut states = vec![r.clone()];
    states.extend(trail.iter().map(|s| s.target.clone()));
    let origin = match fold(states.last().expect("nonempty")) {
        Some((m, p)) if m.is_empty() => p,
        _ => return Err(RccsError::NotReachable),
    };
    let mut enc = Encoder::new();
    let structure = enc.encode(&origin).as_ref().clone();

    let mut config = EventSet::new();
    let mut trace = Vec::new();
    for k in (0..trail.len()).rev() {
        let (from, to) = (&states[k + 1], &states[k]);
        let undone = &trail[k].transition;
        let replayed = forward_steps_with_id(from, undone.id)?
            .into_iter()
            .find(|s| s.transition.label == undone.label && &s.target == to)
            .ok_or(RccsError::NotReachable)?;
        let next = locate_config(&mut enc, &origin, &structure, to)?;
        let added = next.difference(&config).to_vec();
        if added.len() != 1 || !config.is_subset(&next) {
            return Err(RccsError::NotReachable);
        }
        trace.push((replayed.transition, added[0]));
        config = next;
    }
    Ok(Address {
        origin,
        structure,
        config,
        trace,
    })
}

/// Configurations ordered by inclusion have exactly one maximal element.
pub fn check_poset_single_max(d: &IdentStructure) -> Result<(), String> {
    match d.base().maximal_configs().len() {
        1 => Ok(()),
        n => Err(format!("{n} maximal configurations")),
    }
}

/// The forgotten memory encoding is isomorphic to the structure generated by
/// the address.
pub fn check_generated_iso(r: &RProcess) -> Result<(), String> {
    let addr = address(r).map_err(|e| e.to_string())?;
    let past = conf::generate(&addr.structure, &addr.config).map_err(|e| e.to_string())?;
    let mem = encode_memory(&normalize(r));
    match conf::iso(mem.base(), &past) {
        Some(_) => Ok(()),
        None => Err(format!(
            "memory encoding ({} events, {} configurations) differs from the generated structure ({} events, {} configurations)",
            mem.base().event_count(),
            mem.base().configs().len(),
            past.event_count(),
            past.configs().len()
        )),
    }
}

/// Identifiers are unique over the whole memory encoding.
pub fn check_unique_ids(d: &IdentStructure) -> Result<(), String> {
    let ids = d.ids();
    for (k, i) in ids.iter().enumerate() {
        if ids[k + 1..].contains(i) {
            return Err(format!("identifier {i} labels two events"));
        }
    }
    Ok(())
}

/// Each identifier occurs at most once per memory.
pub fn check_ids_once_per_memory(r: &RProcess) -> Result<(), String> {
    for m in r.memories() {
        let ids: Vec<u32> = m.events().map(|e| e.id).collect();
        for (k, i) in ids.iter().enumerate() {
            if ids[k + 1..].contains(i) {
                return Err(format!("identifier {i} repeated in {m}"));
            }
        }
    }
    Ok(())
}

/// Stacking order on identifiers agrees with causality on the maximal
/// configuration of the memory encoding.
pub fn check_id_causality_iso(r: &RProcess) -> Result<(), String> {
    let r = normalize(r);
    let d = encode_memory(&r);
    let order = id_causality(&r);
    let nat = |e: usize| match d.id(e) {
        Ident::Nat(i) => Ok(*i),
        other => Err(format!("structured identifier {other}")),
    };
    let top = match d.base().maximal_configs().as_slice() {
        [x] => x.clone(),
        _ => return Err("no single maximal configuration".into()),
    };
    let ids: std::collections::BTreeSet<u32> = top.iter().map(nat).collect::<Result<_, _>>()?;
    if ids != order.ids {
        return Err(format!("identifiers {ids:?} versus {:?}", order.ids));
    }
    let causal = conf::causality(d.base(), &top).map_err(|e| e.to_string())?;
    for d1 in top.iter() {
        for d2 in top.iter() {
            let (i1, i2) = (nat(d1)?, nat(d2)?);
            if causal.leq(d1, d2) != order.leq(i1, i2) {
                return Err(format!("events {i1} and {i2} are ordered differently"));
            }
        }
    }
    Ok(())
}
