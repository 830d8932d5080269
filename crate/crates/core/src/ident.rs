//! Identified configuration structures: every event carries an identifier,
//! and no configuration holds two events with the same one.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::bits::EventSet;
use crate::conf::{self, ConfError, ConfStructure, Event, ProductLabel, Projection};
use crate::syntax::Label;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ident {
    Nat(u32),
    /// The identifier of the undefined side of a product event.
    Star,
    Pair(Box<Ident>, Box<Ident>),
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ident::Nat(i) => write!(f, "{i}"),
            Ident::Star => f.write_str("*"),
            Ident::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentStructure {
    base: ConfStructure,
    ids: Vec<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub config: EventSet,
    pub events: (usize, usize),
}

impl IdentStructure {
    pub fn new(base: ConfStructure, ids: Vec<Ident>) -> Result<IdentStructure, ConfError> {
        if ids.len() != base.event_count() {
            return Err(ConfError::Malformed(
                "one identifier per event is required".into(),
            ));
        }
        Ok(IdentStructure { base, ids })
    }

    /// The empty identified structure.
    pub fn zero() -> IdentStructure {
        IdentStructure {
            base: ConfStructure::zero(),
            ids: Vec::new(),
        }
    }

    pub fn base(&self) -> &ConfStructure {
        &self.base
    }

    pub fn ids(&self) -> &[Ident] {
        &self.ids
    }

    pub fn id(&self, e: usize) -> &Ident {
        &self.ids[e]
    }

    /// Events carrying identifier `i`.
    pub fn events_with_id(&self, i: &Ident) -> Vec<usize> {
        (0..self.ids.len()).filter(|&e| &self.ids[e] == i).collect()
    }

    pub fn collision_free(&self) -> Result<(), Collision> {
        for x in self.base.configs() {
            let members = x.to_vec();
            for (k, &d) in members.iter().enumerate() {
                if let Some(&e) = members[k + 1..].iter().find(|&&e| self.ids[e] == self.ids[d]) {
                    return Err(Collision {
                        config: x.clone(),
                        events: (d, e),
                    });
                }
            }
        }
        Ok(())
    }

    /// Re-attaches identifiers to a structure whose events are a subset of ours.
    fn carry_ids(&self, base: ConfStructure) -> IdentStructure {
        let ids = base
            .events()
            .iter()
            .map(|e| self.ids[self.base.position(e).expect("event survives")].clone())
            .collect();
        IdentStructure { base, ids }
    }
}

pub fn forget(d: &IdentStructure) -> ConfStructure {
    d.base.clone()
}

/// Numbers events 1, 2, … in index order.
pub fn lift_total_order(c: &ConfStructure) -> IdentStructure {
    let ids = (1..=c.event_count() as u32).map(Ident::Nat).collect();
    IdentStructure { base: c.clone(), ids }
}

fn pair_id(d1: &IdentStructure, d2: &IdentStructure, (l, r): Projection) -> Ident {
    let side = |d: &IdentStructure, e: Option<usize>| e.map_or(Ident::Star, |e| d.ids[e].clone());
    Ident::Pair(Box::new(side(d1, l)), Box::new(side(d2, r)))
}

pub fn iproduct(d1: &IdentStructure, d2: &IdentStructure) -> IdentStructure {
    let (base, projections) = conf::product_filtered(&d1.base, &d2.base, |_| true);
    let ids = projections.iter().map(|&p| pair_id(d1, d2, p)).collect();
    IdentStructure { base, ids }
}

pub fn irelabel(d: &IdentStructure, r: &HashMap<Event, ProductLabel>) -> Result<IdentStructure, ConfError> {
    Ok(IdentStructure {
        base: conf::relabel(&d.base, r)?,
        ids: d.ids.clone(),
    })
}

pub fn irestrict(d: &IdentStructure, keep: &HashSet<Event>) -> Result<IdentStructure, ConfError> {
    Ok(d.carry_ids(conf::restrict_events(&d.base, keep)?))
}

/// Relabeling of a product event in the parallel composition; `Bottom`
/// discards it.
fn ident_sync_label(d1: &IdentStructure, d2: &IdentStructure, (l, r): Projection) -> ProductLabel {
    match (l, r) {
        (Some(i), Some(j)) => {
            if d1.ids[i] != d2.ids[j] {
                return ProductLabel::Bottom;
            }
            let (a, b) = (d1.base.label(i), d2.base.label(j));
            match (a.action(), b.action()) {
                (Some(x), Some(y)) if x.complements(y) => ProductLabel::Single(Label::Tau),
                (Some(x), Some(y)) if x == y => ProductLabel::Single(x.clone()),
                _ => ProductLabel::Pair(Box::new(a.clone()), Box::new(b.clone())),
            }
        }
        (Some(i), None) if d2.ids.contains(&d1.ids[i]) => ProductLabel::Bottom,
        (None, Some(j)) if d1.ids.contains(&d2.ids[j]) => ProductLabel::Bottom,
        (Some(i), None) => d1.base.label(i).clone(),
        (None, Some(j)) => d2.base.label(j).clone(),
        (None, None) => ProductLabel::Bottom,
    }
}

/// Parallel composition; surviving pairs are identified by their shared
/// component identifier.
pub fn iparallel(d1: &IdentStructure, d2: &IdentStructure) -> IdentStructure {
    let keep = |p: Projection| ident_sync_label(d1, d2, p) != ProductLabel::Bottom;
    let (prod, projections) = conf::product_filtered(&d1.base, &d2.base, keep);
    let labels = projections.iter().map(|&p| ident_sync_label(d1, d2, p)).collect();
    let ids = projections
        .iter()
        .map(|&(l, r)| match (l, r) {
            (Some(i), _) => d1.ids[i].clone(),
            (None, Some(j)) => d2.ids[j].clone(),
            (None, None) => unreachable!("(*,*) is not a product event"),
        })
        .collect();
    let relabelled = IdentStructure {
        base: conf::relabel_with(&prod, labels),
        ids,
    };
    let all = relabelled.base.all_events();
    relabelled.carry_ids(conf::restrict_to(&relabelled.base, &all))
}
