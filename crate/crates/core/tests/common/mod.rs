//! Slow, definition-following oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use ccs_hhpb::bits::EventSet;
use ccs_hhpb::conf::{self, ConfStructure, Event};
use ccs_hhpb::equiv::{ProcTriple, Relation, StructTriple};
use ccs_hhpb::memenc::encode_memory;
use ccs_hhpb::rccs::{backward_steps, forward_steps_from, lift, normalize, RProcess};
use ccs_hhpb::syntax::{Label, Process};

pub type Family = BTreeSet<BTreeSet<usize>>;

pub fn family(c: &ConfStructure) -> Family {
    c.configs().iter().map(|x| x.iter().collect()).collect()
}

/// `d ≤ e` in `x` iff every configuration inside `x` holding `e` holds `d`.
pub fn naive_leq(c: &ConfStructure, x: &BTreeSet<usize>, d: usize, e: usize) -> bool {
    family(c)
        .iter()
        .filter(|y| y.is_subset(x) && y.contains(&e))
        .all(|y| y.contains(&d))
}

/// Checks the configuration-structure axioms by brute force; returns the
/// first violated one.
pub fn axioms(c: &ConfStructure) -> Result<(), String> {
    let fam = family(c);
    for x in &fam {
        let xs: Vec<usize> = x.iter().copied().collect();
        for (k, &d) in xs.iter().enumerate() {
            for &e in &xs[k + 1..] {
                let separated = fam
                    .iter()
                    .any(|y| y.is_subset(x) && (y.contains(&d) != y.contains(&e)));
                if !separated {
                    return Err(format!("coincidence: {d} and {e} in {x:?}"));
                }
            }
        }
    }
    for x in &fam {
        for y in &fam {
            let u: BTreeSet<usize> = x.union(y).copied().collect();
            let bounded = fam.iter().any(|z| u.is_subset(z));
            if bounded {
                if !fam.contains(&u) {
                    return Err(format!("completeness: {x:?} ∪ {y:?}"));
                }
                let i: BTreeSet<usize> = x.intersection(y).copied().collect();
                if !fam.contains(&i) {
                    return Err(format!("stability: {x:?} ∩ {y:?}"));
                }
            }
        }
    }
    Ok(())
}

pub type PEvent = (Option<usize>, Option<usize>);

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect()
        })
        .collect()
}

fn project(x: &BTreeSet<PEvent>, side: usize) -> BTreeSet<usize> {
    x.iter()
        .filter_map(|&(l, r)| if side == 1 { l } else { r })
        .collect()
}

/// Product configurations by enumerating every subset of `E₁ ×⋆ E₂`.
pub fn naive_product(c1: &ConfStructure, c2: &ConfStructure) -> BTreeSet<BTreeSet<PEvent>> {
    let (f1, f2) = (family(c1), family(c2));
    let mut events: Vec<PEvent> = Vec::new();
    for i in 0..c1.event_count() {
        events.push((Some(i), None));
        for j in 0..c2.event_count() {
            events.push((Some(i), Some(j)));
        }
    }
    for j in 0..c2.event_count() {
        events.push((None, Some(j)));
    }
    let projects_ok = |z: &BTreeSet<PEvent>| f1.contains(&project(z, 1)) && f2.contains(&project(z, 2));
    let mut out = BTreeSet::new();
    // injectivity bounds the size, which keeps the enumeration small
    let bound = c1.event_count() + c2.event_count();
    for x in subsets(&events) {
        if x.len() > bound || !projects_ok(&x) {
            continue;
        }
        let xs: Vec<PEvent> = x.iter().copied().collect();
        let injective = xs.iter().enumerate().all(|(k, a)| {
            xs[k + 1..]
                .iter()
                .all(|b| !((a.0.is_some() && a.0 == b.0) || (a.1.is_some() && a.1 == b.1)))
        });
        if !injective {
            continue;
        }
        let inner = subsets(&xs);
        let good: Vec<&BTreeSet<PEvent>> = inner.iter().filter(|z| projects_ok(z)).collect();
        let separated = xs.iter().enumerate().all(|(k, a)| {
            xs[k + 1..]
                .iter()
                .all(|b| good.iter().any(|z| z.contains(a) != z.contains(b)))
        });
        if separated {
            out.insert(x);
        }
    }
    out
}

/// The library's product, re-expressed over index pairs.
pub fn library_product(c1: &ConfStructure, c2: &ConfStructure) -> BTreeSet<BTreeSet<PEvent>> {
    let p = conf::product(c1, c2);
    let index: Vec<PEvent> = p
        .events()
        .iter()
        .map(|e| match e {
            Event::Pair(l, r) => (
                l.as_ref().map(|e| c1.position(e).expect("left component")),
                r.as_ref().map(|e| c2.position(e).expect("right component")),
            ),
            other => panic!("unexpected product event {other}"),
        })
        .collect();
    p.configs()
        .iter()
        .map(|x| x.iter().map(|e| index[e]).collect())
        .collect()
}

pub type Map = Vec<(u32, u32)>;

/// A naive triple: configurations as sets and a sorted bijection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
    pub map: Map,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Label-preserving and causality-reflecting-and-preserving.
pub fn naive_valid(c1: &ConfStructure, c2: &ConfStructure, t: &Triple) -> bool {
    let f: HashMap<usize, usize> = t.map.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
    if f.len() != t.left.len() || t.left.len() != t.right.len() {
        return false;
    }
    if !t
        .left
        .iter()
        .all(|a| f.get(a).is_some_and(|b| t.right.contains(b)))
    {
        return false;
    }
    let image: HashSet<usize> = f.values().copied().collect();
    if image.len() != f.len() {
        return false;
    }
    t.left.iter().all(|&a| c1.label(a) == c2.label(f[&a]))
        && t.left.iter().all(|&a| {
            t.left
                .iter()
                .all(|&b| naive_leq(c1, &t.left, a, b) == naive_leq(c2, &t.right, f[&a], f[&b]))
        })
}

/// Every valid triple of the two structures.
pub fn universe(c1: &ConfStructure, c2: &ConfStructure) -> Vec<Triple> {
    let (f1, f2) = (family(c1), family(c2));
    let mut out = Vec::new();
    for x in &f1 {
        for y in &f2 {
            if x.len() != y.len() {
                continue;
            }
            let (xs, ys): (Vec<usize>, Vec<usize>) =
                (x.iter().copied().collect(), y.iter().copied().collect());
            for p in permutations(xs.len()) {
                let mut map: Map = xs
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| (a as u32, ys[p[k]] as u32))
                    .collect();
                map.sort_unstable();
                let t = Triple {
                    left: x.clone(),
                    right: y.clone(),
                    map,
                };
                if naive_valid(c1, c2, &t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn restricted(map: &Map, keep: &BTreeSet<usize>) -> Map {
    map.iter()
        .copied()
        .filter(|(a, _)| keep.contains(&(*a as usize)))
        .collect()
}

fn restricted_right(map: &Map, keep: &BTreeSet<usize>) -> Map {
    map.iter()
        .copied()
        .filter(|(_, b)| keep.contains(&(*b as usize)))
        .collect()
}

/// Whether the triple `t` meets the clauses of `rel` inside `r`.
fn clauses_hold(
    c1: &ConfStructure,
    c2: &ConfStructure,
    rel: Relation,
    t: &Triple,
    r: &HashSet<Triple>,
) -> bool {
    let (f1, f2) = (family(c1), family(c2));
    let wf = matches!(rel, Relation::WfHpb | Relation::WfHhpb);
    let hered = matches!(rel, Relation::Hhpb | Relation::WfHhpb);
    let covers_up = |f: &Family, x: &BTreeSet<usize>| -> Vec<BTreeSet<usize>> {
        f.iter()
            .filter(|y| y.len() == x.len() + 1 && x.is_subset(y))
            .cloned()
            .collect()
    };
    let covers_down = |f: &Family, x: &BTreeSet<usize>| -> Vec<BTreeSet<usize>> {
        f.iter()
            .filter(|y| y.len() + 1 == x.len() && y.is_subset(x))
            .cloned()
            .collect()
    };
    // forward, left attacks
    for y1 in covers_up(&f1, &t.left) {
        let ok = covers_up(&f2, &t.right).iter().any(|y2| {
            r.iter()
                .any(|u| u.left == y1 && &u.right == y2 && (wf || restricted(&u.map, &t.left) == t.map))
        });
        if !ok {
            return false;
        }
    }
    for y2 in covers_up(&f2, &t.right) {
        let ok = covers_up(&f1, &t.left).iter().any(|y1| {
            r.iter().any(|u| {
                &u.left == y1 && u.right == y2 && (wf || restricted_right(&u.map, &t.right) == t.map)
            })
        });
        if !ok {
            return false;
        }
    }
    if !hered {
        return true;
    }
    for y1 in covers_down(&f1, &t.left) {
        let ok = covers_down(&f2, &t.right).iter().any(|y2| {
            r.iter()
                .any(|u| u.left == y1 && &u.right == y2 && (wf || restricted(&t.map, &y1) == u.map))
        });
        if !ok {
            return false;
        }
    }
    for y2 in covers_down(&f2, &t.right) {
        let ok = covers_down(&f1, &t.left).iter().any(|y1| {
            r.iter()
                .any(|u| &u.left == y1 && u.right == y2 && (wf || restricted_right(&t.map, &y2) == u.map))
        });
        if !ok {
            return false;
        }
    }
    true
}

fn root() -> Triple {
    Triple {
        left: BTreeSet::new(),
        right: BTreeSet::new(),
        map: Vec::new(),
    }
}

/// Kleene iteration from the full universe down to the greatest bisimulation.
pub fn naive_check(c1: &ConfStructure, c2: &ConfStructure, rel: Relation) -> bool {
    let mut r: HashSet<Triple> = universe(c1, c2).into_iter().collect();
    loop {
        let keep: HashSet<Triple> = r
            .iter()
            .filter(|t| clauses_hold(c1, c2, rel, t, &r))
            .cloned()
            .collect();
        if keep.len() == r.len() {
            return r.contains(&root());
        }
        r = keep;
    }
}

/// Tries every subset of the universe holding the root; `None` when the
/// universe is too large to enumerate.
pub fn enumerate_relations(
    c1: &ConfStructure,
    c2: &ConfStructure,
    rel: Relation,
    limit: usize,
) -> Option<bool> {
    let all = universe(c1, c2);
    let Some(pos) = all.iter().position(|t| *t == root()) else {
        return Some(false);
    };
    let others: Vec<Triple> = all
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != pos)
        .map(|(_, t)| t.clone())
        .collect();
    if others.len() > limit {
        return None;
    }
    for mask in 0u64..1 << others.len() {
        let mut r: HashSet<Triple> = HashSet::from([root()]);
        for (k, t) in others.iter().enumerate() {
            if mask >> k & 1 == 1 {
                r.insert(t.clone());
            }
        }
        if r.iter().all(|t| clauses_hold(c1, c2, rel, t, &r)) {
            return Some(true);
        }
    }
    Some(false)
}

pub fn universe_size(c1: &ConfStructure, c2: &ConfStructure) -> usize {
    universe(c1, c2).len()
}

/// Re-validates a relation returned by the structure checker.
pub fn validate_structure_relation(
    c1: &ConfStructure,
    c2: &ConfStructure,
    rel: Relation,
    triples: &[StructTriple],
) -> Result<(), String> {
    let set = |x: &EventSet| x.iter().collect::<BTreeSet<usize>>();
    let r: HashSet<Triple> = triples
        .iter()
        .map(|t| Triple {
            left: set(&t.left),
            right: set(&t.right),
            map: t.map.clone(),
        })
        .collect();
    if !r.contains(&root()) {
        return Err("root triple missing".into());
    }
    for t in &r {
        if !naive_valid(c1, c2, t) {
            return Err(format!("invalid triple {t:?}"));
        }
        if !clauses_hold(c1, c2, rel, t, &r) {
            return Err(format!("clauses fail at {t:?}"));
        }
    }
    Ok(())
}

/// Whether `map` (identifiers) is an isomorphism of the two memory encodings.
pub fn naive_memory_iso(s1: &RProcess, s2: &RProcess, map: &Map) -> bool {
    let (d1, d2) = (encode_memory(s1), encode_memory(s2));
    let nat = |i: &ccs_hhpb::ident::Ident| i.to_string().parse::<u32>().expect("natural identifier");
    let ev1: HashMap<u32, usize> = d1.ids().iter().enumerate().map(|(e, i)| (nat(i), e)).collect();
    let ev2: HashMap<u32, usize> = d2.ids().iter().enumerate().map(|(e, i)| (nat(i), e)).collect();
    if map.len() != ev1.len() || map.len() != ev2.len() {
        return false;
    }
    let mut f = HashMap::new();
    for &(a, b) in map {
        let (Some(&e1), Some(&e2)) = (ev1.get(&a), ev2.get(&b)) else {
            return false;
        };
        if d1.base().label(e1) != d2.base().label(e2) {
            return false;
        }
        f.insert(e1, e2);
    }
    let image: Family = family(d1.base())
        .iter()
        .map(|x| x.iter().map(|e| f[e]).collect())
        .collect();
    image == family(d2.base())
}

/// Re-validates a relation returned by the process checker.
pub fn validate_process_relation(
    p1: &Process,
    p2: &Process,
    rel: Relation,
    id_base: u32,
    triples: &[ProcTriple],
) -> Result<(), String> {
    let wf = matches!(rel, Relation::WfHpb | Relation::WfHhpb);
    let hered = matches!(rel, Relation::Hhpb | Relation::WfHhpb);
    let r: HashSet<(RProcess, RProcess, Map)> = triples
        .iter()
        .map(|t| (t.left.clone(), t.right.clone(), t.map.clone()))
        .collect();
    let start = (normalize(&lift(p1)), normalize(&lift(p2)), Vec::new());
    if !r.contains(&start) {
        return Err("initial triple missing".into());
    }
    let with = |f: &Map, a: u32, b: u32| {
        let mut g = f.clone();
        g.push((a, b));
        g.sort_unstable();
        g
    };
    let without = |f: &Map, a: u32| f.iter().copied().filter(|p| p.0 != a).collect::<Map>();
    for (s1, s2, f) in &r {
        if !naive_memory_iso(s1, s2, f) {
            return Err(format!("not an isomorphism at ({s1}, {s2}, {f:?})"));
        }
        let moves = |s: &RProcess, back: bool| -> Vec<(u32, Label, RProcess)> {
            let steps = if back {
                backward_steps(s)
            } else {
                forward_steps_from(s, id_base)
            };
            steps
                .into_iter()
                .map(|st| (st.transition.id, st.transition.label, st.target))
                .collect()
        };
        for back in [false, true] {
            if back && !hered {
                continue;
            }
            let (m1, m2) = (moves(s1, back), moves(s2, back));
            for (i, l, t1) in &m1 {
                let ok = m2.iter().any(|(j, k, t2)| {
                    k == l
                        && r.iter().any(|(u1, u2, g)| {
                            u1 == t1
                                && u2 == t2
                                && (wf
                                    || if back {
                                        f.contains(&(*i, *j)) && *g == without(f, *i)
                                    } else {
                                        *g == with(f, *i, *j)
                                    })
                        })
                });
                if !ok {
                    return Err(format!("left move {i}:{l} from {s1} unmatched"));
                }
            }
            for (j, l, t2) in &m2 {
                let ok = m1.iter().any(|(i, k, t1)| {
                    k == l
                        && r.iter().any(|(u1, u2, g)| {
                            u1 == t1
                                && u2 == t2
                                && (wf
                                    || if back {
                                        f.contains(&(*i, *j)) && *g == without(f, *i)
                                    } else {
                                        *g == with(f, *i, *j)
                                    })
                        })
                });
                if !ok {
                    return Err(format!("right move {j}:{l} from {s2} unmatched"));
                }
            }
        }
    }
    Ok(())
}
