//! Greatest-fixpoint solver for bisimulation games.
//!
//! Each node carries obligations; an obligation is discharged while at least
//! one of its candidate successors survives. Nodes are discovered lazily from
//! a root and deleted in rounds, so every deleted node knows how many rounds
//! it took to refute it.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

pub trait Arena {
    type Node: Clone + Eq + Hash;
    type Move: Clone;

    /// Attacker moves from `n`, each with the defender's possible answers.
    fn obligations(&mut self, n: &Self::Node) -> Vec<(Self::Move, Vec<Self::Node>)>;
}

/// The universe exceeded the configured number of nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TooLarge(pub usize);

pub struct Solved<N, M> {
    pub nodes: Vec<N>,
    pub obligations: Vec<Vec<(M, Vec<usize>)>>,
    /// Round in which a node was refuted, `None` for survivors.
    pub death: Vec<Option<usize>>,
}

/// One round of the game: the attacker's move from a node and the defender's
/// reply, absent when no answer survives.
#[derive(Clone, Debug)]
pub struct Round<N, M> {
    pub from: N,
    pub attack: M,
    pub reply: Option<N>,
}

pub fn solve<A: Arena>(
    arena: &mut A,
    root: A::Node,
    cap: usize,
) -> Result<Solved<A::Node, A::Move>, TooLarge> {
    let mut index: HashMap<A::Node, usize> = HashMap::new();
    let mut nodes = vec![root.clone()];
    index.insert(root, 0);
    let mut obligations: Vec<Vec<(A::Move, Vec<usize>)>> = Vec::new();
    let mut k = 0;
    while k < nodes.len() {
        let node = nodes[k].clone();
        let mut obs = Vec::new();
        for (mv, answers) in arena.obligations(&node) {
            let mut ids = Vec::with_capacity(answers.len());
            for a in answers {
                let id = match index.get(&a) {
                    Some(&id) => id,
                    None => {
                        if nodes.len() >= cap {
                            return Err(TooLarge(cap));
                        }
                        let id = nodes.len();
                        index.insert(a.clone(), id);
                        nodes.push(a);
                        id
                    }
                };
                ids.push(id);
            }
            obs.push((mv, ids));
        }
        obligations.push(obs);
        k += 1;
    }

    let n = nodes.len();
    let mut waiting_on: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut remaining: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut death = vec![None; n];
    let mut queue = VecDeque::new();
    for (v, obs) in obligations.iter().enumerate() {
        let mut counts = Vec::with_capacity(obs.len());
        for (o, (_, cands)) in obs.iter().enumerate() {
            counts.push(cands.len());
            for &c in cands {
                waiting_on[c].push((v, o));
            }
            if cands.is_empty() && death[v].is_none() {
                death[v] = Some(0);
                queue.push_back(v);
            }
        }
        remaining.push(counts);
    }
    while let Some(d) = queue.pop_front() {
        let round = death[d].expect("queued nodes are dead");
        for &(v, o) in &waiting_on[d] {
            remaining[v][o] -= 1;
            if remaining[v][o] == 0 && death[v].is_none() {
                death[v] = Some(round + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(Solved {
        nodes,
        obligations,
        death,
    })
}

impl<N: Clone, M: Clone> Solved<N, M> {
    pub fn root_survives(&self) -> bool {
        self.death[0].is_none()
    }

    /// Surviving nodes reachable from the root through surviving answers.
    pub fn surviving_relation(&self) -> Vec<N> {
        if !self.root_survives() {
            return Vec::new();
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(self.nodes[v].clone());
            for (_, cands) in &self.obligations[v] {
                for &c in cands {
                    if self.death[c].is_none() && !seen[c] {
                        seen[c] = true;
                        queue.push_back(c);
                    }
                }
            }
        }
        out
    }

    /// Shortest refutation of the root: the attacker plays the move whose
    /// answers were all refuted earliest, the defender the answer that held
    /// out longest.
    pub fn refutation(&self) -> Vec<Round<N, M>> {
        let mut out = Vec::new();
        let mut v = 0;
        while let Some(round) = self.death[v] {
            let latest = |cands: &[usize]| cands.iter().map(|&c| self.death[c].expect("refuted")).max();
            let (mv, cands) = self.obligations[v]
                .iter()
                .filter(|(_, cands)| cands.iter().all(|&c| self.death[c].is_some()))
                .min_by_key(|(_, cands)| latest(cands).map_or(0, |r| r + 1))
                .expect("a refuted node has a lost obligation");
            let reply = cands.iter().copied().max_by_key(|&c| self.death[c]);
            out.push(Round {
                from: self.nodes[v].clone(),
                attack: mv.clone(),
                reply: reply.map(|c| self.nodes[c].clone()),
            });
            match reply {
                Some(c) => {
                    debug_assert!(self.death[c].expect("refuted") < round);
                    v = c;
                }
                None => break,
            }
        }
        out
    }
}
