//! Denotation of CCS terms as configuration structures.

use std::collections::HashMap;
use std::sync::Arc;

use crate::conf::{self, AutoConcurrency, ConfStructure};
use crate::syntax::Process;

/// Encoder with a per-term cache; repeated sub-terms are encoded once.
#[derive(Default)]
pub struct Encoder {
    cache: HashMap<Process, Arc<ConfStructure>>,
}

impl Encoder {
    pub fn new() -> Encoder {
        Encoder::default()
    }

    pub fn encode(&mut self, p: &Process) -> Arc<ConfStructure> {
        if let Some(c) = self.cache.get(p) {
            return Arc::clone(c);
        }
        let c = match p {
            Process::Nil => ConfStructure::zero(),
            Process::Prefix(l, q) => conf::prefix(l.clone(), &self.encode(q)),
            Process::Par(q, r) => conf::parallel(&self.encode(q), &self.encode(r)),
            Process::Sum(q, r) => conf::coproduct(&self.encode(q), &self.encode(r)),
            Process::Restrict(q, names) => conf::restrict_names(&self.encode(q), names),
        };
        let c = Arc::new(c);
        self.cache.insert(p.clone(), Arc::clone(&c));
        c
    }
}

pub fn encode(p: &Process) -> ConfStructure {
    Encoder::new().encode(p).as_ref().clone()
}

/// Auto-concurrency of a process is that of its encoding.
pub fn process_auto_concurrent(p: &Process) -> Option<AutoConcurrency> {
    conf::auto_concurrent(&encode(p))
}
