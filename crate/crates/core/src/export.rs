//! Graphviz and JSON renderings of (identified) configuration structures.

use std::collections::HashMap;
use std::fmt::Write;

use serde::Serialize;

use crate::bits::EventSet;
use crate::conf::ConfStructure;
use crate::ident::Ident;

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

fn subscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|d| SUBSCRIPTS[d.to_digit(10).expect("digit") as usize])
        .collect()
}

/// Display names for events: the label, numbered when several events share it,
/// and suffixed with `:id` when identifiers are given.
pub fn event_names(c: &ConfStructure, ids: Option<&[Ident]>) -> Vec<String> {
    let mut total: HashMap<String, usize> = HashMap::new();
    for l in c.labels() {
        *total.entry(l.to_string()).or_default() += 1;
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    (0..c.event_count())
        .map(|e| {
            let l = c.label(e).to_string();
            let mut name = l.clone();
            if total[&l] > 1 {
                let k = seen.entry(l).or_default();
                *k += 1;
                name.push_str(&subscript(*k));
            }
            if let Some(ids) = ids {
                write!(name, ":{}", ids[e]).expect("string write");
            }
            name
        })
        .collect()
}

fn set_name(names: &[String], x: &EventSet) -> String {
    if x.is_empty() {
        return "∅".into();
    }
    let parts: Vec<&str> = x.iter().map(|e| names[e].as_str()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram of the configurations, smaller ones at the bottom. Nodes in
/// `highlight` are filled gray.
pub fn to_dot(c: &ConfStructure, ids: Option<&[Ident]>, highlight: &[EventSet]) -> String {
    let names = event_names(c, ids);
    let mut out = String::from("digraph configurations {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for (k, x) in c.configs().iter().enumerate() {
        let style = if highlight.contains(x) {
            ", style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        writeln!(out, "  c{k} [label=\"{}\"{style}];", escape(&set_name(&names, x))).expect("string write");
    }
    for (k, x) in c.configs().iter().enumerate() {
        for e in 0..c.event_count() {
            if x.contains(e) {
                continue;
            }
            if let Some(t) = c.config_index(&x.with(e)) {
                writeln!(out, "  c{k} -> c{t};").expect("string write");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonEvent {
    id: usize,
    label: String,
}

#[derive(Serialize)]
struct JsonStructure {
    events: Vec<JsonEvent>,
    configs: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ids: Option<Vec<String>>,
}

/// `{"events":[{"id","label"}],"configs":[[..]]}` with configurations in size
/// order, plus `"ids"` for identified structures.
pub fn to_json(c: &ConfStructure, ids: Option<&[Ident]>) -> serde_json::Value {
    let events = (0..c.event_count())
        .map(|e| JsonEvent {
            id: e,
            label: c.label(e).to_string(),
        })
        .collect();
    let configs = c.configs().iter().map(EventSet::to_vec).collect();
    let ids = ids.map(|ids| ids.iter().map(Ident::to_string).collect());
    serde_json::to_value(JsonStructure { events, configs, ids }).expect("plain data serializes")
}
