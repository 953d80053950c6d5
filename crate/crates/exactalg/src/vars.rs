//! Process-wide registry of indeterminate names.
//!
//! Indices are assigned once and never change, so monomials can store plain
//! `u16` indices. The fixed prefix below pins the monomial order for every
//! name used by the engine; names first seen at runtime are appended.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::RwLock;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u16);

const PREDEFINED: &[&str] = &[
    "J2", "J3", "J4", "J5", "J6", "aa", "alpha", "beta", "gamma", "delta", "epsilon", "zeta",
    "X", "Y", "Z", "W", "x", "y", "z", "u", "v", "t", "q", "s", "lambda", "psi4", "psi6",
    "chi10", "chi12", "w",
];

struct Registry {
    names: Vec<String>,
    index: HashMap<String, u16>,
}

static REGISTRY: Lazy<RwLock<Registry>> = Lazy::new(|| {
    let names: Vec<String> = PREDEFINED.iter().map(|s| s.to_string()).collect();
    let index = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u16))
        .collect();
    RwLock::new(Registry { names, index })
});

/// Index of the named indeterminate, registering it if new.
pub fn var(name: &str) -> Var {
    if let Some(&i) = REGISTRY.read().unwrap().index.get(name) {
        return Var(i);
    }
    let mut reg = REGISTRY.write().unwrap();
    if let Some(&i) = reg.index.get(name) {
        return Var(i);
    }
    let i = reg.names.len() as u16;
    reg.names.push(name.to_string());
    reg.index.insert(name.to_string(), i);
    Var(i)
}

pub fn var_name(v: Var) -> String {
    REGISTRY.read().unwrap().names[v.0 as usize].clone()
}
