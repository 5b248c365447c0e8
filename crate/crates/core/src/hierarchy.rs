//! Tree-structured entity taxonomy.
//!
//! The taxonomy is built from a hypernym relation (possibly a DAG) in three
//! steps: keep every hypernym chain of the base entities, splice out internal
//! nodes that have a single child, and finally keep one parent per node. The
//! result supplies entity names, legend labels and their parent/grandparent
//! classes to the chart and question generators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("hypernym relation contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("empty node name")]
    EmptyName,
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("`{0}` is a root and has no ancestors")]
    RootHasNoAncestors(String),
    #[error("`{0}` has a parent but no grandparent")]
    NoGrandparent(String),
    #[error("no grandparent offers {k_parents} parents with {k_children} children each")]
    InsufficientEntities { k_parents: usize, k_children: usize },
    #[error("sample sizes must be at least 1")]
    InvalidRequest,
    #[error("hierarchy invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityHierarchy {
    pub nodes: BTreeMap<String, EntityNode>,
    pub roots: Vec<String>,
}

/// Parent and grandparent class of a sampled entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ancestry {
    pub parent: String,
    pub grandparent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySample {
    pub grandparent: String,
    pub parents: Vec<String>,
    /// Entities in sampling order (grouped by parent).
    pub order: Vec<String>,
    pub entities: BTreeMap<String, Ancestry>,
}

impl EntitySample {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn ancestry(&self, entity: &str) -> Option<&Ancestry> {
        self.entities.get(entity)
    }
}

/// Parses the bundled edge-list format: `child<TAB>parent[,parent...]`,
/// `#` comments and blank lines ignored. Roots carry an empty parent column.
pub fn parse_edge_list(text: &str) -> Result<Vec<(String, Vec<String>)>, HierarchyError> {
    let mut merged: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (child, parents) = match line.split_once('\t') {
            Some((c, p)) => (c, p),
            None => (line, ""),
        };
        let child = normalize(child).ok_or_else(|| HierarchyError::Parse {
            line: idx + 1,
            message: "missing node name".into(),
        })?;
        let entry = merged.entry(child).or_default();
        for p in parents.split(',').filter(|p| !p.trim().is_empty()) {
            let p = normalize(p).ok_or_else(|| HierarchyError::Parse {
                line: idx + 1,
                message: "empty parent name".into(),
            })?;
            entry.insert(p);
        }
    }
    Ok(merged.into_iter().map(|(c, ps)| (c, ps.into_iter().collect())).collect())
}

fn normalize(name: &str) -> Option<String> {
    let n = name.trim().to_lowercase();
    (!n.is_empty()).then_some(n)
}

/// Mutable adjacency used while building.
#[derive(Default)]
struct Graph {
    parents: BTreeMap<String, BTreeSet<String>>,
    children: BTreeMap<String, BTreeSet<String>>,
}

impl Graph {
    fn ensure(&mut self, n: &str) {
        self.parents.entry(n.to_string()).or_default();
        self.children.entry(n.to_string()).or_default();
    }

    fn add_edge(&mut self, parent: &str, child: &str) {
        self.ensure(parent);
        self.ensure(child);
        self.children.get_mut(parent).unwrap().insert(child.to_string());
        self.parents.get_mut(child).unwrap().insert(parent.to_string());
    }

    fn remove_edge(&mut self, parent: &str, child: &str) {
        if let Some(cs) = self.children.get_mut(parent) {
            cs.remove(child);
        }
        if let Some(ps) = self.parents.get_mut(child) {
            ps.remove(parent);
        }
    }

    /// Removes `node`, connecting each of its parents to each of its children.
    fn splice_out(&mut self, node: &str) {
        let ps: Vec<String> = self.parents[node].iter().cloned().collect();
        let cs: Vec<String> = self.children[node].iter().cloned().collect();
        for p in &ps {
            self.remove_edge(p, node);
        }
        for c in &cs {
            self.remove_edge(node, c);
        }
        for p in &ps {
            for c in &cs {
                self.add_edge(p, c);
            }
        }
        self.parents.remove(node);
        self.children.remove(node);
    }

    fn find_cycle(&self) -> Option<String> {
        // Kahn's algorithm; whatever is left over sits on or behind a cycle.
        let mut indeg: BTreeMap<&str, usize> =
            self.parents.iter().map(|(n, ps)| (n.as_str(), ps.len())).collect();
        let mut ready: Vec<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut seen = 0usize;
        while let Some(n) = ready.pop() {
            seen += 1;
            for c in &self.children[n] {
                let d = indeg.get_mut(c.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(c.as_str());
                }
            }
        }
        if seen == indeg.len() {
            None
        } else {
            indeg.into_iter().find(|(_, d)| *d > 0).map(|(n, _)| n.to_string())
        }
    }
}

/// Builds the pruned entity tree from a hypernym relation.
pub fn build_hierarchy(dag: &[(String, Vec<String>)]) -> Result<EntityHierarchy, HierarchyError> {
    let mut g = Graph::default();
    for (node, hypernyms) in dag {
        let node = normalize(node).ok_or(HierarchyError::EmptyName)?;
        g.ensure(&node);
        for h in hypernyms {
            let h = normalize(h).ok_or(HierarchyError::EmptyName)?;
            if h == node {
                return Err(HierarchyError::CycleDetected(node));
            }
            g.add_edge(&h, &node);
        }
    }
    if let Some(n) = g.find_cycle() {
        return Err(HierarchyError::CycleDetected(n));
    }

    // Base entities are the leaves of the input relation. In a finite DAG every
    // node is an ancestor of some leaf, so step (1) retains the whole graph.
    let base: BTreeSet<String> =
        g.children.iter().filter(|(_, cs)| cs.is_empty()).map(|(n, _)| n.clone()).collect();

    loop {
        let mut changed = false;

        // (2) splice out single-child internal nodes, to a fixed point. Hypernyms
        // left without children by step (3) are dropped here too.
        loop {
            let victim = g
                .children
                .iter()
                .find(|(n, cs)| cs.len() == 1 || (cs.is_empty() && !base.contains(*n)))
                .map(|(n, _)| n.clone());
            match victim {
                Some(n) => {
                    g.splice_out(&n);
                    changed = true;
                }
                None => break,
            }
        }

        // (3) keep the lexicographically smallest parent.
        let multi: Vec<(String, Vec<String>)> = g
            .parents
            .iter()
            .filter(|(_, ps)| ps.len() > 1)
            .map(|(n, ps)| (n.clone(), ps.iter().skip(1).cloned().collect()))
            .collect();
        for (n, drop) in multi {
            for p in drop {
                g.remove_edge(&p, &n);
            }
            changed = true;
        }

        if !changed {
            break;
        }
    }

    let nodes: BTreeMap<String, EntityNode> = g
        .parents
        .iter()
        .map(|(n, ps)| {
            let node = EntityNode {
                name: n.clone(),
                parent: ps.iter().next().cloned(),
                children: g.children[n].iter().cloned().collect(),
            };
            (n.clone(), node)
        })
        .collect();
    let roots = nodes.values().filter(|n| n.parent.is_none()).map(|n| n.name.clone()).collect();
    let h = EntityHierarchy { nodes, roots };
    h.validate()?;
    Ok(h)
}

impl EntityHierarchy {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&EntityNode> {
        self.nodes.get(name)
    }

    pub fn children(&self, name: &str) -> &[String] {
        self.nodes.get(name).map(|n| n.children.as_slice()).unwrap_or(&[])
    }

    /// Checks closure, the tree property, reachability and the pruning property.
    pub fn validate(&self) -> Result<(), HierarchyError> {
        let bad = |m: String| Err(HierarchyError::Invariant(m));
        for (name, node) in &self.nodes {
            if &node.name != name {
                return bad(format!("node key `{name}` does not match its name"));
            }
            if let Some(p) = &node.parent {
                match self.nodes.get(p) {
                    Some(pn) if pn.children.contains(name) => {}
                    _ => return bad(format!("parent link {p} -> {name} is not mirrored")),
                }
            }
            for c in &node.children {
                match self.nodes.get(c) {
                    Some(cn) if cn.parent.as_deref() == Some(name.as_str()) => {}
                    _ => return bad(format!("child link {name} -> {c} is not mirrored")),
                }
            }
            if node.children.len() == 1 {
                return bad(format!("`{name}` has exactly one child"));
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self.roots.iter().map(String::as_str).collect();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                return bad(format!("`{n}` reachable twice"));
            }
            stack.extend(self.children(n).iter().map(String::as_str));
        }
        if seen.len() != self.nodes.len() {
            return bad("some nodes are unreachable from the roots".into());
        }
        Ok(())
    }

    /// The tree as a hypernym relation; feeding it back to [`build_hierarchy`]
    /// reproduces `self`.
    pub fn to_edges(&self) -> Vec<(String, Vec<String>)> {
        self.nodes
            .values()
            .map(|n| (n.name.clone(), n.parent.iter().cloned().collect()))
            .collect()
    }

    /// Canonical edge-list text, lexicographically ordered.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (child, parents) in self.to_edges() {
            let _ = writeln!(out, "{child}\t{}", parents.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hierarchy serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, HierarchyError> {
        let h: EntityHierarchy = serde_json::from_str(text)
            .map_err(|e| HierarchyError::Parse { line: e.line(), message: e.to_string() })?;
        h.validate()?;
        Ok(h)
    }

    /// Returns `(parent, grandparent)` of `name`.
    pub fn ancestors(&self, name: &str) -> Result<(String, String), HierarchyError> {
        let node = self.nodes.get(name).ok_or_else(|| HierarchyError::UnknownEntity(name.into()))?;
        let parent = node.parent.as_ref().ok_or_else(|| HierarchyError::RootHasNoAncestors(name.into()))?;
        let grand = self.nodes[parent]
            .parent
            .as_ref()
            .ok_or_else(|| HierarchyError::NoGrandparent(name.into()))?;
        Ok((parent.clone(), grand.clone()))
    }

    fn qualifying_parents(&self, grandparent: &str, k_children: usize) -> Vec<&String> {
        self.children(grandparent).iter().filter(|c| self.children(c).len() >= k_children).collect()
    }

    /// Grandparents that can supply `k_parents` parents of `k_children` children each.
    pub fn qualifying_grandparents(&self, k_parents: usize, k_children: usize) -> Vec<&String> {
        self.nodes
            .keys()
            .filter(|g| self.qualifying_parents(g, k_children).len() >= k_parents)
            .collect()
    }

    /// Picks a grandparent, `k_parents` of its children and `k_children`
    /// children of each of those.
    pub fn sample_entities<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        k_parents: usize,
        k_children: usize,
        grandparent: Option<&str>,
    ) -> Result<EntitySample, HierarchyError> {
        if k_parents == 0 || k_children == 0 {
            return Err(HierarchyError::InvalidRequest);
        }
        let insufficient = HierarchyError::InsufficientEntities { k_parents, k_children };
        let grand = match grandparent {
            Some(g) => {
                if !self.nodes.contains_key(g) {
                    return Err(HierarchyError::UnknownEntity(g.into()));
                }
                if self.qualifying_parents(g, k_children).len() < k_parents {
                    return Err(insufficient);
                }
                g.to_string()
            }
            None => {
                let options = self.qualifying_grandparents(k_parents, k_children);
                options.choose(rng).ok_or(insufficient)?.to_string()
            }
        };
        let parents: Vec<String> = self
            .qualifying_parents(&grand, k_children)
            .choose_multiple(rng, k_parents)
            .map(|p| p.to_string())
            .collect();
        let mut order = Vec::new();
        let mut entities = BTreeMap::new();
        for p in &parents {
            for c in self.children(p).choose_multiple(rng, k_children) {
                order.push(c.clone());
                entities.insert(c.clone(), Ancestry { parent: p.clone(), grandparent: grand.clone() });
            }
        }
        Ok(EntitySample { grandparent: grand, parents, order, entities })
    }
}

/// The bundled taxonomy, built from the shipped edge list.
pub fn bundled_hierarchy() -> EntityHierarchy {
    let edges = parse_edge_list(crate::bundled::HIERARCHY_EDGES).expect("bundled edge list parses");
    build_hierarchy(&edges).expect("bundled edge list builds")
}
