//! Exploration tree of a rooted graph.
//!
//! The root's children are its incident edges in birth order. Every other
//! node `a` reached through edge `e` gets the incident edges of its vertex
//! other than `e`, again in birth order. A child is of type L when its
//! vertex is older than the vertex of `a`, so root and type-L nodes have `m`
//! type-L children and type-R nodes `m - 1`. Vertices met twice appear as
//! separate nodes; the labeling is injective exactly when the hat-ball is a
//! simple tree.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::PaGraph;
use crate::limit::NodeType;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationNode {
    /// Path from the root, children numbered from 1.
    pub label: Vec<u32>,
    /// Graph vertex `k_a`.
    pub vertex: u32,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Birth rank of the edge leading here, 0 at the root.
    pub via: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplorationTree {
    pub radius: usize,
    pub nodes: Vec<ExplorationNode>,
}

impl ExplorationTree {
    /// Whether distinct nodes carry distinct vertices.
    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.nodes.len());
        self.nodes.iter().all(|n| seen.insert(n.vertex))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_exploration_tree(graph: &PaGraph, v: usize, r: usize) -> Result<ExplorationTree> {
    let n = graph.n();
    if v < 1 || v > n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let adj = graph.adjacency();
    let mut nodes = vec![ExplorationNode {
        label: vec![0],
        vertex: v as u32,
        node_type: NodeType::Root,
        depth: 0,
        parent: None,
        children: Vec::new(),
        via: 0,
    }];
    let mut i = 0;
    while i < nodes.len() {
        if nodes[i].depth < r {
            let k = nodes[i].vertex;
            let via = nodes[i].via;
            let mut idx = 0u32;
            for &(w, birth) in adj.incident(k as usize) {
                if birth == via {
                    continue;
                }
                idx += 1;
                let mut label = nodes[i].label.clone();
                label.push(idx);
                let child = nodes.len();
                nodes.push(ExplorationNode {
                    label,
                    vertex: w,
                    node_type: if w < k { NodeType::L } else { NodeType::R },
                    depth: nodes[i].depth + 1,
                    parent: Some(i),
                    children: Vec::new(),
                    via: birth,
                });
                nodes[i].children.push(child);
            }
        }
        i += 1;
    }
    Ok(ExplorationTree { radius: r, nodes })
}
