//! Sampler for the Pólya-point tree, the local limit of the graphs.
//!
//! The root sits at `x_0 = y^chi` with `y` uniform. A node at position `x`
//! with strength `gamma` has `m_-` left children, uniform on `[0, x]`, and
//! right children forming a Poisson process on `[x, 1]` with intensity
//! `gamma * psi * t^(psi - 1) / x^psi`. Left children carry strength
//! `Gamma(a + 1)`, the root and right children `Gamma(a)`.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// Default cap on the number of nodes in one sampled tree.
pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeType {
    #[serde(rename = "root")]
    Root,
    L,
    R,
}

impl NodeType {
    /// Number of left children `m_-` of a node of this type.
    pub fn left_count(self, m: usize) -> usize {
        match self {
            NodeType::Root | NodeType::L => m,
            NodeType::R => m - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaPointNode {
    /// Path from the root: `[0, a_1, ..., a_l]`, children numbered from 1.
    pub label: Vec<u32>,
    pub x: f64,
    pub gamma: f64,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Indices into the node arena: left children first, then right
    /// children by increasing position.
    pub children: Vec<usize>,
}

impl PolyaPointNode {
    /// Degree in the full tree, valid for fully expanded nodes.
    pub fn degree(&self) -> usize {
        self.children.len() + usize::from(self.parent.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyaPointTree {
    pub radius: usize,
    pub nodes: Vec<PolyaPointNode>,
    /// Set when the node cap stopped the expansion.
    pub truncated: bool,
}

impl PolyaPointTree {
    pub fn root(&self) -> &PolyaPointNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable tree")
    }
}

/// Strength of a node: `Gamma(a)` for the root and right children,
/// `Gamma(a + 1)` for left children.
pub fn sample_strength<R: Rng + ?Sized>(params: &ModelParams, node_type: NodeType, rng: &mut R) -> f64 {
    let shape = match node_type {
        NodeType::Root | NodeType::R => params.a(),
        NodeType::L => params.a() + 1.0,
    };
    Gamma::new(shape, 1.0).expect("positive shape").sample(rng)
}

/// Root position `y^chi`.
pub fn sample_root_position<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> f64 {
    let y = 1.0 - rng.random::<f64>();
    y.powf(params.chi())
}

/// Expected number of right children, `gamma (1 - x^psi) / x^psi`.
pub fn right_intensity(params: &ModelParams, x: f64, gamma: f64) -> f64 {
    let xp = x.powf(params.psi());
    gamma * (1.0 - xp) / xp
}

/// Poisson count; means beyond `cap` return `None` without sampling.
fn poisson_count<R: Rng + ?Sized>(mean: f64, cap: usize, rng: &mut R) -> Option<usize> {
    if mean <= 0.0 {
        return Some(0);
    }
    if !mean.is_finite() || mean > 10.0 * cap as f64 + 100.0 {
        return None;
    }
    let k = Poisson::new(mean).expect("finite mean").sample(rng) as usize;
    (k <= cap).then_some(k)
}

fn right_positions<R: Rng + ?Sized>(params: &ModelParams, x: f64, count: usize, rng: &mut R) -> Vec<f64> {
    let psi = params.psi();
    let xp = x.powf(psi);
    let mut out: Vec<f64> = (0..count)
        .map(|_| (xp + rng.random::<f64>() * (1.0 - xp)).powf(1.0 / psi).min(1.0))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Positions of the right children of a node at `x_parent` with strength
/// `gamma`, sorted ascending.
pub fn sample_right_children<R: Rng + ?Sized>(params: &ModelParams, x_parent: f64, gamma: f64, rng: &mut R) -> Vec<f64> {
    let mean = right_intensity(params, x_parent, gamma);
    let count = poisson_count(mean, usize::MAX / 2, rng).expect("intensity too large to sample");
    right_positions(params, x_parent, count, rng)
}

/// Degree of a node whose children were not sampled: its parent edge, its
/// left children and a Poisson number of right children. `None` when the
/// Poisson mean is too large to sample.
pub fn sample_unexplored_degree<R: Rng + ?Sized>(params: &ModelParams, node: &PolyaPointNode, rng: &mut R) -> Option<usize> {
    let right = poisson_count(right_intensity(params, node.x, node.gamma), usize::MAX / 4, rng)?;
    Some(usize::from(node.parent.is_some()) + node.node_type.left_count(params.m()) + right)
}

/// Breadth-first sample of the tree to depth `r`. Expansion stops and the
/// tree is flagged once it would exceed `max_nodes`.
pub fn sample_tree<R: Rng + ?Sized>(params: &ModelParams, r: usize, max_nodes: usize, rng: &mut R) -> PolyaPointTree {
    let m = params.m();
    let x0 = sample_root_position(params, rng);
    let g0 = sample_strength(params, NodeType::Root, rng);
    let mut nodes = vec![PolyaPointNode {
        label: vec![0],
        x: x0,
        gamma: g0,
        node_type: NodeType::Root,
        depth: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut truncated = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        if nodes[id].depth >= r {
            continue;
        }
        let (x, gamma, ty, depth) = (nodes[id].x, nodes[id].gamma, nodes[id].node_type, nodes[id].depth);
        let left = ty.left_count(m);
        let room = max_nodes.saturating_sub(nodes.len());
        let right = poisson_count(right_intensity(params, x, gamma), room.saturating_sub(left), rng);
        let right = match right {
            Some(k) if left + k <= room => k,
            _ => {
                truncated = true;
                break;
            }
        };
        let mut specs: Vec<(f64, NodeType)> = (0..left)
            .map(|_| (rng.random::<f64>() * x, NodeType::L))
            .collect();
        specs.extend(right_positions(params, x, right, rng).into_iter().map(|p| (p, NodeType::R)));
        for (i, (pos, child_ty)) in specs.into_iter().enumerate() {
            let mut label = nodes[id].label.clone();
            label.push(i as u32 + 1);
            let child = nodes.len();
            nodes.push(PolyaPointNode {
                label,
                x: pos,
                gamma: sample_strength(params, child_ty, rng),
                node_type: child_ty,
                depth: depth + 1,
                parent: Some(id),
                children: Vec::new(),
            });
            nodes[id].children.push(child);
            queue.push_back(child);
        }
    }
    PolyaPointTree {
        radius: r,
        nodes,
        truncated,
    }
}

/// Counts of sampled degrees starting at `offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub offset: usize,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(offset: usize) -> Self {
        Histogram {
            offset,
            counts: Vec::new(),
        }
    }

    pub fn add(&mut self, value: usize) {
        let i = value - self.offset;
        if i >= self.counts.len() {
            self.counts.resize(i + 1, 0);
        }
        self.counts[i] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.offset, other.offset);
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative frequency of `value`.
    pub fn freq(&self, value: usize) -> f64 {
        value
            .checked_sub(self.offset)
            .and_then(|i| self.counts.get(i))
            .map_or(0.0, |&c| c as f64 / self.total() as f64)
    }

    pub fn freqs(&self) -> Vec<f64> {
        let t = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

fn degree_draw<R: Rng + ?Sized>(params: &ModelParams, x: f64, gamma: f64, rng: &mut R) -> usize {
    let mean = right_intensity(params, x, gamma);
    Poisson::new(mean.max(f64::MIN_POSITIVE)).map_or(0, |p| p.sample(rng) as usize)
}

/// Root degrees `m + q_0` of `samples` trees of radius 1.
pub fn root_degree_pmf_empirical<R: Rng + ?Sized>(params: &ModelParams, samples: usize, rng: &mut R) -> Histogram {
    let m = params.m();
    let mut h = Histogram::new(m);
    for _ in 0..samples {
        let x = sample_root_position(params, rng);
        let g = sample_strength(params, NodeType::Root, rng);
        h.add(m + degree_draw(params, x, g, rng));
    }
    h
}

/// Degrees `m + 1 + q` of a left child of the root (any left child has
/// the same law).
pub fn neighbor_degree_pmf_empirical<R: Rng + ?Sized>(params: &ModelParams, samples: usize, rng: &mut R) -> Histogram {
    let m = params.m();
    let mut h = Histogram::new(m + 1);
    for _ in 0..samples {
        let x0 = sample_root_position(params, rng);
        let x = rng.random::<f64>() * x0;
        let g = sample_strength(params, NodeType::L, rng);
        h.add(m + 1 + degree_draw(params, x, g, rng));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSpec;

    fn p(m: usize, alpha: f64) -> ModelParams {
        ModelParams::new(m, alpha).unwrap()
    }

    #[test]
    fn strength_means() {
        let params = p(2, 0.0);
        let mut rng = SeedSpec::new(1).rng();
        let n = 1_000_000;
        let root: f64 = (0..n).map(|_| sample_strength(&params, NodeType::Root, &mut rng)).sum::<f64>() / n as f64;
        let left: f64 = (0..n).map(|_| sample_strength(&params, NodeType::L, &mut rng)).sum::<f64>() / n as f64;
        assert!((root - 2.0).abs() < 0.01, "{root}");
        assert!((left - 3.0).abs() < 0.01, "{left}");
    }

    #[test]
    fn right_children_count_and_law() {
        let params = p(2, 0.0);
        let mut rng = SeedSpec::new(2).rng();
        assert!(sample_right_children(&params, 1.0, 5.0, &mut rng).is_empty());
        let n = 1_000_000;
        let total: usize = (0..n).map(|_| sample_right_children(&params, 0.5, 2.0, &mut rng).len()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.01, "{mean}");

        // Kolmogorov-Smirnov against (x^psi - xp^psi) / (1 - xp^psi).
        let params = p(2, 0.5);
        let xp: f64 = 0.2;
        let psi = params.psi();
        let mut pts = Vec::new();
        while pts.len() < 100_000 {
            pts.extend(sample_right_children(&params, xp, 3.0, &mut rng));
        }
        pts.truncate(100_000);
        pts.sort_by(f64::total_cmp);
        assert!(pts.iter().all(|&x| x > xp && x <= 1.0));
        let nn = pts.len() as f64;
        let d = pts
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = (x.powf(psi) - xp.powf(psi)) / (1.0 - xp.powf(psi));
                (f - i as f64 / nn).abs().max(((i + 1) as f64 / nn - f).abs())
            })
            .fold(0.0, f64::max);
        // Critical value at p = 0.01 is 1.63 / sqrt(n).
        assert!(d < 1.63 / nn.sqrt(), "D = {d}");
    }

    #[test]
    fn radius_zero_is_single_node() {
        let t = sample_tree(&p(2, 0.0), 0, 10, &mut SeedSpec::new(3).rng());
        assert_eq!(t.len(), 1);
        assert!(t.root().children.is_empty());
        assert!(!t.truncated);
    }

    #[test]
    fn tree_structure() {
        let params = p(3, 0.3);
        let mut rng = SeedSpec::new(4).rng();
        for _ in 0..300 {
            let t = sample_tree(&params, 3, 100_000, &mut rng);
            if t.truncated {
                continue;
            }
            for node in &t.nodes {
                assert!(node.x > 0.0 && node.x <= 1.0);
                if node.depth < 3 {
                    let lefts: Vec<_> = node.children.iter().filter(|&&c| t.nodes[c].node_type == NodeType::L).collect();
                    assert_eq!(lefts.len(), node.node_type.left_count(3));
                } else {
                    assert!(node.children.is_empty());
                }
                for &c in &node.children {
                    let ch = &t.nodes[c];
                    assert_eq!(ch.parent, Some(t.nodes.iter().position(|n| std::ptr::eq(n, node)).unwrap()));
                    assert_eq!(ch.label.len(), ch.depth + 1);
                    match ch.node_type {
                        NodeType::L => assert!(ch.x < node.x),
                        NodeType::R => assert!(ch.x > node.x),
                        NodeType::Root => panic!("root as child"),
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_is_flagged() {
        let params = p(2, 0.0);
        let t = sample_tree(&params, 6, 20, &mut SeedSpec::new(5).rng());
        assert!(t.truncated);
        assert!(t.len() <= 20);
    }

    #[test]
    fn root_degree_matches_closed_form() {
        // m = 2, alpha = 0: P(D = 2 + k) = 12 / ((k + 2)(k + 3)(k + 4)).
        let params = p(2, 0.0);
        let h = root_degree_pmf_empirical(&params, 1_000_000, &mut SeedSpec::new(6).rng());
        assert_eq!(h.offset, 2);
        assert!((h.freqs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((h.freq(2) - 0.5).abs() < 0.002, "{}", h.freq(2));
        assert!((h.freq(3) - 0.2).abs() < 0.002, "{}", h.freq(3));
        assert_eq!(h.freq(1), 0.0);
    }

    #[test]
    fn degree_histograms_within_tv_of_closed_forms() {
        use crate::analytics::{degree_dist_pmf, neighbor_degree_dist_pmf, Pmf};
        const KMAX: usize = 10_000;
        let tv = |h: &Histogram, pmf: &Pmf| {
            let f = h.freqs();
            let mut s = 0.0;
            let mut below = (0.0, 0.0);
            for k in h.offset.min(pmf.offset)..=KMAX {
                let e = k.checked_sub(h.offset).and_then(|i| f.get(i)).copied().unwrap_or(0.0);
                below.0 += e;
                below.1 += pmf.prob(k);
                s += (e - pmf.prob(k)).abs();
            }
            s += ((1.0 - below.0) - (1.0 - below.1)).abs();
            0.5 * s
        };
        let mut rng = SeedSpec::new(16).rng();
        for alpha in [0.0, 0.5] {
            let params = p(2, alpha);
            let root = root_degree_pmf_empirical(&params, 1_000_000, &mut rng);
            let d_tv = tv(&root, &degree_dist_pmf(&params, KMAX));
            assert!(d_tv <= 0.005, "root alpha={alpha}: {d_tv}");
        }
        let params = p(2, 0.5);
        let nb = neighbor_degree_pmf_empirical(&params, 1_000_000, &mut rng);
        let n_tv = tv(&nb, &neighbor_degree_dist_pmf(&params, KMAX));
        assert!(n_tv <= 0.005, "neighbor: {n_tv}");
    }

    #[test]
    fn json_round_trip() {
        let t = sample_tree(&p(2, 0.5), 2, 1000, &mut SeedSpec::new(7).rng());
        let back: PolyaPointTree = serde_json::from_value(t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_json()["nodes"][0]["type"], "root");
    }
}
