//! Rooted neighborhoods of finite graphs and of limit trees.
//!
//! The default ball is the hat-ball: all vertices within distance `r` of
//! the root and every edge with an endpoint at distance at most `r - 1`.
//! Edges joining two vertices at distance exactly `r` are added only in the
//! plain ball.

mod canon;
mod explore;

pub use canon::{canonical_code, canonical_code_with_cap, CanonicalCode, DEFAULT_VERTEX_CAP};
pub use explore::{build_exploration_tree, ExplorationNode, ExplorationTree};

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, PaGraph};
use crate::limit::{sample_tree, PolyaPointTree};
use crate::params::ModelParams;
use crate::urn::UrnState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallKind {
    #[default]
    Hat,
    Plain,
}

/// Radius-`r` neighborhood with local ids; the root is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedBall {
    pub radius: usize,
    /// Distance from the root per local vertex.
    pub depth: Vec<u32>,
    /// Original id per local vertex (graph vertex or tree node index).
    pub global: Vec<u32>,
    /// `(u, v, multiplicity)` with `u < v`, sorted.
    pub edges: Vec<(u32, u32, u32)>,
    /// Birth ranks of the incident ball edges of each local vertex, ascending.
    pub birth_order: Vec<Vec<u64>>,
}

impl RootedBall {
    /// Ball from an explicit edge list on `0..n` rooted at 0. Depths come
    /// from breadth-first search; birth ranks are positions in `edges`.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("ball needs a root"));
        }
        let mut merged: HashMap<(u32, u32), u32> = HashMap::new();
        let mut births: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (i, &(u, v, m)) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n || m == 0 {
                return Err(Error::invalid(format!("bad ball edge ({u}, {v}, {m})")));
            }
            *merged.entry((u.min(v), u.max(v))).or_default() += m;
            births[u as usize].push(i as u64 + 1);
            births[v as usize].push(i as u64 + 1);
        }
        let mut edges: Vec<(u32, u32, u32)> = merged.into_iter().map(|((u, v), m)| (u, v, m)).collect();
        edges.sort_unstable();
        let depth = bfs_depths(n, &edges);
        if depth.contains(&u32::MAX) {
            return Err(Error::invalid("ball must be connected"));
        }
        let radius = depth.iter().copied().max().unwrap_or(0) as usize;
        Ok(RootedBall {
            radius,
            depth,
            global: (0..n as u32).collect(),
            edges,
            birth_order: births,
        })
    }

    /// Ball of a limit tree: its nodes and parent-child edges.
    pub fn from_tree(tree: &PolyaPointTree) -> Self {
        let n = tree.nodes.len();
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut births: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (i, node) in tree.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                edges.push((p as u32, i as u32, 1));
                births[p].push(i as u64);
                births[i].push(i as u64);
            }
        }
        edges.sort_unstable();
        RootedBall {
            radius: tree.radius,
            depth: tree.nodes.iter().map(|n| n.depth as u32).collect(),
            global: (0..n as u32).collect(),
            edges,
            birth_order: births,
        }
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// Degree of the root inside the ball, with multiplicity.
    pub fn root_degree(&self) -> usize {
        self.edges.iter().filter(|e| e.0 == 0).map(|e| e.2 as usize).sum()
    }

    /// Total edge count with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.2 as usize).sum()
    }

    /// Whether the ball is a simple tree.
    pub fn is_tree(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1) && self.edges.len() + 1 == self.len()
    }

    pub fn code(&self) -> Result<CanonicalCode> {
        canonical_code(self)
    }
}

fn bfs_depths(n: usize, edges: &[(u32, u32, u32)]) -> Vec<u32> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut depth = vec![u32::MAX; n];
    depth[0] = 0;
    let mut q = VecDeque::from([0usize]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if depth[w] == u32::MAX {
                depth[w] = depth[u] + 1;
                q.push_back(w);
            }
        }
    }
    depth
}

/// Hat-ball of radius `r` around `v`.
pub fn extract_ball(graph: &PaGraph, v: usize, r: usize) -> Result<RootedBall> {
    extract_ball_with(&graph.adjacency(), v, r, BallKind::Hat)
}

/// Ball of radius `r` around `v` using a prebuilt adjacency.
pub fn extract_ball_with(adj: &Adjacency, v: usize, r: usize, kind: BallKind) -> Result<RootedBall> {
    let n = adj.n();
    if v < 1 || v > n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut local: HashMap<u32, u32> = HashMap::new();
    let mut global = vec![v as u32];
    let mut depth = vec![0u32];
    local.insert(v as u32, 0);
    let mut found: Vec<(u64, u32, u32)> = Vec::new();
    let mut q = VecDeque::from([0u32]);
    while let Some(lu) = q.pop_front() {
        let d = depth[lu as usize];
        if d as usize >= r {
            continue;
        }
        for &(w, birth) in adj.incident(global[lu as usize] as usize) {
            let lw = *local.entry(w).or_insert_with(|| {
                global.push(w);
                depth.push(d + 1);
                q.push_back(global.len() as u32 - 1);
                global.len() as u32 - 1
            });
            found.push((birth, lu, lw));
        }
    }
    if kind == BallKind::Plain && r > 0 {
        for lu in 0..global.len() {
            if depth[lu] as usize != r {
                continue;
            }
            for &(w, birth) in adj.incident(global[lu] as usize) {
                if let Some(&lw) = local.get(&w) {
                    if depth[lw as usize] as usize == r {
                        found.push((birth, lu as u32, lw));
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found.dedup_by_key(|e| e.0);
    let nloc = global.len();
    let mut births: Vec<Vec<u64>> = vec![Vec::new(); nloc];
    let mut merged: HashMap<(u32, u32), u32> = HashMap::new();
    for &(birth, a, b) in &found {
        births[a as usize].push(birth);
        births[b as usize].push(birth);
        *merged.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let mut edges: Vec<(u32, u32, u32)> = merged.into_iter().map(|((a, b), m)| (a, b, m)).collect();
    edges.sort_unstable();
    Ok(RootedBall {
        radius: r,
        depth,
        global,
        edges,
        birth_order: births,
    })
}

/// Empirical law of ball isomorphism classes.
#[derive(Debug, Clone, Default)]
pub struct BallDistribution {
    pub counts: HashMap<CanonicalCode, u64>,
    pub samples: u64,
    /// Truncated limit trees left out of `counts`.
    pub excluded: u64,
}

impl BallDistribution {
    pub fn add(&mut self, code: CanonicalCode) {
        *self.counts.entry(code).or_default() += 1;
        self.samples += 1;
    }

    pub fn merge(&mut self, other: BallDistribution) {
        for (c, k) in other.counts {
            *self.counts.entry(c).or_default() += k;
        }
        self.samples += other.samples;
        self.excluded += other.excluded;
    }

    pub fn frequencies(&self) -> HashMap<CanonicalCode, f64> {
        let t = self.samples as f64;
        self.counts.iter().map(|(c, &k)| (c.clone(), k as f64 / t)).collect()
    }

    /// `[{code, freq}]`, most frequent first.
    pub fn to_json(&self) -> serde_json::Value {
        let mut rows: Vec<(&CanonicalCode, &u64)> = self.counts.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        let t = self.samples as f64;
        serde_json::Value::Array(
            rows.into_iter()
                .map(|(c, &k)| serde_json::json!({"code": c.to_base64(), "freq": k as f64 / t}))
                .collect(),
        )
    }
}

/// Where balls come from.
#[derive(Debug, Clone, Copy)]
pub enum BallSource<'a> {
    /// Uniform roots in a finite graph.
    Graph { graph: &'a PaGraph, adjacency: &'a Adjacency, kind: BallKind },
    /// Independent limit trees, with a node cap per tree.
    Limit { params: &'a ModelParams, max_nodes: usize },
}

pub fn ball_distribution<R: Rng + ?Sized>(
    source: BallSource<'_>,
    r: usize,
    samples: usize,
    rng: &mut R,
) -> Result<BallDistribution> {
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let mut dist = BallDistribution::default();
    match source {
        BallSource::Graph { graph, adjacency, kind } => {
            for _ in 0..samples {
                let v = rng.random_range(1..=graph.n());
                dist.add(extract_ball_with(adjacency, v, r, kind)?.code()?);
            }
        }
        BallSource::Limit { params, max_nodes } => {
            for _ in 0..samples {
                let tree = sample_tree(params, r, max_nodes, rng);
                if tree.truncated {
                    dist.excluded += 1;
                } else {
                    dist.add(RootedBall::from_tree(&tree).code()?);
                }
            }
        }
    }
    Ok(dist)
}

/// Balls around every vertex of `graph`.
pub fn ball_distribution_all_roots(graph: &PaGraph, r: usize, kind: BallKind) -> Result<BallDistribution> {
    let adj = graph.adjacency();
    let mut dist = BallDistribution::default();
    for v in 1..=graph.n() {
        dist.add(extract_ball_with(&adj, v, r, kind)?.code()?);
    }
    Ok(dist)
}

/// `(1/2) sum |p - q|` over the union of supports.
pub fn tv_distance<K: Hash + Eq>(p: &HashMap<K, f64>, q: &HashMap<K, f64>) -> f64 {
    let mut s: f64 = p.iter().map(|(k, a)| (a - q.get(k).copied().unwrap_or(0.0)).abs()).sum();
    s += q.iter().filter(|(k, _)| !p.contains_key(*k)).map(|(_, b)| b.abs()).sum::<f64>();
    0.5 * s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tv: f64,
    pub n_samples_a: u64,
    pub n_samples_b: u64,
    pub excluded_truncated: u64,
}

pub fn compare(a: &BallDistribution, b: &BallDistribution) -> ComparisonReport {
    ComparisonReport {
        tv: tv_distance(&a.frequencies(), &b.frequencies()),
        n_samples_a: a.samples,
        n_samples_b: b.samples,
        excluded_truncated: a.excluded + b.excluded,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionEntry {
    pub vertex: usize,
    /// `|S_{k-1} - (k/n)^chi|`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionReport {
    pub entries: Vec<PositionEntry>,
    pub median: f64,
    pub p95: f64,
    pub max: f64,
}

/// Empirical quantile by the nearest-rank rule.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Compares urn positions with `(k/n)^chi` over the vertices of the hat-ball
/// around `v`.
pub fn position_check(graph: &PaGraph, state: Option<&UrnState>, v: usize, r: usize) -> Result<PositionReport> {
    let state = state.ok_or(Error::MissingUrnState)?;
    if state.n() != graph.n() {
        return Err(Error::invalid("urn state does not match the graph size"));
    }
    let ball = extract_ball(graph, v, r)?;
    let chi = graph.params().chi();
    let n = graph.n() as f64;
    let entries: Vec<PositionEntry> = ball
        .global
        .iter()
        .map(|&k| {
            let k = k as usize;
            PositionEntry {
                vertex: k,
                deviation: (state.s(k - 1) - (k as f64 / n).powf(chi)).abs(),
            }
        })
        .collect();
    let mut devs: Vec<f64> = entries.iter().map(|e| e.deviation).collect();
    devs.sort_by(f64::total_cmp);
    Ok(PositionReport {
        median: quantile(&devs, 0.5),
        p95: quantile(&devs, 0.95),
        max: *devs.last().expect("ball has a root"),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ModelTag;
    use crate::growth::generate_sequential;
    use crate::rng::SeedSpec;

    fn small_graphs() -> Vec<PaGraph> {
        let mut out = Vec::new();
        for s in 0..20u64 {
            let m = 2 + (s % 3) as usize;
            let params = ModelParams::new(m, 0.1 * (s % 5) as f64).unwrap();
            let n = 5 + (s as usize * 7) % 46;
            out.push(generate_sequential(&params, n, &mut SeedSpec::new(s).rng()).unwrap());
        }
        out
    }

    fn all_distances(g: &PaGraph) -> Vec<Vec<usize>> {
        let n = g.n();
        let mut d = vec![vec![usize::MAX / 4; n + 1]; n + 1];
        for v in 1..=n {
            d[v][v] = 0;
        }
        for (s, w, _) in g.edges() {
            d[s][w] = 1;
            d[w][s] = 1;
        }
        for k in 1..=n {
            for i in 1..=n {
                for j in 1..=n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    #[test]
    fn ball_matches_distance_filter() {
        for g in small_graphs() {
            let d = all_distances(&g);
            let adj = g.adjacency();
            for v in 1..=g.n() {
                for r in 0..=3 {
                    for kind in [BallKind::Hat, BallKind::Plain] {
                        let b = extract_ball_with(&adj, v, r, kind).unwrap();
                        let mut got: Vec<u32> = b.global.clone();
                        got.sort_unstable();
                        let want: Vec<u32> = (1..=g.n()).filter(|&w| d[v][w] <= r).map(|w| w as u32).collect();
                        assert_eq!(got, want);
                        for (i, &k) in b.global.iter().enumerate() {
                            assert_eq!(b.depth[i] as usize, d[v][k as usize]);
                        }
                        // Edge count with multiplicity against the rule.
                        let expect = g
                            .edges()
                            .filter(|&(s, w, _)| {
                                let (a, c) = (d[v][s], d[v][w]);
                                let hat = a.min(c) + 1 <= r;
                                let plain = a <= r && c <= r;
                                match kind {
                                    BallKind::Hat => hat,
                                    BallKind::Plain => plain,
                                }
                            })
                            .count();
                        assert_eq!(b.edge_count(), expect, "v={v} r={r} {kind:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn forced_small_balls() {
        let p = ModelParams::new(3, 0.0).unwrap();
        let g = PaGraph::from_targets(p, 2, ModelTag::Sequential, vec![1, 1, 1]).unwrap();
        let b0 = extract_ball(&g, 1, 0).unwrap();
        assert_eq!(b0.len(), 1);
        assert!(b0.edges.is_empty());
        let b1 = extract_ball(&g, 1, 1).unwrap();
        assert_eq!(b1.len(), 2);
        assert_eq!(b1.edges, vec![(0, 1, 3)]);
        assert_eq!(b1.birth_order[0], vec![1, 2, 3]);
        assert!(extract_ball(&g, 3, 1).is_err());
    }

    #[test]
    fn root_degree_marginal_is_degree_census() {
        let params = ModelParams::new(2, 0.3).unwrap();
        let g = generate_sequential(&params, 3000, &mut SeedSpec::new(4).rng()).unwrap();
        let adj = g.adjacency();
        let mut from_balls = vec![0u64; 4000];
        for v in 1..=g.n() {
            from_balls[extract_ball_with(&adj, v, 1, BallKind::Hat).unwrap().root_degree()] += 1;
        }
        let hist = g.degree_histogram();
        for (d, &c) in hist.iter().enumerate() {
            assert_eq!(from_balls[d], c);
        }
    }

    #[test]
    fn distributions_and_tv() {
        let params = ModelParams::new(2, 0.0).unwrap();
        let g = generate_sequential(&params, 2000, &mut SeedSpec::new(5).rng()).unwrap();
        let adj = g.adjacency();
        let mut rng = SeedSpec::new(6).rng();
        let src = BallSource::Graph { graph: &g, adjacency: &adj, kind: BallKind::Hat };
        let a = ball_distribution(src, 0, 500, &mut rng).unwrap();
        let b = ball_distribution(BallSource::Limit { params: &params, max_nodes: 1000 }, 0, 300, &mut rng).unwrap();
        assert_eq!(a.counts.len(), 1);
        assert_eq!(compare(&a, &b).tv, 0.0);
        let d = ball_distribution(src, 2, 400, &mut rng).unwrap();
        assert!((d.frequencies().values().sum::<f64>() - 1.0).abs() < 1e-12);
        let json = d.to_json();
        assert!(json.as_array().unwrap().iter().all(|row| row["code"].is_string()));

        let mut p = HashMap::new();
        let mut q = HashMap::new();
        p.insert("a", 0.5);
        p.insert("b", 0.5);
        q.insert("a", 1.0);
        assert!((tv_distance(&p, &q) - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&p, &p), 0.0);
        let mut z = HashMap::new();
        z.insert("c", 1.0);
        assert!((tv_distance(&q, &z) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tree_balls_code_like_graph_balls() {
        // Vertex 3 sends one edge each to 1 and 2: a two-leaf star.
        let star = RootedBall::from_edges(3, vec![(0, 1, 1), (0, 2, 1)]).unwrap();
        let p = ModelParams::new(2, 0.0).unwrap();
        let g = PaGraph::from_targets(p, 3, ModelTag::Sequential, vec![1, 1, 1, 2]).unwrap();
        let b = extract_ball(&g, 3, 1).unwrap();
        assert!(b.is_tree());
        assert_eq!(b.code().unwrap(), star.code().unwrap());
        // Vertex 1 has a double edge to 2.
        let b1 = extract_ball(&g, 1, 1).unwrap();
        assert!(!b1.is_tree());
        assert_ne!(b1.code().unwrap(), star.code().unwrap());

        let t = sample_tree(&p, 2, 10_000, &mut SeedSpec::new(8).rng());
        let tb = RootedBall::from_tree(&t);
        assert!(tb.is_tree());
        assert_eq!(tb.root_degree(), t.root().children.len());
    }

    #[test]
    fn position_report() {
        let params = ModelParams::new(2, 0.5).unwrap();
        let (g, st) = crate::urn::generate_polya_with_state(&params, 20_000, &mut SeedSpec::new(7).rng()).unwrap();
        assert!(matches!(position_check(&g, None, 5, 1), Err(Error::MissingUrnState)));
        let rep = position_check(&g, Some(&st), 20_000, 2).unwrap();
        assert_eq!(rep.entries.len(), extract_ball(&g, 20_000, 2).unwrap().len());
        assert!(rep.entries[0].deviation < 0.01);
        assert!(rep.median <= rep.p95 && rep.p95 <= rep.max);
    }
}
