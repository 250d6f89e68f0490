//! Degree-preserving injective homomorphism counts.
//!
//! For a connected pattern `F` on `v_1..v_k` with excess degrees `n(i)`,
//! `inj(F, n; G)` sums over injective maps `phi` with
//! `deg_G(phi(i)) = d_F(v_i) + n(i)` and every pattern edge present, the
//! weight `prod m_G(phi(i), phi(j))^(m_F(i, j))`. Degrees count
//! multiplicity.

mod density;

pub use density::{eval_density, estimate_t_hat_mc, t_hat_quadrature, MonteCarloEstimate};

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PaGraph;
use crate::limit::{sample_unexplored_degree, PolyaPointTree};
use crate::params::ModelParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternFile {
    vertices: usize,
    edges: Vec<[u32; 3]>,
    #[serde(default = "one")]
    root: usize,
    #[serde(default)]
    excess: BTreeMap<String, u32>,
}

fn one() -> usize {
    1
}

/// Connected multigraph pattern rooted at `v_1`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphPattern {
    k: usize,
    /// `(i, j, mult)` with `i < j`, merged and sorted.
    edges: Vec<(usize, usize, u32)>,
    excess: Vec<u32>,
}

impl SubgraphPattern {
    /// `edges` use 1-based vertex numbers; `excess[i - 1] = n(i)`.
    pub fn new(k: usize, edges: &[(usize, usize, u32)], excess: &[u32]) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("pattern needs at least one vertex"));
        }
        if excess.len() != k {
            return Err(Error::invalid(format!("excess has {} entries for {k} vertices", excess.len())));
        }
        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for &(i, j, m) in edges {
            if i < 1 || j < 1 || i > k || j > k {
                return Err(Error::invalid(format!("edge ({i}, {j}) outside 1..={k}")));
            }
            if i == j {
                return Err(Error::invalid("pattern loops are not supported"));
            }
            if m == 0 {
                return Err(Error::invalid("edge multiplicity must be positive"));
            }
            *merged.entry(((i - 1).min(j - 1), (i - 1).max(j - 1))).or_default() += m;
        }
        let p = SubgraphPattern {
            k,
            edges: merged.into_iter().map(|((i, j), m)| (i, j, m)).collect(),
            excess: excess.to_vec(),
        };
        if p.bfs_order().len() != k {
            return Err(Error::invalid("pattern must be connected"));
        }
        Ok(p)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let f: PatternFile = serde_json::from_value(value.clone())?;
        if f.root != 1 {
            return Err(Error::invalid("the root must be vertex 1"));
        }
        let mut excess = vec![0u32; f.vertices];
        for (key, n) in f.excess {
            let i: usize = key
                .parse()
                .map_err(|_| Error::invalid(format!("bad excess key {key:?}")))?;
            if i < 1 || i > f.vertices {
                return Err(Error::invalid(format!("excess key {i} outside 1..={}", f.vertices)));
            }
            excess[i - 1] = n;
        }
        let edges: Vec<(usize, usize, u32)> = f.edges.iter().map(|e| (e[0] as usize, e[1] as usize, e[2])).collect();
        SubgraphPattern::new(f.vertices, &edges, &excess)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = PatternFile {
            vertices: self.k,
            edges: self.edges.iter().map(|&(i, j, m)| [i as u32 + 1, j as u32 + 1, m]).collect(),
            root: 1,
            excess: self.excess.iter().enumerate().map(|(i, &n)| ((i + 1).to_string(), n)).collect(),
        };
        serde_json::to_value(f).expect("serializable pattern")
    }

    pub fn vertex_count(&self) -> usize {
        self.k
    }

    /// Pattern edges `(i, j, mult)`, 0-based with `i < j`.
    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// `n(i)` for 0-based `i`.
    pub fn excess(&self, i: usize) -> u32 {
        self.excess[i]
    }

    /// `d_F(v_i)` with multiplicity, 0-based.
    pub fn pattern_degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.0 == i || e.1 == i)
            .map(|e| e.2 as usize)
            .sum()
    }

    /// Required host degree `d_F(v_i) + n(i)`.
    pub fn target_degree(&self, i: usize) -> usize {
        self.pattern_degree(i) + self.excess[i] as usize
    }

    pub fn is_tree(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1) && self.edges.len() + 1 == self.k
    }

    fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.edges.iter().filter_map(move |&(a, b, m)| {
            if a == i {
                Some((b, m))
            } else if b == i {
                Some((a, m))
            } else {
                None
            }
        })
    }

    /// Breadth-first order from `v_1` with each vertex's BFS parent.
    fn bfs_order(&self) -> Vec<(usize, Option<usize>)> {
        let mut seen = vec![false; self.k];
        let mut out = vec![(0, None)];
        seen[0] = true;
        let mut q = VecDeque::from([0usize]);
        while let Some(i) = q.pop_front() {
            for (j, _) in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    out.push((j, Some(i)));
                    q.push_back(j);
                }
            }
        }
        out
    }

    /// Largest distance from `v_1`.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.k];
        for (i, p) in self.bfs_order() {
            if let Some(p) = p {
                d[i] = d[p] + 1;
            }
        }
        d.into_iter().max().unwrap_or(0)
    }

    /// Parent and children of each vertex when the tree is hung from `v_1`.
    pub(crate) fn rooted_tree(&self) -> (Vec<Option<usize>>, Vec<Vec<usize>>) {
        let mut parent = vec![None; self.k];
        let mut children = vec![Vec::new(); self.k];
        for (i, p) in self.bfs_order() {
            parent[i] = p;
            if let Some(p) = p {
                children[p].push(i);
            }
        }
        (parent, children)
    }
}

/// A graph to count pattern images in.
pub trait Host {
    fn vertex_count(&self) -> usize;
    /// Degree with multiplicity, `None` when unknown (unexpanded tree nodes).
    fn degree(&self, v: usize) -> Option<usize>;
    /// Distinct neighbors with edge multiplicity, sorted by id.
    fn neighbors(&self, v: usize) -> &[(usize, u32)];

    fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let nb = self.neighbors(u);
        nb.binary_search_by_key(&v, |e| e.0).map_or(0, |i| nb[i].1)
    }
}

/// A finite graph with 0-based ids (`vertex - 1`) and a degree index.
pub struct GraphHost {
    nbrs: Vec<Vec<(usize, u32)>>,
    degree: Vec<usize>,
    by_degree: HashMap<usize, Vec<usize>>,
}

impl GraphHost {
    pub fn new(graph: &PaGraph) -> Self {
        let n = graph.n();
        let mut nbrs: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for (s, w, _) in graph.edges() {
            nbrs[s - 1].push((w - 1, 1));
            nbrs[w - 1].push((s - 1, 1));
        }
        for list in nbrs.iter_mut() {
            list.sort_unstable();
            let mut merged: Vec<(usize, u32)> = Vec::with_capacity(list.len());
            for &(u, _) in list.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == u => last.1 += 1,
                    _ => merged.push((u, 1)),
                }
            }
            *list = merged;
        }
        let degree: Vec<usize> = graph.degrees().into_iter().map(|d| d as usize).collect();
        let mut by_degree: HashMap<usize, Vec<usize>> = HashMap::new();
        for (v, &d) in degree.iter().enumerate() {
            by_degree.entry(d).or_default().push(v);
        }
        GraphHost {
            nbrs,
            degree,
            by_degree,
        }
    }

    pub fn with_degree(&self, d: usize) -> &[usize] {
        self.by_degree.get(&d).map_or(&[], Vec::as_slice)
    }
}

impl Host for GraphHost {
    fn vertex_count(&self) -> usize {
        self.nbrs.len()
    }

    fn degree(&self, v: usize) -> Option<usize> {
        Some(self.degree[v])
    }

    fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.nbrs[v]
    }
}

/// A sampled limit tree. Degrees are known below the sampled radius.
pub struct TreeHost {
    nbrs: Vec<Vec<(usize, u32)>>,
    degree: Vec<Option<usize>>,
}

impl TreeHost {
    pub fn new(tree: &PolyaPointTree) -> Self {
        let nbrs = tree
            .nodes
            .iter()
            .map(|node| {
                let mut nb: Vec<(usize, u32)> = node.children.iter().map(|&c| (c, 1)).collect();
                if let Some(p) = node.parent {
                    nb.push((p, 1));
                }
                nb.sort_unstable();
                nb
            })
            .collect();
        let degree = tree
            .nodes
            .iter()
            .map(|node| (node.depth < tree.radius).then(|| node.degree()))
            .collect();
        TreeHost { nbrs, degree }
    }

    /// Like [`TreeHost::new`], with the degrees of the nodes at the sampled
    /// radius drawn from their conditional law. `None` if a draw overflows.
    pub fn with_boundary_degrees<R: Rng + ?Sized>(tree: &PolyaPointTree, params: &ModelParams, rng: &mut R) -> Option<Self> {
        let mut host = TreeHost::new(tree);
        for (i, node) in tree.nodes.iter().enumerate() {
            if node.depth == tree.radius {
                host.degree[i] = Some(sample_unexplored_degree(params, node, rng)?);
            }
        }
        Some(host)
    }
}

impl Host for TreeHost {
    fn vertex_count(&self) -> usize {
        self.nbrs.len()
    }

    fn degree(&self, v: usize) -> Option<usize> {
        self.degree[v]
    }

    fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.nbrs[v]
    }
}

struct Matcher<'a, H: Host> {
    pattern: &'a SubgraphPattern,
    host: &'a H,
    order: Vec<(usize, Option<usize>)>,
    image: Vec<usize>,
}

impl<H: Host> Matcher<'_, H> {
    fn extend(&mut self, pos: usize, weight: u128) -> u128 {
        if pos == self.order.len() {
            return weight;
        }
        let (i, anchor) = self.order[pos];
        let want = self.pattern.target_degree(i);
        let anchor = anchor.expect("only the first vertex lacks an anchor");
        let candidates: Vec<usize> = self.host.neighbors(self.image[anchor]).iter().map(|e| e.0).collect();
        let mut total = 0u128;
        for c in candidates {
            if let Some(w) = self.try_assign(pos, i, c, want, weight) {
                total += w;
            }
        }
        total
    }

    fn try_assign(&mut self, pos: usize, i: usize, c: usize, want: usize, weight: u128) -> Option<u128> {
        if self.image.contains(&c) || self.host.degree(c) != Some(want) {
            return None;
        }
        let mut w = weight;
        for (j, m) in self.pattern.neighbors(i) {
            if self.image[j] == usize::MAX {
                continue;
            }
            let hm = self.host.multiplicity(c, self.image[j]);
            if hm == 0 {
                return None;
            }
            w *= (hm as u128).pow(m);
        }
        self.image[i] = c;
        let r = self.extend(pos + 1, w);
        self.image[i] = usize::MAX;
        Some(r)
    }
}

fn count_from<H: Host>(pattern: &SubgraphPattern, host: &H, roots: &[usize]) -> u128 {
    let mut mt = Matcher {
        pattern,
        host,
        order: pattern.bfs_order(),
        image: vec![usize::MAX; pattern.k],
    };
    let want = pattern.target_degree(0);
    roots
        .iter()
        .filter_map(|&r| mt.try_assign(0, 0, r, want, 1))
        .sum()
}

/// `inj(F, n; G)`.
pub fn count_inj(pattern: &SubgraphPattern, graph: &PaGraph) -> u128 {
    count_inj_host(pattern, &GraphHost::new(graph))
}

/// `inj(F, n; G)` on a prebuilt host.
pub fn count_inj_host(pattern: &SubgraphPattern, host: &GraphHost) -> u128 {
    let roots = host.with_degree(pattern.target_degree(0)).to_vec();
    count_from(pattern, host, &roots)
}

/// Maps sending `v_1` to `root`.
pub fn count_inj_rooted<H: Host>(pattern: &SubgraphPattern, host: &H, root: usize) -> u128 {
    count_from(pattern, host, &[root])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ModelTag;
    use crate::growth::generate_sequential;
    use crate::rng::SeedSpec;

    fn brute(pattern: &SubgraphPattern, g: &PaGraph) -> u128 {
        let host = GraphHost::new(g);
        let n = g.n();
        let k = pattern.vertex_count();
        let mut total = 0u128;
        let mut idx = vec![0usize; k];
        loop {
            let distinct = (0..k).all(|a| (0..a).all(|b| idx[a] != idx[b]));
            if distinct && (0..k).all(|i| host.degree(idx[i]) == Some(pattern.target_degree(i))) {
                let mut w = 1u128;
                for &(i, j, m) in pattern.edges() {
                    w *= (host.multiplicity(idx[i], idx[j]) as u128).pow(m);
                }
                total += w;
            }
            let mut p = 0;
            loop {
                if p == k {
                    return total;
                }
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    /// Connected patterns on up to three vertices, multiplicities up to 2.
    pub(crate) fn small_patterns(excess: &[u32]) -> Vec<SubgraphPattern> {
        let mut shapes: Vec<(usize, Vec<(usize, usize, u32)>)> = vec![(1, vec![])];
        for m in 1..=2 {
            shapes.push((2, vec![(1, 2, m)]));
        }
        for a in 0..=2u32 {
            for b in 0..=2u32 {
                for c in 0..=2u32 {
                    let mut e = Vec::new();
                    for (&(i, j), &m) in [(1, 2), (1, 3), (2, 3)].iter().zip(&[a, b, c]) {
                        if m > 0 {
                            e.push((i, j, m));
                        }
                    }
                    shapes.push((3, e));
                }
            }
        }
        let mut out = Vec::new();
        for (k, e) in shapes {
            let mut ex = vec![0usize; k];
            loop {
                let xs: Vec<u32> = ex.iter().map(|&i| excess[i]).collect();
                if let Ok(p) = SubgraphPattern::new(k, &e, &xs) {
                    out.push(p);
                }
                let mut p = 0;
                while p < k {
                    ex[p] += 1;
                    if ex[p] < excess.len() {
                        break;
                    }
                    ex[p] = 0;
                    p += 1;
                }
                if p == k {
                    break;
                }
            }
        }
        out
    }

    #[test]
    fn forced_second_vertex() {
        let p = ModelParams::new(3, 0.0).unwrap();
        let g = PaGraph::from_targets(p, 2, ModelTag::Sequential, vec![1, 1, 1]).unwrap();
        let edge = SubgraphPattern::new(2, &[(1, 2, 1)], &[2, 2]).unwrap();
        assert_eq!(count_inj(&edge, &g), 6);
        assert_eq!(brute(&edge, &g), 6);
        let single = SubgraphPattern::new(1, &[], &[3]).unwrap();
        assert_eq!(count_inj(&single, &g), 2);
    }

    #[test]
    fn matches_brute_force() {
        let patterns = small_patterns(&[0, 1, 2, 3]);
        assert!(patterns.len() > 500);
        for s in 0..12u64 {
            let params = ModelParams::new(2 + (s % 2) as usize, 0.2 * (s % 3) as f64).unwrap();
            let n = 4 + (s as usize) % 9;
            let g = generate_sequential(&params, n, &mut SeedSpec::new(s).rng()).unwrap();
            for pat in &patterns {
                assert_eq!(count_inj(pat, &g), brute(pat, &g), "seed {s} pattern {:?}", pat.to_json());
            }
        }
    }

    #[test]
    fn per_vertex_counts_concentrate() {
        let params = ModelParams::new(2, 0.0).unwrap();
        let edge = SubgraphPattern::new(2, &[(1, 2, 1)], &[1, 2]).unwrap();
        let spread = |n: usize| {
            let xs: Vec<f64> = (0..50)
                .map(|s| {
                    let g = generate_sequential(&params, n, &mut SeedSpec::new(n as u64).stream(s).rng()).unwrap();
                    count_inj(&edge, &g) as f64 / n as f64
                })
                .collect();
            let mean = xs.iter().sum::<f64>() / 50.0;
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 49.0
        };
        let (small, large) = (spread(10_000), spread(100_000));
        assert!(large < small, "{large} vs {small}");
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = serde_json::json!({"vertices": 3, "edges": [[1, 2, 1], [2, 3, 2]], "root": 1, "excess": {"1": 2, "3": 1}});
        let p = SubgraphPattern::from_json(&v).unwrap();
        assert_eq!(p.target_degree(0), 3);
        assert_eq!(p.target_degree(1), 3);
        assert_eq!(p.target_degree(2), 3);
        assert!(!p.is_tree());
        assert_eq!(p.depth(), 2);
        assert_eq!(SubgraphPattern::from_json(&p.to_json()).unwrap(), p);
        let disconnected = serde_json::json!({"vertices": 3, "edges": [[1, 2, 1]], "root": 1, "excess": {}});
        assert!(SubgraphPattern::from_json(&disconnected).is_err());
        let bad_root = serde_json::json!({"vertices": 2, "edges": [[1, 2, 1]], "root": 2, "excess": {}});
        assert!(SubgraphPattern::from_json(&bad_root).is_err());
    }
}
