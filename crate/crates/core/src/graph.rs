//! The grown multigraph and its edge-list format.
//!
//! Vertices are labelled `1..=n`. Vertex `v >= 2` owns `m` ordered out-slots;
//! slot `i` of `v` is the edge born at time `(v - 2) m + i`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::SeedSpec;

/// Which rule produced a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Independent,
    Conditional,
    Sequential,
    Polya,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelTag::Independent => "independent",
            ModelTag::Conditional => "conditional",
            ModelTag::Sequential => "sequential",
            ModelTag::Polya => "polya",
        })
    }
}

impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(ModelTag::Independent),
            "conditional" => Ok(ModelTag::Conditional),
            "sequential" => Ok(ModelTag::Sequential),
            "polya" => Ok(ModelTag::Polya),
            other => Err(Error::invalid(format!("unknown model '{other}'"))),
        }
    }
}

/// A preferential-attachment multigraph, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PaGraph {
    params: ModelParams,
    n: usize,
    model: ModelTag,
    seed: Option<SeedSpec>,
    /// `targets[(v - 2) * m + (i - 1)]` is the receiver of slot `i` of `v`.
    targets: Vec<u32>,
}

impl PaGraph {
    /// Builds a graph from the flat target array, checking the invariants.
    pub fn from_targets(
        params: ModelParams,
        n: usize,
        model: ModelTag,
        targets: Vec<u32>,
    ) -> Result<Self> {
        let m = params.m();
        if n < 1 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(Error::invalid("n exceeds u32 range"));
        }
        if targets.len() != m * (n - 1) {
            return Err(Error::invalid(format!(
                "expected {} targets, found {}",
                m * (n - 1),
                targets.len()
            )));
        }
        for (idx, &w) in targets.iter().enumerate() {
            let v = idx / m + 2;
            if w < 1 || w as usize >= v {
                return Err(Error::invalid(format!(
                    "vertex {v} targets {w}, outside 1..{v}"
                )));
            }
        }
        Ok(PaGraph {
            params,
            n,
            model,
            seed: None,
            targets,
        })
    }

    /// Internal constructor for generators that already guarantee validity.
    pub(crate) fn from_raw(params: ModelParams, n: usize, model: ModelTag, targets: Vec<u32>) -> Self {
        debug_assert_eq!(targets.len(), params.m() * (n - 1));
        PaGraph {
            params,
            n,
            model,
            seed: None,
            targets,
        }
    }

    pub fn with_seed(mut self, seed: SeedSpec) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.params.m()
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn seed(&self) -> Option<SeedSpec> {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// Ordered targets `(w_1, ..., w_m)` sent by `v`; empty for `v = 1`.
    pub fn sends(&self, v: usize) -> &[u32] {
        if v < 2 || v > self.n {
            return &[];
        }
        let m = self.m();
        &self.targets[(v - 2) * m..(v - 1) * m]
    }

    /// Iterates `(sender, receiver, slot)` in birth order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let m = self.m();
        self.targets
            .iter()
            .enumerate()
            .map(move |(t, &w)| (t / m + 2, w as usize, t % m + 1))
    }

    /// Degree of `v`, counting parallel edges with multiplicity.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v < 1 || v > self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        let sent = if v >= 2 { self.m() } else { 0 };
        let received = self.targets[(v.saturating_sub(1)) * self.m()..]
            .iter()
            .filter(|&&w| w as usize == v)
            .count();
        Ok(sent + received)
    }

    /// All degrees; entry `v - 1` belongs to vertex `v`.
    pub fn degrees(&self) -> Vec<u32> {
        let m = self.m() as u32;
        let mut deg = vec![m; self.n];
        deg[0] = 0;
        for &w in &self.targets {
            deg[w as usize - 1] += 1;
        }
        deg
    }

    /// Histogram `h[d]` = number of vertices of degree `d`.
    pub fn degree_histogram(&self) -> Vec<u64> {
        let deg = self.degrees();
        let max = deg.iter().copied().max().unwrap_or(0) as usize;
        let mut h = vec![0u64; max + 1];
        for d in deg {
            h[d as usize] += 1;
        }
        h
    }

    /// Set of received edges `(sender, slot)` of `v`, in birth order.
    pub fn received(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges()
            .skip((v.saturating_sub(1)) * self.m())
            .filter(|&(_, w, _)| w == v)
            .map(|(s, _, i)| (s, i))
            .collect()
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    /// Header line of the edge-list format.
    pub fn tsv_header(&self) -> String {
        let seed = self
            .seed
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".to_string());
        format!(
            "# pa-graph n={} m={} alpha={} model={} seed={}",
            self.n,
            self.m(),
            self.params.alpha(),
            self.model,
            seed
        )
    }

    /// Writes the edge list: a header then `sender\treceiver\tslot` per edge.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.tsv_header())?;
        for (s, w, i) in self.edges() {
            writeln!(out, "{s}\t{w}\t{i}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
        let header = header?;
        let rest = header
            .strip_prefix("# pa-graph")
            .ok_or_else(|| Error::Parse { line: 1, msg: "missing '# pa-graph' header".into() })?;
        let mut n = None;
        let mut m = None;
        let mut alpha = None;
        let mut model = None;
        let mut seed = None;
        for kv in rest.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: 1, msg: format!("bad field '{kv}'") })?;
            let bad = |msg: String| Error::Parse { line: 1, msg };
            match k {
                "n" => n = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "m" => m = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "alpha" => alpha = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "model" => model = Some(v.parse::<ModelTag>().map_err(|e| bad(e.to_string()))?),
                "seed" if v != "none" => {
                    seed = Some(v.parse::<SeedSpec>().map_err(|e| bad(e.to_string()))?)
                }
                _ => {}
            }
        }
        let missing = |f: &str| Error::Parse { line: 1, msg: format!("header lacks {f}") };
        let n = n.ok_or_else(|| missing("n"))?;
        let m = m.ok_or_else(|| missing("m"))?;
        let params = ModelParams::new(m, alpha.ok_or_else(|| missing("alpha"))?)?;
        let model = model.ok_or_else(|| missing("model"))?;

        let mut targets = vec![0u32; m * n.saturating_sub(1)];
        let mut seen = 0usize;
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
            let mut cols = line.split('\t').map(|c| c.trim().parse::<usize>());
            let mut next = || -> Result<usize> {
                cols.next()
                    .ok_or_else(|| bad("expected three columns"))?
                    .map_err(|e| bad(&e.to_string()))
            };
            let (s, w, i) = (next()?, next()?, next()?);
            if s < 2 || s > n || i < 1 || i > m {
                return Err(bad("sender or slot out of range"));
            }
            let slot = &mut targets[(s - 2) * m + i - 1];
            if *slot != 0 {
                return Err(bad("duplicate slot"));
            }
            *slot = w as u32;
            seen += 1;
        }
        if seen != targets.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {} edges, found {seen}", targets.len()),
            });
        }
        let g = PaGraph::from_targets(params, n, model, targets)?;
        Ok(match seed {
            Some(s) => g.with_seed(s),
            None => g,
        })
    }
}

/// Incidence lists with edges in birth order.
///
/// Entry `(neighbor, birth)` per incident edge; `birth` is the 1-based edge
/// time `(sender - 2) m + slot`.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(u32, u64)>,
}

impl Adjacency {
    pub fn new(g: &PaGraph) -> Self {
        let deg = g.degrees();
        let mut offsets = Vec::with_capacity(g.n() + 1);
        offsets.push(0);
        for &d in &deg {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let mut fill = offsets.clone();
        let mut entries = vec![(0u32, 0u64); *offsets.last().unwrap()];
        for (t, (s, w, _)) in g.edges().enumerate() {
            let birth = t as u64 + 1;
            entries[fill[s - 1]] = (w as u32, birth);
            fill[s - 1] += 1;
            entries[fill[w - 1]] = (s as u32, birth);
            fill[w - 1] += 1;
        }
        // Each vertex's sends precede every edge it receives, and both groups
        // are pushed in birth order, so the lists are already sorted.
        Adjacency { offsets, entries }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Incident edges of `v` (1-based) as `(neighbor, birth)`.
    pub fn incident(&self, v: usize) -> &[(u32, u64)] {
        &self.entries[self.offsets[v - 1]..self.offsets[v]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v] - self.offsets[v - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2(m: usize) -> PaGraph {
        let p = ModelParams::new(m, 0.0).unwrap();
        PaGraph::from_targets(p, 2, ModelTag::Sequential, vec![1; m]).unwrap()
    }

    #[test]
    fn forced_second_vertex() {
        let g = g2(3);
        assert_eq!(g.degree(1).unwrap(), 3);
        assert_eq!(g.degree(2).unwrap(), 3);
        assert!(g.degree(3).is_err());
        assert!(g.degree(0).is_err());
    }

    #[test]
    fn rejects_forward_targets() {
        let p = ModelParams::new(2, 0.0).unwrap();
        assert!(PaGraph::from_targets(p, 3, ModelTag::Sequential, vec![1, 1, 3, 1]).is_err());
        assert!(PaGraph::from_targets(p, 3, ModelTag::Sequential, vec![1, 1, 1]).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let p = ModelParams::new(2, 0.25).unwrap();
        let g = PaGraph::from_targets(p, 4, ModelTag::Polya, vec![1, 1, 2, 1, 3, 3])
            .unwrap()
            .with_seed(SeedSpec::new(9).stream(2));
        let mut buf = Vec::new();
        g.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# pa-graph n=4 m=2 alpha=0.25 model=polya seed=9/2\n"));
        assert!(text.contains("4\t3\t2\n"));
        let back = PaGraph::read_tsv(&buf[..]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn adjacency_in_birth_order() {
        let p = ModelParams::new(2, 0.0).unwrap();
        let g = PaGraph::from_targets(p, 4, ModelTag::Sequential, vec![1, 1, 2, 1, 3, 3]).unwrap();
        let adj = g.adjacency();
        assert_eq!(adj.incident(1), &[(2, 1), (2, 2), (3, 4)]);
        assert_eq!(adj.incident(3), &[(2, 3), (1, 4), (4, 5), (4, 6)]);
        for v in 1..=4 {
            assert_eq!(adj.degree(v), g.degree(v).unwrap());
        }
        assert_eq!(g.received(3), vec![(4, 1), (4, 2)]);
    }
}
