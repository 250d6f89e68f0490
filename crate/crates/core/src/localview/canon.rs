//! Canonical form of rooted, loopless multigraphs.
//!
//! Pendant trees are folded into their attachment vertex as nested byte
//! labels (AHU style, edge multiplicity included). If only the root is
//! left, its label is the code. Otherwise the remaining core is labeled by
//! color refinement plus individualization, keeping the smallest code over
//! the search tree. Twins (vertices with identical neighborhoods) are
//! interchangeable, so only one per twin class is individualized.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RootedBall;
use crate::error::{Error, Result};

/// Largest ball accepted by [`canonical_code`].
pub const DEFAULT_VERTEX_CAP: usize = 10_000;

/// Budget of refinement calls in the individualization search.
const SEARCH_BUDGET: usize = 200_000;

/// Byte string identifying a rooted-multigraph isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn to_base64(&self) -> String {
        STANDARD.encode(&self.0)
    }

    pub fn from_base64(s: &str) -> Result<Self> {
        STANDARD
            .decode(s)
            .map(CanonicalCode)
            .map_err(|e| Error::invalid(format!("bad canonical code: {e}")))
    }
}

impl Serialize for CanonicalCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_base64())
    }
}

impl<'de> Deserialize<'de> for CanonicalCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalCode::from_base64(&s).map_err(serde::de::Error::custom)
    }
}

pub fn canonical_code(ball: &RootedBall) -> Result<CanonicalCode> {
    canonical_code_with_cap(ball, DEFAULT_VERTEX_CAP)
}

pub fn canonical_code_with_cap(ball: &RootedBall, cap: usize) -> Result<CanonicalCode> {
    let n = ball.len();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let mut nbrs: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for &(u, v, m) in &ball.edges {
        let (u, v) = (u as usize, v as usize);
        if u == v {
            return Err(Error::invalid("loops are not supported"));
        }
        nbrs[u].push((v, m));
        nbrs[v].push((u, m));
    }

    // Fold pendant trees.
    let mut alive = vec![true; n];
    let mut live_deg: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut hang: Vec<Vec<Vec<u8>>> = vec![Vec::new(); n];
    let mut stack: Vec<usize> = (1..n).filter(|&v| live_deg[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] || live_deg[v] != 1 {
            continue;
        }
        let &(p, m) = nbrs[v].iter().find(|&&(u, _)| alive[u]).expect("one live neighbor");
        let label = tree_label(m, std::mem::take(&mut hang[v]));
        hang[p].push(label);
        alive[v] = false;
        live_deg[p] -= 1;
        if p != 0 && live_deg[p] == 1 {
            stack.push(p);
        }
    }
    let core: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    if core.len() == 1 {
        let mut code = vec![b'T'];
        code.extend(tree_label(0, std::mem::take(&mut hang[0])));
        return Ok(CanonicalCode(code));
    }

    // Core graph with per-vertex keys from the folded trees.
    let mut index = vec![usize::MAX; n];
    for (i, &v) in core.iter().enumerate() {
        index[v] = i;
    }
    let keys: Vec<Vec<u8>> = core
        .iter()
        .map(|&v| {
            let mut labels = std::mem::take(&mut hang[v]);
            labels.sort();
            let mut key = vec![u8::from(v == 0)];
            for l in labels {
                key.extend((l.len() as u32).to_le_bytes());
                key.extend(l);
            }
            key
        })
        .collect();
    let adj: Vec<Vec<(usize, u32)>> = core
        .iter()
        .map(|&v| {
            let mut a: Vec<(usize, u32)> = nbrs[v]
                .iter()
                .filter(|&&(u, _)| alive[u])
                .map(|&(u, m)| (index[u], m))
                .collect();
            a.sort_unstable();
            a
        })
        .collect();
    let colors = ranks(&keys);
    let mut search = Search {
        adj: &adj,
        keys: &keys,
        best: None,
        budget: SEARCH_BUDGET,
    };
    search.run(colors)?;
    let mut code = vec![b'G'];
    code.extend((core.len() as u32).to_le_bytes());
    code.extend(search.best.expect("search reaches a leaf"));
    Ok(CanonicalCode(code))
}

/// `'(' mult children... ')'` with children sorted.
fn tree_label(mult: u32, mut children: Vec<Vec<u8>>) -> Vec<u8> {
    children.sort();
    let mut out = vec![b'('];
    out.extend(mult.to_le_bytes());
    for c in children {
        out.extend(c);
    }
    out.push(b')');
    out
}

/// Dense ranks of `items` in sorted order.
fn ranks<T: Ord + Clone>(items: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items
        .iter()
        .map(|x| sorted.binary_search(x).expect("present") as u32)
        .collect()
}

struct Search<'a> {
    adj: &'a [Vec<(usize, u32)>],
    keys: &'a [Vec<u8>],
    best: Option<Vec<u8>>,
    budget: usize,
}

impl Search<'_> {
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut count = distinct(&colors);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..colors.len())
                .map(|v| {
                    let mut s: Vec<(u32, u32)> = self.adj[v].iter().map(|&(u, m)| (colors[u], m)).collect();
                    s.sort_unstable();
                    (colors[v], s)
                })
                .collect();
            colors = ranks(&sigs);
            let c = distinct(&colors);
            if c == count {
                return colors;
            }
            count = c;
        }
    }

    fn run(&mut self, colors: Vec<u32>) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::CapExceeded {
                size: SEARCH_BUDGET + 1,
                cap: SEARCH_BUDGET,
            });
        }
        self.budget -= 1;
        let colors = self.refine(colors);
        let n = colors.len();
        if distinct(&colors) == n {
            let code = self.leaf_code(&colors);
            if self.best.as_ref().is_none_or(|b| code < *b) {
                self.best = Some(code);
            }
            return Ok(());
        }
        // First non-singleton cell in color order.
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let cell = sizes.iter().position(|&s| s > 1).expect("non-discrete") as u32;
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == cell).collect();
        let mut reps: Vec<usize> = Vec::new();
        for &v in &members {
            if !reps.iter().any(|&r| self.twins(r, v)) {
                reps.push(v);
            }
        }
        for rep in reps {
            let next: Vec<u32> = (0..n)
                .map(|w| 2 * colors[w] + u32::from(w != rep))
                .collect();
            self.run(next)?;
        }
        Ok(())
    }

    /// `N(u) - v == N(v) - u` with multiplicities.
    fn twins(&self, u: usize, v: usize) -> bool {
        let a: Vec<(usize, u32)> = self.adj[u].iter().copied().filter(|&(w, _)| w != v).collect();
        let b: Vec<(usize, u32)> = self.adj[v].iter().copied().filter(|&(w, _)| w != u).collect();
        a == b
    }

    fn leaf_code(&self, colors: &[u32]) -> Vec<u8> {
        let n = colors.len();
        let mut order = vec![0usize; n];
        for (v, &c) in colors.iter().enumerate() {
            order[c as usize] = v;
        }
        let mut out = Vec::new();
        for &v in &order {
            out.extend((self.keys[v].len() as u32).to_le_bytes());
            out.extend(&self.keys[v]);
        }
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for v in 0..n {
            for &(u, m) in &self.adj[v] {
                let (a, b) = (colors[v], colors[u]);
                if a < b {
                    edges.push((a, b, m));
                }
            }
        }
        edges.sort_unstable();
        for (a, b, m) in edges {
            out.extend(a.to_le_bytes());
            out.extend(b.to_le_bytes());
            out.extend(m.to_le_bytes());
        }
        out
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}
