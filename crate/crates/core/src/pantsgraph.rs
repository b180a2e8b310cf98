//! Trivalent dual graphs of pants decompositions and flute extraction.
//!
//! Vertices are pants and edges are pants curves. A half-edge with no other
//! end is a puncture (cusp) or a boundary component. The built-in families
//! are generated lazily and truncated to BFS balls around vertex 0.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::fnspace::{fold_label, unfold_index};

/// A neighbour slot of a pants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Vertex(u64),
    Puncture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DualGraph {
    /// `0 - 1 - 2 - ...`, one puncture per vertex and two at vertex 0.
    Flute,
    /// Integer labels folded onto ids `0, 1, 2, ...` as `0, 1, -1, 2, ...`.
    BiinfiniteFlute,
    /// Spine `u_n = 2n`, handle `h_n = 2n + 1` carrying a self-loop.
    LochNess,
    /// Binary tree in heap order; the root also carries a puncture.
    CantorTree,
}

impl FromStr for DualGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "flute" => Ok(DualGraph::Flute),
            "biinfinite-flute" | "bi-infinite-flute" => Ok(DualGraph::BiinfiniteFlute),
            "loch-ness" => Ok(DualGraph::LochNess),
            "cantor-tree" => Ok(DualGraph::CantorTree),
            _ => Err(config(format!("unknown dual-graph family `{s}`"))),
        }
    }
}

impl DualGraph {
    pub fn base(&self) -> u64 {
        0
    }

    /// The three slots of vertex `v`; a self-loop appears twice.
    pub fn slots(&self, v: u64) -> [Slot; 3] {
        use Slot::{Puncture, Vertex};
        match self {
            DualGraph::Flute => {
                if v == 0 {
                    [Puncture, Puncture, Vertex(1)]
                } else {
                    [Vertex(v - 1), Vertex(v + 1), Puncture]
                }
            }
            DualGraph::BiinfiniteFlute => {
                let j = unfold_index(v + 1);
                let id = |k: i64| fold_label(k) - 1;
                [Vertex(id(j - 1)), Vertex(id(j + 1)), Puncture]
            }
            DualGraph::LochNess => {
                if v % 2 == 1 {
                    [Vertex(v - 1), Vertex(v), Vertex(v)]
                } else if v == 0 {
                    [Puncture, Vertex(2), Vertex(1)]
                } else {
                    [Vertex(v - 2), Vertex(v + 2), Vertex(v + 1)]
                }
            }
            DualGraph::CantorTree => {
                let up = if v == 0 { Puncture } else { Vertex((v - 1) / 2) };
                [up, Vertex(2 * v + 1), Vertex(2 * v + 2)]
            }
        }
    }
}

/// A finite multigraph with punctures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    pub vertices: BTreeSet<u64>,
    /// Edges `(u, v)` with `u <= v`; loops and parallel edges are repeated.
    pub edges: Vec<(u64, u64)>,
    /// One entry per puncture half-edge.
    pub punctures: Vec<u64>,
}

impl FiniteGraph {
    pub fn from_edges(
        vertices: impl IntoIterator<Item = u64>,
        edges: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self> {
        let vertices: BTreeSet<u64> = vertices.into_iter().collect();
        let mut out = Vec::new();
        for (a, b) in edges {
            if !vertices.contains(&a) || !vertices.contains(&b) {
                return Err(config(format!("edge ({a}, {b}) has an endpoint outside the graph")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        Ok(Self {
            vertices,
            edges: out,
            punctures: Vec::new(),
        })
    }

    /// Neighbours of each vertex in id order, one entry per edge end.
    pub fn adjacency(&self) -> BTreeMap<u64, Vec<u64>> {
        let mut adj: BTreeMap<u64, Vec<u64>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: u64) -> usize {
        let ends = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum::<usize>();
        ends + self.punctures.iter().filter(|&&p| p == v).count()
    }

    /// `u v` per edge, `u -` per puncture.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        for p in &self.punctures {
            let _ = writeln!(out, "{p} -");
        }
        out
    }

    /// Whether `self` is the subgraph of `other` induced on `self.vertices`.
    pub fn is_induced_subgraph_of(&self, other: &FiniteGraph) -> bool {
        if !self.vertices.is_subset(&other.vertices) {
            return false;
        }
        let inside: Vec<(u64, u64)> = other
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| self.vertices.contains(a) && self.vertices.contains(b))
            .collect();
        let punctures: Vec<u64> = other
            .punctures
            .iter()
            .copied()
            .filter(|p| self.vertices.contains(p))
            .collect();
        inside == self.edges && punctures == self.punctures
    }
}

/// BFS ball of radius `k` around the base vertex.
pub fn truncate(g: DualGraph, k: u32) -> FiniteGraph {
    let mut dist = BTreeMap::from([(g.base(), 0u32)]);
    let mut queue = VecDeque::from([g.base()]);
    while let Some(v) = queue.pop_front() {
        if dist[&v] == k {
            continue;
        }
        for slot in g.slots(v) {
            if let Slot::Vertex(u) = slot {
                if !dist.contains_key(&u) {
                    dist.insert(u, dist[&v] + 1);
                    queue.push_back(u);
                }
            }
        }
    }
    let vertices: BTreeSet<u64> = dist.keys().copied().collect();
    let mut edges = Vec::new();
    let mut punctures = Vec::new();
    for &v in &vertices {
        let mut loops = 0;
        for slot in g.slots(v) {
            match slot {
                Slot::Puncture => punctures.push(v),
                Slot::Vertex(u) if u == v => loops += 1,
                Slot::Vertex(u) if u > v && vertices.contains(&u) => edges.push((v, u)),
                Slot::Vertex(_) => {}
            }
        }
        edges.extend(std::iter::repeat_n((v, v), loops / 2));
    }
    edges.sort_unstable();
    FiniteGraph {
        vertices,
        edges,
        punctures,
    }
}

fn bfs(adj: &BTreeMap<u64, Vec<u64>>, root: u64) -> BTreeMap<u64, (u32, Option<u64>)> {
    let mut seen = BTreeMap::from([(root, (0u32, None))]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = seen[&v].0;
        for &u in &adj[&v] {
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(u) {
                e.insert((d + 1, Some(v)));
                queue.push_back(u);
            }
        }
    }
    seen
}

/// BFS spanning tree from the smallest vertex; punctures are kept.
pub fn maximal_tree(g: &FiniteGraph) -> Result<FiniteGraph> {
    let Some(&root) = g.vertices.first() else {
        return Ok(g.clone());
    };
    let reached = bfs(&g.adjacency(), root);
    if reached.len() != g.vertices.len() {
        return Err(Error::Topology(format!(
            "graph is disconnected: {} of {} vertices reachable",
            reached.len(),
            g.vertices.len()
        )));
    }
    let mut edges: Vec<(u64, u64)> = reached
        .iter()
        .filter_map(|(&v, &(_, parent))| parent.map(|p| (p.min(v), p.max(v))))
        .collect();
    edges.sort_unstable();
    Ok(FiniteGraph {
        vertices: g.vertices.clone(),
        edges,
        punctures: g.punctures.clone(),
    })
}

/// An emanating half-edge of the extracted flute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdge {
    pub at: u64,
    /// Other end, or `None` for a puncture.
    pub to: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluteDescriptor {
    pub spine: Vec<u64>,
    /// Pants curves between consecutive spine pants.
    pub rungs: Vec<(u64, u64)>,
    /// Other curves and punctures at spine pants.
    pub boundary: Vec<HalfEdge>,
}

impl FluteDescriptor {
    /// Number of spine edges.
    pub fn spine_length(&self) -> usize {
        self.spine.len().saturating_sub(1)
    }
}

/// Longest path from `seed` in the tree, ties going to the smallest end id.
pub fn extract_flute(tree: &FiniteGraph, seed: u64) -> Result<FluteDescriptor> {
    if tree.vertices.is_empty() {
        return Err(domain("cannot extract a flute from an empty tree"));
    }
    if !tree.vertices.contains(&seed) {
        return Err(domain(format!("seed {seed} is not a vertex of the tree")));
    }
    let adj = tree.adjacency();
    let reached = bfs(&adj, seed);
    let far = reached
        .iter()
        .max_by(|(a, (da, _)), (b, (db, _))| da.cmp(db).then(b.cmp(a)))
        .map(|(&v, _)| v)
        .expect("seed is reached");
    let mut spine = vec![far];
    while let Some(p) = reached[spine.last().expect("nonempty")].1 {
        spine.push(p);
    }
    spine.reverse();
    let rungs: Vec<(u64, u64)> = spine.windows(2).map(|w| (w[0], w[1])).collect();
    let on_spine: BTreeSet<(u64, u64)> = rungs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut boundary = Vec::new();
    for &v in &spine {
        for &(a, b) in &tree.edges {
            if (a == v || b == v) && !on_spine.contains(&(a, b)) {
                boundary.push(HalfEdge {
                    at: v,
                    to: Some(if a == v { b } else { a }),
                });
            }
        }
        for _ in tree.punctures.iter().filter(|&&p| p == v) {
            boundary.push(HalfEdge { at: v, to: None });
        }
    }
    Ok(FluteDescriptor {
        spine,
        rungs,
        boundary,
    })
}
