//! Directed graphs on dense vertex ids `0..n` and the handful of
//! graph-theoretic primitives the rest of the crate needs: in-degrees,
//! shortest directed paths, weak components, 2-colorability of the
//! underlying undirected graph, and arrow-induced subnetworks.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Arrow = (Vertex, Vertex);

/// Finite digraph. Arrows are kept sorted lexicographically and deduplicated,
/// so serialization and per-arrow assignments have a canonical order.
/// Self-loops are permitted. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arrows: Vec<Arrow>,
    in_degrees: Vec<u32>,
    out_offsets: Vec<usize>,
    out_targets: Vec<Vertex>,
}

impl Digraph {
    pub fn new(n: usize, mut arrows: Vec<Arrow>) -> Result<Self> {
        for &(u, v) in &arrows {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "arrow ({u},{v}) has endpoint outside 0..{n}"
                )));
            }
        }
        arrows.sort_unstable();
        arrows.dedup();

        let mut in_degrees = vec![0u32; n];
        let mut out_counts = vec![0usize; n];
        for &(u, v) in &arrows {
            in_degrees[v] += 1;
            out_counts[u] += 1;
        }
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        out_offsets.push(0);
        for c in &out_counts {
            acc += c;
            out_offsets.push(acc);
        }
        // arrows are sorted by source, so targets can be laid out in one pass
        let out_targets = arrows.iter().map(|&(_, v)| v).collect();

        Ok(Digraph {
            n,
            arrows,
            in_degrees,
            out_offsets,
            out_targets,
        })
    }

    pub fn empty(n: usize) -> Self {
        Digraph::new(n, Vec::new()).expect("empty graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// Arrows in lexicographic order. Per-arrow assignments (signs,
    /// thresholds) are indexed by position in this slice.
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v < self.n
    }

    pub fn arrow_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.arrows.binary_search(&(u, v)).ok()
    }

    pub fn has_arrow(&self, u: Vertex, v: Vertex) -> bool {
        self.arrow_index(u, v).is_some()
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Number of incoming arrows of `v` (`Id(v)`).
    pub fn in_degree(&self, v: Vertex) -> Result<usize> {
        if v >= self.n {
            return Err(Error::domain(format!("unknown vertex {v} (n = {})", self.n)));
        }
        Ok(self.in_degrees[v] as usize)
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degrees
    }

    /// Length of the shortest directed path from `u` to `v`; `None` when
    /// `v` is unreachable. `u == v` gives 0.
    pub fn directed_distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>> {
        if u >= self.n || v >= self.n {
            return Err(Error::domain(format!(
                "unknown vertex in distance query ({u},{v}), n = {}",
                self.n
            )));
        }
        if u == v {
            return Ok(Some(0));
        }
        let mut dist = vec![usize::MAX; self.n];
        dist[u] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(u);
        while let Some(w) = queue.pop_front() {
            for &t in self.out_neighbors(w) {
                if dist[t] == usize::MAX {
                    dist[t] = dist[w] + 1;
                    if t == v {
                        return Ok(Some(dist[t]));
                    }
                    queue.push_back(t);
                }
            }
        }
        Ok(None)
    }

    /// Adjacency of the underlying undirected graph (antiparallel arrow
    /// pairs collapse to one edge, self-loops dropped), deduplicated.
    fn undirected_adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.arrows {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components of the underlying undirected graph. Components
    /// are ordered by their smallest vertex and internally sorted, and they
    /// partition the vertex set (isolated vertices are singletons).
    pub fn weak_components(&self) -> Vec<Vec<Vertex>> {
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::new();
            seen[root] = true;
            queue.push_back(root);
            while let Some(w) = queue.pop_front() {
                comp.push(w);
                for &t in &adj[w] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Component ids aligned with `weak_components` order.
    pub fn weak_component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0usize; self.n];
        for (i, comp) in self.weak_components().iter().enumerate() {
            for &v in comp {
                ids[v] = i;
            }
        }
        ids
    }

    /// Number of "cycle components": strongly connected components that
    /// carry at least one arrow (size >= 2, or a single vertex with a
    /// self-loop). Vertices on no cycle belong to no component under this
    /// rule.
    pub fn cycle_component_count(&self) -> usize {
        self.strongly_connected_components()
            .iter()
            .filter(|comp| {
                comp.len() > 1 || (comp.len() == 1 && self.has_arrow(comp[0], comp[0]))
            })
            .count()
    }

    /// Tarjan's algorithm, iterative to keep large graphs off the call stack.
    pub fn strongly_connected_components(&self) -> Vec<Vec<Vertex>> {
        #[derive(Clone, Copy)]
        struct Frame {
            v: Vertex,
            next_edge: usize,
        }
        let n = self.n;
        let mut index = vec![usize::MAX; n];
        let mut lowlink = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<Vertex> = Vec::new();
        let mut counter = 0usize;
        let mut components = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut frames = vec![Frame {
                v: root,
                next_edge: 0,
            }];
            index[root] = counter;
            lowlink[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(frame) = frames.last_mut() {
                let v = frame.v;
                let out = self.out_neighbors(v);
                if frame.next_edge < out.len() {
                    let w = out[frame.next_edge];
                    frame.next_edge += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        lowlink[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push(Frame {
                            v: w,
                            next_edge: 0,
                        });
                    } else if on_stack[w] {
                        lowlink[v] = lowlink[v].min(index[w]);
                    }
                } else {
                    frames.pop();
                    if let Some(parent) = frames.last() {
                        lowlink[parent.v] = lowlink[parent.v].min(lowlink[v]);
                    }
                    if lowlink[v] == index[v] {
                        let mut comp = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        components.push(comp);
                    }
                }
            }
        }
        components.sort_by_key(|c| c[0]);
        components
    }

    /// 2-coloring of the underlying undirected graph, or an odd cycle
    /// witnessing that none exists. Self-loops are odd cycles of length 1.
    pub fn bipartition(&self) -> Bipartition {
        for &(u, v) in &self.arrows {
            if u == v {
                return Bipartition::OddCycle(vec![u]);
            }
        }
        let adj = self.undirected_adjacency();
        let mut color = vec![u8::MAX; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for root in 0..self.n {
            if color[root] != u8::MAX {
                continue;
            }
            color[root] = 0;
            let mut queue = VecDeque::new();
            queue.push_back(root);
            while let Some(w) = queue.pop_front() {
                for &t in &adj[w] {
                    if color[t] == u8::MAX {
                        color[t] = 1 - color[w];
                        parent[t] = w;
                        queue.push_back(t);
                    } else if color[t] == color[w] {
                        return Bipartition::OddCycle(odd_cycle_through(&parent, w, t));
                    }
                }
            }
        }
        Bipartition::TwoColoring(color)
    }

    /// Subnetwork induced by a set of arrows: its vertices are exactly the
    /// arrow endpoints.
    pub fn induced_subnetwork(&self, arrows: &[Arrow]) -> Result<Subnetwork> {
        for &(u, v) in arrows {
            if !self.has_arrow(u, v) {
                return Err(Error::domain(format!(
                    "arrow ({u},{v}) is not an arrow of the parent graph"
                )));
            }
        }
        let mut vertices: Vec<Vertex> = arrows.iter().flat_map(|&(u, v)| [u, v]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut arrows = arrows.to_vec();
        arrows.sort_unstable();
        arrows.dedup();
        Subnetwork::new(vertices, arrows)
    }
}

/// Result of the 2-colorability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    /// Color per vertex (0/1); every arrow with distinct endpoints joins
    /// opposite colors.
    TwoColoring(Vec<u8>),
    /// Vertices of an odd cycle in the underlying undirected graph.
    OddCycle(Vec<Vertex>),
}

impl Bipartition {
    pub fn coloring(&self) -> Option<&[u8]> {
        match self {
            Bipartition::TwoColoring(c) => Some(c),
            Bipartition::OddCycle(_) => None,
        }
    }
}

/// Reconstruct an odd cycle from the BFS forest after finding a conflict
/// edge `(a, b)` whose endpoints share a color.
fn odd_cycle_through(parent: &[usize], a: Vertex, b: Vertex) -> Vec<Vertex> {
    let ancestors = |mut v: Vertex| {
        let mut path = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            path.push(v);
        }
        path
    };
    let pa = ancestors(a);
    let pb = ancestors(b);
    // trim the common suffix above the LCA
    let mut ia = pa.len();
    let mut ib = pb.len();
    while ia > 0 && ib > 0 && pa[ia - 1] == pb[ib - 1] {
        ia -= 1;
        ib -= 1;
    }
    // keep the LCA itself
    let mut cycle: Vec<Vertex> = pa[..=ia.min(pa.len() - 1)].to_vec();
    let mut back: Vec<Vertex> = pb[..ib].to_vec();
    back.reverse();
    cycle.extend(back);
    cycle
}

/// A subnetwork of a parent digraph: a vertex subset and an arrow subset
/// supported on it. Kept in parent vertex ids; `to_dense` reindexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subnetwork {
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

impl Subnetwork {
    pub fn new(mut vertices: Vec<Vertex>, mut arrows: Vec<Arrow>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        arrows.sort_unstable();
        arrows.dedup();
        for &(u, v) in &arrows {
            if vertices.binary_search(&u).is_err() || vertices.binary_search(&v).is_err() {
                return Err(Error::domain(format!(
                    "subnetwork arrow ({u},{v}) touches a vertex outside the subset"
                )));
            }
        }
        Ok(Subnetwork { vertices, arrows })
    }

    pub fn empty() -> Self {
        Subnetwork {
            vertices: Vec::new(),
            arrows: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_arrow(&self, u: Vertex, v: Vertex) -> bool {
        self.arrows.binary_search(&(u, v)).is_ok()
    }

    /// In-degree of `v` counting only subnetwork arrows (`Id_osc(v)` when
    /// the subnetwork is an oscillatory one).
    pub fn in_degree(&self, v: Vertex) -> usize {
        self.arrows.iter().filter(|&&(_, t)| t == v).count()
    }

    /// Is `other` a sub-(vertex,arrow)-set of this subnetwork?
    pub fn contains(&self, other: &Subnetwork) -> bool {
        other.vertices.iter().all(|&v| self.contains_vertex(v))
            && other.arrows.iter().all(|&(u, v)| self.contains_arrow(u, v))
    }

    /// Reindex onto dense ids `0..k`. Returns the dense digraph and the
    /// dense-to-parent vertex map.
    pub fn to_dense(&self) -> (Digraph, Vec<Vertex>) {
        let dense_of = |v: Vertex| self.vertices.binary_search(&v).expect("vertex in subset");
        let arrows = self
            .arrows
            .iter()
            .map(|&(u, v)| (dense_of(u), dense_of(v)))
            .collect();
        let g = Digraph::new(self.vertices.len(), arrows).expect("subnetwork is a valid digraph");
        (g, self.vertices.clone())
    }
}
