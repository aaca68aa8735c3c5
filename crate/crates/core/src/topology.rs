//! Graph families under study: complete d-ary and Delta-regular trees,
//! almost-regular variants, unicyclic graphs, and configuration-model random
//! regular graphs, plus BFS balls and descendant subtrees.
//!
//! Graphs are immutable after construction. Edge ids are assigned in
//! construction order and are stable across runs for identical inputs.

use crate::error::{Error, Result};
use crate::rng::{seeded_rng, stream};
use crate::unionfind::UnionFind;
use rand::seq::SliceRandom;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Undirected finite graph with indexed edges, optional root and BFS layering.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
    /// Per-vertex incident edge ids.
    adjacency: Vec<Vec<EdgeId>>,
    root: Option<VertexId>,
    /// BFS depth from root when rooted.
    depth: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops and duplicates.
    pub fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::validation(format!(
                    "edge {id} = ({u},{v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(Error::validation(format!("edge {id} is a self-loop at {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::validation(format!(
                    "duplicate edge ({},{})",
                    key.0, key.1
                )));
            }
            adjacency[u].push(id);
            adjacency[v].push(id);
        }
        Ok(Graph {
            vertex_count,
            edges,
            adjacency,
            root: None,
            depth: None,
        })
    }

    /// Roots the graph at `root` and records exact BFS depths.
    pub fn with_root(mut self, root: VertexId) -> Result<Self> {
        if root >= self.vertex_count {
            return Err(Error::validation(format!("root {root} out of range")));
        }
        let depth = self.bfs_depths(root);
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            let (du, dv) = (depth[u], depth[v]);
            if du == u32::MAX || dv == u32::MAX {
                return Err(Error::validation(format!(
                    "graph not connected from root: edge {id} unreachable"
                )));
            }
            if du.abs_diff(dv) > 1 {
                return Err(Error::validation(format!(
                    "edge {id} joins depths {du} and {dv}, violating BFS layering"
                )));
            }
        }
        self.root = Some(root);
        self.depth = Some(depth);
        Ok(self)
    }

    fn bfs_depths(&self, start: VertexId) -> Vec<u32> {
        let mut depth = vec![u32::MAX; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        depth[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &eid in &self.adjacency[u] {
                let w = self.other_endpoint(eid, u);
                if depth[w] == u32::MAX {
                    depth[w] = depth[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        depth
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (VertexId, VertexId) {
        self.edges[id]
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn other_endpoint(&self, eid: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[eid];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    pub fn depth_of(&self, v: VertexId) -> Option<u32> {
        self.depth.as_ref().map(|d| d[v])
    }

    pub fn depths(&self) -> Option<&[u32]> {
        self.depth.as_deref()
    }

    /// Children of `v` in the rooted BFS tree: neighbours one level deeper,
    /// reached through tree edges. Non-tree edges (same-depth, or joining a
    /// vertex to a deeper vertex that already has another parent) are skipped.
    pub fn children(&self, v: VertexId) -> Vec<(VertexId, EdgeId)> {
        let depth = self.depth.as_ref().expect("graph must be rooted");
        let mut out = Vec::new();
        for &eid in &self.adjacency[v] {
            let w = self.other_endpoint(eid, v);
            if depth[w] == depth[v] + 1 && self.tree_parent(w) == Some(v) {
                out.push((w, eid));
            }
        }
        out
    }

    /// The BFS-tree parent of `v`: the lowest-edge-id neighbour one level up.
    pub fn tree_parent(&self, v: VertexId) -> Option<VertexId> {
        let depth = self.depth.as_ref().expect("graph must be rooted");
        if depth[v] == 0 {
            return None;
        }
        self.adjacency[v]
            .iter()
            .map(|&eid| (eid, self.other_endpoint(eid, v)))
            .filter(|&(_, w)| depth[w] + 1 == depth[v])
            .min_by_key(|&(eid, _)| eid)
            .map(|(_, w)| w)
    }

    /// Edge ids of the rooted BFS tree (parent links); complement is the set
    /// of non-tree edges.
    pub fn tree_edges(&self) -> Vec<EdgeId> {
        let depth = self.depth.as_ref().expect("graph must be rooted");
        let mut out = Vec::new();
        for v in 0..self.vertex_count {
            if depth[v] == 0 {
                continue;
            }
            let parent = self.tree_parent(v).expect("non-root vertex has a parent");
            let eid = self.adjacency[v]
                .iter()
                .copied()
                .find(|&e| self.other_endpoint(e, v) == parent && {
                    // pick the minimal id among parallel candidates (none exist
                    // in simple graphs, but keep the selection deterministic)
                    true
                })
                .unwrap();
            out.push(eid);
        }
        out.sort_unstable();
        out
    }

    /// Leaves of the rooted graph: vertices of degree one, plus an isolated root.
    pub fn leaves(&self) -> Vec<VertexId> {
        (0..self.vertex_count)
            .filter(|&v| self.degree(v) == 1 || (self.degree(v) == 0 && Some(v) == self.root))
            .collect()
    }

    /// |E| - (|V| - #components): the number of independent cycles.
    pub fn tree_excess(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        self.edges.len() - (self.vertex_count - uf.component_count())
    }

    /// Induced subgraph on `vertices` (old ids), optionally rooted.
    /// Returns the subgraph, the old-id of each new vertex, and the old edge
    /// id of each new edge; edges keep their relative construction order.
    pub fn induced_subgraph(
        &self,
        vertices: &[VertexId],
        root: Option<VertexId>,
    ) -> Result<(Graph, Vec<VertexId>, Vec<EdgeId>)> {
        let mut new_id = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.vertex_count {
                return Err(Error::validation(format!("vertex {v} out of range")));
            }
            if new_id[v] != usize::MAX {
                return Err(Error::validation(format!("duplicate vertex {v}")));
            }
            new_id[v] = i;
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (eid, &(u, v)) in self.edges.iter().enumerate() {
            if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
                edges.push((new_id[u], new_id[v]));
                edge_map.push(eid);
            }
        }
        let mut g = Graph::new(vertices.len(), edges)?;
        if let Some(r) = root {
            g = g.with_root(new_id[r])?;
        }
        Ok((g, vertices.to_vec(), edge_map))
    }

    /// Line-based text form: header `n m`, then one `u v` pair per edge in id
    /// order. Deterministic round-trip.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty graph text"))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::validation("bad header"))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::validation("bad header"))?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::validation("bad edge line"))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::validation("bad edge line"))?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::validation(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }
}

/// Which tree family to construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// Every internal vertex, including the root, has d = Delta - 1 children.
    DAry,
    /// Root has Delta children, all other internal vertices have d children.
    DeltaRegular,
    /// Root degree Delta; exactly one non-root internal vertex has d - 1
    /// children (the defect vertex).
    AlmostRegularI,
    /// Root degree Delta - 2, all other internal vertices degree Delta.
    /// At Delta = 3 this degenerates to a path-topped tree.
    AlmostRegularII,
    /// Delta-regular tree plus exactly one non-tree edge (the defect edge).
    Unicyclic,
}

/// Position of a vertex in a built tree: BFS level and index within the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelIndex {
    pub depth: u32,
    pub index: usize,
}

/// Defect descriptor for the almost-regular and unicyclic kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Defect {
    /// Variant (i): this internal, non-root vertex gets d - 1 children.
    MissingChild(LevelIndex),
    /// Unicyclic: extra edge joining two existing BFS-tree vertices.
    ExtraEdge(LevelIndex, LevelIndex),
}

/// Specification of one tree-family instance.
#[derive(Clone, Copy, Debug)]
pub struct TreeSpec {
    pub kind: TreeKind,
    pub delta: u32,
    pub height: u32,
    pub defect: Option<Defect>,
}

impl TreeSpec {
    pub fn new(kind: TreeKind, delta: u32, height: u32, defect: Option<Defect>) -> Self {
        TreeSpec {
            kind,
            delta,
            height,
            defect,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.delta < 3 {
            return Err(Error::validation(format!(
                "Delta must be at least 3, got {}",
                self.delta
            )));
        }
        if self.height < 1 {
            return Err(Error::validation("height must be at least 1"));
        }
        match (self.kind, &self.defect) {
            (TreeKind::AlmostRegularI, Some(Defect::MissingChild(li))) => {
                if li.depth == 0 || li.depth >= self.height {
                    return Err(Error::validation(
                        "variant (i) defect must be an internal non-root vertex",
                    ));
                }
                Ok(())
            }
            (TreeKind::AlmostRegularI, _) => Err(Error::validation(
                "variant (i) requires a MissingChild defect",
            )),
            (TreeKind::Unicyclic, Some(Defect::ExtraEdge(a, b))) => {
                if a.depth > self.height || b.depth > self.height {
                    return Err(Error::validation("defect endpoints absent from the tree"));
                }
                if a.depth.abs_diff(b.depth) > 1 {
                    return Err(Error::validation(
                        "extra edge must join depths differing by at most 1",
                    ));
                }
                Ok(())
            }
            (TreeKind::Unicyclic, _) => {
                Err(Error::validation("unicyclic kind requires an ExtraEdge defect"))
            }
            (_, Some(_)) => Err(Error::validation("defect given for a defect-free kind")),
            (_, None) => Ok(()),
        }
    }
}

/// Constructs the rooted tree (or unicyclic graph) described by `spec`.
pub fn build_tree(spec: &TreeSpec) -> Result<Graph> {
    spec.validate()?;
    let d = (spec.delta - 1) as usize;
    let root_children = match spec.kind {
        TreeKind::DAry => d,
        TreeKind::DeltaRegular | TreeKind::AlmostRegularI | TreeKind::Unicyclic => {
            spec.delta as usize
        }
        TreeKind::AlmostRegularII => (spec.delta - 2) as usize,
    };

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut level: Vec<VertexId> = vec![0];
    let mut next_id: VertexId = 1;
    // (depth, index) -> vertex id, for defect resolution
    let mut locate = vec![level.clone()];

    for depth in 0..spec.height {
        let mut next_level = Vec::new();
        for (index, &v) in level.iter().enumerate() {
            let mut n_children = if depth == 0 { root_children } else { d };
            if let (TreeKind::AlmostRegularI, Some(Defect::MissingChild(li))) =
                (spec.kind, &spec.defect)
            {
                if li.depth == depth && li.index == index {
                    n_children -= 1;
                }
            }
            for _ in 0..n_children {
                edges.push((v, next_id));
                next_level.push(next_id);
                next_id += 1;
            }
        }
        locate.push(next_level.clone());
        level = next_level;
    }

    if let (TreeKind::Unicyclic, Some(Defect::ExtraEdge(a, b))) = (spec.kind, &spec.defect) {
        let va = *locate
            .get(a.depth as usize)
            .and_then(|lvl| lvl.get(a.index))
            .ok_or_else(|| Error::validation("defect endpoint absent"))?;
        let vb = *locate
            .get(b.depth as usize)
            .and_then(|lvl| lvl.get(b.index))
            .ok_or_else(|| Error::validation("defect endpoint absent"))?;
        if va == vb {
            return Err(Error::validation("extra edge endpoints coincide"));
        }
        if edges.contains(&(va.min(vb), va.max(vb))) || edges.contains(&(va, vb)) || edges.contains(&(vb, va)) {
            return Err(Error::validation("extra edge would duplicate a tree edge"));
        }
        edges.push((va, vb));
    }

    Graph::new(next_id, edges)?.with_root(0)
}

/// Simple Delta-regular graph on n vertices via the configuration model:
/// a uniform matching of half-edges, resampled in full on any loop or
/// multi-edge collision, with a retry cap of 1000.
pub fn generate_random_regular(n: usize, delta: u32, seed: u64) -> Result<Graph> {
    let dl = delta as usize;
    if n * dl % 2 != 0 {
        return Err(Error::validation(format!(
            "parity error: n*Delta = {} is odd",
            n * dl
        )));
    }
    if n <= dl {
        return Err(Error::validation(format!(
            "need n > Delta for a simple graph, got n={n}, Delta={delta}"
        )));
    }
    let mut rng = seeded_rng(seed, stream::TOPOLOGY);
    let half = n * dl;
    let mut stubs: Vec<VertexId> = (0..half).map(|i| i / dl).collect();
    const RETRY_CAP: usize = 1000;
    'attempt: for _ in 0..RETRY_CAP {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::with_capacity(half / 2);
        let mut edges = Vec::with_capacity(half / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                continue 'attempt;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Graph::new(n, edges);
    }
    Err(Error::Numeric(format!(
        "configuration model failed to produce a simple graph in {RETRY_CAP} attempts"
    )))
}

/// BFS ball of radius `r` around an edge, centered at the lexicographically
/// smaller endpoint.
#[derive(Clone, Debug)]
pub struct Ball {
    pub subgraph: Graph,
    /// Center in subgraph ids (always 0) and in original ids.
    pub center: VertexId,
    pub center_original: VertexId,
    pub radius: u32,
    /// Subgraph ids of vertices at distance exactly `radius`.
    pub boundary: Vec<VertexId>,
    pub tree_excess: usize,
    /// Old vertex id of each subgraph vertex.
    pub vertex_map: Vec<VertexId>,
    /// Old edge id of each subgraph edge.
    pub edge_map: Vec<EdgeId>,
}

/// Ball of radius `r` centered at the lexicographically smaller endpoint of `e`.
pub fn bfs_ball(g: &Graph, e: EdgeId, r: u32) -> Result<Ball> {
    if e >= g.edge_count() {
        return Err(Error::validation(format!("edge id {e} out of range")));
    }
    if r < 1 {
        return Err(Error::validation("radius must be at least 1"));
    }
    let (u, v) = g.edge(e);
    let center = u.min(v);
    let depths = {
        let mut depth = vec![u32::MAX; g.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        depth[center] = 0;
        queue.push_back(center);
        while let Some(x) = queue.pop_front() {
            if depth[x] == r {
                continue;
            }
            for &eid in g.incident_edges(x) {
                let w = g.other_endpoint(eid, x);
                if depth[w] == u32::MAX {
                    depth[w] = depth[x] + 1;
                    queue.push_back(w);
                }
            }
        }
        depth
    };
    let vertices: Vec<VertexId> = (0..g.vertex_count()).filter(|&x| depths[x] <= r).collect();
    let (sub, vertex_map, edge_map) = g.induced_subgraph(&vertices, Some(center))?;
    let boundary = (0..sub.vertex_count())
        .filter(|&x| depths[vertex_map[x]] == r)
        .collect();
    let tree_excess = sub.tree_excess();
    Ok(Ball {
        center: vertex_map.iter().position(|&o| o == center).unwrap(),
        center_original: center,
        radius: r,
        boundary,
        tree_excess,
        subgraph: sub,
        vertex_map,
        edge_map,
    })
}

/// Descendant vertices of `v` in the rooted BFS tree, including `v`.
pub fn descendants(g: &Graph, v: VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        out.push(u);
        for (w, _) in g.children(u) {
            stack.push(w);
        }
    }
    out.sort_unstable();
    out
}

/// Induced descendant subgraph rooted at `v`: tree edges below `v` plus any
/// non-tree edge whose endpoints both descend from `v`.
pub fn subtree(g: &Graph, v: VertexId) -> Result<Graph> {
    subtree_with_maps(g, v).map(|(g, _, _)| g)
}

/// As `subtree`, returning vertex and edge maps back to the parent graph.
pub fn subtree_with_maps(g: &Graph, v: VertexId) -> Result<(Graph, Vec<VertexId>, Vec<EdgeId>)> {
    if g.root().is_none() {
        return Err(Error::validation("subtree requires a rooted graph"));
    }
    if v >= g.vertex_count() {
        return Err(Error::validation(format!("vertex {v} out of range")));
    }
    let verts = descendants(g, v);
    g.induced_subgraph(&verts, Some(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: TreeKind, delta: u32, height: u32) -> TreeSpec {
        TreeSpec::new(kind, delta, height, None)
    }

    #[test]
    fn dary_tree_counts() {
        // (d-ary, Delta=3, h=2): 1 + 2 + 4 = 7 vertices, 6 edges, root degree 2
        let g = build_tree(&spec(TreeKind::DAry, 3, 2)).unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.tree_excess(), 0);
    }

    #[test]
    fn delta_regular_counts() {
        // (Delta-regular, Delta=3, h=2): 1 + 3 + 6 = 10 vertices, 9 edges, root degree 3
        let g = build_tree(&spec(TreeKind::DeltaRegular, 3, 2)).unwrap();
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn leaves_at_equal_depth_and_degree_profile() {
        for kind in [
            TreeKind::DAry,
            TreeKind::DeltaRegular,
            TreeKind::AlmostRegularII,
        ] {
            for delta in [3u32, 4] {
                for h in [1u32, 2, 3] {
                    let g = build_tree(&spec(kind, delta, h)).unwrap();
                    let leaf_depths: Vec<u32> = g
                        .leaves()
                        .iter()
                        .map(|&v| g.depth_of(v).unwrap())
                        .collect();
                    assert!(leaf_depths.iter().all(|&dep| dep == h), "{kind:?}");
                    for v in 0..g.vertex_count() {
                        let dep = g.depth_of(v).unwrap();
                        if dep == h {
                            assert_eq!(g.degree(v), 1);
                        } else if v != 0 {
                            assert_eq!(g.degree(v) as u32, delta, "{kind:?} internal {v}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn almost_regular_i_has_one_deficient_vertex() {
        let defect = Defect::MissingChild(LevelIndex { depth: 1, index: 0 });
        let g = build_tree(&TreeSpec::new(TreeKind::AlmostRegularI, 3, 3, Some(defect))).unwrap();
        let h = 3;
        let deficient: Vec<_> = (1..g.vertex_count())
            .filter(|&v| g.depth_of(v).unwrap() < h && g.degree(v) == 2)
            .collect();
        assert_eq!(deficient.len(), 1);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn unicyclic_excess_one() {
        // extra edge between two depth-2 leaves sharing a grandparent
        let defect = Defect::ExtraEdge(
            LevelIndex { depth: 2, index: 0 },
            LevelIndex { depth: 2, index: 1 },
        );
        let g = build_tree(&TreeSpec::new(TreeKind::Unicyclic, 3, 2, Some(defect))).unwrap();
        assert_eq!(g.tree_excess(), 1);
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(build_tree(&spec(TreeKind::DAry, 2, 2)).is_err());
        assert!(build_tree(&spec(TreeKind::Unicyclic, 3, 2)).is_err());
        let bad = Defect::ExtraEdge(
            LevelIndex { depth: 0, index: 0 },
            LevelIndex { depth: 2, index: 0 },
        );
        assert!(build_tree(&TreeSpec::new(TreeKind::Unicyclic, 3, 2, Some(bad))).is_err());
    }

    #[test]
    fn k4_is_the_unique_cubic_graph_on_four_vertices() {
        for seed in 0..5 {
            let g = generate_random_regular(4, 3, seed).unwrap();
            assert_eq!(g.edge_count(), 6);
            for v in 0..4 {
                assert_eq!(g.degree(v), 3);
            }
        }
    }

    #[test]
    fn random_regular_deterministic_and_valid() {
        let a = generate_random_regular(10, 3, 7).unwrap();
        let b = generate_random_regular(10, 3, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        for v in 0..10 {
            assert_eq!(a.degree(v), 3);
        }
        assert!(generate_random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn ball_on_cycle_and_tree() {
        // 5-cycle: ball of radius 2 around any edge is the whole cycle, excess 1
        let cycle = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let b = bfs_ball(&cycle, 0, 2).unwrap();
        assert_eq!(b.subgraph.vertex_count(), 5);
        assert_eq!(b.tree_excess, 1);

        // d-ary tree, root edge, r = height: whole tree, excess 0
        let t = build_tree(&spec(TreeKind::DAry, 3, 3)).unwrap();
        let root_edge = t.incident_edges(0)[0];
        let b = bfs_ball(&t, root_edge, 3).unwrap();
        assert_eq!(b.subgraph.vertex_count(), t.vertex_count());
        assert_eq!(b.tree_excess, 0);

        // K4, any edge, r=1: whole graph, excess 6 - (4 - 1) = 3
        let k4 = generate_random_regular(4, 3, 0).unwrap();
        let b = bfs_ball(&k4, 0, 1).unwrap();
        assert_eq!(b.subgraph.vertex_count(), 4);
        assert_eq!(b.tree_excess, 3);
    }

    #[test]
    fn ball_monotone_and_boundary_exact() {
        let g = generate_random_regular(30, 3, 11).unwrap();
        for e in [0usize, 5, 11] {
            let mut prev: Option<Vec<VertexId>> = None;
            for r in 1..4 {
                let b = bfs_ball(&g, e, r).unwrap();
                for &bv in &b.boundary {
                    assert_eq!(b.subgraph.depth_of(bv), Some(r));
                }
                let mut vs = b.vertex_map.clone();
                vs.sort_unstable();
                if let Some(p) = prev {
                    assert!(p.iter().all(|v| vs.binary_search(v).is_ok()));
                }
                prev = Some(vs);
            }
        }
    }

    #[test]
    fn subtree_cases() {
        let t = build_tree(&spec(TreeKind::DAry, 3, 2)).unwrap();
        // root subtree is the whole tree
        let s = subtree(&t, 0).unwrap();
        assert_eq!(s.vertex_count(), t.vertex_count());
        assert_eq!(s.edge_count(), t.edge_count());
        // leaf subtree is a single vertex
        let leaf = *t.leaves().first().unwrap();
        let s = subtree(&t, leaf).unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 0);
    }

    #[test]
    fn subtree_keeps_descended_cycle() {
        // unicyclic: cycle below depth-1 vertex; subtree at that vertex keeps it
        let defect = Defect::ExtraEdge(
            LevelIndex { depth: 2, index: 0 },
            LevelIndex { depth: 2, index: 1 },
        );
        let g = build_tree(&TreeSpec::new(TreeKind::Unicyclic, 3, 2, Some(defect))).unwrap();
        // depth-2 leaves 0 and 1 descend from the first depth-1 child
        let v = 1; // first child of root
        let s = subtree(&g, v).unwrap();
        assert_eq!(s.tree_excess(), 1);
    }

    #[test]
    fn text_roundtrip() {
        let g = build_tree(&spec(TreeKind::DeltaRegular, 3, 2)).unwrap();
        let text = g.to_text();
        let g2 = Graph::from_text(&text).unwrap();
        assert_eq!(g.edges(), g2.edges());
        assert_eq!(text, g2.to_text());
    }
}
