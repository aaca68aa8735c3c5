//! Boundary conditions: partitions of a designated boundary vertex set.
//!
//! Vertices in the same block are wired and count as pre-connected when
//! counting components. The root wiring and the auxiliary v* wiring are flags
//! interpreted as membership of that vertex in the wired class `C1`.

use crate::configuration::Configuration;
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, stream};
use crate::topology::{EdgeId, Graph, VertexId};
use crate::unionfind::UnionFind;
use rand::Rng;

/// A partition of a boundary vertex set, with classification flags.
///
/// Stored blocks are the wired classes; every boundary vertex not covered by
/// a stored block is an implicit free singleton. An explicitly stored
/// singleton block differs from an implicit one: it is eligible to be the
/// wired class C1, which the message and z-split events refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    boundary: Vec<VertexId>,
    blocks: Vec<Vec<VertexId>>,
    /// The root of the ambient rooted graph is wired into C1.
    pub wired_root: bool,
    /// An extra vertex wired into C1.
    pub aux_wired_vertex: Option<VertexId>,
}

impl BoundaryCondition {
    /// Free or wired condition on a nonempty boundary.
    pub fn make(boundary: &[VertexId], wired: bool) -> Result<Self> {
        if boundary.is_empty() {
            return Err(Error::validation("boundary must be nonempty"));
        }
        let blocks = if wired {
            vec![sorted(boundary.to_vec())]
        } else {
            Vec::new()
        };
        Self::new(boundary.to_vec(), blocks)
    }

    pub fn free(boundary: &[VertexId]) -> Result<Self> {
        Self::make(boundary, false)
    }

    pub fn wired(boundary: &[VertexId]) -> Result<Self> {
        Self::make(boundary, true)
    }

    /// General constructor; empty blocks are dropped, all blocks must be
    /// disjoint subsets of the boundary. Singleton blocks are kept verbatim.
    pub fn new(boundary: Vec<VertexId>, blocks: Vec<Vec<VertexId>>) -> Result<Self> {
        let bset: std::collections::HashSet<_> = boundary.iter().copied().collect();
        if bset.len() != boundary.len() {
            return Err(Error::validation("boundary list has duplicates"));
        }
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::new();
        for block in blocks {
            for &v in &block {
                if !bset.contains(&v) {
                    return Err(Error::validation(format!(
                        "block vertex {v} not in the boundary"
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::validation(format!(
                        "vertex {v} appears in two blocks"
                    )));
                }
            }
            if !block.is_empty() {
                kept.push(sorted(block));
            }
        }
        kept.sort();
        Ok(BoundaryCondition {
            boundary,
            blocks: kept,
            wired_root: false,
            aux_wired_vertex: None,
        })
    }

    pub fn with_wired_root(mut self) -> Self {
        self.wired_root = true;
        self
    }

    pub fn with_aux_wired(mut self, v: VertexId) -> Self {
        self.aux_wired_vertex = Some(v);
        self
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    /// Stored (wired) blocks, each sorted.
    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }

    /// All blocks including implicit singletons.
    pub fn full_partition(&self) -> Vec<Vec<VertexId>> {
        let covered: std::collections::HashSet<_> =
            self.blocks.iter().flatten().copied().collect();
        let mut out = self.blocks.clone();
        for &v in &self.boundary {
            if !covered.contains(&v) {
                out.push(vec![v]);
            }
        }
        out
    }

    /// At most one non-singleton block.
    pub fn is_single_component(&self) -> bool {
        self.blocks.iter().filter(|b| b.len() >= 2).count() <= 1
    }

    pub fn is_free(&self) -> bool {
        self.blocks.is_empty() && !self.wired_root && self.aux_wired_vertex.is_none()
    }

    pub fn is_wired(&self) -> bool {
        self.blocks.len() == 1 && self.blocks[0].len() == self.boundary.len()
    }

    /// The wired class C1.
    ///
    /// The unique non-singleton block if there is one; else the lowest stored
    /// singleton block; else, when only the root / v* pin flags require a
    /// class, the lowest-id boundary vertex as the designated singleton.
    /// Empty for a genuinely free condition: no vertex is wired, the events
    /// `v ~ C1` are impossible.
    pub fn c1(&self) -> Result<Vec<VertexId>> {
        let nonsingleton: Vec<&Vec<VertexId>> =
            self.blocks.iter().filter(|b| b.len() >= 2).collect();
        match nonsingleton.len() {
            0 => {
                if let Some(b) = self.blocks.iter().min_by_key(|b| b[0]) {
                    Ok(b.clone())
                } else if self.wired_root || self.aux_wired_vertex.is_some() {
                    Ok(self.boundary.iter().copied().min().into_iter().collect())
                } else {
                    Ok(Vec::new())
                }
            }
            1 => Ok(nonsingleton[0].clone()),
            _ => Err(Error::validation(
                "C1 undefined: boundary condition is not single-component",
            )),
        }
    }

    /// Members of C1 together with any pinned vertices (root under the wired
    /// root flag, and the auxiliary vertex).
    pub fn c1_with_pins(&self, root: Option<VertexId>) -> Result<Vec<VertexId>> {
        let mut class = self.c1()?;
        if self.wired_root {
            let r = root.ok_or_else(|| {
                Error::validation("wired_root flag set but the graph is unrooted")
            })?;
            class.push(r);
        }
        if let Some(v) = self.aux_wired_vertex {
            class.push(v);
        }
        class.sort_unstable();
        class.dedup();
        Ok(class)
    }

    /// Vertex pairs to merge before any component count: block wirings plus
    /// the root / v* pins into C1.
    pub fn wiring_pairs(&self, root: Option<VertexId>) -> Result<Vec<(VertexId, VertexId)>> {
        let mut pairs = Vec::new();
        for block in &self.blocks {
            for w in block.windows(2) {
                pairs.push((w[0], w[1]));
            }
        }
        if self.wired_root || self.aux_wired_vertex.is_some() {
            let class = self.c1_with_pins(root)?;
            for w in class.windows(2) {
                pairs.push((w[0], w[1]));
            }
        }
        Ok(pairs)
    }

    /// Blocks intersected with `sub_boundary`, empties dropped.
    pub fn restrict(&self, sub_boundary: &[VertexId]) -> Result<BoundaryCondition> {
        let sub: std::collections::HashSet<_> = sub_boundary.iter().copied().collect();
        for v in &sub {
            if !self.boundary.contains(v) {
                return Err(Error::validation(format!(
                    "restriction vertex {v} not in the boundary"
                )));
            }
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().filter(|v| sub.contains(v)).collect())
            .filter(|b: &Vec<_>| !b.is_empty())
            .collect();
        let mut bc = BoundaryCondition::new(sub_boundary.to_vec(), blocks)?;
        bc.wired_root = self.wired_root;
        bc.aux_wired_vertex = self.aux_wired_vertex;
        Ok(bc)
    }

    /// True iff every block of `finer` lies inside a block of `self`.
    pub fn is_coarser(&self, finer: &BoundaryCondition) -> Result<bool> {
        let mut a = self.boundary.clone();
        let mut b = finer.boundary.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::validation(
                "is_coarser requires identical boundary sets",
            ));
        }
        let mut owner = std::collections::HashMap::new();
        for (i, block) in self.full_partition().iter().enumerate() {
            for &v in block {
                owner.insert(v, i);
            }
        }
        for block in finer.full_partition() {
            let o = owner[&block[0]];
            if block.iter().any(|v| owner[v] != o) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Text form: flags on a header line, then one block per line as sorted
    /// vertex ids (implicit singletons omitted).
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "boundary {} wired_root {} aux {}\n",
            join(&self.boundary),
            self.wired_root as u8,
            self.aux_wired_vertex
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into())
        );
        for b in &self.blocks {
            s.push_str(&join(b));
            s.push('\n');
        }
        s
    }
}

fn sorted(mut v: Vec<VertexId>) -> Vec<VertexId> {
    v.sort_unstable();
    v
}

fn join(v: &[VertexId]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Each vertex of `boundary \ u_set` joins the single wired block independently
/// with probability `theta`; `u_set` carries `arbitrary_blocks` verbatim.
/// Deterministic per seed.
pub fn sample_theta_q_wired(
    boundary: &[VertexId],
    theta: f64,
    q_cap: usize,
    u_set: &[VertexId],
    arbitrary_blocks: Vec<Vec<VertexId>>,
    seed: u64,
) -> Result<BoundaryCondition> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::validation(format!("theta must be in [0,1], got {theta}")));
    }
    if u_set.len() > q_cap {
        return Err(Error::validation(format!(
            "|U| = {} exceeds Q = {q_cap}",
            u_set.len()
        )));
    }
    let uset: std::collections::HashSet<_> = u_set.iter().copied().collect();
    for v in &uset {
        if !boundary.contains(v) {
            return Err(Error::validation(format!("U vertex {v} not in the boundary")));
        }
    }
    for block in &arbitrary_blocks {
        for v in block {
            if !uset.contains(v) {
                return Err(Error::validation(format!(
                    "arbitrary block vertex {v} not in U"
                )));
            }
        }
    }
    let mut rng = seeded_rng(seed, stream::BOUNDARY);
    let mut wired_block = Vec::new();
    for &v in boundary {
        if uset.contains(&v) {
            continue;
        }
        if rng.gen::<f64>() < theta {
            wired_block.push(v);
        }
    }
    let mut blocks = arbitrary_blocks;
    blocks.push(wired_block);
    BoundaryCondition::new(boundary.to_vec(), blocks)
}

/// Boundary condition induced on `boundary` by a configuration on the edges
/// outside a ball or subtree, merged with an optional outer condition.
///
/// `outside_edges` lists the edge ids of `E(G) \ E(B)` in increasing order and
/// `outside_config` is indexed over exactly that list.
pub fn induced_bc(
    g: &Graph,
    boundary: &[VertexId],
    outside_edges: &[EdgeId],
    outside_config: &Configuration,
    outer_bc: Option<&BoundaryCondition>,
) -> Result<BoundaryCondition> {
    outside_config.check_len(outside_edges.len(), "induced_bc")?;
    let mut uf = UnionFind::new(g.vertex_count());
    if let Some(outer) = outer_bc {
        for (a, b) in outer.wiring_pairs(g.root())? {
            uf.union(a, b);
        }
    }
    for (idx, &eid) in outside_edges.iter().enumerate() {
        if outside_config.get(idx) {
            let (u, v) = g.edge(eid);
            uf.union(u, v);
        }
    }
    let mut by_class: std::collections::HashMap<usize, Vec<VertexId>> =
        std::collections::HashMap::new();
    for &v in boundary {
        by_class.entry(uf.find(v)).or_default().push(v);
    }
    let blocks: Vec<Vec<VertexId>> = by_class.into_values().filter(|b| b.len() >= 2).collect();
    BoundaryCondition::new(boundary.to_vec(), blocks)
}
