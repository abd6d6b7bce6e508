//! Finite graphs with edge involution, maps of graphs, compatible
//! equivalence relations, quotient graphs, and the compatible refinement of
//! an arbitrary partition.
//!
//! Vertices and edges live in disjoint namespaces (`v:` and `e:`) so that the
//! whole graph `V ⊎ E` is a single [`Carrier`] and partitions over it are
//! first class. Every edge is stored together with its inverse; inputs naming
//! a single edge per geometric pair are doubled on construction, the derived
//! inverse carrying a `~` prefix.

use std::fmt;

use crate::error::Error;
use crate::relations::{Carrier, ElemId, Partition, SetMap};

/// Builds the carrier identifier of a vertex from its local name.
pub fn vertex_id(name: &str) -> ElemId {
    ElemId::new(format!("v:{name}"))
}

/// Builds the carrier identifier of an edge from its local name.
pub fn edge_id(name: &str) -> ElemId {
    ElemId::new(format!("e:{name}"))
}

/// Strips the namespace prefix from a graph element identifier.
pub fn local_name(id: &ElemId) -> &str {
    id.as_str()
        .strip_prefix("v:")
        .or_else(|| id.as_str().strip_prefix("e:"))
        .unwrap_or(id.as_str())
}

/// The local name of the inverse edge: `x` and `~x` swap.
pub fn inverse_local(name: &str) -> String {
    match name.strip_prefix('~') {
        Some(rest) => rest.to_string(),
        None => format!("~{name}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemKind {
    Vertex,
    Edge,
}

/// A finite graph with source, target, a fixed-point-free edge involution,
/// and an optional orientation.
#[derive(Clone, PartialEq, Eq)]
pub struct FinGraph {
    vertices: Carrier,
    edges: Carrier,
    combined: Carrier,
    src: Vec<u32>,
    tgt: Vec<u32>,
    inv: Vec<u32>,
    orientation: Option<Vec<bool>>,
    vertex_cpos: Vec<u32>,
    edge_cpos: Vec<u32>,
}

impl FinGraph {
    /// Builds a graph from explicit edge tuples `(name, inverse, source,
    /// target)`; every edge must appear with its inverse. The result is
    /// validated.
    pub fn new(
        vertices: &[&str],
        edges: &[(&str, &str, &str, &str)],
        orientation: Option<&[&str]>,
    ) -> Result<Self, Error> {
        let vcar = Carrier::new(vertices.iter().map(|&v| vertex_id(v)))?;
        let ecar = Carrier::new(edges.iter().map(|&(e, ..)| edge_id(e)))?;
        let mut src = vec![0u32; ecar.len()];
        let mut tgt = vec![0u32; ecar.len()];
        let mut inv = vec![0u32; ecar.len()];
        for &(e, ebar, s, t) in edges {
            let ep = ecar.require(&edge_id(e))? as usize;
            src[ep] = vcar.require(&vertex_id(s))?;
            tgt[ep] = vcar.require(&vertex_id(t))?;
            inv[ep] = ecar.require(&edge_id(ebar))?;
        }
        let orientation = match orientation {
            None => None,
            Some(names) => {
                let mut pos = vec![false; ecar.len()];
                for &name in names {
                    pos[ecar.require(&edge_id(name))? as usize] = true;
                }
                Some(pos)
            }
        };
        let g = FinGraph::assemble(vcar, ecar, src, tgt, inv, orientation)?;
        match g.validate().into_iter().next() {
            None => Ok(g),
            Some(v) => Err(Error::InvalidGraph(v)),
        }
    }

    /// Builds a graph naming one edge per geometric pair; the inverse edge is
    /// derived with a `~` prefix and the named edges form the orientation.
    pub fn from_oriented(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, Error> {
        let mut tuples: Vec<(String, String, String, String)> = Vec::new();
        for &(e, s, t) in edges {
            let ebar = inverse_local(e);
            tuples.push((e.into(), ebar.clone(), s.into(), t.into()));
            tuples.push((ebar, e.into(), t.into(), s.into()));
        }
        let borrowed: Vec<(&str, &str, &str, &str)> = tuples
            .iter()
            .map(|(e, i, s, t)| (e.as_str(), i.as_str(), s.as_str(), t.as_str()))
            .collect();
        let orient: Vec<&str> = edges.iter().map(|&(e, ..)| e).collect();
        FinGraph::new(vertices, &borrowed, Some(&orient))
    }

    /// Builds a graph from already-namespaced identifiers; used when
    /// deriving graphs (quotients, sums, inverse-limit truncations) whose
    /// element names come from existing graphs. The result is validated.
    pub fn from_id_tuples(
        vertices: Vec<ElemId>,
        edges: Vec<(ElemId, ElemId, ElemId, ElemId)>,
        orientation: Option<Vec<ElemId>>,
    ) -> Result<Self, Error> {
        let vcar = Carrier::new(vertices)?;
        let ecar = Carrier::new(edges.iter().map(|(e, ..)| e.clone()))?;
        let mut src = vec![0u32; ecar.len()];
        let mut tgt = vec![0u32; ecar.len()];
        let mut inv = vec![0u32; ecar.len()];
        for (e, ebar, s, t) in &edges {
            let ep = ecar.require(e)? as usize;
            src[ep] = vcar.require(s)?;
            tgt[ep] = vcar.require(t)?;
            inv[ep] = ecar.require(ebar)?;
        }
        let orientation = match orientation {
            None => None,
            Some(names) => {
                let mut pos = vec![false; ecar.len()];
                for name in &names {
                    pos[ecar.require(name)? as usize] = true;
                }
                Some(pos)
            }
        };
        let g = FinGraph::assemble(vcar, ecar, src, tgt, inv, orientation)?;
        match g.validate().into_iter().next() {
            None => Ok(g),
            Some(v) => Err(Error::InvalidGraph(v)),
        }
    }

    /// Assembles a graph from raw position tables without validating the
    /// graph axioms; [`FinGraph::validate`] reports whatever is wrong.
    pub fn from_raw_parts(
        vertices: Carrier,
        edges: Carrier,
        src: Vec<u32>,
        tgt: Vec<u32>,
        inv: Vec<u32>,
        orientation: Option<Vec<bool>>,
    ) -> Result<Self, Error> {
        FinGraph::assemble(vertices, edges, src, tgt, inv, orientation)
    }

    fn assemble(
        vertices: Carrier,
        edges: Carrier,
        src: Vec<u32>,
        tgt: Vec<u32>,
        inv: Vec<u32>,
        orientation: Option<Vec<bool>>,
    ) -> Result<Self, Error> {
        let combined = vertices.merged(&edges)?;
        let vertex_cpos = vertices
            .iter()
            .map(|id| combined.position(id).expect("vertex in combined"))
            .collect();
        let edge_cpos = edges
            .iter()
            .map(|id| combined.position(id).expect("edge in combined"))
            .collect();
        Ok(FinGraph {
            vertices,
            edges,
            combined,
            src,
            tgt,
            inv,
            orientation,
            vertex_cpos,
            edge_cpos,
        })
    }

    pub fn vertices(&self) -> &Carrier {
        &self.vertices
    }

    pub fn edges(&self) -> &Carrier {
        &self.edges
    }

    /// The disjoint union `V ⊎ E` as a single carrier.
    pub fn combined(&self) -> &Carrier {
        &self.combined
    }

    pub fn kind(&self, id: &ElemId) -> Result<ElemKind, Error> {
        if self.vertices.contains(id) {
            Ok(ElemKind::Vertex)
        } else if self.edges.contains(id) {
            Ok(ElemKind::Edge)
        } else {
            Err(Error::UnknownElement(id.clone()))
        }
    }

    /// Number of geometric edges, i.e. inverse pairs.
    pub fn edge_pair_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn src_of(&self, e: &ElemId) -> Result<&ElemId, Error> {
        let p = self.edges.require(e)?;
        Ok(self.vertices.elem(self.src[p as usize]))
    }

    pub fn tgt_of(&self, e: &ElemId) -> Result<&ElemId, Error> {
        let p = self.edges.require(e)?;
        Ok(self.vertices.elem(self.tgt[p as usize]))
    }

    pub fn inv_of(&self, e: &ElemId) -> Result<&ElemId, Error> {
        let p = self.edges.require(e)?;
        Ok(self.edges.elem(self.inv[p as usize]))
    }

    pub fn is_oriented(&self) -> bool {
        self.orientation.is_some()
    }

    /// Whether an edge lies in `E⁺`; `None` when the graph carries no
    /// orientation.
    pub fn is_positive(&self, e: &ElemId) -> Result<Option<bool>, Error> {
        let p = self.edges.require(e)? as usize;
        Ok(self.orientation.as_ref().map(|o| o[p]))
    }

    /// The positively oriented edges, when an orientation is present.
    pub fn positive_edges(&self) -> Option<Vec<&ElemId>> {
        self.orientation.as_ref().map(|o| {
            o.iter()
                .enumerate()
                .filter(|&(_, &pos)| pos)
                .map(|(p, _)| self.edges.elem(p as u32))
                .collect()
        })
    }

    /// One representative per inverse pair: the positive edge when oriented,
    /// otherwise the lexicographically smaller identifier.
    pub fn pair_representatives(&self) -> Vec<&ElemId> {
        let mut reps = Vec::with_capacity(self.edge_pair_count());
        for p in 0..self.edges.len() as u32 {
            let q = self.inv[p as usize];
            let take = match &self.orientation {
                Some(o) => o[p as usize],
                None => p < q,
            };
            if take {
                reps.push(self.edges.elem(p));
            }
        }
        reps
    }

    pub(crate) fn src_pos(&self, e: u32) -> u32 {
        self.src[e as usize]
    }

    pub(crate) fn tgt_pos(&self, e: u32) -> u32 {
        self.tgt[e as usize]
    }

    pub(crate) fn inv_pos(&self, e: u32) -> u32 {
        self.inv[e as usize]
    }

    pub(crate) fn vertex_combined_pos(&self, v: u32) -> u32 {
        self.vertex_cpos[v as usize]
    }

    pub(crate) fn edge_combined_pos(&self, e: u32) -> u32 {
        self.edge_cpos[e as usize]
    }

    /// Classifies a combined-carrier position.
    pub(crate) fn split_combined(&self, c: u32) -> (ElemKind, u32) {
        let id = self.combined.elem(c);
        if let Some(v) = self.vertices.position(id) {
            (ElemKind::Vertex, v)
        } else {
            (ElemKind::Edge, self.edges.position(id).expect("edge id"))
        }
    }

    /// Checks every graph axiom and reports all violations with witnesses.
    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut out = Vec::new();
        let ne = self.edges.len();
        let nv = self.vertices.len();
        for (table, name) in [(&self.src, "src"), (&self.tgt, "tgt"), (&self.inv, "inv")] {
            if table.len() != ne {
                out.push(GraphViolation::TableLength {
                    table: name,
                    expected: ne,
                    got: table.len(),
                });
            }
        }
        if let Some(o) = &self.orientation {
            if o.len() != ne {
                out.push(GraphViolation::TableLength {
                    table: "orientation",
                    expected: ne,
                    got: o.len(),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in 0..ne {
            let id = || self.edges.elem(e as u32).clone();
            if self.src[e] as usize >= nv {
                out.push(GraphViolation::SourceOutOfRange { edge: id() });
            }
            if self.tgt[e] as usize >= nv {
                out.push(GraphViolation::TargetOutOfRange { edge: id() });
            }
            if self.inv[e] as usize >= ne {
                out.push(GraphViolation::InverseOutOfRange { edge: id() });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in 0..ne {
            let id = || self.edges.elem(e as u32).clone();
            let ebar = self.inv[e] as usize;
            if ebar == e {
                out.push(GraphViolation::InvolutionFixesEdge { edge: id() });
                continue;
            }
            if self.inv[ebar] != e as u32 {
                out.push(GraphViolation::InvolutionNotInvolutive { edge: id() });
            }
            if self.src[ebar] != self.tgt[e] {
                out.push(GraphViolation::InverseSourceMismatch { edge: id() });
            }
            if self.tgt[ebar] != self.src[e] {
                out.push(GraphViolation::InverseTargetMismatch { edge: id() });
            }
            if let Some(o) = &self.orientation {
                if o[e] == o[ebar] {
                    out.push(GraphViolation::OrientationNotExclusive { edge: id() });
                }
            }
        }
        out
    }

    /// Chooses the deterministic orientation: the lexicographically smaller
    /// identifier of each inverse pair enters `E⁺`. An existing orientation
    /// is preserved unchanged.
    pub fn choose_orientation(&self) -> FinGraph {
        if self.orientation.is_some() {
            return self.clone();
        }
        let mut o = vec![false; self.edges.len()];
        for p in 0..self.edges.len() as u32 {
            if p < self.inv[p as usize] {
                o[p as usize] = true;
            }
        }
        let mut g = self.clone();
        g.orientation = Some(o);
        g
    }

    /// Drops the orientation, if any.
    pub fn without_orientation(&self) -> FinGraph {
        let mut g = self.clone();
        g.orientation = None;
        g
    }

    /// The source map extended to all of `V ⊎ E` as the identity on
    /// vertices.
    pub fn extended_source(&self) -> SetMap {
        self.extended(|e| self.vertex_cpos[self.src[e] as usize])
    }

    /// The target map extended to all of `V ⊎ E` as the identity on
    /// vertices.
    pub fn extended_target(&self) -> SetMap {
        self.extended(|e| self.vertex_cpos[self.tgt[e] as usize])
    }

    /// The inversion map extended to all of `V ⊎ E` as the identity on
    /// vertices.
    pub fn extended_inversion(&self) -> SetMap {
        self.extended(|e| self.edge_cpos[self.inv[e] as usize])
    }

    fn extended(&self, on_edge: impl Fn(usize) -> u32) -> SetMap {
        SetMap::from_fn(self.combined.clone(), self.combined.clone(), |id| {
            if self.vertices.contains(id) {
                id.clone()
            } else {
                let e = self.edges.position(id).expect("edge id") as usize;
                self.combined.elem(on_edge(e)).clone()
            }
        })
        .expect("extended structure map")
    }
}

impl fmt::Debug for FinGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinGraph")
            .field("vertices", &self.vertices)
            .field("edges", &self.edges)
            .field("oriented", &self.orientation.is_some())
            .finish()
    }
}

/// A single violated graph axiom, with the offending edge.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphViolation {
    #[error("{table} table has {got} entries, expected {expected}")]
    TableLength {
        table: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("source of `{edge}` is out of range")]
    SourceOutOfRange { edge: ElemId },
    #[error("target of `{edge}` is out of range")]
    TargetOutOfRange { edge: ElemId },
    #[error("inverse of `{edge}` is out of range")]
    InverseOutOfRange { edge: ElemId },
    #[error("involution has fixed edge `{edge}`")]
    InvolutionFixesEdge { edge: ElemId },
    #[error("involution is not involutive at `{edge}`")]
    InvolutionNotInvolutive { edge: ElemId },
    #[error("src(inv `{edge}`) differs from tgt(`{edge}`)")]
    InverseSourceMismatch { edge: ElemId },
    #[error("tgt(inv `{edge}`) differs from src(`{edge}`)")]
    InverseTargetMismatch { edge: ElemId },
    #[error("orientation does not pick exactly one of `{edge}` and its inverse")]
    OrientationNotExclusive { edge: ElemId },
}

/// A function between graphs sending vertices to vertices and edges to
/// edges; [`GraphMap::validate`] checks preservation of sources, targets,
/// and inverses.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphMap {
    source: FinGraph,
    target: FinGraph,
    vmap: Vec<u32>,
    emap: Vec<u32>,
}

impl GraphMap {
    pub fn new<IV, IE>(
        source: FinGraph,
        target: FinGraph,
        vertex_assignment: IV,
        edge_assignment: IE,
    ) -> Result<Self, Error>
    where
        IV: IntoIterator<Item = (ElemId, ElemId)>,
        IE: IntoIterator<Item = (ElemId, ElemId)>,
    {
        let vmap = SetMap::new(
            source.vertices().clone(),
            target.vertices().clone(),
            vertex_assignment,
        )?;
        let emap = SetMap::new(
            source.edges().clone(),
            target.edges().clone(),
            edge_assignment,
        )?;
        Ok(GraphMap {
            vmap: (0..source.vertices().len() as u32)
                .map(|p| vmap.apply_pos(p))
                .collect(),
            emap: (0..source.edges().len() as u32)
                .map(|p| emap.apply_pos(p))
                .collect(),
            source,
            target,
        })
    }

    pub fn from_fns<FV, FE>(
        source: FinGraph,
        target: FinGraph,
        vf: FV,
        ef: FE,
    ) -> Result<Self, Error>
    where
        FV: Fn(&ElemId) -> ElemId,
        FE: Fn(&ElemId) -> ElemId,
    {
        let mut vmap = Vec::with_capacity(source.vertices().len());
        for v in source.vertices().iter() {
            vmap.push(target.vertices().require(&vf(v))?);
        }
        let mut emap = Vec::with_capacity(source.edges().len());
        for e in source.edges().iter() {
            emap.push(target.edges().require(&ef(e))?);
        }
        Ok(GraphMap {
            source,
            target,
            vmap,
            emap,
        })
    }

    pub fn identity(g: &FinGraph) -> Self {
        GraphMap {
            source: g.clone(),
            target: g.clone(),
            vmap: (0..g.vertices().len() as u32).collect(),
            emap: (0..g.edges().len() as u32).collect(),
        }
    }

    /// Assembles a map from raw position tables without any checks.
    pub fn from_raw_parts(
        source: FinGraph,
        target: FinGraph,
        vmap: Vec<u32>,
        emap: Vec<u32>,
    ) -> Self {
        GraphMap {
            source,
            target,
            vmap,
            emap,
        }
    }

    pub fn source(&self) -> &FinGraph {
        &self.source
    }

    pub fn target(&self) -> &FinGraph {
        &self.target
    }

    pub fn apply_vertex(&self, v: &ElemId) -> Result<&ElemId, Error> {
        let p = self.source.vertices().require(v)?;
        Ok(self.target.vertices().elem(self.vmap[p as usize]))
    }

    pub fn apply_edge(&self, e: &ElemId) -> Result<&ElemId, Error> {
        let p = self.source.edges().require(e)?;
        Ok(self.target.edges().elem(self.emap[p as usize]))
    }

    /// Applies the map to any element of `V ⊎ E`.
    pub fn apply(&self, id: &ElemId) -> Result<&ElemId, Error> {
        match self.source.kind(id)? {
            ElemKind::Vertex => self.apply_vertex(id),
            ElemKind::Edge => self.apply_edge(id),
        }
    }

    /// The map on the combined carriers `V ⊎ E → V′ ⊎ E′`.
    pub fn combined_map(&self) -> SetMap {
        SetMap::from_fn(
            self.source.combined().clone(),
            self.target.combined().clone(),
            |id| self.apply(id).expect("combined element").clone(),
        )
        .expect("combined graph map")
    }

    /// Checks the four preservation conditions, reporting every violation.
    pub fn validate(&self) -> Vec<MapViolation> {
        let mut out = Vec::new();
        let nv = self.source.vertices().len();
        let ne = self.source.edges().len();
        if self.vmap.len() != nv || self.emap.len() != ne {
            out.push(MapViolation::TableLength);
            return out;
        }
        for (v, &img) in self.vmap.iter().enumerate() {
            if img as usize >= self.target.vertices().len() {
                out.push(MapViolation::VertexOutOfRange {
                    vertex: self.source.vertices().elem(v as u32).clone(),
                });
            }
        }
        for (e, &img) in self.emap.iter().enumerate() {
            if img as usize >= self.target.edges().len() {
                out.push(MapViolation::EdgeOutOfRange {
                    edge: self.source.edges().elem(e as u32).clone(),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in 0..ne {
            let id = || self.source.edges().elem(e as u32).clone();
            let img = self.emap[e] as usize;
            if self.vmap[self.source.src_pos(e as u32) as usize] != self.target.src[img] {
                out.push(MapViolation::SourceNotPreserved { edge: id() });
            }
            if self.vmap[self.source.tgt_pos(e as u32) as usize] != self.target.tgt[img] {
                out.push(MapViolation::TargetNotPreserved { edge: id() });
            }
            if self.emap[self.source.inv_pos(e as u32) as usize] != self.target.inv[img] {
                out.push(MapViolation::InversionNotPreserved { edge: id() });
            }
        }
        out
    }

    /// Composition in application order: `self` first, then `second`.
    pub fn compose(&self, second: &GraphMap) -> Result<GraphMap, Error> {
        if self.target != second.source {
            return Err(Error::CarrierMismatch {
                context: "graph map composition",
            });
        }
        Ok(GraphMap {
            source: self.source.clone(),
            target: second.target.clone(),
            vmap: self
                .vmap
                .iter()
                .map(|&v| second.vmap[v as usize])
                .collect(),
            emap: self
                .emap
                .iter()
                .map(|&e| second.emap[e as usize])
                .collect(),
        })
    }

    pub fn surjectivity_witness(&self) -> Option<ElemId> {
        let mut hit_v = vec![false; self.target.vertices().len()];
        for &v in &self.vmap {
            hit_v[v as usize] = true;
        }
        if let Some(p) = hit_v.iter().position(|&h| !h) {
            return Some(self.target.vertices().elem(p as u32).clone());
        }
        let mut hit_e = vec![false; self.target.edges().len()];
        for &e in &self.emap {
            hit_e[e as usize] = true;
        }
        hit_e
            .iter()
            .position(|&h| !h)
            .map(|p| self.target.edges().elem(p as u32).clone())
    }

    pub fn is_bijective(&self) -> bool {
        self.source.vertices().len() == self.target.vertices().len()
            && self.source.edges().len() == self.target.edges().len()
            && self.surjectivity_witness().is_none()
    }

    /// The kernel `f⁻¹f` on the combined carrier.
    pub fn kernel_partition(&self) -> Partition {
        self.combined_map().kernel()
    }
}

impl fmt::Debug for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .finish()
    }
}

/// A violated graph-map condition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapViolation {
    #[error("assignment tables have the wrong length")]
    TableLength,
    #[error("image of vertex `{vertex}` is out of range")]
    VertexOutOfRange { vertex: ElemId },
    #[error("image of edge `{edge}` is out of range")]
    EdgeOutOfRange { edge: ElemId },
    #[error("source of `{edge}` is not preserved")]
    SourceNotPreserved { edge: ElemId },
    #[error("target of `{edge}` is not preserved")]
    TargetNotPreserved { edge: ElemId },
    #[error("inversion of `{edge}` is not preserved")]
    InversionNotPreserved { edge: ElemId },
}

/// Why a partition fails to be compatible with a graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompatibilityViolation {
    #[error("block mixes vertex `{vertex}` and edge `{edge}`")]
    MixedBlock { vertex: ElemId, edge: ElemId },
    #[error("`{e1}` and `{e2}` are related but their sources are not")]
    SourceSplit { e1: ElemId, e2: ElemId },
    #[error("`{e1}` and `{e2}` are related but their targets are not")]
    TargetSplit { e1: ElemId, e2: ElemId },
    #[error("`{e1}` and `{e2}` are related but their inverses are not")]
    InverseSplit { e1: ElemId, e2: ElemId },
    #[error("`{edge}` is related to its own inverse")]
    InversePairRelated { edge: ElemId },
}

/// Outcome of [`compatibility_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompatibilityCheck {
    Compatible,
    Incompatible(CompatibilityViolation),
}

impl CompatibilityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CompatibilityCheck::Compatible)
    }
}

/// Checks the three compatibility conditions of a partition of `V ⊎ E`,
/// returning the first violation in canonical block order.
pub fn compatibility_check(g: &FinGraph, p: &Partition) -> Result<CompatibilityCheck, Error> {
    if p.carrier() != g.combined() {
        return Err(Error::CarrierMismatch {
            context: "compatibility check",
        });
    }
    let viol = |v: CompatibilityViolation| Ok(CompatibilityCheck::Incompatible(v));
    for b in 0..p.block_count() {
        let members = p.block_positions(b);
        let mut first_vertex: Option<u32> = None;
        let mut first_edge: Option<u32> = None;
        for &c in members {
            match g.split_combined(c) {
                (ElemKind::Vertex, v) => {
                    first_vertex.get_or_insert(v);
                }
                (ElemKind::Edge, e) => {
                    first_edge.get_or_insert(e);
                }
            }
        }
        if let (Some(v), Some(e)) = (first_vertex, first_edge) {
            return viol(CompatibilityViolation::MixedBlock {
                vertex: g.vertices().elem(v).clone(),
                edge: g.edges().elem(e).clone(),
            });
        }
        let Some(e0) = first_edge else { continue };
        let block_of = p.block_of_positions();
        let same = |a: u32, b: u32| {
            block_of[g.combined().position(g.edges().elem(a)).unwrap() as usize]
                == block_of[g.combined().position(g.edges().elem(b)).unwrap() as usize]
        };
        let same_v = |a: u32, b: u32| {
            block_of[g.vertex_combined_pos(a) as usize] == block_of[g.vertex_combined_pos(b) as usize]
        };
        for &c in members {
            let (_, e) = g.split_combined(c);
            if !same_v(g.src_pos(e0), g.src_pos(e)) {
                return viol(CompatibilityViolation::SourceSplit {
                    e1: g.edges().elem(e0).clone(),
                    e2: g.edges().elem(e).clone(),
                });
            }
            if !same_v(g.tgt_pos(e0), g.tgt_pos(e)) {
                return viol(CompatibilityViolation::TargetSplit {
                    e1: g.edges().elem(e0).clone(),
                    e2: g.edges().elem(e).clone(),
                });
            }
            if !same(g.inv_pos(e0), g.inv_pos(e)) {
                return viol(CompatibilityViolation::InverseSplit {
                    e1: g.edges().elem(e0).clone(),
                    e2: g.edges().elem(e).clone(),
                });
            }
            if same(e, g.inv_pos(e)) {
                return viol(CompatibilityViolation::InversePairRelated {
                    edge: g.edges().elem(e).clone(),
                });
            }
        }
    }
    Ok(CompatibilityCheck::Compatible)
}

/// A partition of `V ⊎ E` known to be compatible with its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatiblePartition {
    graph: FinGraph,
    partition: Partition,
}

impl CompatiblePartition {
    pub fn new(graph: &FinGraph, partition: Partition) -> Result<Self, Error> {
        match compatibility_check(graph, &partition)? {
            CompatibilityCheck::Compatible => Ok(CompatiblePartition {
                graph: graph.clone(),
                partition,
            }),
            CompatibilityCheck::Incompatible(v) => Err(Error::Incompatible(v)),
        }
    }

    pub fn graph(&self) -> &FinGraph {
        &self.graph
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }
}

/// The quotient graph of a compatible partition, together with the canonical
/// projection. Quotient elements are named by the least member of their
/// block, so the construction is canonical.
pub fn quotient_graph(
    g: &FinGraph,
    k: &CompatiblePartition,
) -> Result<(FinGraph, GraphMap), Error> {
    if k.graph() != g {
        return Err(Error::CarrierMismatch {
            context: "quotient graph",
        });
    }
    let p = k.partition();
    // one representative per block, in carrier order
    let rep_of_block: Vec<u32> = (0..p.block_count())
        .map(|b| p.block_positions(b)[0])
        .collect();
    let mut vert_names: Vec<ElemId> = Vec::new();
    let mut edge_names: Vec<ElemId> = Vec::new();
    for &rep in &rep_of_block {
        let id = g.combined().elem(rep).clone();
        match g.split_combined(rep).0 {
            ElemKind::Vertex => vert_names.push(id),
            ElemKind::Edge => edge_names.push(id),
        }
    }
    let qverts = Carrier::new(vert_names)?;
    let qedges = Carrier::new(edge_names)?;

    let block_of = p.block_of_positions();
    let vertex_block = |v: u32| block_of[g.vertex_combined_pos(v) as usize];
    let edge_block = |e: u32| block_of[g.edge_combined_pos(e) as usize];
    let qvert_of_block = |b: u32| -> u32 {
        qverts
            .position(g.combined().elem(rep_of_block[b as usize]))
            .expect("vertex block representative")
    };
    let qedge_of_block = |b: u32| -> u32 {
        qedges
            .position(g.combined().elem(rep_of_block[b as usize]))
            .expect("edge block representative")
    };

    let mut src = vec![0u32; qedges.len()];
    let mut tgt = vec![0u32; qedges.len()];
    let mut inv = vec![0u32; qedges.len()];
    let mut pos = vec![false; qedges.len()];
    let mut any_orient = g.is_oriented();
    for qe in 0..qedges.len() {
        let rep = g
            .edges()
            .position(qedges.elem(qe as u32))
            .expect("representative edge");
        src[qe] = qvert_of_block(vertex_block(g.src_pos(rep)));
        tgt[qe] = qvert_of_block(vertex_block(g.tgt_pos(rep)));
        inv[qe] = qedge_of_block(edge_block(g.inv_pos(rep)));
    }
    // the orientation descends exactly when no edge block mixes the two sides
    if any_orient {
        let orient = g
            .positive_edges()
            .expect("oriented graph")
            .into_iter()
            .map(|id| g.edges().position(id).unwrap())
            .collect::<Vec<_>>();
        let mut block_sides: Vec<Option<bool>> = vec![None; p.block_count()];
        let mut is_pos = vec![false; g.edges().len()];
        for &e in &orient {
            is_pos[e as usize] = true;
        }
        'outer: for e in 0..g.edges().len() as u32 {
            let b = edge_block(e) as usize;
            match block_sides[b] {
                None => block_sides[b] = Some(is_pos[e as usize]),
                Some(side) => {
                    if side != is_pos[e as usize] {
                        any_orient = false;
                        break 'outer;
                    }
                }
            }
        }
        if any_orient {
            for (qe, side) in pos.iter_mut().enumerate() {
                let rep = g.edges().position(qedges.elem(qe as u32)).unwrap();
                *side = is_pos[rep as usize];
            }
        }
    }
    let quotient = FinGraph::assemble(
        qverts,
        qedges,
        src,
        tgt,
        inv,
        if any_orient { Some(pos) } else { None },
    )?;
    debug_assert!(quotient.validate().is_empty());

    let vmap = (0..g.vertices().len() as u32)
        .map(|v| {
            quotient
                .vertices()
                .position(g.combined().elem(rep_of_block[vertex_block(v) as usize]))
                .expect("vertex image")
        })
        .collect();
    let emap = (0..g.edges().len() as u32)
        .map(|e| {
            quotient
                .edges()
                .position(g.combined().elem(rep_of_block[edge_block(e) as usize]))
                .expect("edge image")
        })
        .collect();
    let projection = GraphMap {
        source: g.clone(),
        target: quotient.clone(),
        vmap,
        emap,
    };
    debug_assert!(projection.validate().is_empty());
    Ok((quotient, projection))
}

/// The compatible, orientation-preserving refinement of an arbitrary
/// partition of `V ⊎ E`: meet the partition with its pullbacks along the
/// extended source, target, and inversion maps, then split every block along
/// `V`, `E⁺`, `E⁻`. The result is contained in the input as relations.
pub fn compatible_refinement(g: &FinGraph, p: &Partition) -> Result<CompatiblePartition, Error> {
    if p.carrier() != g.combined() {
        return Err(Error::CarrierMismatch {
            context: "compatible refinement",
        });
    }
    if !g.is_oriented() {
        return Err(Error::MissingOrientation);
    }
    let s1 = g.extended_source().pullback(p)?;
    let s2 = g.extended_target().pullback(p)?;
    let s3 = g.extended_inversion().pullback(p)?;
    let s4 = p.meet(&s1)?.meet(&s2)?.meet(&s3)?;
    let side = |c: u32| -> u8 {
        match g.split_combined(c) {
            (ElemKind::Vertex, _) => 0,
            (ElemKind::Edge, e) => {
                if g.is_positive(g.edges().elem(e)).unwrap().unwrap() {
                    1
                } else {
                    2
                }
            }
        }
    };
    let labels: Vec<(u32, u8)> = (0..g.combined().len() as u32)
        .map(|c| (s4.block_of_positions()[c as usize], side(c)))
        .collect();
    let refined = Partition::from_labels(g.combined().clone(), labels);
    CompatiblePartition::new(g, refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_graph() -> FinGraph {
        FinGraph::from_oriented(&["w"], &[("l", "w", "w")]).unwrap()
    }

    fn segment_and_loop() -> FinGraph {
        // one edge pair u -> v plus a loop pair at w
        FinGraph::from_oriented(&["u", "v", "w"], &[("a", "u", "v"), ("l", "w", "w")]).unwrap()
    }

    #[test]
    fn loop_pair_is_valid() {
        let g = loop_graph();
        assert!(g.validate().is_empty());
        assert_eq!(g.edge_pair_count(), 1);
        assert_eq!(g.inv_of(&edge_id("l")).unwrap(), &edge_id("~l"));
        assert_eq!(g.src_of(&edge_id("~l")).unwrap(), &vertex_id("w"));
    }

    #[test]
    fn involution_fixed_edge_is_reported() {
        let g = loop_graph();
        let mut inv = g.inv.clone();
        inv[0] = 0;
        let bad = FinGraph::from_raw_parts(
            g.vertices().clone(),
            g.edges().clone(),
            g.src.clone(),
            g.tgt.clone(),
            inv,
            None,
        )
        .unwrap();
        let viols = bad.validate();
        assert!(viols
            .iter()
            .any(|v| matches!(v, GraphViolation::InvolutionFixesEdge { .. })));
    }

    #[test]
    fn corrupted_src_entries_are_located() {
        let g = segment_and_loop();
        let mut src = g.src.clone();
        let a = g.edges().position(&edge_id("a")).unwrap() as usize;
        src[a] = g.vertices().position(&vertex_id("w")).unwrap();
        let bad = FinGraph::from_raw_parts(
            g.vertices().clone(),
            g.edges().clone(),
            src,
            g.tgt.clone(),
            g.inv.clone(),
            None,
        )
        .unwrap();
        let viols = bad.validate();
        // src(a) no longer matches tgt(~a)
        assert!(viols.iter().any(|v| matches!(
            v,
            GraphViolation::InverseTargetMismatch { edge } if *edge == edge_id("a")
        ) || matches!(
            v,
            GraphViolation::InverseSourceMismatch { edge } if *edge == edge_id("~a")
        )));
    }

    #[test]
    fn lexicographic_orientation() {
        let g = loop_graph().without_orientation();
        let oriented = g.choose_orientation();
        assert_eq!(
            oriented.positive_edges().unwrap(),
            vec![&edge_id("l")],
            "plain name sorts before the ~ inverse"
        );
        // idempotent on an already oriented graph
        let again = oriented.choose_orientation();
        assert_eq!(again, oriented);
    }

    #[test]
    fn orientation_counts() {
        let g = segment_and_loop();
        let pos = g.positive_edges().unwrap();
        assert_eq!(pos.len(), g.edge_pair_count());
    }

    #[test]
    fn diagonal_is_compatible() {
        let g = loop_graph();
        let d = Partition::discrete(g.combined());
        assert!(compatibility_check(&g, &d).unwrap().holds());
    }

    #[test]
    fn inverse_pair_block_is_condition_three() {
        let g = loop_graph();
        let p = Partition::from_blocks(
            g.combined(),
            vec![vec![edge_id("l"), edge_id("~l")], vec![vertex_id("w")]],
        )
        .unwrap();
        assert_eq!(
            compatibility_check(&g, &p).unwrap(),
            CompatibilityCheck::Incompatible(CompatibilityViolation::InversePairRelated {
                edge: edge_id("l")
            })
        );
    }

    #[test]
    fn quotient_by_diagonal_is_isomorphic() {
        let g = segment_and_loop();
        let k = CompatiblePartition::new(&g, Partition::discrete(g.combined())).unwrap();
        let (q, proj) = quotient_graph(&g, &k).unwrap();
        assert!(proj.validate().is_empty());
        assert!(proj.is_bijective());
        assert_eq!(q.vertices().len(), g.vertices().len());
        assert_eq!(q.edges().len(), g.edges().len());
    }

    #[test]
    fn quotient_kernel_recovers_partition() {
        let g = segment_and_loop();
        // fold u and v together; a becomes a loop, so it must not merge with ~a
        let p = Partition::from_blocks(
            g.combined(),
            vec![
                vec![vertex_id("u"), vertex_id("v")],
                vec![vertex_id("w")],
                vec![edge_id("a")],
                vec![edge_id("~a")],
                vec![edge_id("l")],
                vec![edge_id("~l")],
            ],
        )
        .unwrap();
        let k = CompatiblePartition::new(&g, p.clone()).unwrap();
        let (_, proj) = quotient_graph(&g, &k).unwrap();
        assert!(proj.validate().is_empty());
        assert_eq!(proj.kernel_partition(), p);
    }

    #[test]
    fn refinement_of_compatible_partition_is_itself() {
        let g = segment_and_loop();
        let p = Partition::from_blocks(
            g.combined(),
            vec![
                vec![vertex_id("u"), vertex_id("v")],
                vec![vertex_id("w")],
                vec![edge_id("a")],
                vec![edge_id("~a")],
                vec![edge_id("l")],
                vec![edge_id("~l")],
            ],
        )
        .unwrap();
        let refined = compatible_refinement(&g, &p).unwrap();
        assert_eq!(refined.partition(), &p);
    }

    #[test]
    fn refinement_of_everything_block() {
        let g = segment_and_loop();
        let all_v: Vec<ElemId> = g.vertices().iter().cloned().collect();
        let all_e: Vec<ElemId> = g.edges().iter().cloned().collect();
        let p = Partition::from_blocks(g.combined(), vec![all_v.clone(), all_e]).unwrap();
        let s = compatible_refinement(&g, &p).unwrap();
        // vertices one class, E+ one class, E- one class
        assert_eq!(s.partition().block_count(), 3);
        assert!(s.partition().refines(&p).unwrap());
        assert!(compatibility_check(&g, s.partition()).unwrap().holds());
    }

    #[test]
    fn refinement_requires_orientation() {
        let g = segment_and_loop().without_orientation();
        let p = Partition::single_block(g.combined());
        assert_eq!(
            compatible_refinement(&g, &p).unwrap_err(),
            Error::MissingOrientation
        );
    }

    #[test]
    fn graph_map_identity_and_corruption() {
        let g = segment_and_loop();
        let id = GraphMap::identity(&g);
        assert!(id.validate().is_empty());
        let mut emap = id.emap.clone();
        let a = g.edges().position(&edge_id("a")).unwrap() as usize;
        let l = g.edges().position(&edge_id("l")).unwrap();
        emap[a] = l;
        let bad = GraphMap::from_raw_parts(g.clone(), g.clone(), id.vmap.clone(), emap);
        let viols = bad.validate();
        assert!(viols
            .iter()
            .any(|v| matches!(v, MapViolation::SourceNotPreserved { edge } if *edge == edge_id("a"))));
    }
}
