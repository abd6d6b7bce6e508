//! Chain inverse systems of finite graphs: truncated inverse limits, the
//! completion of a presented graph, extension of compatible map families,
//! closed entourages on truncations, and the boundary census that counts
//! completion points at finite horizons.
//!
//! Index sets are ℕ-chains. `bond(n)` maps level `n + 1` down to level `n`,
//! and the two-step map from level `j` to level `i ≤ j` is the composite of
//! the intermediate bonds in application order.

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::Error;
use crate::relations::{ElemId, Partition};
use crate::topograph::{
    edge_id, local_name, quotient_graph, vertex_id, CompatiblePartition, ElemKind, FinGraph,
    GraphMap, GraphViolation, MapViolation,
};
use crate::uniformity::CofinitePresentation;

/// A rule producing the levels and bonds of an infinite chain system.
pub struct SystemRule {
    /// Level `n` as a finite graph.
    pub level: Arc<dyn Fn(u32) -> FinGraph + Send + Sync>,
    /// Bonding map from level `n + 1` to level `n`.
    pub bond: Arc<dyn Fn(u32) -> GraphMap + Send + Sync>,
    /// Optional direct rule for the bond from level `j` to level `i ≤ j`;
    /// validation cross-checks it against the composite of one-step bonds.
    pub direct_bond: Option<Arc<dyn Fn(u32, u32) -> GraphMap + Send + Sync>>,
}

enum Levels {
    Finite {
        graphs: Vec<Arc<FinGraph>>,
        bonds: Vec<Arc<GraphMap>>,
    },
    Generated(SystemRule),
}

struct Cache {
    graphs: Vec<Arc<FinGraph>>,
    bonds: Vec<Arc<GraphMap>>,
}

/// An ℕ-indexed inverse system of finite graphs with bonding maps from each
/// level to the one below. Levels of generated systems are materialized
/// lazily and memoized; afterwards every query is a pure read.
pub struct ChainSystem {
    levels: Levels,
    cache: RwLock<Cache>,
}

impl ChainSystem {
    /// A finite system given explicitly: `bonds[n]` maps `graphs[n + 1]` to
    /// `graphs[n]`. Bond endpoints are checked; graph-map validity is
    /// reported by [`ChainSystem::validate`].
    pub fn from_levels(graphs: Vec<FinGraph>, bonds: Vec<GraphMap>) -> Result<Self, Error> {
        if graphs.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if bonds.len() + 1 != graphs.len() {
            return Err(Error::CarrierMismatch {
                context: "chain system shape",
            });
        }
        for (n, b) in bonds.iter().enumerate() {
            if b.source() != &graphs[n + 1] || b.target() != &graphs[n] {
                return Err(Error::CarrierMismatch {
                    context: "chain system bond endpoints",
                });
            }
        }
        Ok(ChainSystem {
            levels: Levels::Finite {
                graphs: graphs.into_iter().map(Arc::new).collect(),
                bonds: bonds.into_iter().map(Arc::new).collect(),
            },
            cache: RwLock::new(Cache {
                graphs: Vec::new(),
                bonds: Vec::new(),
            }),
        })
    }

    /// The constant system on one graph with identity bonds.
    pub fn constant(graph: FinGraph) -> Self {
        let g = Arc::new(graph);
        let g2 = Arc::clone(&g);
        let g3 = Arc::clone(&g);
        ChainSystem::generated(SystemRule {
            level: Arc::new(move |_| (*g2).clone()),
            bond: Arc::new(move |_| GraphMap::identity(&g3)),
            direct_bond: Some(Arc::new(move |_, _| GraphMap::identity(&g))),
        })
    }

    pub fn generated(rule: SystemRule) -> Self {
        ChainSystem {
            levels: Levels::Generated(rule),
            cache: RwLock::new(Cache {
                graphs: Vec::new(),
                bonds: Vec::new(),
            }),
        }
    }

    /// Highest level index for finite systems, `None` for generated ones.
    pub fn max_level(&self) -> Option<u32> {
        match &self.levels {
            Levels::Finite { graphs, .. } => Some((graphs.len() - 1) as u32),
            Levels::Generated(_) => None,
        }
    }

    fn materialize(&self, level: u32) -> Result<(), Error> {
        let rule = match &self.levels {
            Levels::Finite { .. } => return Ok(()),
            Levels::Generated(rule) => rule,
        };
        let mut cache = self.cache.write().expect("level cache");
        while cache.graphs.len() <= level as usize {
            let n = cache.graphs.len() as u32;
            cache.graphs.push(Arc::new((rule.level)(n)));
        }
        while cache.bonds.len() < level as usize {
            let n = cache.bonds.len() as u32;
            cache.bonds.push(Arc::new((rule.bond)(n)));
        }
        Ok(())
    }

    pub fn level(&self, n: u32) -> Result<Arc<FinGraph>, Error> {
        match &self.levels {
            Levels::Finite { graphs, .. } => graphs
                .get(n as usize)
                .cloned()
                .ok_or(Error::LevelUnavailable(n)),
            Levels::Generated(_) => {
                self.materialize(n)?;
                Ok(Arc::clone(&self.cache.read().expect("level cache").graphs[n as usize]))
            }
        }
    }

    /// The bonding map from level `n + 1` to level `n`.
    pub fn bond(&self, n: u32) -> Result<Arc<GraphMap>, Error> {
        match &self.levels {
            Levels::Finite { bonds, .. } => bonds
                .get(n as usize)
                .cloned()
                .ok_or(Error::LevelUnavailable(n + 1)),
            Levels::Generated(_) => {
                self.materialize(n + 1)?;
                Ok(Arc::clone(&self.cache.read().expect("level cache").bonds[n as usize]))
            }
        }
    }

    /// The composite bond from level `j` down to level `i ≤ j`.
    pub fn composite_bond(&self, i: u32, j: u32) -> Result<GraphMap, Error> {
        let mut map = GraphMap::identity(&*self.level(j)?);
        for n in (i..j).rev() {
            map = map.compose(&*self.bond(n)?)?;
        }
        Ok(map)
    }

    /// Validates level graphs, bond maps, bond endpoints, surjectivity, and
    /// (when a direct bond rule exists) coherence of composites, up to the
    /// given horizon.
    pub fn validate(&self, horizon: u32) -> Vec<SystemViolation> {
        let mut out = Vec::new();
        for n in 0..=horizon {
            match self.level(n) {
                Err(_) => {
                    out.push(SystemViolation::MissingLevel { level: n });
                    return out;
                }
                Ok(g) => {
                    for v in g.validate() {
                        out.push(SystemViolation::Graph { level: n, violation: v });
                    }
                }
            }
        }
        for n in 0..horizon {
            let bond = match self.bond(n) {
                Err(_) => {
                    out.push(SystemViolation::MissingBond { level: n });
                    continue;
                }
                Ok(b) => b,
            };
            let lower = self.level(n).expect("validated level");
            let upper = self.level(n + 1).expect("validated level");
            if bond.source() != &*upper || bond.target() != &*lower {
                out.push(SystemViolation::BondEndpoints { level: n });
                continue;
            }
            for v in bond.validate() {
                out.push(SystemViolation::Bond { level: n, violation: v });
            }
            if let Some(missing) = bond.surjectivity_witness() {
                out.push(SystemViolation::BondNotSurjective { level: n, missing });
            }
        }
        if let Levels::Generated(rule) = &self.levels {
            if let Some(direct) = &rule.direct_bond {
                for i in 0..=horizon {
                    for j in i..=horizon {
                        let composite = match self.composite_bond(i, j) {
                            Ok(c) => c,
                            Err(_) => continue,
                        };
                        if direct(i, j) != composite {
                            out.push(SystemViolation::IncoherentComposite { from: j, to: i });
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for ChainSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainSystem")
            .field("max_level", &self.max_level())
            .finish()
    }
}

/// A defect found by [`ChainSystem::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemViolation {
    #[error("level {level} is unavailable")]
    MissingLevel { level: u32 },
    #[error("bond {level} is unavailable")]
    MissingBond { level: u32 },
    #[error("bond {level} does not map level {} to level {level}", level + 1)]
    BondEndpoints { level: u32 },
    #[error("level {level}: {violation}")]
    Graph {
        level: u32,
        violation: GraphViolation,
    },
    #[error("bond {level}: {violation}")]
    Bond { level: u32, violation: MapViolation },
    #[error("bond {level} is not surjective: `{missing}` has no preimage")]
    BondNotSurjective { level: u32, missing: ElemId },
    #[error("composite of bonds from level {from} to level {to} differs from the direct rule")]
    IncoherentComposite { from: u32, to: u32 },
}

/// A coherent choice of one element per level up to a horizon; the concrete
/// representation of a point of the truncated inverse limit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Thread {
    coords: Vec<ElemId>,
}

impl Thread {
    pub fn coords(&self) -> &[ElemId] {
        &self.coords
    }

    pub fn horizon(&self) -> u32 {
        (self.coords.len() - 1) as u32
    }

    pub fn coord(&self, level: u32) -> &ElemId {
        &self.coords[level as usize]
    }

    /// The carrier identifier of the thread in the truncation graph:
    /// coordinates joined with `|`, under the namespace of its kind.
    pub fn id(&self, kind: ElemKind) -> ElemId {
        let joined = self
            .coords
            .iter()
            .map(local_name)
            .collect::<Vec<_>>()
            .join("|");
        match kind {
            ElemKind::Vertex => vertex_id(&joined),
            ElemKind::Edge => edge_id(&joined),
        }
    }
}

/// A truncated inverse limit: the graph of coherent threads at a horizon,
/// with the projections onto every level.
#[derive(Debug, Clone)]
pub struct Truncation {
    graph: FinGraph,
    horizon: u32,
    vertex_threads: Vec<Thread>,
    edge_threads: Vec<Thread>,
    projections: Vec<GraphMap>,
}

impl Truncation {
    pub fn graph(&self) -> &FinGraph {
        &self.graph
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn vertex_threads(&self) -> &[Thread] {
        &self.vertex_threads
    }

    pub fn edge_threads(&self) -> &[Thread] {
        &self.edge_threads
    }

    /// The projection onto level `n ≤ horizon`.
    pub fn projection(&self, n: u32) -> Result<&GraphMap, Error> {
        self.projections
            .get(n as usize)
            .ok_or(Error::LevelUnavailable(n))
    }

    pub fn thread_of(&self, id: &ElemId) -> Option<&Thread> {
        self.vertex_threads
            .iter()
            .chain(self.edge_threads.iter())
            .find(|t| {
                let kind = if self.graph.vertices().contains(id) {
                    ElemKind::Vertex
                } else {
                    ElemKind::Edge
                };
                t.id(kind) == *id
            })
    }
}

/// Threads of length `n + 1` with the coordinatewise graph structure. A
/// thread is determined by its top coordinate, so the truncation is the
/// image of level `n` under downward bonding; with surjective bonds the last
/// projection is an isomorphism onto level `n`.
pub fn limit_truncation(sys: &ChainSystem, n: u32) -> Result<Truncation, Error> {
    let top = sys.level(n)?;
    let mut downward: Vec<Arc<GraphMap>> = Vec::new();
    for k in 0..n {
        downward.push(sys.bond(k)?);
    }

    let thread_from_vertex = |v: &ElemId| -> Result<Thread, Error> {
        let mut coords = vec![v.clone()];
        for k in (0..n).rev() {
            let below = downward[k as usize].apply_vertex(&coords[0])?.clone();
            coords.insert(0, below);
        }
        Ok(Thread { coords })
    };
    let thread_from_edge = |e: &ElemId| -> Result<Thread, Error> {
        let mut coords = vec![e.clone()];
        for k in (0..n).rev() {
            let below = downward[k as usize].apply_edge(&coords[0])?.clone();
            coords.insert(0, below);
        }
        Ok(Thread { coords })
    };

    let mut vertex_threads = Vec::with_capacity(top.vertices().len());
    for v in top.vertices().iter() {
        vertex_threads.push(thread_from_vertex(v)?);
    }
    let mut edge_threads = Vec::with_capacity(top.edges().len());
    for e in top.edges().iter() {
        edge_threads.push(thread_from_edge(e)?);
    }
    // carrier positions follow sorted ids; keep the thread lists aligned
    vertex_threads.sort_by_key(|t| t.id(ElemKind::Vertex));
    edge_threads.sort_by_key(|t| t.id(ElemKind::Edge));

    let vertices: Vec<ElemId> = vertex_threads.iter().map(|t| t.id(ElemKind::Vertex)).collect();
    let mut edges = Vec::with_capacity(edge_threads.len());
    for t in &edge_threads {
        let top_edge = &t.coords[n as usize];
        let src = thread_from_vertex(top.src_of(top_edge)?)?;
        let tgt = thread_from_vertex(top.tgt_of(top_edge)?)?;
        let inv = thread_from_edge(top.inv_of(top_edge)?)?;
        edges.push((
            t.id(ElemKind::Edge),
            inv.id(ElemKind::Edge),
            src.id(ElemKind::Vertex),
            tgt.id(ElemKind::Vertex),
        ));
    }
    let orientation = top.positive_edges().map(|pos| {
        pos.into_iter()
            .map(|e| thread_from_edge(e).expect("top edge thread").id(ElemKind::Edge))
            .collect::<Vec<_>>()
    });
    let graph = FinGraph::from_id_tuples(vertices, edges, orientation)?;

    let mut projections = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let level = sys.level(k)?;
        let proj = GraphMap::from_fns(
            graph.clone(),
            (*level).clone(),
            |v| {
                let t = graph.vertices().position(v).expect("truncation vertex");
                vertex_threads[t as usize].coord(k).clone()
            },
            |e| {
                let t = graph.edges().position(e).expect("truncation edge");
                edge_threads[t as usize].coord(k).clone()
            },
        )?;
        projections.push(proj);
    }

    Ok(Truncation {
        graph,
        horizon: n,
        vertex_threads,
        edge_threads,
        projections,
    })
}

/// Orders the base of a separating presentation into a refinement chain,
/// coarsest first, inserting cumulative meets where needed; the chain ends
/// at the discrete partition.
pub fn refinement_chain(pres: &CofinitePresentation) -> Result<Vec<Partition>, Error> {
    if pres.is_improper() {
        return Err(Error::ImproperBase);
    }
    if let crate::uniformity::SeparationCheck::NotSeparating { witness } = pres.separation_check()
    {
        return Err(Error::NotSeparating(witness.0, witness.1));
    }
    let mut chain: Vec<Partition> = Vec::new();
    for member in pres.base() {
        let next = match chain.last() {
            None => member.clone(),
            Some(prev) => prev.meet(member)?,
        };
        if chain.last() != Some(&next) {
            chain.push(next);
        }
    }
    Ok(chain)
}

/// Builds the chain system of quotient graphs `Γ/R` along the refinement
/// chain of a separating presentation, with the induced bonding maps.
pub fn system_from_base(pres: &CofinitePresentation) -> Result<ChainSystem, Error> {
    let (system, _) = system_with_projections(pres)?;
    Ok(system)
}

/// As [`system_from_base`], also returning the canonical projections of the
/// presented graph onto every level.
pub fn system_with_projections(
    pres: &CofinitePresentation,
) -> Result<(ChainSystem, Vec<GraphMap>), Error> {
    let chain = refinement_chain(pres)?;
    let mut graphs = Vec::with_capacity(chain.len());
    let mut projections = Vec::with_capacity(chain.len());
    for part in &chain {
        let k = CompatiblePartition::new(pres.graph(), part.clone())?;
        let (q, proj) = quotient_graph(pres.graph(), &k)?;
        graphs.push(q);
        projections.push(proj);
    }
    let mut bonds = Vec::with_capacity(chain.len().saturating_sub(1));
    for n in 0..chain.len().saturating_sub(1) {
        // level n+1 is finer, so classes map forward along representatives
        let fine = &graphs[n + 1];
        let coarse = &graphs[n];
        let coarse_proj = &projections[n];
        let bond = GraphMap::from_fns(
            fine.clone(),
            coarse.clone(),
            |v| coarse_proj.apply_vertex(v).expect("representative vertex").clone(),
            |e| coarse_proj.apply_edge(e).expect("representative edge").clone(),
        )?;
        bonds.push(bond);
    }
    Ok((ChainSystem::from_levels(graphs, bonds)?, projections))
}

/// A truncated completion: the final truncation of the chain system of a
/// separating presentation, together with the dense embedding.
#[derive(Debug, Clone)]
pub struct Completion {
    pub truncation: Truncation,
    /// The canonical embedding of the presented graph into the truncation.
    pub theta: GraphMap,
}

/// Completes a finite separating presentation: builds its chain system and
/// returns the final truncation with the embedding `θ`, which sends an
/// element to the thread of its classes. For finite carriers `θ` is a graph
/// isomorphism onto the truncation.
pub fn complete(pres: &CofinitePresentation) -> Result<Completion, Error> {
    complete_at(pres, None)
}

/// As [`complete`], truncated at an explicit horizon. Below the final chain
/// level the embedding folds whatever the cut-off chain member still
/// identifies.
pub fn complete_at(pres: &CofinitePresentation, horizon: Option<u32>) -> Result<Completion, Error> {
    let (system, projections) = system_with_projections(pres)?;
    let max = system.max_level().expect("finite system");
    let horizon = horizon.map_or(max, |h| h.min(max));
    let truncation = limit_truncation(&system, horizon)?;
    let theta = embed_into(pres, &projections[..=horizon as usize], &truncation)?;
    Ok(Completion { truncation, theta })
}

fn embed_into(
    pres: &CofinitePresentation,
    projections: &[GraphMap],
    truncation: &Truncation,
) -> Result<GraphMap, Error> {
    let source = pres.graph().clone();
    GraphMap::from_fns(
        source,
        truncation.graph().clone(),
        |v| {
            let coords = projections
                .iter()
                .map(|p| p.apply_vertex(v).expect("class of vertex").clone())
                .collect();
            Thread { coords }.id(ElemKind::Vertex)
        },
        |e| {
            let coords = projections
                .iter()
                .map(|p| p.apply_edge(e).expect("class of edge").clone())
                .collect();
            Thread { coords }.id(ElemKind::Edge)
        },
    )
}

/// Extends a bond-compatible family of graph maps `g_n : Γ → level n` to the
/// truncation at horizon `family.len() - 1`: the extension sends `x` to the
/// thread `(g_n(x))_n`, and is the unique map commuting with every
/// projection.
pub fn extend_map(sys: &ChainSystem, family: &[GraphMap]) -> Result<Extension, Error> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let horizon = (family.len() - 1) as u32;
    let source = family[0].source().clone();
    for (n, g) in family.iter().enumerate() {
        if g.source() != &source {
            return Err(Error::CarrierMismatch {
                context: "map family source",
            });
        }
        let level = sys.level(n as u32)?;
        if g.target() != &*level {
            return Err(Error::CarrierMismatch {
                context: "map family target",
            });
        }
    }
    // bond(n) ∘ g_{n+1} must equal g_n
    for n in 0..horizon {
        let bond = sys.bond(n)?;
        let stepped = family[n as usize + 1].compose(&bond)?;
        if stepped != family[n as usize] {
            let witness = source
                .combined()
                .iter()
                .find(|id| stepped.apply(id).ok() != family[n as usize].apply(id).ok())
                .expect("maps differ on some element")
                .clone();
            return Err(Error::IncoherentFamily { level: n, witness });
        }
    }
    let truncation = limit_truncation(sys, horizon)?;
    let map = GraphMap::from_fns(
        source,
        truncation.graph().clone(),
        |v| {
            let coords = family
                .iter()
                .map(|g| g.apply_vertex(v).expect("family image").clone())
                .collect();
            Thread { coords }.id(ElemKind::Vertex)
        },
        |e| {
            let coords = family
                .iter()
                .map(|g| g.apply_edge(e).expect("family image").clone())
                .collect();
            Thread { coords }.id(ElemKind::Edge)
        },
    )?;
    Ok(Extension { truncation, map })
}

/// Result of [`extend_map`].
#[derive(Debug, Clone)]
pub struct Extension {
    pub truncation: Truncation,
    pub map: GraphMap,
}

/// The closed entourage determined by a base member `r` on the truncated
/// completion of a finite presentation: threads are related when their
/// classes at the first chain level refined by every `r`-block coincide in
/// `Γ/r`. Restricted to the image of `θ` it recovers `r`.
pub fn closed_entourage(
    pres: &CofinitePresentation,
    r: &Partition,
) -> Result<(Completion, CompatiblePartition), Error> {
    if !pres.base().contains(r) {
        return Err(Error::NotInBase);
    }
    let chain = refinement_chain(pres)?;
    let level = chain
        .iter()
        .position(|c| c.refines(r).expect("same carrier"))
        .expect("chain reaches the discrete partition") as u32;
    let completion = complete(pres)?;
    let entourage = level_entourage_classes(&completion.truncation, level, Some(r))?;
    let compatible = CompatiblePartition::new(completion.truncation.graph(), entourage)?;
    Ok((completion, compatible))
}

/// Partition of a truncation's threads by the `coarse`-class of their
/// coordinate at `level`. With `coarse = None` threads are grouped by the
/// coordinate itself — the kernel of the level projection.
pub fn level_entourage_classes(
    truncation: &Truncation,
    level: u32,
    coarse: Option<&Partition>,
) -> Result<Partition, Error> {
    if level > truncation.horizon() {
        return Err(Error::LevelUnavailable(level));
    }
    let proj = truncation.projection(level)?;
    let level_graph = proj.target();
    let combined = truncation.graph().combined();
    let mut labels = Vec::with_capacity(combined.len());
    for id in combined.iter() {
        let coord = proj.apply(id)?;
        let label = match coarse {
            None => level_graph.combined().require(coord)?,
            Some(p) => {
                // coordinates are class representatives of the source graph
                p.block_index(coord)? as u32
            }
        };
        labels.push(label);
    }
    Ok(Partition::from_labels(combined.clone(), labels))
}

/// How the census classifies a single level element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberClass {
    /// All iterated bonding fibers over the lookahead window are singletons.
    Rigid,
    /// Some iterated fiber grows: the element absorbs new elements from
    /// deeper levels and so heads a completion point outside the image.
    Boundary,
}

/// Census of the truncation at one horizon: how many threads are rigid and
/// how many are boundary, the latter split into vertex ends and inverse
/// pairs of edge ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub horizon: u32,
    pub lookahead: u32,
    /// Threads identified with presented-graph elements at this horizon.
    pub rigid_threads: usize,
    pub vertex_ends: usize,
    /// Boundary edge threads, counted as inverse pairs.
    pub edge_end_pairs: usize,
    /// End count in the unpaired convention: vertex ends plus one per edge
    /// pair.
    pub end_count: usize,
    /// Set when the (vertex, edge-pair) counts agree over the last five
    /// horizons.
    pub stabilized: bool,
    /// `(horizon, vertex_ends, edge_end_pairs)` for the stabilization
    /// window.
    pub history: Vec<(u32, usize, usize)>,
    /// Identifiers of the boundary threads in the truncation graph.
    pub boundary_ids: Vec<ElemId>,
}

/// Classifies the elements of `level` by their iterated bonding fibers up to
/// `lookahead` levels deeper. Requires surjective bonds on the window.
pub fn classify_level(
    sys: &ChainSystem,
    level: u32,
    lookahead: u32,
) -> Result<Vec<(ElemId, FiberClass)>, Error> {
    let g = sys.level(level)?;
    for step in 0..lookahead {
        let bond = sys.bond(level + step)?;
        if let Some(missing) = bond.surjectivity_witness() {
            return Err(Error::NotSurjective(missing));
        }
    }
    // with surjective bonds fiber sizes are nondecreasing in depth, so the
    // deepest fiber decides the class
    let mut sizes: std::collections::HashMap<ElemId, usize> =
        g.combined().iter().map(|id| (id.clone(), 1)).collect();
    if lookahead > 0 {
        let composite = sys.composite_bond(level, level + lookahead)?;
        let top = sys.level(level + lookahead)?;
        sizes.values_mut().for_each(|v| *v = 0);
        for id in top.combined().iter() {
            *sizes.entry(composite.apply(id)?.clone()).or_insert(0) += 1;
        }
    }
    Ok(g.combined()
        .iter()
        .map(|id| {
            let class = if sizes.get(id).copied().unwrap_or(0) <= 1 {
                FiberClass::Rigid
            } else {
                FiberClass::Boundary
            };
            (id.clone(), class)
        })
        .collect())
}

/// Counts rigid and boundary threads at the horizon, with a stabilization
/// check over the trailing five horizons. Needs levels up to
/// `horizon + lookahead`.
pub fn boundary_census(
    sys: &ChainSystem,
    horizon: u32,
    lookahead: u32,
) -> Result<CensusReport, Error> {
    if let Some(max) = sys.max_level() {
        if horizon + lookahead > max {
            return Err(Error::LevelUnavailable(horizon + lookahead));
        }
    }
    let counts_at = |h: u32| -> Result<(usize, usize, usize, Vec<ElemId>), Error> {
        let g = sys.level(h)?;
        let classes = classify_level(sys, h, lookahead)?;
        let mut rigid = 0usize;
        let mut vertex_ends = 0usize;
        let mut boundary_edges = 0usize;
        let mut boundary_ids = Vec::new();
        let trunc = limit_truncation(sys, h)?;
        for (id, class) in &classes {
            match class {
                FiberClass::Rigid => rigid += 1,
                FiberClass::Boundary => {
                    let kind = g.kind(id)?;
                    match kind {
                        ElemKind::Vertex => vertex_ends += 1,
                        ElemKind::Edge => boundary_edges += 1,
                    }
                    // name the boundary thread in the truncation graph
                    let thread = match kind {
                        ElemKind::Vertex => trunc
                            .vertex_threads()
                            .iter()
                            .find(|t| t.coord(h) == id)
                            .map(|t| t.id(ElemKind::Vertex)),
                        ElemKind::Edge => trunc
                            .edge_threads()
                            .iter()
                            .find(|t| t.coord(h) == id)
                            .map(|t| t.id(ElemKind::Edge)),
                    };
                    if let Some(t) = thread {
                        boundary_ids.push(t);
                    }
                }
            }
        }
        boundary_ids.sort();
        Ok((rigid, vertex_ends, boundary_edges / 2, boundary_ids))
    };

    let (rigid, vertex_ends, edge_end_pairs, boundary_ids) = counts_at(horizon)?;
    let mut history = Vec::new();
    let window = 5u32.min(horizon + 1);
    for h in (horizon + 1 - window)..=horizon {
        let (_, v, e, _) = counts_at(h)?;
        history.push((h, v, e));
    }
    let stabilized = window == 5
        && history
            .iter()
            .all(|&(_, v, e)| v == vertex_ends && e == edge_end_pairs);
    Ok(CensusReport {
        horizon,
        lookahead,
        rigid_threads: rigid,
        vertex_ends,
        edge_end_pairs,
        end_count: vertex_ends + edge_end_pairs,
        stabilized,
        history,
        boundary_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::Carrier;

    fn segment() -> FinGraph {
        FinGraph::from_oriented(&["u", "v"], &[("a", "u", "v")]).unwrap()
    }

    #[test]
    fn constant_system_is_valid_and_truncates_to_itself() {
        let g = segment();
        let sys = ChainSystem::constant(g.clone());
        assert!(sys.validate(6).is_empty());
        let trunc = limit_truncation(&sys, 3).unwrap();
        assert_eq!(trunc.graph().vertices().len(), g.vertices().len());
        assert_eq!(trunc.graph().edges().len(), g.edges().len());
        let proj = trunc.projection(3).unwrap();
        assert!(proj.is_bijective());
        assert!(proj.validate().is_empty());
    }

    #[test]
    fn corrupted_bond_is_located() {
        let g = segment();
        let a = g.edges().position(&edge_id("a")).unwrap() as usize;
        let abar = g.edges().position(&edge_id("~a")).unwrap();
        let mut emap: Vec<u32> = (0..g.edges().len() as u32).collect();
        emap[a] = abar;
        let bad = GraphMap::from_raw_parts(
            g.clone(),
            g.clone(),
            (0..g.vertices().len() as u32).collect(),
            emap,
        );
        let sys = ChainSystem::from_levels(vec![g.clone(), g.clone()], vec![bad]).unwrap();
        let viols = sys.validate(1);
        assert!(viols
            .iter()
            .any(|v| matches!(v, SystemViolation::Bond { level: 0, .. })));
    }

    #[test]
    fn non_surjective_system_truncation_is_smaller() {
        // level 0 has an isolated vertex never hit from level 1
        let g0 = FinGraph::from_oriented(&["x", "y"], &[]).unwrap();
        let g1 = FinGraph::from_oriented(&["x"], &[]).unwrap();
        let bond = GraphMap::from_fns(g1.clone(), g0.clone(), |v| v.clone(), |e| e.clone()).unwrap();
        let sys = ChainSystem::from_levels(vec![g0.clone(), g1], vec![bond]).unwrap();
        let trunc = limit_truncation(&sys, 1).unwrap();
        assert_eq!(trunc.graph().vertices().len(), 1);
        assert!(trunc.graph().vertices().len() < g0.vertices().len());
    }

    #[test]
    fn system_from_single_member_base() {
        let g = segment();
        let pres =
            CofinitePresentation::new(&g, vec![Partition::discrete(g.combined())]).unwrap();
        let sys = system_from_base(&pres).unwrap();
        assert_eq!(sys.max_level(), Some(0));
        let level = sys.level(0).unwrap();
        assert_eq!(level.vertices().len(), g.vertices().len());
        assert_eq!(level.edges().len(), g.edges().len());
    }

    #[test]
    fn completion_of_finite_presentation_is_isomorphism() {
        let g = segment();
        let coarse = Partition::from_blocks(
            g.combined(),
            vec![
                vec![vertex_id("u"), vertex_id("v")],
                vec![edge_id("a")],
                vec![edge_id("~a")],
            ],
        )
        .unwrap();
        let pres = CofinitePresentation::new(
            &g,
            vec![coarse, Partition::discrete(g.combined())],
        )
        .unwrap();
        let completion = complete(&pres).unwrap();
        assert!(completion.theta.validate().is_empty());
        assert!(completion.theta.is_bijective());

        // cut below the final level: theta folds what the chain still
        // identifies
        let partial = complete_at(&pres, Some(0)).unwrap();
        assert!(partial.theta.validate().is_empty());
        assert!(!partial.theta.is_bijective());
        assert_eq!(partial.truncation.graph().vertices().len(), 1);
    }

    #[test]
    fn completion_requires_separating_base() {
        let g = FinGraph::from_oriented(&["u", "v"], &[]).unwrap();
        let coarse = Partition::single_block(g.combined());
        let pres = CofinitePresentation::new(&g, vec![coarse]).unwrap();
        assert!(matches!(complete(&pres), Err(Error::NotSeparating(_, _))));
    }

    #[test]
    fn extension_of_projection_family_is_theta() {
        let g = segment();
        let pres =
            CofinitePresentation::new(&g, vec![Partition::discrete(g.combined())]).unwrap();
        let (sys, projections) = system_with_projections(&pres).unwrap();
        let ext = extend_map(&sys, &projections).unwrap();
        let completion = complete(&pres).unwrap();
        assert_eq!(ext.map, completion.theta);
    }

    #[test]
    fn incoherent_family_is_rejected_with_level() {
        let g = segment();
        let sys = ChainSystem::constant(g.clone());
        let id = GraphMap::identity(&g);
        // swap u and v at level 1 only; the family no longer commutes
        let swap = GraphMap::from_fns(
            g.clone(),
            g.clone(),
            |v| {
                if v == &vertex_id("u") {
                    vertex_id("v")
                } else {
                    vertex_id("u")
                }
            },
            |e| {
                if e == &edge_id("a") {
                    edge_id("~a")
                } else {
                    edge_id("a")
                }
            },
        )
        .unwrap();
        match extend_map(&sys, &[id, swap]) {
            Err(Error::IncoherentFamily { level: 0, .. }) => {}
            other => panic!("expected incoherent family, got {other:?}"),
        }
    }

    #[test]
    fn census_of_constant_system_has_no_boundary() {
        let g = segment();
        let sys = ChainSystem::constant(g);
        let report = boundary_census(&sys, 6, 3).unwrap();
        assert_eq!(report.vertex_ends, 0);
        assert_eq!(report.edge_end_pairs, 0);
        assert_eq!(report.end_count, 0);
        assert!(report.stabilized);
        // two vertices and one doubled edge pair
        assert_eq!(report.rigid_threads, 4);
    }

    #[test]
    fn closed_entourage_of_finite_presentation() {
        let g = segment();
        let coarse = Partition::from_blocks(
            g.combined(),
            vec![
                vec![vertex_id("u"), vertex_id("v")],
                vec![edge_id("a")],
                vec![edge_id("~a")],
            ],
        )
        .unwrap();
        let pres = CofinitePresentation::new(
            &g,
            vec![coarse.clone(), Partition::discrete(g.combined())],
        )
        .unwrap();
        let (completion, entourage) = closed_entourage(&pres, &coarse).unwrap();
        // pull the entourage back along theta: it must be the base member
        let theta = completion.theta.combined_map();
        let pulled = theta.pullback(entourage.partition()).unwrap();
        assert_eq!(pulled, coarse);
    }

    #[test]
    fn thread_ids_are_reconstructible() {
        let c = Carrier::new(["v:0"]).unwrap();
        let _ = c;
        let t = Thread {
            coords: vec![vertex_id("0"), vertex_id("1")],
        };
        assert_eq!(t.id(ElemKind::Vertex), vertex_id("0|1"));
        assert_eq!(t.horizon(), 1);
    }
}
