//! Window presentations of the integer line and the two built-in chain
//! systems over it, whose truncated completions have four and two extra
//! points respectively.
//!
//! The line has vertices at the integers and, for each `x ≠ 0`, an edge pair
//! `e{x}` pointing away from the origin: `s(e_x) = x - 1` for positive `x`,
//! `s(e_x) = x + 1` for negative `x`, and `t(e_x) = x`. Windows are the
//! induced subgraphs on `[-n, n]`; inclusions are the identity on
//! identifiers.

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::Error;
use crate::invsys::{
    classify_level, extend_map, ChainSystem, FiberClass, SystemRule, Truncation,
};
use crate::relations::ElemId;
use crate::topograph::{local_name, ElemKind, FinGraph, GraphMap, MapViolation};
use crate::uniformity::CofinitePresentation;

/// An exhaustion of a countable graph by finite induced subgraphs,
/// materialized lazily and memoized.
pub struct WindowGraph {
    rule: Arc<dyn Fn(u32) -> FinGraph + Send + Sync>,
    cache: RwLock<Vec<Arc<FinGraph>>>,
}

impl WindowGraph {
    pub fn new(rule: impl Fn(u32) -> FinGraph + Send + Sync + 'static) -> Self {
        WindowGraph {
            rule: Arc::new(rule),
            cache: RwLock::new(Vec::new()),
        }
    }

    /// The window of the given radius.
    pub fn window(&self, n: u32) -> Arc<FinGraph> {
        {
            let cache = self.cache.read().expect("window cache");
            if let Some(g) = cache.get(n as usize) {
                return Arc::clone(g);
            }
        }
        let mut cache = self.cache.write().expect("window cache");
        while cache.len() <= n as usize {
            let k = cache.len() as u32;
            cache.push(Arc::new((self.rule)(k)));
        }
        Arc::clone(&cache[n as usize])
    }
}

impl fmt::Debug for WindowGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindowGraph").finish()
    }
}

type WindowBound = Arc<dyn Fn(u32) -> u32 + Send + Sync>;
type QuotientRule = Arc<dyn Fn(u32, &FinGraph, &FinGraph) -> Result<GraphMap, Error> + Send + Sync>;

/// The family of quotient maps `q(N)` from windows onto system levels,
/// coherent with the bonding maps.
pub struct QuotientFamily {
    m0: WindowBound,
    build: QuotientRule,
}

impl QuotientFamily {
    /// Smallest window radius on which `q(N)` is surjective.
    pub fn min_window(&self, n: u32) -> u32 {
        (self.m0)(n)
    }

    /// Builds `q(N)` on the given window into the given level graph.
    pub fn quotient_map(
        &self,
        n: u32,
        window: &FinGraph,
        level: &FinGraph,
    ) -> Result<GraphMap, Error> {
        (self.build)(n, window, level)
    }
}

impl fmt::Debug for QuotientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientFamily").finish()
    }
}

fn vertex_int(id: &ElemId) -> i64 {
    local_name(id).parse().expect("integer vertex name")
}

fn vname(x: i64) -> String {
    x.to_string()
}

/// Local edge names of the builtins: `e{x}`, the positive-end loop `e`, and
/// the negative-end loop `ep`, possibly `~`-inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeName {
    Ex(i64),
    LoopPos,
    LoopNeg,
}

fn parse_edge(id: &ElemId) -> (bool, EdgeName) {
    let local = local_name(id);
    let (inverted, rest) = match local.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, local),
    };
    let name = match rest {
        "e" => EdgeName::LoopPos,
        "ep" => EdgeName::LoopNeg,
        _ => EdgeName::Ex(
            rest.strip_prefix('e')
                .expect("edge name")
                .parse()
                .expect("edge index"),
        ),
    };
    (inverted, name)
}

fn edge_local(inverted: bool, name: EdgeName) -> String {
    let base = match name {
        EdgeName::Ex(x) => format!("e{x}"),
        EdgeName::LoopPos => "e".to_string(),
        EdgeName::LoopNeg => "ep".to_string(),
    };
    if inverted {
        format!("~{base}")
    } else {
        base
    }
}

fn edge_full(inverted: bool, name: EdgeName) -> ElemId {
    crate::topograph::edge_id(&edge_local(inverted, name))
}

fn vertex_full(x: i64) -> ElemId {
    crate::topograph::vertex_id(&vname(x))
}

/// The integer-line window graph: `window(n)` has vertices `[-n, n]` and
/// edge pairs `e{x}` for `0 < |x| ≤ n`.
pub fn integer_line() -> WindowGraph {
    WindowGraph::new(|n| {
        let n = n as i64;
        let vertices: Vec<String> = (-n..=n).map(vname).collect();
        let mut edges = Vec::new();
        for x in -n..=n {
            if x == 0 {
                continue;
            }
            let src = if x > 0 { x - 1 } else { x + 1 };
            edges.push((format!("e{x}"), vname(src), vname(x)));
        }
        let vrefs: Vec<&str> = vertices.iter().map(String::as_str).collect();
        let erefs: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
            .collect();
        FinGraph::from_oriented(&vrefs, &erefs).expect("integer line window")
    })
}

fn line_level(boundary: i64, fold_negative: bool) -> FinGraph {
    // boundary = N + 1; vertices reach -boundary (or -(boundary - 1) when
    // the negative side folds onto the positive loop vertex)
    let lo = if fold_negative { -(boundary - 1) } else { -boundary };
    let vertices: Vec<String> = (lo..=boundary).map(vname).collect();
    let mut edges = Vec::new();
    for x in -boundary..=boundary {
        if x == 0 {
            continue;
        }
        let src = if x > 0 { x - 1 } else { x + 1 };
        let tgt = if fold_negative && x == -boundary {
            boundary
        } else {
            x
        };
        edges.push((format!("e{x}"), vname(src), vname(tgt)));
    }
    edges.push(("e".to_string(), vname(boundary), vname(boundary)));
    if !fold_negative {
        edges.push(("ep".to_string(), vname(-boundary), vname(-boundary)));
    }
    let vrefs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let erefs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
        .collect();
    FinGraph::from_oriented(&vrefs, &erefs).expect("level graph")
}

/// The two-ended level family: level `N` keeps `[-N-1, N+1]` with a loop at
/// each end, and everything beyond collapses onto the nearer end.
fn phi1_map(i: u32, source: &FinGraph, target: &FinGraph) -> Result<GraphMap, Error> {
    let b = i as i64 + 1;
    GraphMap::from_fns(
        source.clone(),
        target.clone(),
        move |v| {
            let x = vertex_int(v);
            if x.abs() <= b {
                vertex_full(x)
            } else if x > 0 {
                vertex_full(b)
            } else {
                vertex_full(-b)
            }
        },
        move |e| {
            let (inverted, name) = parse_edge(e);
            let image = match name {
                EdgeName::Ex(x) if x.abs() <= b => EdgeName::Ex(x),
                EdgeName::Ex(x) if x > 0 => EdgeName::LoopPos,
                EdgeName::Ex(_) => EdgeName::LoopNeg,
                loopname => loopname,
            };
            edge_full(inverted, image)
        },
    )
}

/// The chain system of the two-ended levels.
pub fn phi1_system() -> ChainSystem {
    let level = |n: u32| line_level(n as i64 + 1, false);
    ChainSystem::generated(SystemRule {
        level: Arc::new(level),
        bond: Arc::new(move |n| {
            phi1_map(n, &level(n + 1), &level(n)).expect("two-ended bond")
        }),
        direct_bond: Some(Arc::new(move |i, j| {
            phi1_map(i, &level(j), &level(i)).expect("two-ended direct bond")
        })),
    })
}

/// The quotient maps of the integer line onto the two-ended levels.
pub fn phi1_quotients() -> QuotientFamily {
    QuotientFamily {
        m0: Arc::new(|n| n + 2),
        build: Arc::new(phi1_map),
    }
}

/// The one-ended level family: level `N` keeps `[-N, N+1]`, the edge from
/// `-N` folds onto the single loop vertex `N+1`, and both directions beyond
/// collapse onto it.
fn phi2_map(i: u32, source: &FinGraph, target: &FinGraph) -> Result<GraphMap, Error> {
    let i = i as i64;
    GraphMap::from_fns(
        source.clone(),
        target.clone(),
        move |v| {
            let x = vertex_int(v);
            if x.abs() <= i {
                vertex_full(x)
            } else {
                vertex_full(i + 1)
            }
        },
        move |e| {
            let (inverted, name) = parse_edge(e);
            let image = match name {
                EdgeName::Ex(x) if x.abs() <= i + 1 => EdgeName::Ex(x),
                EdgeName::Ex(_) => EdgeName::LoopPos,
                loopname => loopname,
            };
            edge_full(inverted, image)
        },
    )
}

/// The chain system of the one-ended levels.
pub fn phi2_system() -> ChainSystem {
    let level = |n: u32| line_level(n as i64 + 1, true);
    ChainSystem::generated(SystemRule {
        level: Arc::new(level),
        bond: Arc::new(move |n| {
            phi2_map(n, &level(n + 1), &level(n)).expect("one-ended bond")
        }),
        direct_bond: Some(Arc::new(move |i, j| {
            phi2_map(i, &level(j), &level(i)).expect("one-ended direct bond")
        })),
    })
}

/// The quotient maps of the integer line onto the one-ended levels.
pub fn phi2_quotients() -> QuotientFamily {
    QuotientFamily {
        m0: Arc::new(|n| n + 2),
        build: Arc::new(phi2_map),
    }
}

/// A defect found by [`quotient_maps_check`] or [`inclusion_check`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentedViolation {
    #[error("q({level}) is not a map of graphs: {violation}")]
    QuotientNotGraphMap {
        level: u32,
        violation: MapViolation,
    },
    #[error("q({level}) misses `{missing}` on a window of radius {radius}")]
    QuotientNotSurjective {
        level: u32,
        radius: u32,
        missing: ElemId,
    },
    #[error("bond({level}) ∘ q({}) differs from q({level}) at `{witness}`", level + 1)]
    BondIncoherent { level: u32, witness: ElemId },
    #[error("window {radius} does not include window {} at `{witness}`", radius - 1)]
    InclusionBroken { radius: u32, witness: ElemId },
}

/// Verifies that windows embed into one another: identifiers persist and
/// keep their sources, targets, and inverses.
pub fn inclusion_check(wg: &WindowGraph, up_to: u32) -> Vec<PresentedViolation> {
    let mut out = Vec::new();
    for n in 1..=up_to {
        let small = wg.window(n - 1);
        let big = wg.window(n);
        for v in small.vertices().iter() {
            if !big.vertices().contains(v) {
                out.push(PresentedViolation::InclusionBroken {
                    radius: n,
                    witness: v.clone(),
                });
            }
        }
        for e in small.edges().iter() {
            let ok = big.edges().contains(e)
                && small.src_of(e).ok() == big.src_of(e).ok()
                && small.tgt_of(e).ok() == big.tgt_of(e).ok()
                && small.inv_of(e).ok() == big.inv_of(e).ok();
            if !ok {
                out.push(PresentedViolation::InclusionBroken {
                    radius: n,
                    witness: e.clone(),
                });
            }
        }
    }
    out
}

/// Verifies the quotient family against the system up to a horizon: each
/// `q(N)` is a map of graphs, surjective on windows of radius at least
/// `m0(N)`, and coherent with the bonds.
pub fn quotient_maps_check(
    wg: &WindowGraph,
    qf: &QuotientFamily,
    sys: &ChainSystem,
    horizon: u32,
) -> Vec<PresentedViolation> {
    let mut out = Vec::new();
    for n in 0..=horizon {
        let radius = qf.min_window(n).max(qf.min_window(horizon.min(n + 1)));
        let window = wg.window(radius);
        let level = match sys.level(n) {
            Ok(level) => level,
            Err(_) => return out,
        };
        let q = match qf.quotient_map(n, &window, &level) {
            Ok(q) => q,
            Err(_) => {
                out.push(PresentedViolation::QuotientNotGraphMap {
                    level: n,
                    violation: MapViolation::TableLength,
                });
                continue;
            }
        };
        for violation in q.validate() {
            out.push(PresentedViolation::QuotientNotGraphMap {
                level: n,
                violation,
            });
        }
        if let Some(missing) = q.surjectivity_witness() {
            out.push(PresentedViolation::QuotientNotSurjective {
                level: n,
                radius,
                missing,
            });
        }
        if n < horizon {
            let upper = match sys.level(n + 1) {
                Ok(level) => level,
                Err(_) => continue,
            };
            let bond = match sys.bond(n) {
                Ok(b) => b,
                Err(_) => continue,
            };
            let q_up = match qf.quotient_map(n + 1, &window, &upper) {
                Ok(q) => q,
                Err(_) => continue,
            };
            match q_up.compose(&bond) {
                Ok(stepped) => {
                    if stepped != q {
                        let witness = window
                            .combined()
                            .iter()
                            .find(|id| stepped.apply(id).ok() != q.apply(id).ok())
                            .cloned()
                            .unwrap_or_else(|| ElemId::new("?"));
                        out.push(PresentedViolation::BondIncoherent { level: n, witness });
                    }
                }
                Err(_) => out.push(PresentedViolation::BondIncoherent {
                    level: n,
                    witness: ElemId::new("?"),
                }),
            }
        }
    }
    out
}

/// The presentation of a window by the kernels of `q(0) … q(horizon)`.
/// Separating exactly when the horizon resolves every window element.
pub fn window_presentation(
    wg: &WindowGraph,
    qf: &QuotientFamily,
    sys: &ChainSystem,
    radius: u32,
    horizon: u32,
) -> Result<CofinitePresentation, Error> {
    let window = wg.window(radius);
    let mut members = Vec::new();
    for n in 0..=horizon {
        let level = sys.level(n)?;
        let q = qf.quotient_map(n, &window, &level)?;
        members.push(q.kernel_partition());
    }
    CofinitePresentation::new(&window, members)
}

/// A truncated completion over a window: the thread graph at the horizon,
/// the embedding of the window, and the census of what the embedding
/// misses.
#[derive(Debug, Clone)]
pub struct WindowCompletion {
    pub truncation: Truncation,
    pub theta: GraphMap,
    /// Truncation elements not hit by the embedding.
    pub missed: Vec<ElemId>,
    /// Boundary-classified truncation elements at this horizon.
    pub boundary: Vec<ElemId>,
}

/// Embeds a window into the truncation at `horizon` along the quotient
/// family. Errors when the family does not separate the window (radius too
/// large for the horizon); classification of the missed threads uses
/// `lookahead` extra levels.
pub fn complete_window(
    wg: &WindowGraph,
    qf: &QuotientFamily,
    sys: &ChainSystem,
    radius: u32,
    horizon: u32,
    lookahead: u32,
) -> Result<WindowCompletion, Error> {
    let window = wg.window(radius);
    let mut family = Vec::with_capacity(horizon as usize + 1);
    for n in 0..=horizon {
        let level = sys.level(n)?;
        family.push(qf.quotient_map(n, &window, &level)?);
    }
    let kernel = family
        .iter()
        .map(GraphMap::kernel_partition)
        .reduce(|a, b| a.meet(&b).expect("window kernels"))
        .ok_or(Error::EmptyFamily)?;
    if !kernel.is_discrete() {
        let blk = (0..kernel.block_count())
            .find(|&b| kernel.block_positions(b).len() > 1)
            .expect("non-discrete kernel");
        let members: Vec<&ElemId> = kernel.block_members(blk).collect();
        return Err(Error::NotSeparating(members[0].clone(), members[1].clone()));
    }
    let extension = extend_map(sys, &family)?;
    let truncation = extension.truncation;
    let theta = extension.map;

    let mut hit = vec![false; truncation.graph().combined().len()];
    for id in window.combined().iter() {
        let img = theta.apply(id)?;
        hit[truncation.graph().combined().require(img)? as usize] = true;
    }
    let missed: Vec<ElemId> = truncation
        .graph()
        .combined()
        .iter()
        .zip(hit.iter())
        .filter(|&(_, &h)| !h)
        .map(|(id, _)| id.clone())
        .collect();

    let classes = classify_level(sys, horizon, lookahead)?;
    let mut boundary = Vec::new();
    for (coord, class) in classes {
        if class == FiberClass::Boundary {
            let level_graph = sys.level(horizon)?;
            let kind = level_graph.kind(&coord)?;
            let thread = match kind {
                ElemKind::Vertex => truncation
                    .vertex_threads()
                    .iter()
                    .find(|t| t.coord(horizon) == &coord)
                    .map(|t| t.id(ElemKind::Vertex)),
                ElemKind::Edge => truncation
                    .edge_threads()
                    .iter()
                    .find(|t| t.coord(horizon) == &coord)
                    .map(|t| t.id(ElemKind::Edge)),
            };
            if let Some(t) = thread {
                boundary.push(t);
            }
        }
    }
    boundary.sort();

    Ok(WindowCompletion {
        truncation,
        theta,
        missed,
        boundary,
    })
}

/// The truncated completion of a window presentation has an isomorphic
/// image at matching horizons; this helper exposes the level-by-level setup
/// used by the command-line front end.
pub fn builtin_system(name: &str) -> Option<ChainSystem> {
    match name {
        "phi1" => Some(phi1_system()),
        "phi2" => Some(phi2_system()),
        _ => None,
    }
}

/// The quotient family belonging to a builtin system name.
pub fn builtin_quotients(name: &str) -> Option<QuotientFamily> {
    match name {
        "phi1" => Some(phi1_quotients()),
        "phi2" => Some(phi2_quotients()),
        _ => None,
    }
}
