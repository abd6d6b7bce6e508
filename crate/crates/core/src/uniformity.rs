//! Cofinite graphs presented by filter bases of compatible partitions:
//! separation, the closure operator, initial bases, finite uniform sums, and
//! uniform quotient graphs with the Hausdorff criterion.

use std::fmt;

use crate::error::Error;
use crate::relations::{Carrier, ElemId, Partition, SetMap};
use crate::topograph::{
    compatible_refinement, compatibility_check, quotient_graph, CompatibilityCheck,
    CompatiblePartition, FinGraph, GraphMap,
};

/// A finite graph together with a filter base of compatible partitions — the
/// fundamental system of entourages of a cofinite uniformity.
///
/// Construction normalizes the base: it is closed under pairwise meets,
/// deduplicated, and sorted coarsest first, so equal presentations are
/// structurally equal. The `improper` flag marks the degenerate quotient
/// uniformity whose only entourage is the single-block partition (which is
/// not compatible and is exempt from the compatibility invariant).
#[derive(Clone, PartialEq, Eq)]
pub struct CofinitePresentation {
    graph: FinGraph,
    base: Vec<Partition>,
    improper: bool,
}

impl CofinitePresentation {
    /// Builds a normalized presentation. Every member must be compatible
    /// with the graph and the member list must be nonempty.
    pub fn new(graph: &FinGraph, members: Vec<Partition>) -> Result<Self, Error> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for m in &members {
            if let CompatibilityCheck::Incompatible(v) = compatibility_check(graph, m)? {
                return Err(Error::Incompatible(v));
            }
        }
        let base = meet_closure(members)?;
        Ok(CofinitePresentation {
            graph: graph.clone(),
            base,
            improper: false,
        })
    }

    /// The degenerate presentation produced when a quotient has no
    /// entourages at all: its base is the single improper bound.
    pub(crate) fn improper(graph: &FinGraph) -> Self {
        CofinitePresentation {
            base: vec![Partition::single_block(graph.combined())],
            graph: graph.clone(),
            improper: true,
        }
    }

    pub fn graph(&self) -> &FinGraph {
        &self.graph
    }

    pub fn base(&self) -> &[Partition] {
        &self.base
    }

    pub fn is_improper(&self) -> bool {
        self.improper
    }

    /// Re-normalizes after adjoining extra members.
    pub fn with_members(&self, extra: Vec<Partition>) -> Result<Self, Error> {
        if self.improper {
            return Err(Error::ImproperBase);
        }
        let mut members = self.base.clone();
        members.extend(extra);
        CofinitePresentation::new(&self.graph, members)
    }

    /// True when the partition contains some base member as a relation,
    /// i.e. it behaves as an entourage of the presented uniformity.
    pub fn is_entourage(&self, s: &Partition) -> Result<bool, Error> {
        for r in &self.base {
            if r.refines(s)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The meet of the whole base: the finest resolution the base offers.
    pub fn total_meet(&self) -> Partition {
        let mut acc = self.base[0].clone();
        for r in &self.base[1..] {
            acc = acc.meet(r).expect("base members share a carrier");
        }
        acc
    }

    /// Whether the base separates points, with a witnessing inseparable pair
    /// when it does not.
    pub fn separation_check(&self) -> SeparationCheck {
        let meet = self.total_meet();
        for b in 0..meet.block_count() {
            let members: Vec<&ElemId> = meet.block_members(b).collect();
            if members.len() > 1 {
                return SeparationCheck::NotSeparating {
                    witness: (members[0].clone(), members[1].clone()),
                };
            }
        }
        SeparationCheck::Separating
    }

    pub fn is_separating(&self) -> bool {
        matches!(self.separation_check(), SeparationCheck::Separating)
    }

    /// The closure `Ā = ⋂_{R ∈ base} R[A]`, with every per-member image
    /// recorded.
    pub fn closure(&self, set: &[ElemId]) -> Result<ClosureReport, Error> {
        let carrier = self.graph.combined();
        let mut mask = vec![false; carrier.len()];
        for id in set {
            mask[carrier.require(id)? as usize] = true;
        }
        let mut images = Vec::with_capacity(self.base.len());
        let mut closure = vec![true; carrier.len()];
        for r in &self.base {
            let img = r.saturate_positions(&mask);
            for (c, keep) in closure.iter_mut().enumerate() {
                *keep &= img[c];
            }
            images.push(collect_ids(carrier, &img));
        }
        Ok(ClosureReport {
            input: collect_ids(carrier, &mask),
            closure: collect_ids(carrier, &closure),
            member_images: images,
            improper: self.improper,
        })
    }

    pub(crate) fn closure_positions(&self, mask: &[bool]) -> Vec<bool> {
        let mut closure = vec![true; mask.len()];
        for r in &self.base {
            let img = r.saturate_positions(mask);
            for (c, keep) in closure.iter_mut().enumerate() {
                *keep &= img[c];
            }
        }
        closure
    }
}

impl fmt::Debug for CofinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CofinitePresentation")
            .field("graph", &self.graph)
            .field("base", &self.base)
            .field("improper", &self.improper)
            .finish()
    }
}

fn collect_ids(carrier: &Carrier, mask: &[bool]) -> Vec<ElemId> {
    mask.iter()
        .enumerate()
        .filter(|&(_, &m)| m)
        .map(|(p, _)| carrier.elem(p as u32).clone())
        .collect()
}

/// Closes a member list under pairwise meets, deduplicates, and sorts
/// coarsest first.
fn meet_closure(members: Vec<Partition>) -> Result<Vec<Partition>, Error> {
    let mut base = members;
    base.sort_by(|a, b| a.canonical_cmp(b));
    base.dedup();
    let mut i = 0;
    while i < base.len() {
        for j in 0..i {
            let met = base[i].meet(&base[j])?;
            if !base.contains(&met) {
                base.push(met);
            }
        }
        i += 1;
    }
    base.sort_by(|a, b| a.canonical_cmp(b));
    base.dedup();
    Ok(base)
}

/// Outcome of [`CofinitePresentation::separation_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationCheck {
    Separating,
    NotSeparating { witness: (ElemId, ElemId) },
}

/// The closure of a subset together with the evidence used to compute it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub input: Vec<ElemId>,
    pub closure: Vec<ElemId>,
    /// `R[A]` for each base member, in base order.
    pub member_images: Vec<Vec<ElemId>>,
    /// Set when the presentation carries the improper base.
    pub improper: bool,
}

/// One leg of an initial-uniformity construction.
pub enum InitialArm<'a> {
    /// A map of graphs into a presented target.
    Graph {
        map: &'a GraphMap,
        target: &'a CofinitePresentation,
    },
    /// A plain map on the combined carrier into a base of partitions.
    Set {
        map: &'a SetMap,
        target_base: &'a [Partition],
    },
}

/// The coarsest presented uniformity on `graph` making every arm uniformly
/// continuous: all finite meets of pullbacks of target base members.
///
/// Pullbacks along maps of graphs are compatible as they stand; a pullback
/// along a plain set map that is not compatible is replaced by its
/// compatible refinement, which requires the graph to carry an orientation.
pub fn initial_base(graph: &FinGraph, arms: &[InitialArm<'_>]) -> Result<CofinitePresentation, Error> {
    if arms.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut members = Vec::new();
    for arm in arms {
        match arm {
            InitialArm::Graph { map, target } => {
                if map.source() != graph {
                    return Err(Error::CarrierMismatch {
                        context: "initial base arm source",
                    });
                }
                if map.target() != target.graph() {
                    return Err(Error::CarrierMismatch {
                        context: "initial base arm target",
                    });
                }
                let combined = map.combined_map();
                for r in target.base() {
                    members.push(combined.pullback(r)?);
                }
            }
            InitialArm::Set { map, target_base } => {
                if map.domain() != graph.combined() {
                    return Err(Error::CarrierMismatch {
                        context: "initial base arm source",
                    });
                }
                for r in *target_base {
                    let pulled = map.pullback(r)?;
                    let member = match compatibility_check(graph, &pulled)? {
                        CompatibilityCheck::Compatible => pulled,
                        CompatibilityCheck::Incompatible(_) => {
                            compatible_refinement(graph, &pulled)?.into_partition()
                        }
                    };
                    members.push(member);
                }
            }
        }
    }
    CofinitePresentation::new(graph, members)
}

/// Prefix applied to the local names of the `i`-th summand of a uniform
/// sum.
pub fn summand_prefix(i: usize) -> String {
    format!("s{i}/")
}

fn relabel_id(graph: &FinGraph, id: &ElemId, prefix: &str) -> ElemId {
    let local = crate::topograph::local_name(id);
    if graph.vertices().contains(id) {
        crate::topograph::vertex_id(&format!("{prefix}{local}"))
    } else {
        crate::topograph::edge_id(&format!("{prefix}{local}"))
    }
}

/// The uniform sum of finitely many presentations: the disjoint union of the
/// graphs (summand `i` renamed with [`summand_prefix`]) with base all unions
/// of one member per summand. Also returns the canonical inclusion of every
/// summand.
pub fn uniform_sum(
    summands: &[&CofinitePresentation],
) -> Result<(CofinitePresentation, Vec<GraphMap>), Error> {
    if summands.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if summands.iter().any(|s| s.is_improper()) {
        return Err(Error::ImproperBase);
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut orientation: Option<Vec<ElemId>> = if summands.iter().all(|s| s.graph().is_oriented())
    {
        Some(Vec::new())
    } else {
        None
    };
    for (i, s) in summands.iter().enumerate() {
        let g = s.graph();
        let pfx = summand_prefix(i);
        vertices.extend(g.vertices().iter().map(|v| relabel_id(g, v, &pfx)));
        for e in g.edges().iter() {
            edges.push((
                relabel_id(g, e, &pfx),
                relabel_id(g, g.inv_of(e)?, &pfx),
                relabel_id(g, g.src_of(e)?, &pfx),
                relabel_id(g, g.tgt_of(e)?, &pfx),
            ));
        }
        if let Some(orient) = orientation.as_mut() {
            for e in g.positive_edges().expect("oriented summand") {
                orient.push(relabel_id(g, e, &pfx));
            }
        }
    }
    let sum_graph = FinGraph::from_id_tuples(vertices, edges, orientation)?;

    // one member per choice of a member in every summand
    let mut choices: Vec<Vec<Vec<ElemId>>> = vec![Vec::new()];
    for (i, s) in summands.iter().enumerate() {
        let pfx = summand_prefix(i);
        let mut next = Vec::new();
        for partial in &choices {
            for r in s.base() {
                let mut blocks = partial.clone();
                for blk in r.blocks_ids() {
                    blocks.push(
                        blk.iter()
                            .map(|id| relabel_id(s.graph(), id, &pfx))
                            .collect(),
                    );
                }
                next.push(blocks);
            }
        }
        choices = next;
    }
    let members = choices
        .into_iter()
        .map(|blocks| Partition::from_blocks(sum_graph.combined(), blocks))
        .collect::<Result<Vec<_>, _>>()?;
    let sum = CofinitePresentation::new(&sum_graph, members)?;

    let inclusions = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let pfx = summand_prefix(i);
            let g = s.graph();
            GraphMap::from_fns(
                g.clone(),
                sum_graph.clone(),
                |v| relabel_id(g, v, &pfx),
                |e| relabel_id(g, e, &pfx),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((sum, inclusions))
}

/// The uniform quotient `Γ // K`: the quotient graph carrying the
/// pushforwards of the base members that contain `k`. When no member
/// contains `k` the quotient receives the improper base, flagged on the
/// result.
pub fn uniform_quotient(
    pres: &CofinitePresentation,
    k: &Partition,
) -> Result<(CofinitePresentation, GraphMap), Error> {
    if pres.is_improper() {
        return Err(Error::ImproperBase);
    }
    let compatible = CompatiblePartition::new(pres.graph(), k.clone())?;
    let (qgraph, projection) = quotient_graph(pres.graph(), &compatible)?;
    let q = projection.combined_map();
    let mut pushed = Vec::new();
    for r in pres.base() {
        if k.refines(r)? {
            pushed.push(q.pushforward(r)?);
        }
    }
    let quotient_pres = if pushed.is_empty() {
        CofinitePresentation::improper(&qgraph)
    } else {
        CofinitePresentation::new(&qgraph, pushed)?
    };
    Ok((quotient_pres, projection))
}

/// Outcome of [`hausdorff_quotient_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HausdorffCheck {
    Hausdorff,
    NotHausdorff { witness: (ElemId, ElemId) },
}

impl HausdorffCheck {
    pub fn holds(&self) -> bool {
        matches!(self, HausdorffCheck::Hausdorff)
    }
}

/// Whether `Γ // K` is Hausdorff: the intersection of the base members
/// containing `k` must equal `k` itself. A failing pair lies in the
/// intersection but not in `k`.
pub fn hausdorff_quotient_check(
    pres: &CofinitePresentation,
    k: &Partition,
) -> Result<HausdorffCheck, Error> {
    if pres.is_improper() {
        return Err(Error::ImproperBase);
    }
    CompatiblePartition::new(pres.graph(), k.clone())?;
    let carrier = pres.graph().combined();
    let mut acc: Option<Partition> = None;
    for r in pres.base() {
        if k.refines(r)? {
            acc = Some(match acc {
                None => r.clone(),
                Some(m) => m.meet(r)?,
            });
        }
    }
    let intersection = acc.unwrap_or_else(|| Partition::single_block(carrier));
    if &intersection == k {
        return Ok(HausdorffCheck::Hausdorff);
    }
    for b in 0..intersection.block_count() {
        let members: Vec<&ElemId> = intersection.block_members(b).collect();
        let first = members[0];
        for other in &members[1..] {
            if !k.same_block(first, other)? {
                return Ok(HausdorffCheck::NotHausdorff {
                    witness: (first.clone(), (*other).clone()),
                });
            }
        }
    }
    unreachable!("intersection differs from k, so some block splits")
}

/// Outcome of [`quotient_topology_agreement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgreementCheck {
    Agrees,
    Disagrees {
        witness_set: Vec<ElemId>,
        saturated_closure: Vec<ElemId>,
        entourage_intersection: Vec<ElemId>,
    },
}

impl AgreementCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AgreementCheck::Agrees)
    }
}

/// Compares, for every tested subset `A`, the smallest `k`-saturated closed
/// superset of `A` in the uniform topology with `⋂ { R[A] : k ⊆ R ∈ base }`.
/// Exhaustive for carriers of at most 10 elements, deterministically sampled
/// beyond; the reported witness is the lexicographically least failing set.
pub fn quotient_topology_agreement(
    pres: &CofinitePresentation,
    k: &Partition,
) -> Result<AgreementCheck, Error> {
    if pres.is_improper() {
        return Err(Error::ImproperBase);
    }
    CompatiblePartition::new(pres.graph(), k.clone())?;
    let carrier = pres.graph().combined();
    let n = carrier.len();
    let containing: Vec<&Partition> = pres
        .base()
        .iter()
        .filter(|r| k.refines(r).expect("same carrier"))
        .collect();

    struct Failure {
        key: Vec<u32>,
        mask: Vec<bool>,
        left: Vec<bool>,
        right: Vec<bool>,
    }
    let mut worst: Option<Failure> = None;
    let mut consider = |mask: Vec<bool>| {
        // smallest k-saturated closed superset: alternate closure and
        // saturation to the joint fixed point
        let mut left = mask.clone();
        loop {
            let grown = k.saturate_positions(&pres.closure_positions(&left));
            if grown == left {
                break;
            }
            left = grown;
        }
        let mut right = vec![true; n];
        for r in &containing {
            let img = r.saturate_positions(&mask);
            for (c, keep) in right.iter_mut().enumerate() {
                *keep &= img[c];
            }
        }
        if left != right {
            let key: Vec<u32> = mask
                .iter()
                .enumerate()
                .filter(|&(_, &m)| m)
                .map(|(p, _)| p as u32)
                .collect();
            if worst.as_ref().is_none_or(|best| key < best.key) {
                worst = Some(Failure {
                    key,
                    mask,
                    left,
                    right,
                });
            }
        }
    };

    if n <= 10 {
        for bits in 0u32..(1u32 << n) {
            consider((0..n).map(|p| bits >> p & 1 == 1).collect());
        }
    } else {
        // all singletons plus a deterministic sample of larger subsets
        for p in 0..n {
            let mut mask = vec![false; n];
            mask[p] = true;
            consider(mask);
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        for _ in 0..1024 {
            let mut mask = vec![false; n];
            for m in mask.iter_mut() {
                *m = next() & 1 == 1;
            }
            consider(mask);
        }
    }

    Ok(match worst {
        None => AgreementCheck::Agrees,
        Some(f) => AgreementCheck::Disagrees {
            witness_set: collect_ids(carrier, &f.mask),
            saturated_closure: collect_ids(carrier, &f.left),
            entourage_intersection: collect_ids(carrier, &f.right),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topograph::{edge_id, vertex_id};

    fn loop_graph() -> FinGraph {
        FinGraph::from_oriented(&["w"], &[("l", "w", "w")]).unwrap()
    }

    fn vertices_only(names: &[&str]) -> FinGraph {
        FinGraph::from_oriented(names, &[]).unwrap()
    }

    fn vpart(g: &FinGraph, blocks: &[&[&str]]) -> Partition {
        Partition::from_blocks(
            g.combined(),
            blocks
                .iter()
                .map(|blk| blk.iter().map(|v| vertex_id(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn singleton_base_normalizes_to_itself() {
        let g = loop_graph();
        let p = Partition::discrete(g.combined());
        let pres = CofinitePresentation::new(&g, vec![p.clone()]).unwrap();
        assert_eq!(pres.base(), &[p]);
    }

    #[test]
    fn missing_meet_is_added() {
        let g = vertices_only(&["a", "b", "c"]);
        let p1 = vpart(&g, &[&["a", "b"], &["c"]]);
        let p2 = vpart(&g, &[&["a"], &["b", "c"]]);
        let pres = CofinitePresentation::new(&g, vec![p1.clone(), p2.clone()]).unwrap();
        assert_eq!(pres.base().len(), 3);
        let meet = p1.meet(&p2).unwrap();
        assert!(pres.base().contains(&meet));
        // afterwards every pair has a lower bound in the base
        for a in pres.base() {
            for b in pres.base() {
                assert!(pres
                    .base()
                    .iter()
                    .any(|c| c.refines(a).unwrap() && c.refines(b).unwrap()));
            }
        }
    }

    #[test]
    fn incompatible_member_is_rejected() {
        let g = loop_graph();
        let bad = Partition::single_block(g.combined());
        assert!(matches!(
            CofinitePresentation::new(&g, vec![bad]),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn separation_examples() {
        let g = vertices_only(&["a", "b"]);
        let fine = CofinitePresentation::new(&g, vec![Partition::discrete(g.combined())]).unwrap();
        assert!(fine.is_separating());
        let coarse =
            CofinitePresentation::new(&g, vec![Partition::single_block(g.combined())]).unwrap();
        assert_eq!(
            coarse.separation_check(),
            SeparationCheck::NotSeparating {
                witness: (vertex_id("a"), vertex_id("b"))
            }
        );
    }

    #[test]
    fn closure_in_separating_base_is_identity_on_points() {
        let g = vertices_only(&["a", "b"]);
        let pres = CofinitePresentation::new(&g, vec![Partition::discrete(g.combined())]).unwrap();
        let report = pres.closure(&[vertex_id("a")]).unwrap();
        assert_eq!(report.closure, vec![vertex_id("a")]);
        assert_eq!(report.input, vec![vertex_id("a")]);
    }

    #[test]
    fn closure_under_single_block_is_everything() {
        let g = vertices_only(&["a", "b", "c"]);
        let pres =
            CofinitePresentation::new(&g, vec![Partition::single_block(g.combined())]).unwrap();
        let report = pres.closure(&[vertex_id("a")]).unwrap();
        assert_eq!(report.closure.len(), 3);
    }

    #[test]
    fn initial_base_along_identity_is_target_base() {
        let g = vertices_only(&["a", "b", "c"]);
        let target =
            CofinitePresentation::new(&g, vec![vpart(&g, &[&["a", "b"], &["c"]])]).unwrap();
        let id = GraphMap::identity(&g);
        let init = initial_base(
            &g,
            &[InitialArm::Graph {
                map: &id,
                target: &target,
            }],
        )
        .unwrap();
        assert_eq!(init.base(), target.base());
    }

    #[test]
    fn uniform_sum_restricts_to_summands() {
        let g1 = vertices_only(&["a", "b"]);
        let g2 = loop_graph();
        let p1 = CofinitePresentation::new(&g1, vec![vpart(&g1, &[&["a", "b"]])]).unwrap();
        let p2 = CofinitePresentation::new(&g2, vec![Partition::discrete(g2.combined())]).unwrap();
        let (sum, inclusions) = uniform_sum(&[&p1, &p2]).unwrap();
        assert_eq!(sum.graph().vertices().len(), 3);
        assert_eq!(sum.graph().edges().len(), 2);
        assert_eq!(inclusions.len(), 2);
        for inc in &inclusions {
            assert!(inc.validate().is_empty());
        }
        // restriction of any base member to a summand is a member there
        let sub = inclusions[0].combined_map();
        for member in sum.base() {
            let restricted = sub.pullback(member).unwrap();
            assert!(p1.base().contains(&restricted));
        }
    }

    #[test]
    fn quotient_by_diagonal_is_isomorphic_presentation() {
        let g = vertices_only(&["a", "b"]);
        let pres = CofinitePresentation::new(
            &g,
            vec![vpart(&g, &[&["a", "b"]]), Partition::discrete(g.combined())],
        )
        .unwrap();
        let (qpres, proj) = uniform_quotient(&pres, &Partition::discrete(g.combined())).unwrap();
        assert!(proj.is_bijective());
        assert_eq!(qpres.base().len(), pres.base().len());
        assert!(!qpres.is_improper());
    }

    #[test]
    fn quotient_by_base_member_is_discrete() {
        let g = vertices_only(&["a", "b", "c"]);
        let r = vpart(&g, &[&["a", "b"], &["c"]]);
        let pres =
            CofinitePresentation::new(&g, vec![r.clone(), Partition::discrete(g.combined())])
                .unwrap();
        let (qpres, _) = uniform_quotient(&pres, &r).unwrap();
        assert!(qpres
            .base()
            .contains(&Partition::discrete(qpres.graph().combined())));
        assert!(qpres.is_separating());
    }

    #[test]
    fn initial_base_of_a_subgraph_inclusion_restricts_the_base() {
        // the loop component sits inside the two-component graph
        let big = FinGraph::from_oriented(&["u", "v", "w"], &[("a", "u", "v"), ("l", "w", "w")])
            .unwrap();
        let sub = FinGraph::from_oriented(&["w"], &[("l", "w", "w")]).unwrap();
        let inclusion = GraphMap::from_fns(sub.clone(), big.clone(), |v| v.clone(), |e| e.clone())
            .unwrap();
        let member = Partition::from_blocks(
            big.combined(),
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
        let target = CofinitePresentation::new(&big, vec![member.clone()]).unwrap();
        let induced = initial_base(
            &sub,
            &[InitialArm::Graph {
                map: &inclusion,
                target: &target,
            }],
        )
        .unwrap();
        let restricted = member.restrict(sub.combined()).unwrap();
        assert_eq!(induced.base(), &[restricted]);
    }

    #[test]
    fn quotient_base_can_be_strictly_coarser_than_the_pushed_full_base() {
        // only the coarse member contains k, so the quotient loses the
        // resolution the discrete member would have provided
        let g = vertices_only(&["a", "b", "c", "d"]);
        let coarse = vpart(&g, &[&["a", "b", "c"], &["d"]]);
        let pres = CofinitePresentation::new(
            &g,
            vec![coarse.clone(), Partition::discrete(g.combined())],
        )
        .unwrap();
        let k = vpart(&g, &[&["a", "b"], &["c"], &["d"]]);
        let (qpres, proj) = uniform_quotient(&pres, &k).unwrap();
        assert!(!qpres.is_improper());
        let q = proj.combined_map();
        assert_eq!(qpres.base(), &[q.pushforward(&coarse).unwrap()]);
        assert!(!qpres
            .base()
            .contains(&Partition::discrete(qpres.graph().combined())));
        assert!(!qpres.is_separating());
    }

    #[test]
    fn quotient_with_no_containing_member_is_improper() {
        let g = vertices_only(&["a", "b", "c", "d"]);
        let r = vpart(&g, &[&["a", "b"], &["c"], &["d"]]);
        let pres = CofinitePresentation::new(&g, vec![r]).unwrap();
        let k = vpart(&g, &[&["a"], &["b", "c"], &["d"]]);
        let (qpres, _) = uniform_quotient(&pres, &k).unwrap();
        assert!(qpres.is_improper());
        assert_eq!(qpres.base().len(), 1);
        assert_eq!(qpres.base()[0].block_count(), 1);
    }

    #[test]
    fn hausdorff_check_examples() {
        let g = vertices_only(&["a", "b", "c"]);
        let r = vpart(&g, &[&["a", "b"], &["c"]]);
        let pres =
            CofinitePresentation::new(&g, vec![r.clone(), Partition::discrete(g.combined())])
                .unwrap();
        assert!(hausdorff_quotient_check(&pres, &r).unwrap().holds());

        let coarse_only = CofinitePresentation::new(&g, vec![r.clone()]).unwrap();
        let k = Partition::discrete(g.combined());
        match hausdorff_quotient_check(&coarse_only, &k).unwrap() {
            HausdorffCheck::NotHausdorff { witness } => {
                assert_eq!(witness, (vertex_id("a"), vertex_id("b")));
            }
            HausdorffCheck::Hausdorff => panic!("intersection is r, strictly above k"),
        }
    }

    #[test]
    fn agreement_for_diagonal_and_base_members() {
        let g = vertices_only(&["a", "b", "c"]);
        let r = vpart(&g, &[&["a", "b"], &["c"]]);
        let pres =
            CofinitePresentation::new(&g, vec![r.clone(), Partition::discrete(g.combined())])
                .unwrap();
        assert!(
            quotient_topology_agreement(&pres, &Partition::discrete(g.combined()))
                .unwrap()
                .holds()
        );
        assert!(quotient_topology_agreement(&pres, &r).unwrap().holds());
    }

    #[test]
    fn agreement_failure_regression_fixture() {
        // found by exhaustive search over small presentations: no base
        // member contains k, so the entourage side degenerates to the whole
        // carrier while the saturated closure stays proper
        let g = vertices_only(&["a", "b", "c", "d"]);
        let r = vpart(&g, &[&["a", "b"], &["c"], &["d"]]);
        let pres = CofinitePresentation::new(&g, vec![r]).unwrap();
        let k = vpart(&g, &[&["a"], &["b", "c"], &["d"]]);
        match quotient_topology_agreement(&pres, &k).unwrap() {
            AgreementCheck::Disagrees {
                witness_set,
                saturated_closure,
                entourage_intersection,
            } => {
                // least witness is the empty set: the empty intersection is
                // the whole carrier while the saturated closure stays empty
                assert_eq!(witness_set, Vec::<ElemId>::new());
                assert_eq!(saturated_closure, Vec::<ElemId>::new());
                assert_eq!(entourage_intersection.len(), 4);
            }
            AgreementCheck::Agrees => panic!("expected a disagreement witness"),
        }
    }
}
