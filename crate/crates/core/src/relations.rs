//! Exact algebra of binary relations and equivalence relations on finite
//! carrier sets.
//!
//! A [`Carrier`] is a sorted set of opaque identifiers, a [`Relation`] a
//! deduplicated sorted pair set, and a [`Partition`] a block family stored
//! canonically (blocks ordered by least member). Structural equality is
//! therefore semantic equality, and every operation is a pure function.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::Error;

/// An opaque element identifier, namespaced by its carrier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(Arc<str>);

impl ElemId {
    pub fn new(s: impl AsRef<str>) -> Self {
        ElemId(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ElemId {
    fn from(s: &str) -> Self {
        ElemId::new(s)
    }
}

impl From<String> for ElemId {
    fn from(s: String) -> Self {
        ElemId::new(s)
    }
}

impl From<&ElemId> for ElemId {
    fn from(s: &ElemId) -> Self {
        s.clone()
    }
}

impl fmt::Display for ElemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ElemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

struct CarrierInner {
    elems: Vec<ElemId>,
    index: HashMap<ElemId, u32>,
}

/// A finite ordered set of distinct element identifiers.
///
/// Iteration order is canonical (sorted) and stable. Carriers are cheaply
/// clonable and compared by content.
#[derive(Clone)]
pub struct Carrier {
    inner: Arc<CarrierInner>,
}

impl Carrier {
    pub fn new<I, T>(ids: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<ElemId>,
    {
        let mut elems: Vec<ElemId> = ids.into_iter().map(Into::into).collect();
        elems.sort();
        for w in elems.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0].clone()));
            }
        }
        let index = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        Ok(Carrier {
            inner: Arc::new(CarrierInner { elems, index }),
        })
    }

    pub fn empty() -> Self {
        Carrier::new(Vec::<ElemId>::new()).expect("empty carrier")
    }

    pub fn len(&self) -> usize {
        self.inner.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.elems.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ElemId> {
        self.inner.elems.iter()
    }

    pub fn contains(&self, id: &ElemId) -> bool {
        self.inner.index.contains_key(id)
    }

    pub fn position(&self, id: &ElemId) -> Option<u32> {
        self.inner.index.get(id).copied()
    }

    pub fn elem(&self, pos: u32) -> &ElemId {
        &self.inner.elems[pos as usize]
    }

    pub(crate) fn require(&self, id: &ElemId) -> Result<u32, Error> {
        self.position(id)
            .ok_or_else(|| Error::UnknownElement(id.clone()))
    }

    /// Disjoint union with another carrier; shared identifiers are an error.
    pub fn merged(&self, other: &Carrier) -> Result<Carrier, Error> {
        for id in other.iter() {
            if self.contains(id) {
                return Err(Error::DuplicateElement(id.clone()));
            }
        }
        Carrier::new(self.iter().chain(other.iter()).cloned())
    }

    /// True when every element of `self` lies in `other`.
    pub fn subset_of(&self, other: &Carrier) -> bool {
        self.iter().all(|id| other.contains(id))
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.elems == other.inner.elems
    }
}

impl Eq for Carrier {}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.inner.elems.iter()).finish()
    }
}

fn same_carrier(a: &Carrier, b: &Carrier, context: &'static str) -> Result<(), Error> {
    if a == b {
        Ok(())
    } else {
        Err(Error::CarrierMismatch { context })
    }
}

/// A binary relation from one carrier to another, as a canonical sorted pair
/// set.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    domain: Carrier,
    codomain: Carrier,
    pairs: Vec<(u32, u32)>,
}

impl Relation {
    pub fn new<I>(domain: Carrier, codomain: Carrier, pairs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (ElemId, ElemId)>,
    {
        let mut ps = Vec::new();
        for (a, b) in pairs {
            ps.push((domain.require(&a)?, codomain.require(&b)?));
        }
        Ok(Relation::from_positions(domain, codomain, ps))
    }

    pub(crate) fn from_positions(
        domain: Carrier,
        codomain: Carrier,
        mut pairs: Vec<(u32, u32)>,
    ) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Relation {
            domain,
            codomain,
            pairs,
        }
    }

    /// The diagonal relation `D(X)` on a carrier.
    pub fn diagonal(c: &Carrier) -> Self {
        let pairs = (0..c.len() as u32).map(|p| (p, p)).collect();
        Relation {
            domain: c.clone(),
            codomain: c.clone(),
            pairs,
        }
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&ElemId, &ElemId)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (self.domain.elem(a), self.codomain.elem(b)))
    }

    pub fn contains(&self, a: &ElemId, b: &ElemId) -> bool {
        match (self.domain.position(a), self.codomain.position(b)) {
            (Some(pa), Some(pb)) => self.contains_pos(pa, pb),
            _ => false,
        }
    }

    fn contains_pos(&self, a: u32, b: u32) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    fn succ(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.domain.len()];
        for &(a, b) in &self.pairs {
            adj[a as usize].push(b);
        }
        adj
    }

    /// Composition in application order: `self` first, then `second`.
    pub fn compose(&self, second: &Relation) -> Result<Relation, Error> {
        same_carrier(&self.codomain, &second.domain, "relation composition")?;
        let adj = second.succ();
        let mut out = Vec::new();
        for &(x, y) in &self.pairs {
            for &z in &adj[y as usize] {
                out.push((x, z));
            }
        }
        Ok(Relation::from_positions(
            self.domain.clone(),
            second.codomain.clone(),
            out,
        ))
    }

    pub fn inverse(&self) -> Relation {
        let pairs = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        Relation::from_positions(self.codomain.clone(), self.domain.clone(), pairs)
    }

    /// `R[A]`, the union of the images of the elements of `set`.
    pub fn image(&self, set: &[ElemId]) -> Result<Vec<ElemId>, Error> {
        let mut member = vec![false; self.domain.len()];
        for id in set {
            member[self.domain.require(id)? as usize] = true;
        }
        let mut hit = vec![false; self.codomain.len()];
        for &(a, b) in &self.pairs {
            if member[a as usize] {
                hit[b as usize] = true;
            }
        }
        Ok(hit
            .iter()
            .enumerate()
            .filter(|&(_, &h)| h)
            .map(|(p, _)| self.codomain.elem(p as u32).clone())
            .collect())
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, Error> {
        same_carrier(&self.domain, &other.domain, "relation union")?;
        same_carrier(&self.codomain, &other.codomain, "relation union")?;
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        Ok(Relation::from_positions(
            self.domain.clone(),
            self.codomain.clone(),
            pairs,
        ))
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation, Error> {
        same_carrier(&self.domain, &other.domain, "relation intersection")?;
        same_carrier(&self.codomain, &other.codomain, "relation intersection")?;
        let pairs = self
            .pairs
            .iter()
            .filter(|&&(a, b)| other.contains_pos(a, b))
            .copied()
            .collect();
        Ok(Relation::from_positions(
            self.domain.clone(),
            self.codomain.clone(),
            pairs,
        ))
    }

    pub fn is_subrelation_of(&self, other: &Relation) -> Result<bool, Error> {
        same_carrier(&self.domain, &other.domain, "relation containment")?;
        same_carrier(&self.codomain, &other.codomain, "relation containment")?;
        Ok(self.pairs.iter().all(|&(a, b)| other.contains_pos(a, b)))
    }

    /// The smallest equivalence relation containing a square relation,
    /// computed by union-merging the endpoints of each pair.
    pub fn equivalence_closure(&self) -> Result<Partition, Error> {
        same_carrier(&self.domain, &self.codomain, "equivalence closure")?;
        let mut uf = UnionFind::new(self.domain.len());
        for &(a, b) in &self.pairs {
            uf.union(a, b);
        }
        let labels: Vec<u32> = (0..self.domain.len() as u32).map(|p| uf.find(p)).collect();
        Ok(Partition::from_labels(self.domain.clone(), labels))
    }

    /// Checks the three equivalence-relation axioms, returning a witness for
    /// the first that fails.
    pub fn equivalence_check(&self) -> Result<EquivalenceCheck, Error> {
        same_carrier(&self.domain, &self.codomain, "equivalence check")?;
        for p in 0..self.domain.len() as u32 {
            if !self.contains_pos(p, p) {
                return Ok(EquivalenceCheck::NotReflexive(self.domain.elem(p).clone()));
            }
        }
        for &(a, b) in &self.pairs {
            if !self.contains_pos(b, a) {
                return Ok(EquivalenceCheck::NotSymmetric(
                    self.domain.elem(a).clone(),
                    self.domain.elem(b).clone(),
                ));
            }
        }
        let adj = self.succ();
        for &(a, b) in &self.pairs {
            for &c in &adj[b as usize] {
                if !self.contains_pos(a, c) {
                    return Ok(EquivalenceCheck::NotTransitive(
                        self.domain.elem(a).clone(),
                        self.domain.elem(c).clone(),
                    ));
                }
            }
        }
        Ok(EquivalenceCheck::Equivalence(self.equivalence_closure()?))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.pairs().map(|(a, b)| (a.clone(), b.clone())))
            .finish()
    }
}

/// Outcome of [`Relation::equivalence_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceCheck {
    Equivalence(Partition),
    NotReflexive(ElemId),
    NotSymmetric(ElemId, ElemId),
    NotTransitive(ElemId, ElemId),
}

impl EquivalenceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, EquivalenceCheck::Equivalence(_))
    }
}

/// An equivalence relation with finitely many classes, stored as its block
/// family.
///
/// Blocks are ordered by least member and each block is sorted, so two
/// partitions are equal exactly when they induce the same relation.
#[derive(Clone, PartialEq, Eq)]
pub struct Partition {
    carrier: Carrier,
    block_of: Vec<u32>,
    blocks: Vec<Vec<u32>>,
}

impl Partition {
    /// The discrete partition (every element its own block); the relation
    /// view is the diagonal.
    pub fn discrete(c: &Carrier) -> Self {
        let labels: Vec<u32> = (0..c.len() as u32).collect();
        Partition::from_labels(c.clone(), labels)
    }

    /// The single-block partition; the relation view is all of `X × X`.
    pub fn single_block(c: &Carrier) -> Self {
        let labels: Vec<u32> = vec![0; c.len()];
        Partition::from_labels(c.clone(), labels)
    }

    pub fn from_blocks(c: &Carrier, blocks: Vec<Vec<ElemId>>) -> Result<Self, Error> {
        let mut label = vec![u32::MAX; c.len()];
        for (b, members) in blocks.iter().enumerate() {
            for id in members {
                let p = c.require(id)? as usize;
                if label[p] != u32::MAX {
                    return Err(Error::DuplicateElement(id.clone()));
                }
                label[p] = b as u32;
            }
        }
        if let Some(p) = label.iter().position(|&l| l == u32::MAX) {
            return Err(Error::UnknownElement(c.elem(p as u32).clone()));
        }
        Ok(Partition::from_labels(c.clone(), label))
    }

    /// Builds the canonical form from arbitrary per-element labels: elements
    /// share a block exactly when their labels agree.
    pub(crate) fn from_labels<L, I>(carrier: Carrier, labels: I) -> Self
    where
        L: Eq + Hash,
        I: IntoIterator<Item = L>,
    {
        let mut remap: HashMap<L, u32> = HashMap::new();
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let mut block_of = Vec::with_capacity(carrier.len());
        for (pos, lbl) in labels.into_iter().enumerate() {
            let b = *remap.entry(lbl).or_insert_with(|| {
                blocks.push(Vec::new());
                (blocks.len() - 1) as u32
            });
            blocks[b as usize].push(pos as u32);
            block_of.push(b);
        }
        debug_assert_eq!(block_of.len(), carrier.len());
        Partition {
            carrier,
            block_of,
            blocks,
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.carrier.len()
    }

    pub fn block_index(&self, id: &ElemId) -> Result<usize, Error> {
        Ok(self.block_of[self.carrier.require(id)? as usize] as usize)
    }

    pub(crate) fn block_of_positions(&self) -> &[u32] {
        &self.block_of
    }

    pub(crate) fn block_positions(&self, b: usize) -> &[u32] {
        &self.blocks[b]
    }

    pub fn block_members(&self, b: usize) -> impl Iterator<Item = &ElemId> {
        self.blocks[b].iter().map(|&p| self.carrier.elem(p))
    }

    pub fn blocks_ids(&self) -> Vec<Vec<ElemId>> {
        self.blocks
            .iter()
            .map(|blk| blk.iter().map(|&p| self.carrier.elem(p).clone()).collect())
            .collect()
    }

    pub fn same_block(&self, a: &ElemId, b: &ElemId) -> Result<bool, Error> {
        Ok(self.block_of[self.carrier.require(a)? as usize]
            == self.block_of[self.carrier.require(b)? as usize])
    }

    /// The relation view: all pairs within a common block.
    pub fn to_relation(&self) -> Relation {
        let mut pairs = Vec::new();
        for blk in &self.blocks {
            for &a in blk {
                for &b in blk {
                    pairs.push((a, b));
                }
            }
        }
        Relation::from_positions(self.carrier.clone(), self.carrier.clone(), pairs)
    }

    /// Blockwise intersection; the relation view is `R1 ∩ R2`.
    pub fn meet(&self, other: &Partition) -> Result<Partition, Error> {
        same_carrier(&self.carrier, &other.carrier, "partition meet")?;
        let labels: Vec<(u32, u32)> = self
            .block_of
            .iter()
            .zip(other.block_of.iter())
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(Partition::from_labels(self.carrier.clone(), labels))
    }

    /// Pairwise join: the equivalence relation generated by `R1 ∪ R2`.
    pub fn join(&self, other: &Partition) -> Result<Partition, Error> {
        same_carrier(&self.carrier, &other.carrier, "partition join")?;
        let mut uf = UnionFind::new(self.carrier.len());
        for blk in self.blocks.iter().chain(other.blocks.iter()) {
            for w in blk.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let labels: Vec<u32> = (0..self.carrier.len() as u32).map(|p| uf.find(p)).collect();
        Ok(Partition::from_labels(self.carrier.clone(), labels))
    }

    /// True when `self ⊆ other` as relations, i.e. every block of `self`
    /// lies inside a block of `other`. Tested blockwise, without
    /// materializing pair sets.
    pub fn refines(&self, other: &Partition) -> Result<bool, Error> {
        same_carrier(&self.carrier, &other.carrier, "partition refinement")?;
        for blk in &self.blocks {
            let target = other.block_of[blk[0] as usize];
            if blk.iter().any(|&p| other.block_of[p as usize] != target) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `R[A]` for the relation view of the partition: the union of all
    /// blocks meeting `set`.
    pub fn saturation(&self, set: &[ElemId]) -> Result<Vec<ElemId>, Error> {
        let mut mask = vec![false; self.carrier.len()];
        for id in set {
            mask[self.carrier.require(id)? as usize] = true;
        }
        let sat = self.saturate_positions(&mask);
        Ok(sat
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m)
            .map(|(p, _)| self.carrier.elem(p as u32).clone())
            .collect())
    }

    pub(crate) fn saturate_positions(&self, mask: &[bool]) -> Vec<bool> {
        let mut block_hit = vec![false; self.blocks.len()];
        for (p, &m) in mask.iter().enumerate() {
            if m {
                block_hit[self.block_of[p] as usize] = true;
            }
        }
        let mut out = vec![false; mask.len()];
        for (b, &hit) in block_hit.iter().enumerate() {
            if hit {
                for &p in &self.blocks[b] {
                    out[p as usize] = true;
                }
            }
        }
        out
    }

    /// Restriction `R ∩ (A × A)` to a sub-carrier.
    pub fn restrict(&self, sub: &Carrier) -> Result<Partition, Error> {
        let mut labels = Vec::with_capacity(sub.len());
        for id in sub.iter() {
            labels.push(self.block_of[self.carrier.require(id)? as usize]);
        }
        Ok(Partition::from_labels(sub.clone(), labels))
    }

    /// A total order on partitions of one carrier, coarsest first; used to
    /// keep base lists canonical.
    pub fn canonical_cmp(&self, other: &Partition) -> std::cmp::Ordering {
        self.blocks
            .len()
            .cmp(&other.blocks.len())
            .then_with(|| self.blocks.cmp(&other.blocks))
    }

    /// The commuting product of two partitions: if the relation products
    /// `R1R2` and `R2R1` agree, both equal the join `⟨R1 ∪ R2⟩`, which is
    /// returned; otherwise a witnessing pair in the symmetric difference of
    /// the two products.
    pub fn commuting_product(&self, other: &Partition) -> Result<CommutingProduct, Error> {
        same_carrier(&self.carrier, &other.carrier, "commuting product")?;
        let n = self.carrier.len();
        // the image of x under R1R2 depends only on the R2-block of x, and dually
        let through = |outer: &Partition, inner: &Partition| -> Vec<Vec<bool>> {
            inner
                .blocks
                .iter()
                .map(|blk| {
                    let mut hit = vec![false; n];
                    for &y in blk {
                        for &z in outer.block_positions(outer.block_of[y as usize] as usize) {
                            hit[z as usize] = true;
                        }
                    }
                    hit
                })
                .collect()
        };
        let r1r2 = through(self, other);
        let r2r1 = through(other, self);
        for x in 0..n {
            let im12 = &r1r2[other.block_of[x] as usize];
            let im21 = &r2r1[self.block_of[x] as usize];
            if im12 != im21 {
                let z = (0..n)
                    .find(|&z| im12[z] != im21[z])
                    .expect("differing images");
                return Ok(CommutingProduct::NotCommuting {
                    witness: (
                        self.carrier.elem(x as u32).clone(),
                        self.carrier.elem(z as u32).clone(),
                    ),
                });
            }
        }
        Ok(CommutingProduct::Commutes(self.join(other)?))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut outer = f.debug_set();
        for b in 0..self.blocks.len() {
            outer.entry(&DebugBlock(self, b));
        }
        outer.finish()
    }
}

struct DebugBlock<'a>(&'a Partition, usize);

impl fmt::Debug for DebugBlock<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.block_members(self.1)).finish()
    }
}

/// Outcome of [`Partition::commuting_product`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutingProduct {
    Commutes(Partition),
    NotCommuting { witness: (ElemId, ElemId) },
}

/// A total function between carriers.
#[derive(Clone, PartialEq, Eq)]
pub struct SetMap {
    domain: Carrier,
    codomain: Carrier,
    map: Vec<u32>,
}

impl SetMap {
    pub fn new<I>(domain: Carrier, codomain: Carrier, assignment: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (ElemId, ElemId)>,
    {
        let mut map = vec![u32::MAX; domain.len()];
        for (a, b) in assignment {
            let pa = domain.require(&a)? as usize;
            if map[pa] != u32::MAX {
                return Err(Error::DuplicateElement(a));
            }
            map[pa] = codomain.require(&b)?;
        }
        if let Some(p) = map.iter().position(|&v| v == u32::MAX) {
            return Err(Error::UnknownElement(domain.elem(p as u32).clone()));
        }
        Ok(SetMap {
            domain,
            codomain,
            map,
        })
    }

    pub fn from_fn<F>(domain: Carrier, codomain: Carrier, f: F) -> Result<Self, Error>
    where
        F: Fn(&ElemId) -> ElemId,
    {
        let mut map = Vec::with_capacity(domain.len());
        for id in domain.iter() {
            map.push(codomain.require(&f(id))?);
        }
        Ok(SetMap {
            domain,
            codomain,
            map,
        })
    }

    pub fn identity(c: &Carrier) -> Self {
        SetMap {
            domain: c.clone(),
            codomain: c.clone(),
            map: (0..c.len() as u32).collect(),
        }
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn apply(&self, id: &ElemId) -> Result<&ElemId, Error> {
        let p = self.domain.require(id)?;
        Ok(self.codomain.elem(self.map[p as usize]))
    }

    pub(crate) fn apply_pos(&self, p: u32) -> u32 {
        self.map[p as usize]
    }

    /// Composition in application order: `self` first, then `second`.
    pub fn compose(&self, second: &SetMap) -> Result<SetMap, Error> {
        same_carrier(&self.codomain, &second.domain, "map composition")?;
        Ok(SetMap {
            domain: self.domain.clone(),
            codomain: second.codomain.clone(),
            map: self.map.iter().map(|&v| second.map[v as usize]).collect(),
        })
    }

    /// The graph of the function as a relation.
    pub fn graph_relation(&self) -> Relation {
        let pairs = self
            .map
            .iter()
            .enumerate()
            .map(|(a, &b)| (a as u32, b))
            .collect();
        Relation::from_positions(self.domain.clone(), self.codomain.clone(), pairs)
    }

    /// `None` when surjective, otherwise a codomain element with no preimage.
    pub fn surjectivity_witness(&self) -> Option<ElemId> {
        let mut hit = vec![false; self.codomain.len()];
        for &v in &self.map {
            hit[v as usize] = true;
        }
        hit.iter()
            .position(|&h| !h)
            .map(|p| self.codomain.elem(p as u32).clone())
    }

    /// The fibers of the map as a partition of the domain.
    pub fn kernel(&self) -> Partition {
        Partition::from_labels(self.domain.clone(), self.map.iter().copied())
    }

    /// `(f × f)⁻¹[R]` for a partition on the codomain: elements are related
    /// exactly when their images share a block.
    pub fn pullback(&self, p: &Partition) -> Result<Partition, Error> {
        same_carrier(self.codomain(), p.carrier(), "pullback")?;
        let labels: Vec<u32> = self
            .map
            .iter()
            .map(|&v| p.block_of_positions()[v as usize])
            .collect();
        Ok(Partition::from_labels(self.domain.clone(), labels))
    }

    /// `(f × f)[S]` for a surjective map and a partition refined by the
    /// kernel: blocks map to blocks, and `pullback(pushforward(p)) = p`.
    pub fn pushforward(&self, p: &Partition) -> Result<Partition, Error> {
        same_carrier(self.domain(), p.carrier(), "pushforward")?;
        if let Some(missing) = self.surjectivity_witness() {
            return Err(Error::NotSurjective(missing));
        }
        let mut fiber_rep: Vec<u32> = vec![u32::MAX; self.codomain.len()];
        for (a, &v) in self.map.iter().enumerate() {
            let rep = &mut fiber_rep[v as usize];
            if *rep == u32::MAX {
                *rep = a as u32;
            } else if p.block_of_positions()[*rep as usize] != p.block_of_positions()[a] {
                return Err(Error::KernelNotRefining(
                    self.domain.elem(*rep).clone(),
                    self.domain.elem(a as u32).clone(),
                ));
            }
        }
        let labels: Vec<u32> = fiber_rep
            .iter()
            .map(|&rep| p.block_of_positions()[rep as usize])
            .collect();
        Ok(Partition::from_labels(self.codomain.clone(), labels))
    }
}

impl fmt::Debug for SetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (a, &b) in self.map.iter().enumerate() {
            m.entry(self.domain.elem(a as u32), self.codomain.elem(b));
        }
        m.finish()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) {
        // merge into the smaller root so representatives stay least elements
        let ra = self.find(a);
        let rb = self.find(b);
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else {
            self.parent[ra as usize] = rb;
        }
    }
}
