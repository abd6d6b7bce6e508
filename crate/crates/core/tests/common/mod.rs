//! Shared helpers for the integration and acceptance suites: a deterministic
//! generator of random instances and independent brute-force oracles kept
//! apart from the library's own computation paths.

#![allow(dead_code)]

use cofinite::relations::{Carrier, ElemId, Partition, Relation, SetMap};
use cofinite::topograph::{FinGraph, GraphMap};
use cofinite::uniformity::CofinitePresentation;

/// SplitMix64; fixed seeds keep every suite reproducible.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }

    pub fn flip(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

pub fn small_carrier(rng: &mut TestRng, max: usize) -> Carrier {
    let n = 1 + rng.below(max);
    Carrier::new((0..n).map(|i| format!("x{i}"))).unwrap()
}

pub fn random_relation(rng: &mut TestRng, c: &Carrier) -> Relation {
    let n = c.len();
    let mut pairs = Vec::new();
    let count = rng.below(n * n + 1);
    for _ in 0..count {
        pairs.push((
            c.elem(rng.below(n) as u32).clone(),
            c.elem(rng.below(n) as u32).clone(),
        ));
    }
    Relation::new(c.clone(), c.clone(), pairs).unwrap()
}

pub fn random_partition(rng: &mut TestRng, c: &Carrier) -> Partition {
    if c.is_empty() {
        return Partition::discrete(c);
    }
    let blocks = 1 + rng.below(c.len());
    let labels: Vec<u32> = (0..c.len()).map(|_| rng.below(blocks) as u32).collect();
    let mut grouped: Vec<Vec<ElemId>> = vec![Vec::new(); blocks];
    for (i, &l) in labels.iter().enumerate() {
        grouped[l as usize].push(c.elem(i as u32).clone());
    }
    grouped.retain(|b| !b.is_empty());
    Partition::from_blocks(c, grouped).unwrap()
}

pub fn random_setmap(rng: &mut TestRng, dom: &Carrier, cod: &Carrier) -> SetMap {
    let assignment: Vec<(ElemId, ElemId)> = dom
        .iter()
        .map(|d| (d.clone(), cod.elem(rng.below(cod.len()) as u32).clone()))
        .collect();
    SetMap::new(dom.clone(), cod.clone(), assignment).unwrap()
}

/// A random surjection; requires `|dom| >= |cod|`.
pub fn random_surjection(rng: &mut TestRng, dom: &Carrier, cod: &Carrier) -> SetMap {
    assert!(dom.len() >= cod.len());
    let mut images: Vec<u32> = (0..cod.len() as u32).collect();
    for _ in cod.len()..dom.len() {
        images.push(rng.below(cod.len()) as u32);
    }
    for i in (1..images.len()).rev() {
        images.swap(i, rng.below(i + 1));
    }
    let assignment: Vec<(ElemId, ElemId)> = dom
        .iter()
        .zip(images.iter())
        .map(|(d, &i)| (d.clone(), cod.elem(i).clone()))
        .collect();
    SetMap::new(dom.clone(), cod.clone(), assignment).unwrap()
}

/// A random oriented graph with at most `max_vertices` vertices and
/// `max_pairs` edge pairs.
pub fn random_graph(rng: &mut TestRng, max_vertices: usize, max_pairs: usize) -> FinGraph {
    let nv = 1 + rng.below(max_vertices);
    let np = rng.below(max_pairs + 1);
    let vertices: Vec<String> = (0..nv).map(|i| format!("p{i}")).collect();
    let vrefs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    for i in 0..np {
        let s = rng.below(nv);
        let t = rng.below(nv);
        edges.push((format!("g{i}"), vertices[s].clone(), vertices[t].clone()));
    }
    let erefs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
        .collect();
    FinGraph::from_oriented(&vrefs, &erefs).unwrap()
}

/// A random compatible orientation-preserving partition, produced by
/// refining a random partition of the whole carrier.
pub fn random_compatible(rng: &mut TestRng, g: &FinGraph) -> Partition {
    let p = random_partition(rng, g.combined());
    cofinite::topograph::compatible_refinement(g, &p)
        .unwrap()
        .into_partition()
}

/// A random separating presentation on a random oriented graph.
pub fn random_separating_presentation(
    rng: &mut TestRng,
    max_vertices: usize,
    max_pairs: usize,
) -> CofinitePresentation {
    let g = random_graph(rng, max_vertices, max_pairs);
    let mut members = Vec::new();
    for _ in 0..(1 + rng.below(3)) {
        members.push(random_compatible(rng, &g));
    }
    let meet = members
        .iter()
        .cloned()
        .reduce(|a, b| a.meet(&b).unwrap())
        .unwrap();
    if !meet.is_discrete() || rng.flip() {
        members.push(Partition::discrete(g.combined()));
    }
    CofinitePresentation::new(&g, members).unwrap()
}

/// All partitions of a carrier, by restricted growth strings.
pub fn all_partitions(c: &Carrier) -> Vec<Partition> {
    let n = c.len();
    let mut out = Vec::new();
    let mut labels = vec![0u32; n];
    fn rec(labels: &mut Vec<u32>, pos: usize, maxl: u32, c: &Carrier, out: &mut Vec<Partition>) {
        if pos == labels.len() {
            let mut grouped: Vec<Vec<ElemId>> = vec![Vec::new(); maxl as usize];
            for (i, &l) in labels.iter().enumerate() {
                grouped[l as usize].push(c.elem(i as u32).clone());
            }
            out.push(Partition::from_blocks(c, grouped).unwrap());
            return;
        }
        for l in 0..=maxl {
            labels[pos] = l;
            let next_max = if l == maxl { maxl + 1 } else { maxl };
            rec(labels, pos + 1, next_max, c, out);
        }
    }
    if n == 0 {
        return vec![Partition::discrete(c)];
    }
    rec(&mut labels, 0, 0, c, &mut out);
    out
}

/// All partitions refining `p`: the product of the partitions of each block.
pub fn partitions_below(p: &Partition) -> Vec<Partition> {
    let carrier = p.carrier();
    let per_block: Vec<Vec<Vec<Vec<ElemId>>>> = (0..p.block_count())
        .map(|b| {
            let members: Vec<ElemId> = p.block_members(b).cloned().collect();
            let sub = Carrier::new(members.clone()).unwrap();
            all_partitions(&sub)
                .into_iter()
                .map(|q| q.blocks_ids())
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<Vec<ElemId>>> = vec![Vec::new()];
    for choices in per_block {
        let mut next = Vec::new();
        for partial in &out {
            for choice in &choices {
                let mut blocks = partial.clone();
                blocks.extend(choice.clone());
                next.push(blocks);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|blocks| Partition::from_blocks(carrier, blocks).unwrap())
        .collect()
}

/// All relations on a tiny carrier, by pair-set bitmask. Use only for
/// `c.len() <= 3`.
pub fn all_relations(c: &Carrier) -> Vec<Relation> {
    let n = c.len();
    let cells = n * n;
    assert!(cells <= 16, "exhaustive relation space too large");
    let mut out = Vec::with_capacity(1 << cells);
    for bits in 0u32..(1u32 << cells) {
        let mut pairs = Vec::new();
        for cell in 0..cells {
            if bits >> cell & 1 == 1 {
                pairs.push((
                    c.elem((cell / n) as u32).clone(),
                    c.elem((cell % n) as u32).clone(),
                ));
            }
        }
        out.push(Relation::new(c.clone(), c.clone(), pairs).unwrap());
    }
    out
}

/// Relation pair sets as position lists, for oracle-side computations that
/// must not reuse the library's relation algebra.
pub fn pair_set(r: &Relation) -> Vec<(u32, u32)> {
    let dom = r.domain();
    let cod = r.codomain();
    r.pairs()
        .map(|(a, b)| (dom.position(a).unwrap(), cod.position(b).unwrap()))
        .collect()
}

/// Oracle composition by triple loop.
pub fn compose_oracle(r: &Relation, s: &Relation) -> Vec<(u32, u32)> {
    let rp = pair_set(r);
    let sp = pair_set(s);
    let mut out = Vec::new();
    for &(x, y) in &rp {
        for &(y2, z) in &sp {
            if y == y2 && !out.contains(&(x, z)) {
                out.push((x, z));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Oracle reflexive-symmetric-transitive saturation by fixed-point
/// iteration over the pair matrix.
#[allow(clippy::needless_range_loop)]
pub fn closure_oracle(r: &Relation) -> Vec<Vec<bool>> {
    let n = r.domain().len();
    let mut m = vec![vec![false; n]; n];
    for (a, b) in pair_set(r) {
        m[a as usize][b as usize] = true;
    }
    for i in 0..n {
        m[i][i] = true;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if m[i][j] && !m[j][i] {
                    m[j][i] = true;
                    changed = true;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if m[i][j] {
                    for k in 0..n {
                        if m[j][k] && !m[i][k] {
                            m[i][k] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}

/// Direct statement of the compatibility conditions, independent of the
/// library's checker.
pub fn compat_oracle(g: &FinGraph, p: &Partition) -> bool {
    let ids: Vec<ElemId> = g.combined().iter().cloned().collect();
    for a in &ids {
        for b in &ids {
            if !p.same_block(a, b).unwrap() {
                continue;
            }
            let a_is_v = g.vertices().contains(a);
            let b_is_v = g.vertices().contains(b);
            if a_is_v != b_is_v {
                return false;
            }
            if !a_is_v {
                let sa = g.src_of(a).unwrap();
                let sb = g.src_of(b).unwrap();
                let ta = g.tgt_of(a).unwrap();
                let tb = g.tgt_of(b).unwrap();
                let ia = g.inv_of(a).unwrap();
                let ib = g.inv_of(b).unwrap();
                if !p.same_block(sa, sb).unwrap()
                    || !p.same_block(ta, tb).unwrap()
                    || !p.same_block(ia, ib).unwrap()
                {
                    return false;
                }
                if a == ib {
                    return false;
                }
            }
        }
    }
    true
}

/// Orientation preservation stated directly.
pub fn orientation_oracle(g: &FinGraph, p: &Partition) -> bool {
    let edges: Vec<ElemId> = g.edges().iter().cloned().collect();
    for a in &edges {
        for b in &edges {
            if p.same_block(a, b).unwrap()
                && g.is_positive(a).unwrap() != g.is_positive(b).unwrap()
            {
                return false;
            }
        }
    }
    true
}

/// Containment of partitions as relations, stated pairwise.
pub fn containment_oracle(fine: &Partition, coarse: &Partition) -> bool {
    let c = fine.carrier();
    for a in c.iter() {
        for b in c.iter() {
            if fine.same_block(a, b).unwrap() && !coarse.same_block(a, b).unwrap() {
                return false;
            }
        }
    }
    true
}

/// The finite topology generated by the basic sets `{ R[x] }` of a base,
/// with closure computed by the basis criterion: a point is in the closure
/// of `A` exactly when every basic open containing it meets `A`.
pub struct TopologyOracle {
    n: usize,
    basics: Vec<Vec<bool>>,
}

impl TopologyOracle {
    pub fn new(pres: &CofinitePresentation) -> Self {
        let carrier = pres.graph().combined();
        let n = carrier.len();
        let mut basics = Vec::new();
        for member in pres.base() {
            for x in carrier.iter() {
                let image = member.saturation(std::slice::from_ref(x)).unwrap();
                let mut mask = vec![false; n];
                for id in image {
                    mask[carrier.position(&id).unwrap() as usize] = true;
                }
                basics.push(mask);
            }
        }
        basics.sort();
        basics.dedup();
        TopologyOracle { n, basics }
    }

    pub fn closure(&self, set: &[bool]) -> Vec<bool> {
        let meets = |mask: &[bool]| mask.iter().zip(set).any(|(&m, &s)| m && s);
        (0..self.n)
            .map(|x| {
                self.basics
                    .iter()
                    .filter(|b| b[x])
                    .all(|b| meets(b))
            })
            .collect()
    }

    /// A set is open exactly when every point has a basic neighborhood
    /// inside it.
    pub fn is_open(&self, set: &[bool]) -> bool {
        (0..self.n).filter(|&x| set[x]).all(|x| {
            self.basics
                .iter()
                .any(|b| b[x] && b.iter().zip(set).all(|(&m, &s)| !m || s))
        })
    }
}

/// Closure of a pair set inside the square of a presented carrier:
/// `⋂_R R·W·R` computed with oracle-side pair sets.
pub fn product_closure_oracle(
    pres: &CofinitePresentation,
    w: &[(u32, u32)],
) -> Vec<(u32, u32)> {
    let n = pres.graph().combined().len();
    let mut keep = vec![true; n * n];
    for member in pres.base() {
        let block_of: Vec<usize> = pres
            .graph()
            .combined()
            .iter()
            .map(|id| member.block_index(id).unwrap())
            .collect();
        let blocks = member.block_count();
        // (a, b) ∈ R·W·R exactly when some (x, y) ∈ W has a ~ x and y ~ b
        let mut hit = vec![false; blocks * blocks];
        for &(x, y) in w {
            hit[block_of[x as usize] * blocks + block_of[y as usize]] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if !hit[block_of[a] * blocks + block_of[b]] {
                    keep[a * n + b] = false;
                }
            }
        }
    }
    (0..n as u32)
        .flat_map(|a| (0..n as u32).map(move |b| (a, b)))
        .filter(|&(a, b)| keep[a as usize * n + b as usize])
        .collect()
}

/// Threads as coherent tuples found by exhaustive search over the product
/// of the levels, for cross-checking truncations of tiny systems.
pub fn brute_force_threads(
    levels: &[&FinGraph],
    bonds: &[&GraphMap],
) -> Vec<Vec<ElemId>> {
    let mut tuples: Vec<Vec<ElemId>> = levels[0].combined().iter().map(|id| vec![id.clone()]).collect();
    for (k, level) in levels.iter().enumerate().skip(1) {
        let mut next = Vec::new();
        for tuple in &tuples {
            for id in level.combined().iter() {
                if bonds[k - 1].apply(id).unwrap() == tuple.last().unwrap() {
                    let mut t = tuple.clone();
                    t.push(id.clone());
                    next.push(t);
                }
            }
        }
        tuples = next;
    }
    tuples
}
