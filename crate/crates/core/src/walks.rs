//! Cyclic walks on a vertex set, cycles on a quiver, multisets of either,
//! and prime cycles.
//!
//! Both kinds of cycle are stored in their lexicographically minimal
//! rotation: a cyclic walk by its vertex sequence, a cycle on a quiver by its
//! edge-index sequence.

use std::fmt;

use petgraph::algo::tarjan_scc;

use crate::quiver::Quiver;
use crate::{Error, Result};

/// Lexicographically minimal rotation.
pub fn canonical_rotation(seq: &[usize]) -> Vec<usize> {
    let k = seq.len();
    let best =
        (0..k).min_by(|&r, &s| (0..k).map(|i| seq[(r + i) % k]).cmp((0..k).map(|i| seq[(s + i) % k]))).unwrap_or(0);
    (0..k).map(|i| seq[(best + i) % k]).collect()
}

fn is_canonical(seq: &[usize]) -> bool {
    let k = seq.len();
    (1..k).all(|r| (0..k).map(|i| seq[(r + i) % k]).ge(seq.iter().copied()))
}

/// Order of the rotation stabiliser: `k / (smallest period)`.
pub fn sequence_valuation(seq: &[usize]) -> usize {
    let k = seq.len();
    if k == 0 {
        return 1;
    }
    let period = (1..=k).find(|&d| k.is_multiple_of(d) && (0..k).all(|i| seq[i] == seq[(i + d) % k])).unwrap();
    k / period
}

/// Cyclic walk `⟪a_1,…,a_k⟫` on `0..p` (displayed 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWalk(Vec<usize>);

impl CyclicWalk {
    /// Fails unless `seq` has length ≥ 2 and cyclically adjacent entries
    /// differ.
    pub fn new(seq: &[usize]) -> Result<Self> {
        let k = seq.len();
        if k < 2 {
            return Err(Error::Dimension("a cyclic walk needs at least two entries".into()));
        }
        if (0..k).any(|i| seq[i] == seq[(i + 1) % k]) {
            return Err(Error::Dimension("successive entries of a cyclic walk must differ".into()));
        }
        Ok(Self(canonical_rotation(seq)))
    }

    /// Builds from 1-based vertex labels.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::Dimension("vertex labels are 1-based".into()));
        }
        Self::new(&labels.iter().map(|a| a - 1).collect::<Vec<_>>())
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn valuation(&self) -> usize {
        sequence_valuation(&self.0)
    }

    pub fn power(&self, m: usize) -> Self {
        assert!(m >= 1);
        Self(self.0.repeat(m))
    }

    pub fn prime_root(&self) -> Self {
        Self(self.0[..self.len() / self.valuation()].to_vec())
    }

    pub fn visits(&self, p: usize) -> Vec<usize> {
        let mut v = vec![0; p];
        for &a in &self.0 {
            v[a] += 1;
        }
        v
    }
}

impl AsRef<[usize]> for CyclicWalk {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for CyclicWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "⟪{}⟫", labels.join(","))
    }
}

/// Cycle on a quiver: a cyclically well-chained sequence of edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GCycle {
    edges: Vec<usize>,
    /// Source vertex of each edge.
    verts: Vec<usize>,
}

impl GCycle {
    pub fn new(q: &Quiver, edges: &[usize]) -> Result<Self> {
        let k = edges.len();
        if k == 0 {
            return Err(Error::Dimension("empty cycle".into()));
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= q.edge_count()) {
            return Err(Error::Dimension(format!("edge index {e} out of range")));
        }
        for i in 0..k {
            if q.edge(edges[i]).tgt != q.edge(edges[(i + 1) % k]).src {
                return Err(Error::Dimension(format!(
                    "edges {} and {} are not chained",
                    q.edge(edges[i]).id,
                    q.edge(edges[(i + 1) % k]).id
                )));
            }
        }
        let edges = canonical_rotation(edges);
        let verts = edges.iter().map(|&e| q.edge(e).src).collect();
        Ok(Self { edges, verts })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// Source vertices of the edges, in cycle order.
    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn valuation(&self) -> usize {
        sequence_valuation(&self.edges)
    }

    pub fn power(&self, m: usize) -> Self {
        assert!(m >= 1);
        Self { edges: self.edges.repeat(m), verts: self.verts.repeat(m) }
    }

    pub fn prime_root(&self) -> Self {
        let k = self.len() / self.valuation();
        Self { edges: self.edges[..k].to_vec(), verts: self.verts[..k].to_vec() }
    }

    /// The cyclic walk traced on the vertices.
    pub fn project(&self) -> CyclicWalk {
        CyclicWalk(canonical_rotation(&self.verts))
    }

    pub fn visits(&self, p: usize) -> Vec<usize> {
        let mut v = vec![0; p];
        for &a in &self.verts {
            v[a] += 1;
        }
        v
    }

    /// Traversal count of every edge.
    pub fn edge_counts(&self, m: usize) -> Vec<usize> {
        let mut c = vec![0; m];
        for &e in &self.edges {
            c[e] += 1;
        }
        c
    }

    /// Edge ids, e.g. `(e1,e2)`.
    pub fn display(&self, q: &Quiver) -> String {
        let ids: Vec<&str> = self.edges.iter().map(|&e| q.edge(e).id.as_str()).collect();
        format!("({})", ids.join(","))
    }
}

/// Common interface of [`CyclicWalk`] and [`GCycle`].
pub trait CycleLike: Clone + Ord + fmt::Debug + Send + Sync {
    /// Vertices visited, one per step.
    fn vertex_seq(&self) -> &[usize];
    fn val(&self) -> usize;
}

impl CycleLike for CyclicWalk {
    fn vertex_seq(&self) -> &[usize] {
        &self.0
    }
    fn val(&self) -> usize {
        self.valuation()
    }
}

impl CycleLike for GCycle {
    fn vertex_seq(&self) -> &[usize] {
        &self.verts
    }
    fn val(&self) -> usize {
        self.valuation()
    }
}

/// Multiset of canonical cycles, sorted, with multiplicities ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleMultiset<T> {
    items: Vec<(T, usize)>,
}

impl<T: CycleLike> CycleMultiset<T> {
    pub fn empty() -> Self {
        Self { items: Vec::new() }
    }

    pub fn from_cycles(cycles: impl IntoIterator<Item = T>) -> Self {
        let mut all: Vec<T> = cycles.into_iter().collect();
        all.sort();
        let mut items: Vec<(T, usize)> = Vec::new();
        for c in all {
            match items.last_mut() {
                Some((last, m)) if *last == c => *m += 1,
                _ => items.push((c, 1)),
            }
        }
        Self { items }
    }

    pub fn items(&self) -> &[(T, usize)] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of cycles counted with multiplicity.
    pub fn total_cycles(&self) -> usize {
        self.items.iter().map(|(_, m)| m).sum()
    }

    /// Cycles with multiplicity, in order.
    pub fn iter_cycles(&self) -> impl Iterator<Item = &T> {
        self.items.iter().flat_map(|(c, m)| std::iter::repeat_n(c, *m))
    }

    /// `C! = Π multiplicity!`.
    pub fn factorial(&self) -> u128 {
        self.items.iter().map(|(_, m)| (1..=*m as u128).product::<u128>()).product()
    }

    /// `Π val(c)` over cycles with multiplicity.
    pub fn valuation_product(&self) -> u128 {
        self.items.iter().map(|(c, m)| (c.val() as u128).pow(*m as u32)).product()
    }

    /// `v(C)`, total visits per vertex.
    pub fn visits(&self, p: usize) -> Vec<usize> {
        let mut v = vec![0; p];
        for (c, m) in &self.items {
            for &a in c.vertex_seq() {
                v[a] += m;
            }
        }
        v
    }
}

impl CycleMultiset<GCycle> {
    /// `e(C)`, traversal count per edge.
    pub fn edge_counts(&self, m: usize) -> Vec<usize> {
        let mut c = vec![0; m];
        for (cy, mult) in &self.items {
            for &e in cy.edges() {
                c[e] += mult;
            }
        }
        c
    }
}

impl fmt::Display for CycleMultiset<CyclicWalk> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.items.iter().map(|(c, m)| if *m == 1 { c.to_string() } else { format!("{c}^{m}") }).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Lazy stream of all multisets drawn from `candidates` whose total visit
/// vector stays within `bound`, in a fixed depth-first order starting with
/// the empty multiset.
pub struct MultisetStream<T> {
    cands: Vec<T>,
    visits: Vec<Vec<usize>>,
    remaining: Vec<usize>,
    stack: Vec<usize>,
    started: bool,
}

impl<T: CycleLike> MultisetStream<T> {
    pub fn new(cands: Vec<T>, p: usize, bound: &[usize]) -> Self {
        let visits = cands
            .iter()
            .map(|c| {
                let mut v = vec![0; p];
                for &a in c.vertex_seq() {
                    v[a] += 1;
                }
                v
            })
            .collect();
        Self { cands, visits, remaining: bound.to_vec(), stack: Vec::new(), started: false }
    }

    pub fn candidates(&self) -> &[T] {
        &self.cands
    }

    fn fits(&self, j: usize) -> bool {
        self.visits[j].iter().zip(&self.remaining).all(|(v, r)| v <= r)
    }

    fn take(&mut self, j: usize) {
        for (r, v) in self.remaining.iter_mut().zip(&self.visits[j]) {
            *r -= v;
        }
        self.stack.push(j);
    }

    fn current(&self) -> CycleMultiset<T> {
        let mut items: Vec<(T, usize)> = Vec::new();
        for &j in &self.stack {
            match items.last_mut() {
                Some((c, m)) if *c == self.cands[j] => *m += 1,
                _ => items.push((self.cands[j].clone(), 1)),
            }
        }
        CycleMultiset { items }
    }
}

impl<T: CycleLike> Iterator for MultisetStream<T> {
    type Item = CycleMultiset<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some(CycleMultiset::empty());
        }
        let start = self.stack.last().copied().unwrap_or(0);
        if let Some(j) = (start..self.cands.len()).find(|&j| self.fits(j)) {
            self.take(j);
            return Some(self.current());
        }
        while let Some(i) = self.stack.pop() {
            for (r, v) in self.remaining.iter_mut().zip(&self.visits[i]) {
                *r += v;
            }
            if let Some(j) = (i + 1..self.cands.len()).find(|&j| self.fits(j)) {
                self.take(j);
                return Some(self.current());
            }
        }
        None
    }
}

/// Depth-first search for closed label sequences on a step graph.
///
/// `steps[v]` lists `(label, next vertex)`; every label belongs to a single
/// source vertex. Emits each rotation class whose visits fit `bound` and whose
/// length is at most `max_len` exactly once, through its minimal rotation.
fn search_cycles(steps: &[Vec<(usize, usize)>], bound: &[usize], max_len: usize, mut emit: impl FnMut(&[usize])) {
    let p = steps.len();
    let mut starts: Vec<(usize, usize)> =
        steps.iter().enumerate().flat_map(|(v, s)| s.iter().map(move |&(l, _)| (l, v))).collect();
    starts.sort();
    starts.dedup();
    for (label, v0) in starts {
        if bound[v0] == 0 || max_len < 2 {
            continue;
        }
        // distance back to v0 using only labels >= label
        let mut dist = vec![usize::MAX; p];
        dist[v0] = 0;
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..p {
                for &(l, w) in &steps[v] {
                    if l >= label && dist[w] != usize::MAX && dist[w] + 1 < dist[v] {
                        dist[v] = dist[w] + 1;
                        changed = true;
                    }
                }
            }
        }
        let mut remaining = bound.to_vec();
        remaining[v0] -= 1;
        let mut labels = vec![label];
        for &(l, w) in &steps[v0] {
            if l == label {
                dfs(steps, &dist, v0, label, w, max_len, &mut remaining, &mut labels, &mut emit);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        steps: &[Vec<(usize, usize)>],
        dist: &[usize],
        v0: usize,
        min_label: usize,
        at: usize,
        max_len: usize,
        remaining: &mut Vec<usize>,
        labels: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if dist[at] == usize::MAX || labels.len() + dist[at] > max_len {
            return;
        }
        if at == v0 && is_canonical(labels) {
            emit(labels);
        }
        if labels.len() == max_len || remaining[at] == 0 {
            return;
        }
        remaining[at] -= 1;
        for &(l, w) in &steps[at] {
            if l >= min_label {
                labels.push(l);
                dfs(steps, dist, v0, min_label, w, max_len, remaining, labels, emit);
                labels.pop();
            }
        }
        remaining[at] += 1;
    }
}

/// All canonical cyclic walks on `0..p` with visits within `bound`, using only
/// steps `a → b` with `allowed(a, b)`. Sorted.
pub fn candidate_walks(p: usize, bound: &[usize], allowed: impl Fn(usize, usize) -> bool) -> Vec<CyclicWalk> {
    let steps: Vec<Vec<(usize, usize)>> =
        (0..p).map(|a| (0..p).filter(|&b| b != a && allowed(a, b)).map(|b| (a, b)).collect()).collect();
    let max_len = bound.iter().sum();
    let mut out = Vec::new();
    search_cycles(&steps, bound, max_len, |labels| out.push(CyclicWalk(labels.to_vec())));
    out.sort();
    out
}

/// All canonical cycles on `q` with visits within `bound` and length at most
/// `max_len`. Sorted.
pub fn candidate_gcycles(q: &Quiver, bound: &[usize], max_len: usize) -> Vec<GCycle> {
    let mut steps = vec![Vec::new(); q.vertex_count()];
    for (i, e) in q.edges().iter().enumerate() {
        steps[e.src].push((i, e.tgt));
    }
    let mut out = Vec::new();
    search_cycles(&steps, bound, max_len, |labels| {
        out.push(GCycle { edges: labels.to_vec(), verts: labels.iter().map(|&e| q.edge(e).src).collect() })
    });
    out.sort();
    out
}

/// Canonical cyclic walks of length at most `max_len` through steps with
/// `allowed(a, b)`. Sorted.
pub fn walks_up_to(p: usize, max_len: usize, allowed: impl Fn(usize, usize) -> bool) -> Vec<CyclicWalk> {
    let steps: Vec<Vec<(usize, usize)>> =
        (0..p).map(|a| (0..p).filter(|&b| b != a && allowed(a, b)).map(|b| (a, b)).collect()).collect();
    let mut out = Vec::new();
    search_cycles(&steps, &vec![max_len; p], max_len, |labels| out.push(CyclicWalk(labels.to_vec())));
    out.sort();
    out
}

/// Every multiset of cyclic walks on `0..p` with `v(C) ≤ bound`, once each.
pub fn enumerate_walk_multisets(p: usize, bound: &[usize]) -> MultisetStream<CyclicWalk> {
    MultisetStream::new(candidate_walks(p, bound, |_, _| true), p, bound)
}

/// Like [`enumerate_walk_multisets`], restricted to walks whose steps all
/// satisfy `allowed`.
pub fn enumerate_walk_multisets_on(
    p: usize,
    bound: &[usize],
    allowed: impl Fn(usize, usize) -> bool,
) -> MultisetStream<CyclicWalk> {
    MultisetStream::new(candidate_walks(p, bound, allowed), p, bound)
}

/// Every multiset of cycles on `q` with `v(C) ≤ bound`, once each.
pub fn enumerate_gcycle_multisets(q: &Quiver, bound: &[usize]) -> MultisetStream<GCycle> {
    let max_len = bound.iter().sum();
    MultisetStream::new(candidate_gcycles(q, bound, max_len), q.vertex_count(), bound)
}

/// Prime (valuation 1) cycles of length at most `max_len`.
pub fn prime_cycles(q: &Quiver, max_len: usize) -> Vec<GCycle> {
    let bound = vec![max_len; q.vertex_count()];
    candidate_gcycles(q, &bound, max_len).into_iter().filter(|c| c.valuation() == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSet {
    Finite(Vec<GCycle>),
    Infinite,
}

/// Finite exactly when every strongly connected component with an internal
/// edge is a single simple cycle; then those cycles are the primes.
pub fn prime_finiteness(q: &Quiver) -> PrimeSet {
    let p = q.vertex_count();
    let mut comp = vec![usize::MAX; p];
    let sccs = tarjan_scc(&q.digraph());
    for (c, nodes) in sccs.iter().enumerate() {
        for n in nodes {
            comp[n.index()] = c;
        }
    }
    let mut primes = Vec::new();
    for (c, nodes) in sccs.iter().enumerate() {
        let internal: Vec<usize> =
            (0..q.edge_count()).filter(|&e| comp[q.edge(e).src] == c && comp[q.edge(e).tgt] == c).collect();
        if internal.is_empty() {
            continue;
        }
        if internal.len() != nodes.len() {
            return PrimeSet::Infinite;
        }
        // one outgoing internal edge per vertex: follow it around
        let mut seq = vec![internal[0]];
        loop {
            let at = q.edge(*seq.last().unwrap()).tgt;
            let next = *internal.iter().find(|&&e| q.edge(e).src == at).unwrap();
            if next == seq[0] {
                break;
            }
            seq.push(next);
        }
        primes.push(GCycle::new(q, &seq).expect("component cycle is chained"));
    }
    primes.sort();
    PrimeSet::Finite(primes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{gen_example, Example};
    use crate::ring::GaussianRational;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn walk(labels: &[usize]) -> CyclicWalk {
        CyclicWalk::from_labels(labels).unwrap()
    }

    fn example(ex: Example) -> Quiver {
        gen_example(&ex, 1, true).unwrap().to_rep::<crate::MultiPoly<GaussianRational>>().unwrap().0.quiver
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(walk(&[1, 2, 1, 2]).valuation(), 2);
        assert_eq!(walk(&[1, 2, 1, 3]).valuation(), 1);
        for m in 1..=5 {
            let c = walk(&[1, 2]).power(m);
            let brute =
                (0..c.len()).filter(|&r| (0..c.len()).all(|i| c.blocks()[i] == c.blocks()[(i + r) % c.len()])).count();
            assert_eq!(c.valuation(), brute);
            assert_eq!(c.valuation(), m);
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(walk(&[1, 2]).power(2), walk(&[1, 2, 1, 2]));
        let c = walk(&[3, 1, 2]);
        assert_eq!(c.power(1), c);
        assert_eq!(c.to_string(), "⟪1,2,3⟫");
    }

    /// All sequences on `0..p` of length 2..=max_len with cyclically distinct
    /// neighbours.
    fn raw_walks(p: usize, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<usize>> = (0..p).map(|a| vec![a]).collect();
        for _ in 1..max_len {
            let mut next = Vec::new();
            for s in &frontier {
                for b in 0..p {
                    if *s.last().unwrap() != b {
                        let mut t = s.clone();
                        t.push(b);
                        if t[0] != b {
                            out.push(t.clone());
                        }
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn unique_factorisation_up_to_length_8() {
        for s in raw_walks(3, 8) {
            let w = CyclicWalk::new(&s).unwrap();
            let root = w.prime_root();
            assert_eq!(root.valuation(), 1);
            assert_eq!(root.power(w.valuation()), w);
            assert_eq!(w.len() % w.valuation(), 0);
        }
    }

    #[test]
    fn walk_multiset_examples() {
        let ms: Vec<_> = enumerate_walk_multisets(2, &[1, 1]).collect();
        assert_eq!(ms, vec![CycleMultiset::empty(), CycleMultiset::from_cycles([walk(&[1, 2])])]);

        assert_eq!(enumerate_walk_multisets(1, &[5]).count(), 1);

        let ms: Vec<_> = enumerate_walk_multisets(2, &[2, 2]).collect();
        let twice = CycleMultiset::from_cycles([walk(&[1, 2]), walk(&[1, 2])]);
        let square = CycleMultiset::from_cycles([walk(&[1, 2, 1, 2])]);
        assert!(ms.contains(&twice) && ms.contains(&square));
        assert_ne!(twice, square);
        assert_eq!(ms.len(), 4);
    }

    /// Brute force: canonicalise raw sequences, then grow multisets by
    /// repeatedly adding walks while the bound allows.
    fn brute_walk_multisets(p: usize, bound: &[usize]) -> BTreeSet<CycleMultiset<CyclicWalk>> {
        let total: usize = bound.iter().sum();
        let walks: BTreeSet<CyclicWalk> = raw_walks(p, total)
            .into_iter()
            .map(|s| CyclicWalk::new(&s).unwrap())
            .filter(|w| w.visits(p).iter().zip(bound).all(|(v, b)| v <= b))
            .collect();
        let mut all = BTreeSet::new();
        let mut layer: BTreeSet<Vec<CyclicWalk>> = [Vec::new()].into_iter().collect();
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for ms in &layer {
                all.insert(CycleMultiset::from_cycles(ms.clone()));
                for w in &walks {
                    let mut grown = ms.clone();
                    grown.push(w.clone());
                    grown.sort();
                    let c = CycleMultiset::from_cycles(grown.clone());
                    if c.visits(p).iter().zip(bound).all(|(v, b)| v <= b) {
                        next.insert(grown);
                    }
                }
            }
            layer = next;
        }
        all
    }

    #[test]
    fn walk_multisets_match_brute_force() {
        for (p, bound) in [(2, vec![2, 2]), (2, vec![3, 3]), (3, vec![1, 1, 1]), (3, vec![2, 1, 2]), (3, vec![3, 3, 3])]
        {
            let fast: Vec<_> = enumerate_walk_multisets(p, &bound).collect();
            let set: BTreeSet<_> = fast.iter().cloned().collect();
            assert_eq!(set.len(), fast.len(), "duplicates for {bound:?}");
            assert_eq!(set, brute_walk_multisets(p, &bound), "mismatch for {bound:?}");
        }
    }

    #[test]
    fn gcycle_multiset_examples() {
        assert_eq!(enumerate_gcycle_multisets(&example(Example::Acyclic), &[3; 5]).count(), 1);

        // e, f: 1 -> 2; g: 2 -> 1
        let q = Quiver::from_pairs(2, &[(0, 1), (0, 1), (1, 0)]);
        let ms: Vec<_> = enumerate_gcycle_multisets(&q, &[1, 1]).collect();
        let eg = GCycle::new(&q, &[0, 2]).unwrap();
        let fg = GCycle::new(&q, &[1, 2]).unwrap();
        assert_eq!(
            ms,
            vec![CycleMultiset::empty(), CycleMultiset::from_cycles([eg]), CycleMultiset::from_cycles([fg])]
        );

        let f5 = example(Example::Figure5);
        let ms: Vec<_> = enumerate_gcycle_multisets(&f5, &[1; 8]).collect();
        assert_eq!(ms.len(), 4);
        let sizes: Vec<usize> = ms.iter().map(CycleMultiset::total_cycles).collect();
        assert_eq!(sizes, vec![0, 1, 2, 1]);
    }

    #[test]
    fn gcycle_multisets_refine_walk_multisets() {
        // projecting cycle multisets to walk multisets hits exactly the
        // walk multisets supported on the quiver
        let q = Quiver::from_pairs(3, &[(0, 1), (0, 1), (1, 0), (1, 2), (2, 0), (2, 1)]);
        let bound = [2, 2, 1];
        let projected: BTreeSet<CycleMultiset<CyclicWalk>> = enumerate_gcycle_multisets(&q, &bound)
            .map(|c| CycleMultiset::from_cycles(c.iter_cycles().map(GCycle::project)))
            .collect();
        let adj = |a: usize, b: usize| q.edges().iter().any(|e| e.src == a && e.tgt == b);
        let walks: BTreeSet<_> = enumerate_walk_multisets_on(3, &bound, adj).collect();
        let filtered: BTreeSet<_> = enumerate_walk_multisets(3, &bound)
            .filter(|c| {
                c.iter_cycles().all(|w| (0..w.len()).all(|i| adj(w.blocks()[i], w.blocks()[(i + 1) % w.len()])))
            })
            .collect();
        assert_eq!(projected, walks);
        assert_eq!(walks, filtered);
    }

    #[test]
    fn prime_cycle_examples() {
        assert!(prime_cycles(&example(Example::Acyclic), 10).is_empty());

        let f5 = example(Example::Figure5);
        let primes = prime_cycles(&f5, 20);
        let projected: Vec<CyclicWalk> = primes.iter().map(GCycle::project).collect();
        assert_eq!(projected, vec![walk(&[1, 2, 3, 4]), walk(&[5, 6, 7, 8])]);

        let two = example(Example::TwoCycle);
        let primes = prime_cycles(&two, 6);
        assert_eq!(primes, vec![GCycle::new(&two, &[0, 1]).unwrap()]);
        let all = candidate_gcycles(&two, &[6, 6], 6);
        assert_eq!(all.len(), 3);
        assert!(all.iter().skip(1).all(|c| c.valuation() > 1));
    }

    #[test]
    fn prime_finiteness_examples() {
        let f5 = example(Example::Figure5);
        match prime_finiteness(&f5) {
            PrimeSet::Finite(c) => assert_eq!(c, prime_cycles(&f5, 20)),
            PrimeSet::Infinite => panic!("figure5 has finitely many primes"),
        }
        // 1 -> 2 -> 1 and 1 -> 3 -> 1 share vertex 1
        let shared = Quiver::from_pairs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]);
        assert_eq!(prime_finiteness(&shared), PrimeSet::Infinite);
        let concat = GCycle::new(&shared, &[0, 1, 2, 3]).unwrap();
        assert_eq!(concat.valuation(), 1);

        let uni = example(Example::Unicyclic);
        match prime_finiteness(&uni) {
            PrimeSet::Finite(c) => assert_eq!(c.len(), 1),
            PrimeSet::Infinite => panic!(),
        }
    }

    #[test]
    fn finiteness_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let p = rng.random_range(2..=4);
            let m = rng.random_range(1..=5);
            let pairs: Vec<(usize, usize)> = (0..m)
                .map(|_| {
                    let s = rng.random_range(0..p);
                    (s, (s + rng.random_range(1..p)) % p)
                })
                .collect();
            let q = Quiver::from_pairs(p, &pairs);
            let brute = prime_cycles(&q, 12);
            match prime_finiteness(&q) {
                PrimeSet::Finite(c) => assert_eq!(c, brute, "{pairs:?}"),
                // infinitely many primes show up as long primes
                PrimeSet::Infinite => assert!(brute.iter().any(|c| c.len() > p), "{pairs:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_is_rotation_invariant(seq in prop::collection::vec(0usize..4, 2..9), r in 0usize..9) {
            let k = seq.len();
            let rotated: Vec<usize> = (0..k).map(|i| seq[(i + r) % k]).collect();
            prop_assert_eq!(canonical_rotation(&seq), canonical_rotation(&rotated));
            let c = canonical_rotation(&seq);
            prop_assert_eq!(canonical_rotation(&c), c.clone());
            prop_assert_eq!(k % sequence_valuation(&seq), 0);
        }
    }
}
