//! Quivers, linear representations and edge weights.
//!
//! Vertices and edges are 0-based internally. The JSON format (see [`io`])
//! and every user-facing message use 1-based vertices.

mod gen;
mod io;

use std::fmt;

use petgraph::graph::DiGraph;

use crate::linalg::Matrix;
use crate::ring::{Field, Scalar};
use crate::{Error, Result};

pub use gen::{gen_example, haar_like_unitary, random_gaussian_rational, Example, RandomParams};
pub use io::{FromRaw, Instance, RawEdge, RawEntry, RawReal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// Finite directed multigraph on vertices `0..p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    p: usize,
    edges: Vec<Edge>,
    /// Pairs of edge indices `(e, e⁻¹)` for bidirected graphs.
    involution: Option<Vec<(usize, usize)>>,
}

impl Quiver {
    /// Builds a quiver without checking anything; see [`validate`].
    pub fn new(p: usize, edges: Vec<Edge>) -> Self {
        Self { p, edges, involution: None }
    }

    /// Convenience constructor from `(src, tgt)` pairs with ids `e1, e2, …`.
    pub fn from_pairs(p: usize, pairs: &[(usize, usize)]) -> Self {
        let edges =
            pairs.iter().enumerate().map(|(i, &(src, tgt))| Edge { id: format!("e{}", i + 1), src, tgt }).collect();
        Self::new(p, edges)
    }

    pub fn with_involution(mut self, pairs: Vec<(usize, usize)>) -> Self {
        self.involution = Some(pairs);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.p
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn involution(&self) -> Option<&[(usize, usize)]> {
        self.involution.as_deref()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn out_edges(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.src == a).map(|(i, _)| i)
    }

    pub fn out_degree(&self, a: usize) -> usize {
        self.out_edges(a).count()
    }

    /// The underlying graph, with edge weights holding edge indices.
    pub fn digraph(&self) -> DiGraph<(), usize> {
        let mut g = DiGraph::with_capacity(self.p, self.edges.len());
        let nodes: Vec<_> = (0..self.p).map(|_| g.add_node(())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            g.add_edge(nodes[e.src], nodes[e.tgt], i);
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        !petgraph::algo::is_cyclic_directed(&self.digraph())
    }

    /// The inverse edge of `e`, if an involution table is present.
    pub fn inverse_edge(&self, e: usize) -> Option<usize> {
        self.involution()?.iter().find_map(|&(a, b)| match () {
            _ if a == e => Some(b),
            _ if b == e => Some(a),
            _ => None,
        })
    }
}

/// Ranks `n_a` and one `n_src × n_tgt` matrix per edge, in edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<S> {
    pub ranks: Vec<usize>,
    pub matrices: Vec<Matrix<S>>,
}

/// One weight `x_e` per edge, in edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights<S>(pub Vec<S>);

/// What is wrong with a piece of quiver data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    SelfLoop,
    VertexOutOfRange,
    DuplicateEdgeId,
    ShapeMismatch,
    ZeroRank,
    RankCount,
    MissingMatrix,
    MissingWeight,
    BadInvolution,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::SelfLoop => "self-loop",
            ViolationKind::VertexOutOfRange => "vertex out of range",
            ViolationKind::DuplicateEdgeId => "duplicate edge id",
            ViolationKind::ShapeMismatch => "shape mismatch",
            ViolationKind::ZeroRank => "zero rank",
            ViolationKind::RankCount => "rank count",
            ViolationKind::MissingMatrix => "missing matrix",
            ViolationKind::MissingWeight => "missing weight",
            ViolationKind::BadInvolution => "bad involution",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `edge <id>`, `vertex <1-based index>` or `quiver`.
    pub subject: String,
    pub detail: String,
}

impl Violation {
    pub(crate) fn edge(id: &str, kind: ViolationKind, detail: impl Into<String>) -> Self {
        Self { kind, subject: format!("edge {id}"), detail: detail.into() }
    }

    pub(crate) fn vertex(a: usize, kind: ViolationKind, detail: impl Into<String>) -> Self {
        Self { kind, subject: format!("vertex {}", a + 1), detail: detail.into() }
    }

    pub(crate) fn global(kind: ViolationKind, detail: impl Into<String>) -> Self {
        Self { kind, subject: "quiver".into(), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.kind.as_str())?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant and returns all violations found.
pub fn validate<S: Scalar>(q: &Quiver, r: &Representation<S>, w: &EdgeWeights<S>) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if r.ranks.len() != q.p {
        out.push(Violation::global(ViolationKind::RankCount, format!("{} ranks for {} vertices", r.ranks.len(), q.p)));
    }
    for (a, &n) in r.ranks.iter().enumerate() {
        if n == 0 {
            out.push(Violation::vertex(a, ViolationKind::ZeroRank, ""));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for (i, e) in q.edges.iter().enumerate() {
        if !seen.insert(e.id.as_str()) {
            out.push(Violation::edge(&e.id, ViolationKind::DuplicateEdgeId, ""));
        }
        let mut in_range = true;
        for (end, v) in [("src", e.src), ("tgt", e.tgt)] {
            if v >= q.p {
                in_range = false;
                out.push(Violation::edge(
                    &e.id,
                    ViolationKind::VertexOutOfRange,
                    format!("{end} = {} not in 1..={}", v + 1, q.p),
                ));
            }
        }
        if e.src == e.tgt {
            out.push(Violation::edge(&e.id, ViolationKind::SelfLoop, format!("src = tgt = {}", e.src + 1)));
        }
        match r.matrices.get(i) {
            None => out.push(Violation::edge(&e.id, ViolationKind::MissingMatrix, "")),
            Some(m) if in_range && e.src < r.ranks.len() && e.tgt < r.ranks.len() => {
                let want = (r.ranks[e.src], r.ranks[e.tgt]);
                if (m.rows(), m.cols()) != want {
                    out.push(Violation::edge(
                        &e.id,
                        ViolationKind::ShapeMismatch,
                        format!("matrix is {}x{}, ranks require {}x{}", m.rows(), m.cols(), want.0, want.1),
                    ));
                }
            }
            Some(_) => {}
        }
        if w.0.get(i).is_none() {
            out.push(Violation::edge(&e.id, ViolationKind::MissingWeight, ""));
        }
    }
    if r.matrices.len() > q.edges.len() || w.0.len() > q.edges.len() {
        out.push(Violation::global(ViolationKind::MissingMatrix, "more matrices or weights than edges"));
    }
    if let Some(inv) = &q.involution {
        let mut used = vec![false; q.edges.len()];
        for &(a, b) in inv {
            let ok = a < q.edges.len()
                && b < q.edges.len()
                && a != b
                && !used[a]
                && !used[b]
                && q.edges[a].src == q.edges[b].tgt
                && q.edges[a].tgt == q.edges[b].src;
            if !ok {
                let name = |i: usize| q.edges.get(i).map_or("?".to_string(), |e| e.id.clone());
                out.push(Violation::global(
                    ViolationKind::BadInvolution,
                    format!("pair ({}, {}) is not a reversed edge pair", name(a), name(b)),
                ));
                continue;
            }
            used[a] = true;
            used[b] = true;
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// `z_a = Σ_{s(e)=a} x_e`; zero for vertices without outgoing edges.
pub fn vertex_z<S: Scalar>(q: &Quiver, w: &EdgeWeights<S>) -> Vec<S> {
    let mut z = vec![S::zero(); q.p];
    for (e, edge) in q.edges.iter().enumerate() {
        z[edge.src] = z[edge.src].clone() + w.0[e].clone();
    }
    z
}

/// A validated quiver together with a representation and edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct QuiverRep<S> {
    pub quiver: Quiver,
    pub rep: Representation<S>,
    pub weights: EdgeWeights<S>,
}

impl<S: Scalar> QuiverRep<S> {
    pub fn new(quiver: Quiver, rep: Representation<S>, weights: EdgeWeights<S>) -> Result<Self> {
        validate(&quiver, &rep, &weights).map_err(Error::Validation)?;
        Ok(Self { quiver, rep, weights })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rep.ranks
    }

    /// Total rank `n = Σ n_a`.
    pub fn total_rank(&self) -> usize {
        self.rep.ranks.iter().sum()
    }

    pub fn matrix(&self, e: usize) -> &Matrix<S> {
        &self.rep.matrices[e]
    }

    pub fn weight(&self, e: usize) -> &S {
        &self.weights.0[e]
    }

    pub fn z(&self) -> Vec<S> {
        vertex_z(&self.quiver, &self.weights)
    }

    /// Applies `f` to every matrix entry and weight.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> QuiverRep<T> {
        QuiverRep {
            quiver: self.quiver.clone(),
            rep: Representation {
                ranks: self.rep.ranks.clone(),
                matrices: self.rep.matrices.iter().map(|m| m.map(&f)).collect(),
            },
            weights: EdgeWeights(self.weights.0.iter().map(&f).collect()),
        }
    }

    /// Same quiver and weights, new matrices.
    pub fn with_matrices(&self, matrices: Vec<Matrix<S>>) -> Result<Self> {
        Self::new(self.quiver.clone(), Representation { ranks: self.rep.ranks.clone(), matrices }, self.weights.clone())
    }

    /// Same quiver and matrices, new weights.
    pub fn with_weights(&self, weights: Vec<S>) -> Result<Self> {
        Self::new(self.quiver.clone(), self.rep.clone(), EdgeWeights(weights))
    }
}

impl<S: Field> QuiverRep<S> {
    /// Gauge transformation `U_e ↦ j_{s(e)} U_e j_{t(e)}⁻¹`.
    pub fn gauge(&self, j: &[Matrix<S>]) -> Result<Self> {
        if j.len() != self.quiver.p {
            return Err(Error::Dimension(format!("{} gauge matrices for {} vertices", j.len(), self.quiver.p)));
        }
        let inv: Vec<Matrix<S>> = j
            .iter()
            .enumerate()
            .map(|(a, m)| {
                if m.rows() != self.rep.ranks[a] || !m.is_square() {
                    return Err(Error::Dimension(format!("gauge matrix at vertex {} has the wrong shape", a + 1)));
                }
                m.inverse().ok_or_else(|| Error::Assumption(format!("gauge matrix at vertex {} is singular", a + 1)))
            })
            .collect::<Result<_>>()?;
        let matrices = self
            .quiver
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| j[edge.src].mul(&self.rep.matrices[e]).mul(&inv[edge.tgt]))
            .collect();
        self.with_matrices(matrices)
    }
}
