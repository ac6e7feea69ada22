//! JSON representation of quiver data.
//!
//! ```json
//! {"p": 2, "ranks": [1, 1],
//!  "edges": [{"id": "e1", "src": 1, "tgt": 2, "weight": {"sym": "x1"}, "matrix": [[{"sym": "u"}]]},
//!            {"id": "e2", "src": 2, "tgt": 1, "weight": "3/2", "matrix": [[[0.5, -1]]]}],
//!  "involution": [["e1", "e2"]]}
//! ```
//!
//! An entry is a number, a string (`"3/4"`, `"1/2+1/3i"`), a `[re, im]`
//! pair, or `{"sym": name}`.

use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Edge, EdgeWeights, Quiver, QuiverRep, Representation, Violation, ViolationKind};
use crate::linalg::Matrix;
use crate::ring::{parse_rational, GaussianRational, IndeterminateSet, MultiPoly, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawReal {
    Num(f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEntry {
    Sym { sym: String },
    Complex([RawReal; 2]),
    Real(RawReal),
}

impl RawEntry {
    pub fn sym(name: impl Into<String>) -> Self {
        RawEntry::Sym { sym: name.into() }
    }

    /// Canonical exact encoding, e.g. `"1/2+1/3i"`.
    pub fn exact(g: &GaussianRational) -> Self {
        RawEntry::Real(RawReal::Text(g.to_string()))
    }

    pub fn float(z: Complex64) -> Self {
        if z.im == 0.0 {
            RawEntry::Real(RawReal::Num(z.re))
        } else {
            RawEntry::Complex([RawReal::Num(z.re), RawReal::Num(z.im)])
        }
    }

    fn as_exact(&self) -> Result<GaussianRational> {
        let real = |r: &RawReal| -> Result<BigRational> {
            match r {
                RawReal::Num(f) => {
                    if !f.is_finite() {
                        return Err(Error::Parse(format!("non-finite number {f}")));
                    }
                    parse_rational(&f.to_string()).ok_or_else(|| Error::Parse(format!("bad number {f}")))
                }
                RawReal::Text(s) => parse_rational(s).ok_or_else(|| Error::Parse(format!("bad rational `{s}`"))),
            }
        };
        match self {
            RawEntry::Sym { sym } => Err(Error::Unsupported(format!("symbol `{sym}` needs symbolic mode"))),
            RawEntry::Real(RawReal::Text(s)) => {
                GaussianRational::parse(s).ok_or_else(|| Error::Parse(format!("bad scalar `{s}`")))
            }
            RawEntry::Real(r) => Ok(GaussianRational::real(real(r)?)),
            RawEntry::Complex([re, im]) => Ok(GaussianRational::new(real(re)?, real(im)?)),
        }
    }
}

/// Scalars that can be read from a [`RawEntry`].
pub trait FromRaw: Scalar {
    fn from_raw(e: &RawEntry, syms: &mut IndeterminateSet) -> Result<Self>;
}

impl FromRaw for Complex64 {
    fn from_raw(e: &RawEntry, _: &mut IndeterminateSet) -> Result<Self> {
        match e {
            RawEntry::Real(RawReal::Num(f)) => Ok(Complex64::new(*f, 0.0)),
            RawEntry::Complex([RawReal::Num(a), RawReal::Num(b)]) => Ok(Complex64::new(*a, *b)),
            other => Ok(other.as_exact()?.to_complex().expect("finite rational")),
        }
    }
}

impl FromRaw for GaussianRational {
    fn from_raw(e: &RawEntry, _: &mut IndeterminateSet) -> Result<Self> {
        e.as_exact()
    }
}

impl FromRaw for MultiPoly<GaussianRational> {
    fn from_raw(e: &RawEntry, syms: &mut IndeterminateSet) -> Result<Self> {
        match e {
            RawEntry::Sym { sym } => Ok(MultiPoly::var(syms.intern(sym))),
            other => Ok(MultiPoly::constant(other.as_exact()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEdge {
    pub id: String,
    pub src: i64,
    pub tgt: i64,
    pub weight: RawEntry,
    pub matrix: Vec<Vec<RawEntry>>,
}

/// File-level quiver data, before choosing a scalar type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub p: usize,
    pub ranks: Vec<usize>,
    pub edges: Vec<RawEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<Vec<[String; 2]>>,
}

impl Instance {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// True if any weight or matrix entry is a symbol.
    pub fn has_symbols(&self) -> bool {
        self.edges.iter().any(|e| {
            matches!(e.weight, RawEntry::Sym { .. })
                || e.matrix.iter().flatten().any(|x| matches!(x, RawEntry::Sym { .. }))
        })
    }

    /// Converts to typed data. Weight symbols are interned before matrix
    /// symbols, each in edge order.
    pub fn to_rep<S: FromRaw>(&self) -> Result<(QuiverRep<S>, IndeterminateSet)> {
        let mut violations = Vec::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let mut endpoint = |name: &str, v: i64| -> usize {
                if v < 1 || v as usize > self.p {
                    violations.push(Violation::edge(
                        &e.id,
                        ViolationKind::VertexOutOfRange,
                        format!("{name} = {v} not in 1..={}", self.p),
                    ));
                    0
                } else {
                    v as usize - 1
                }
            };
            let src = endpoint("src", e.src);
            let tgt = endpoint("tgt", e.tgt);
            if e.matrix.iter().any(|row| row.len() != e.matrix[0].len()) {
                violations.push(Violation::edge(&e.id, ViolationKind::ShapeMismatch, "ragged rows"));
            }
            edges.push(Edge { id: e.id.clone(), src, tgt });
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let mut quiver = Quiver::new(self.p, edges);
        if let Some(pairs) = &self.involution {
            let mut idx = Vec::new();
            for [a, b] in pairs {
                match (quiver.edge_index(a), quiver.edge_index(b)) {
                    (Some(i), Some(j)) => idx.push((i, j)),
                    _ => violations.push(Violation::global(
                        ViolationKind::BadInvolution,
                        format!("unknown edge in pair ({a}, {b})"),
                    )),
                }
            }
            if !violations.is_empty() {
                return Err(Error::Validation(violations));
            }
            quiver = quiver.with_involution(idx);
        }

        let mut syms = IndeterminateSet::new();
        let weights = self.edges.iter().map(|e| S::from_raw(&e.weight, &mut syms)).collect::<Result<Vec<_>>>()?;
        let matrices = self
            .edges
            .iter()
            .map(|e| {
                let rows = e.matrix.len();
                let cols = e.matrix.first().map_or(0, Vec::len);
                let data = e.matrix.iter().flatten().map(|x| S::from_raw(x, &mut syms)).collect::<Result<Vec<_>>>()?;
                Matrix::new(rows, cols, data)
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = QuiverRep::new(quiver, Representation { ranks: self.ranks.clone(), matrices }, EdgeWeights(weights))?;
        Ok((rep, syms))
    }

    /// Encodes exact data canonically.
    pub fn from_exact(q: &QuiverRep<GaussianRational>) -> Self {
        Self::encode(q, RawEntry::exact)
    }

    pub fn from_float(q: &QuiverRep<Complex64>) -> Self {
        Self::encode(q, |z| RawEntry::float(*z))
    }

    fn encode<S: Scalar>(q: &QuiverRep<S>, f: impl Fn(&S) -> RawEntry) -> Self {
        let edges = q
            .quiver
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let m = q.matrix(i);
                RawEdge {
                    id: e.id.clone(),
                    src: e.src as i64 + 1,
                    tgt: e.tgt as i64 + 1,
                    weight: f(q.weight(i)),
                    matrix: (0..m.rows()).map(|r| m.row(r).iter().map(&f).collect()).collect(),
                }
            })
            .collect();
        let involution = q.quiver.involution().map(|pairs| {
            pairs.iter().map(|&(a, b)| [q.quiver.edge(a).id.clone(), q.quiver.edge(b).id.clone()]).collect()
        });
        Instance { p: q.quiver.vertex_count(), ranks: q.ranks().to_vec(), edges, involution }
    }
}
