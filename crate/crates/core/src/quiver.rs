//! Quivers with a fixed-point-free involution, dimension data, and the
//! Cartan data derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::symbolic::{q, LinearForm, Q, Variable};

pub type VertexId = u32;

/// The axiom a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    DuplicateVertex,
    UnknownVertex,
    TauUndefined,
    TauNotInvolution,
    FixedPointFree,
    SelfLoop,
    Multiplicity,
    EdgeInvolution,
    MissingDimension,
    DimensionTauInvariant,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::DuplicateVertex => "duplicate-vertex",
            Axiom::UnknownVertex => "unknown-vertex",
            Axiom::TauUndefined => "tau-undefined",
            Axiom::TauNotInvolution => "tau-involution",
            Axiom::FixedPointFree => "fixed-point-free",
            Axiom::SelfLoop => "no-loops",
            Axiom::Multiplicity => "multiplicity",
            Axiom::EdgeInvolution => "edge-involution",
            Axiom::MissingDimension => "missing-dimension",
            Axiom::DimensionTauInvariant => "v-tau-invariant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    /// The offending vertex or edge, e.g. `"3"` or `"1>2"`.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.axiom.name(), self.subject, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("invalid quiver: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("slot {slot} out of range for vertex {vertex} (dimension {dim})")]
    SlotOutOfRange { vertex: VertexId, slot: u32, dim: u32 },
    #[error("positive half must contain exactly one vertex of each tau-orbit")]
    BadSplit,
}

/// Unvalidated quiver data as supplied by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverWithInvolution {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub tau: BTreeMap<VertexId, VertexId>,
}

/// Dimension vectors `v` and `w`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DimensionData {
    pub v: BTreeMap<VertexId, u32>,
    pub w: BTreeMap<VertexId, u32>,
}

impl DimensionData {
    /// Dimensions listed in vertex order.
    pub fn from_lists(vertices: &[VertexId], v: &[u32], w: &[u32]) -> Self {
        DimensionData {
            v: vertices.iter().copied().zip(v.iter().copied()).collect(),
            w: vertices.iter().copied().zip(w.iter().copied()).collect(),
        }
    }
}

impl QuiverWithInvolution {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<(VertexId, VertexId)>, tau_pairs: &[(VertexId, VertexId)]) -> Self {
        let mut tau = BTreeMap::new();
        for &(a, b) in tau_pairs {
            tau.insert(a, b);
            tau.insert(b, a);
        }
        QuiverWithInvolution { vertices, edges, tau }
    }

    /// The type AIII quivers used throughout the tests: `2n` vertices with
    /// `tau(i) = 2n + 1 - i` and a single tau-fixed edge in the middle.
    /// Defined for `n` in `1..=3`.
    pub fn aiii(n: u32) -> Option<Self> {
        let edges = match n {
            1 => vec![(1, 2)],
            2 => vec![(1, 2), (2, 3), (3, 4)],
            3 => vec![(1, 2), (3, 2), (3, 4), (5, 4), (5, 6)],
            _ => return None,
        };
        let m = 2 * n;
        let pairs: Vec<(u32, u32)> = (1..=n).map(|i| (i, m + 1 - i)).collect();
        Some(Self::new((1..=m).collect(), edges, &pairs))
    }

    /// All axiom violations; empty iff the data is a valid quiver with
    /// involution carrying tau-invariant dimension data.
    pub fn validate(&self, dims: &DimensionData) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |axiom, subject: String, message: String| out.push(Violation { axiom, subject, message });
        let mut set = BTreeSet::new();
        for &i in &self.vertices {
            if !set.insert(i) {
                push(Axiom::DuplicateVertex, i.to_string(), "vertex listed twice".into());
            }
        }
        for &i in &set {
            match self.tau.get(&i) {
                None => push(Axiom::TauUndefined, i.to_string(), "tau is not defined on this vertex".into()),
                Some(&t) if t == i => push(Axiom::FixedPointFree, i.to_string(), "tau fixes this vertex".into()),
                Some(&t) if !set.contains(&t) => {
                    push(Axiom::UnknownVertex, i.to_string(), format!("tau maps to unknown vertex {t}"))
                }
                Some(&t) if self.tau.get(&t) != Some(&i) => {
                    push(Axiom::TauNotInvolution, i.to_string(), format!("tau(tau({i})) != {i}"))
                }
                _ => {}
            }
        }
        for &k in self.tau.keys() {
            if !set.contains(&k) {
                push(Axiom::UnknownVertex, k.to_string(), "tau is defined on an unknown vertex".into());
            }
        }
        let mut pairs: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        let edge_set: BTreeSet<(VertexId, VertexId)> = self.edges.iter().copied().collect();
        for &(s, t) in &self.edges {
            let subject = format!("{s}>{t}");
            if !set.contains(&s) || !set.contains(&t) {
                push(Axiom::UnknownVertex, subject, "edge endpoint is not a vertex".into());
                continue;
            }
            if s == t {
                push(Axiom::SelfLoop, subject, "loops are not allowed".into());
                continue;
            }
            *pairs.entry((s.min(t), s.max(t))).or_default() += 1;
            if let (Some(&ts), Some(&tt)) = (self.tau.get(&s), self.tau.get(&t)) {
                if !edge_set.contains(&(tt, ts)) {
                    push(Axiom::EdgeInvolution, subject, format!("missing the tau-image edge {tt}>{ts}"));
                }
            }
        }
        for ((a, b), n) in pairs {
            if n > 1 {
                push(Axiom::Multiplicity, format!("{a}-{b}"), format!("{n} edges between one pair of vertices"));
            }
        }
        for (name, map) in [("v", &dims.v), ("w", &dims.w)] {
            for &i in &set {
                if !map.contains_key(&i) {
                    push(Axiom::MissingDimension, i.to_string(), format!("no {name} dimension"));
                }
            }
            for &k in map.keys() {
                if !set.contains(&k) {
                    push(Axiom::UnknownVertex, k.to_string(), format!("{name} dimension given for an unknown vertex"));
                }
            }
        }
        for &i in &set {
            if let (Some(&t), Some(&vi)) = (self.tau.get(&i), dims.v.get(&i)) {
                if let Some(&vt) = dims.v.get(&t) {
                    if i < t && vi != vt {
                        push(Axiom::DimensionTauInvariant, i.to_string(), format!("v({i}) = {vi} but v({t}) = {vt}"));
                    }
                }
            }
        }
        out
    }
}

/// An outgoing edge as seen from its source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutEdge {
    pub target: VertexId,
    pub tau_fixed: bool,
}

/// A validated quiver with dimension data and everything derived from it.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct FramedQuiver {
    raw: QuiverWithInvolution,
    dims: DimensionData,
    vertices: Vec<VertexId>,
    tau: BTreeMap<VertexId, VertexId>,
    positive: BTreeSet<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl FramedQuiver {
    pub fn new(raw: QuiverWithInvolution, dims: DimensionData) -> Result<Self, QuiverError> {
        let violations = raw.validate(&dims);
        if !violations.is_empty() {
            return Err(QuiverError::Invalid(violations));
        }
        let mut vertices = raw.vertices.clone();
        vertices.sort_unstable();
        let positive = vertices.iter().copied().filter(|i| raw.tau[i] > *i).collect();
        let mut edges = raw.edges.clone();
        edges.sort_unstable();
        Ok(FramedQuiver { tau: raw.tau.clone(), raw, dims, vertices, positive, edges })
    }

    /// The same data with a different choice of the positive half.
    pub fn with_positive_half(&self, positive: &[VertexId]) -> Result<Self, QuiverError> {
        let set: BTreeSet<VertexId> = positive.iter().copied().collect();
        for &i in &self.vertices {
            if set.contains(&i) == set.contains(&self.tau[&i]) {
                return Err(QuiverError::BadSplit);
            }
        }
        let mut out = self.clone();
        out.positive = set;
        Ok(out)
    }

    pub fn raw(&self) -> &QuiverWithInvolution {
        &self.raw
    }

    pub fn dims(&self) -> &DimensionData {
        &self.dims
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn contains(&self, i: VertexId) -> bool {
        self.tau.contains_key(&i)
    }

    pub fn check_vertex(&self, i: VertexId) -> Result<(), QuiverError> {
        if self.contains(i) {
            Ok(())
        } else {
            Err(QuiverError::UnknownVertex(i))
        }
    }

    pub fn tau(&self, i: VertexId) -> VertexId {
        self.tau[&i]
    }

    pub fn is_positive(&self, i: VertexId) -> bool {
        self.positive.contains(&i)
    }

    pub fn positive_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied().filter(|i| self.is_positive(*i))
    }

    /// The positive-half representative of the orbit of `i`.
    pub fn rep(&self, i: VertexId) -> VertexId {
        if self.is_positive(i) {
            i
        } else {
            self.tau(i)
        }
    }

    pub fn v(&self, i: VertexId) -> u32 {
        self.dims.v[&i]
    }

    pub fn w(&self, i: VertexId) -> u32 {
        self.dims.w[&i]
    }

    pub fn is_tau_fixed(&self, (s, t): (VertexId, VertexId)) -> bool {
        self.tau(s) == t
    }

    /// Image of an edge under the edge involution.
    pub fn tau_edge(&self, (s, t): (VertexId, VertexId)) -> (VertexId, VertexId) {
        (self.tau(t), self.tau(s))
    }

    pub fn out_edges(&self, i: VertexId) -> impl Iterator<Item = OutEdge> + '_ {
        self.edges
            .iter()
            .filter(move |(s, _)| *s == i)
            .map(move |&(s, t)| OutEdge { target: t, tau_fixed: self.tau(s) == t })
    }

    /// Edges that are not tau-fixed and whose `(source, target)` pair is
    /// lexicographically smaller than that of their tau-image.
    pub fn positive_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.edges
            .iter()
            .copied()
            .filter(|&h| !self.is_tau_fixed(h) && h < self.tau_edge(h))
            .collect()
    }

    pub fn tau_fixed_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.edges.iter().copied().filter(|&h| self.is_tau_fixed(h)).collect()
    }

    pub fn cartan(&self, i: VertexId, j: VertexId) -> i64 {
        if i == j {
            return 2;
        }
        -(self.edges.iter().filter(|&&(s, t)| (s, t) == (i, j) || (s, t) == (j, i)).count() as i64)
    }

    /// `delta_{i -> tau i}`: 1 if there is an edge from `i` to `tau(i)`.
    pub fn delta_arrow(&self, i: VertexId) -> u32 {
        u32::from(self.edges.contains(&(i, self.tau(i))))
    }

    fn outgoing_dims(&self, i: VertexId) -> i64 {
        self.out_edges(i).map(|e| self.v(e.target) as i64).sum()
    }

    /// `<alpha_i, mu>`.
    pub fn mu_pairing(&self, i: VertexId) -> Result<i64, QuiverError> {
        self.check_vertex(i)?;
        let t = self.tau(i);
        Ok(-self.cartan(i, t) + self.w(i) as i64 + self.w(t) as i64 - 2 * self.v(i) as i64
            + self.outgoing_dims(i)
            + self.outgoing_dims(t))
    }

    /// `hbar * zeta_i`.
    pub fn zeta(&self, i: VertexId) -> Result<Zeta, QuiverError> {
        self.check_vertex(i)?;
        let exponent = self.v(i) as i64 - 1 + self.delta_arrow(i) as i64 + self.w(i) as i64 + self.outgoing_dims(i);
        Ok(Zeta { negative: exponent.rem_euclid(2) == 1, log2: -self.cartan(i, self.tau(i)) })
    }

    /// `x_{i,r}` as a linear form, with the sign rule applied on the
    /// negative half.
    pub fn x(&self, i: VertexId, r: u32) -> LinearForm {
        if self.is_positive(i) {
            LinearForm::var(Variable::X { vertex: i, slot: r })
        } else {
            -LinearForm::var(Variable::X { vertex: self.tau(i), slot: r })
        }
    }

    pub fn w_var(&self, i: VertexId, k: u32) -> LinearForm {
        LinearForm::var(Variable::W { vertex: i, slot: k })
    }

    pub fn check_slot(&self, i: VertexId, r: u32) -> Result<(), QuiverError> {
        self.check_vertex(i)?;
        let dim = self.v(i);
        if r == 0 || r > dim {
            return Err(QuiverError::SlotOutOfRange { vertex: i, slot: r, dim });
        }
        Ok(())
    }

    /// All `(vertex, slot)` pairs of the positive half, in canonical order.
    pub fn positive_slots(&self) -> Vec<(VertexId, u32)> {
        self.positive_vertices().flat_map(|i| (1..=self.v(i)).map(move |r| (i, r))).collect()
    }
}

/// The boundary value `hbar * zeta_i = (+-) 2^log2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zeta {
    pub negative: bool,
    pub log2: i64,
}

impl Zeta {
    pub fn value(&self) -> Q {
        let mag = if self.log2 >= 0 {
            q(1i64 << self.log2)
        } else {
            q(1i64 << (-self.log2)).recip()
        };
        if self.negative {
            -mag
        } else {
            mag
        }
    }
}
