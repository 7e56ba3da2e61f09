//! Bell scenarios, event encoding, the orthogonality relation, and the
//! graphs built from them (orthogonality / non-orthogonality graphs,
//! induced subgraphs, strong and co-normal products).

use alloc::{format, string::String, vec, vec::Vec};
use core::fmt;

/// Hard cap on graph sizes; constructors refuse anything larger so that the
/// dense adjacency bitset stays within a sane memory budget.
pub const DEFAULT_VERTEX_LIMIT: usize = 1 << 20;

/// A Bell scenario `(n, m, d)`: `n` parties, `m` settings per party, `d`
/// outcomes per setting.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Scenario {
    n: usize,
    m: usize,
    d: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ScenarioError {
    /// Parameters outside `n >= 1`, `m >= 1`, `d >= 2`.
    InvalidParameters { n: usize, m: usize, d: usize },
    /// `(m*d)^n` does not fit in the vertex budget (or overflows).
    TooLarge { n: usize, m: usize, d: usize },
    /// An event's outcome/setting tuples do not match the scenario.
    DimensionMismatch,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::InvalidParameters { n, m, d } => {
                write!(f, "invalid scenario ({n},{m},{d}): need n>=1, m>=1, d>=2")
            }
            ScenarioError::TooLarge { n, m, d } => {
                write!(f, "scenario ({n},{m},{d}) exceeds the event budget")
            }
            ScenarioError::DimensionMismatch => write!(f, "event does not match scenario"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScenarioError {}

impl Scenario {
    pub fn new(n: usize, m: usize, d: usize) -> Result<Self, ScenarioError> {
        if n < 1 || m < 1 || d < 2 {
            return Err(ScenarioError::InvalidParameters { n, m, d });
        }
        let s = Scenario { n, m, d };
        if s.checked_event_count().is_none() {
            return Err(ScenarioError::TooLarge { n, m, d });
        }
        Ok(s)
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn settings(&self) -> usize {
        self.m
    }

    pub fn outcomes(&self) -> usize {
        self.d
    }

    fn checked_event_count(&self) -> Option<usize> {
        let base = self.m.checked_mul(self.d)?;
        let mut acc: usize = 1;
        for _ in 0..self.n {
            acc = acc.checked_mul(base)?;
            if acc > DEFAULT_VERTEX_LIMIT {
                return None;
            }
        }
        Some(acc)
    }

    /// Total number of events `(m*d)^n`.
    pub fn event_count(&self) -> usize {
        self.checked_event_count().expect("validated at construction")
    }

    /// Number of setting tuples `m^n`.
    pub fn context_count(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    /// Number of outcome tuples `d^n`.
    pub fn outcome_tuple_count(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Mixed-radix index of an event: party-major, with the setting as the
    /// high digit within each party, i.e. `sum_i (a_i + d*x_i) * (m*d)^(n-1-i)`.
    pub fn index_of(&self, outcomes: &[u8], settings: &[u8]) -> Result<usize, ScenarioError> {
        if outcomes.len() != self.n || settings.len() != self.n {
            return Err(ScenarioError::DimensionMismatch);
        }
        let mut idx = 0usize;
        for (&a, &x) in outcomes.iter().zip(settings) {
            if (a as usize) >= self.d || (x as usize) >= self.m {
                return Err(ScenarioError::DimensionMismatch);
            }
            idx = idx * (self.m * self.d) + (a as usize + self.d * x as usize);
        }
        Ok(idx)
    }

    /// Inverse of [`Scenario::index_of`].
    pub fn event(&self, index: usize) -> Event {
        debug_assert!(index < self.event_count());
        let mut outcomes = vec![0u8; self.n];
        let mut settings = vec![0u8; self.n];
        let mut rest = index;
        for i in (0..self.n).rev() {
            let digit = rest % (self.m * self.d);
            rest /= self.m * self.d;
            outcomes[i] = (digit % self.d) as u8;
            settings[i] = (digit / self.d) as u8;
        }
        Event { outcomes, settings }
    }

    /// Iterator over all events in mixed-radix index order.
    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.event_count()).map(move |i| self.event(i))
    }

    /// Scenario of the `k`-fold tensor power (`k*n` parties, same `m`, `d`).
    pub fn power(&self, k: usize) -> Result<Scenario, ScenarioError> {
        Scenario::new(self.n * k, self.m, self.d)
    }
}

/// A joint event `(a_1...a_n | x_1...x_n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Event {
    pub outcomes: Vec<u8>,
    pub settings: Vec<u8>,
}

impl Event {
    pub fn new(outcomes: Vec<u8>, settings: Vec<u8>) -> Self {
        assert_eq!(outcomes.len(), settings.len());
        Event { outcomes, settings }
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    /// Paper-style rendering `a1...an|x1...xn` (digit strings).
    pub fn label(&self) -> String {
        let mut s = String::with_capacity(2 * self.parties() + 1);
        for &a in &self.outcomes {
            s.push_str(&format!("{a}"));
        }
        s.push('|');
        for &x in &self.settings {
            s.push_str(&format!("{x}"));
        }
        s
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Local orthogonality: the events involve different outcomes of the same
/// measurement at some party. Symmetric, false on identical events.
pub fn are_orthogonal(s: &Scenario, e: &Event, f: &Event) -> Result<bool, ScenarioError> {
    if e.parties() != s.parties() || f.parties() != s.parties() {
        return Err(ScenarioError::DimensionMismatch);
    }
    Ok(e.settings
        .iter()
        .zip(&f.settings)
        .zip(e.outcomes.iter().zip(&f.outcomes))
        .any(|((xe, xf), (ae, af))| xe == xf && ae != af))
}

/// Immutable undirected graph with dense bitset adjacency.
///
/// Vertices are `0..vertex_count`; labels, when present, carry the events the
/// vertices stand for. No self-loops.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<Event>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphError {
    /// The requested graph would exceed [`DEFAULT_VERTEX_LIMIT`].
    TooLarge { vertices: usize },
    /// A vertex argument is out of range.
    VertexOutOfRange { vertex: usize, vertex_count: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::TooLarge { vertices } => {
                write!(f, "graph with {vertices} vertices exceeds the vertex limit")
            }
            GraphError::VertexOutOfRange { vertex, vertex_count } => {
                write!(f, "vertex {vertex} out of range (graph has {vertex_count})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

impl Graph {
    fn empty(n: usize, labels: Option<Vec<Event>>) -> Result<Self, GraphError> {
        if n > DEFAULT_VERTEX_LIMIT {
            return Err(GraphError::TooLarge { vertices: n });
        }
        let words = n.div_ceil(64);
        Ok(Graph { n, words, bits: vec![0u64; n * words], labels })
    }

    /// Build a graph from an explicit edge list (used mostly in tests and
    /// for the torus packing construction).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n, None)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u.max(v), vertex_count: n });
            }
            if u != v {
                g.set_edge(u, v);
            }
        }
        Ok(g)
    }

    pub(crate) fn with_labels(mut g: Graph, labels: Vec<Event>) -> Graph {
        debug_assert_eq!(g.n, labels.len());
        g.labels = Some(labels);
        g
    }

    fn set_edge(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[Event]> {
        self.labels.as_deref()
    }

    /// Adjacency row of `v` as a bitset slice (`words_per_row` words).
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edge-complement (no self-loops introduced); labels carried over.
    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n, self.labels.clone()).expect("same size");
        for v in 0..self.n {
            let src = &self.bits[v * self.words..(v + 1) * self.words];
            let dst = &mut g.bits[v * self.words..(v + 1) * self.words];
            for w in 0..self.words {
                dst[w] = !src[w];
            }
            // mask out self-loop and bits past n
            dst[v / 64] &= !(1 << (v % 64));
            let tail = self.n % 64;
            if tail != 0 {
                let last = self.words - 1;
                dst[last] &= (1u64 << tail) - 1;
            }
        }
        g
    }

    /// Subgraph induced by `vertices` (new vertex `i` is `vertices[i]`);
    /// labels carried over.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph, GraphError> {
        for &v in vertices {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, vertex_count: self.n });
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| vertices.iter().map(|&v| ls[v].clone()).collect::<Vec<_>>());
        let mut g = Graph::empty(vertices.len(), labels)?;
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.set_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// Strong product: `(u,v) ~ (u',v')` iff in each component the entries
    /// coincide or are adjacent, and the pairs differ. Vertex `(u,v)` gets
    /// index `u * h.vertex_count() + v`. Labels are not materialized.
    pub fn strong_product(&self, h: &Graph) -> Result<Graph, GraphError> {
        let n = self
            .n
            .checked_mul(h.n)
            .filter(|&n| n <= DEFAULT_VERTEX_LIMIT)
            .ok_or(GraphError::TooLarge { vertices: usize::MAX })?;
        let mut g = Graph::empty(n, None)?;
        for u in 0..self.n {
            for v in 0..h.n {
                for u2 in u..self.n {
                    let same_or_adj_u = u == u2 || self.has_edge(u, u2);
                    if !same_or_adj_u {
                        continue;
                    }
                    for v2 in 0..h.n {
                        if (u, v) >= (u2, v2) {
                            continue;
                        }
                        if v == v2 || h.has_edge(v, v2) {
                            g.set_edge(u * h.n + v, u2 * h.n + v2);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    /// Co-normal product: `(u,v) ~ (u',v')` iff `u ~ u'` or `v ~ v'`.
    /// Same vertex indexing as [`Graph::strong_product`].
    pub fn conormal_product(&self, h: &Graph) -> Result<Graph, GraphError> {
        let n = self
            .n
            .checked_mul(h.n)
            .filter(|&n| n <= DEFAULT_VERTEX_LIMIT)
            .ok_or(GraphError::TooLarge { vertices: usize::MAX })?;
        let mut g = Graph::empty(n, None)?;
        for u in 0..self.n {
            for v in 0..h.n {
                for u2 in 0..self.n {
                    for v2 in 0..h.n {
                        if (u, v) >= (u2, v2) {
                            continue;
                        }
                        if self.has_edge(u, u2) || h.has_edge(v, v2) {
                            g.set_edge(u * h.n + v, u2 * h.n + v2);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    /// `k`-fold strong power.
    pub fn strong_power(&self, k: usize) -> Result<Graph, GraphError> {
        assert!(k >= 1);
        let mut acc = self.clone();
        acc.labels = None;
        for _ in 1..k {
            acc = acc.strong_product(self)?;
        }
        Ok(acc)
    }
}

/// The orthogonality graph `O_{n,m,d}`: one vertex per event, an edge iff
/// the events are locally orthogonal. Vertices carry event labels.
pub fn orthogonality_graph(s: &Scenario) -> Result<Graph, GraphError> {
    let events: Vec<Event> = s.events().collect();
    let n = events.len();
    let mut g = Graph::empty(n, None)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if are_orthogonal(s, &events[i], &events[j]).expect("events of s") {
                g.set_edge(i, j);
            }
        }
    }
    g.labels = Some(events);
    Ok(g)
}

/// Non-orthogonality graph `NO_{n,m,d}` (complement of the orthogonality
/// graph).
pub fn non_orthogonality_graph(s: &Scenario) -> Result<Graph, GraphError> {
    Ok(orthogonality_graph(s)?.complement())
}
