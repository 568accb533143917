//! Oriented graphs: digraphs whose underlying graph is simple.
//!
//! Vertices are the contiguous indices `1..=n`. Internally adjacency is
//! kept 0-based; every public function takes and returns 1-based vertices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertex label, always in `1..=n`.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("loop arc at vertex {0}")]
    LoopArc(Vertex),
    #[error("digon: both ({0},{1}) and ({1},{0}) are present")]
    DigonPair(Vertex, Vertex),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("arc ({0},{1}) is not present")]
    ArcNotPresent(Vertex, Vertex),
    #[error("multiplicity at position {0} must be a positive integer")]
    NonPositiveMultiplicity(usize),
    #[error("expected {expected} multiplicities, got {got}")]
    MultiplicityCount { expected: usize, got: usize },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
}

impl Arc {
    pub fn new(tail: Vertex, head: Vertex) -> Self {
        Arc { tail, head }
    }

    pub fn reversed(self) -> Self {
        Arc {
            tail: self.head,
            head: self.tail,
        }
    }
}

impl From<(Vertex, Vertex)> for Arc {
    fn from((tail, head): (Vertex, Vertex)) -> Self {
        Arc { tail, head }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.head)
    }
}

/// The four distance-1 / distance-2 neighborhoods of a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodProfile {
    pub nplus: BTreeSet<Vertex>,
    pub nplusplus: BTreeSet<Vertex>,
    pub nminus: BTreeSet<Vertex>,
    pub nminusminus: BTreeSet<Vertex>,
}

impl NeighborhoodProfile {
    pub fn dplus(&self) -> usize {
        self.nplus.len()
    }
    pub fn dplusplus(&self) -> usize {
        self.nplusplus.len()
    }
    pub fn dminus(&self) -> usize {
        self.nminus.len()
    }
    pub fn dminusminus(&self) -> usize {
        self.nminusminus.len()
    }
}

/// An orientation of a simple graph on vertices `1..=n`.
///
/// Immutable once built; all edits return a new value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    arcs: BTreeSet<Arc>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a digraph, deduplicating repeated arcs.
    pub fn new<I, A>(n: usize, arcs: I) -> Result<Self, DigraphError>
    where
        I: IntoIterator<Item = A>,
        A: Into<Arc>,
    {
        let mut set = BTreeSet::new();
        for a in arcs {
            let a = a.into();
            for v in [a.tail, a.head] {
                if v == 0 || v > n {
                    return Err(DigraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a.tail == a.head {
                return Err(DigraphError::LoopArc(a.tail));
            }
            if set.contains(&a.reversed()) {
                let (u, v) = (a.tail.min(a.head), a.tail.max(a.head));
                return Err(DigraphError::DigonPair(u, v));
            }
            set.insert(a);
        }
        Ok(Self::from_checked(n, set))
    }

    /// Digraph with `n` vertices and no arcs.
    pub fn empty(n: usize) -> Self {
        Self::from_checked(n, BTreeSet::new())
    }

    fn from_checked(n: usize, arcs: BTreeSet<Arc>) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for a in &arcs {
            out_adj[a.tail - 1].push(a.head - 1);
            in_adj[a.head - 1].push(a.tail - 1);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Digraph {
            n,
            arcs,
            out_adj,
            in_adj,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs.iter().copied()
    }

    pub fn has_arc(&self, tail: Vertex, head: Vertex) -> bool {
        self.arcs.contains(&Arc { tail, head })
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.n
    }

    fn check_vertex(&self, v: Vertex) -> Result<usize, DigraphError> {
        if v == 0 || v > self.n {
            Err(DigraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(v - 1)
        }
    }

    pub fn out_degree(&self, v: Vertex) -> Result<usize, DigraphError> {
        Ok(self.out_adj[self.check_vertex(v)?].len())
    }

    pub fn in_degree(&self, v: Vertex) -> Result<usize, DigraphError> {
        Ok(self.in_adj[self.check_vertex(v)?].len())
    }

    /// Out-distances from `source` to every vertex, `None` meaning no path.
    /// Indexed 0-based by target vertex.
    pub fn out_distances_from(&self, source: Vertex) -> Result<Vec<Option<usize>>, DigraphError> {
        let s = self.check_vertex(source)?;
        Ok(bfs(&self.out_adj, s))
    }

    /// Distances from every vertex *to* `target` (BFS on reversed arcs).
    /// Indexed 0-based by source vertex.
    pub fn in_distances_to(&self, target: Vertex) -> Result<Vec<Option<usize>>, DigraphError> {
        let t = self.check_vertex(target)?;
        Ok(bfs(&self.in_adj, t))
    }

    /// Length of a shortest directed path from `u` to `v`; `None` is infinity.
    pub fn out_distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>, DigraphError> {
        let vi = self.check_vertex(v)?;
        Ok(self.out_distances_from(u)?[vi])
    }

    pub fn neighborhoods(&self, v: Vertex) -> Result<NeighborhoodProfile, DigraphError> {
        let out = self.out_distances_from(v)?;
        let inn = self.in_distances_to(v)?;
        let at = |dist: &[Option<usize>], k: usize| -> BTreeSet<Vertex> {
            dist.iter()
                .enumerate()
                .filter(|(_, d)| **d == Some(k))
                .map(|(i, _)| i + 1)
                .collect()
        };
        Ok(NeighborhoodProfile {
            nplus: at(&out, 1),
            nplusplus: at(&out, 2),
            nminus: at(&inn, 1),
            nminusminus: at(&inn, 2),
        })
    }

    /// Vertices `u` with `d(u, v) == k`.
    pub fn vertices_at_in_distance(
        &self,
        v: Vertex,
        k: usize,
    ) -> Result<Vec<Vertex>, DigraphError> {
        Ok(self
            .in_distances_to(v)?
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == Some(k))
            .map(|(i, _)| i + 1)
            .collect())
    }

    /// `(d+(v), d++(v))` for every vertex, in vertex order.
    pub fn out_degree_table(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .map(|s| {
                let dist = bfs(&self.out_adj, s);
                let ones = dist.iter().filter(|d| **d == Some(1)).count();
                let twos = dist.iter().filter(|d| **d == Some(2)).count();
                (ones, twos)
            })
            .collect()
    }

    pub fn reverse(&self) -> Digraph {
        Self::from_checked(self.n, self.arcs.iter().map(|a| a.reversed()).collect())
    }

    pub fn delete_arc(&self, arc: Arc) -> Result<Digraph, DigraphError> {
        if !self.arcs.contains(&arc) {
            return Err(DigraphError::ArcNotPresent(arc.tail, arc.head));
        }
        let mut arcs = self.arcs.clone();
        arcs.remove(&arc);
        Ok(Self::from_checked(self.n, arcs))
    }

    /// Removes `v` and its incident arcs, compacting labels in order.
    ///
    /// The returned map is indexed by old vertex (position 0 unused) and
    /// gives the new label, `None` for the deleted vertex itself.
    pub fn delete_vertex(&self, v: Vertex) -> Result<(Digraph, Vec<Option<Vertex>>), DigraphError> {
        self.check_vertex(v)?;
        let map: Vec<Option<Vertex>> = (0..=self.n)
            .map(|old| match old {
                0 => None,
                o if o == v => None,
                o if o < v => Some(o),
                o => Some(o - 1),
            })
            .collect();
        let arcs = self
            .arcs
            .iter()
            .filter_map(|a| Some(Arc::new(map[a.tail]?, map[a.head]?)))
            .collect();
        Ok((Self::from_checked(self.n - 1, arcs), map))
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let reaches_all = |adj: &[Vec<usize>]| bfs(adj, 0).iter().all(Option::is_some);
        reaches_all(&self.out_adj) && reaches_all(&self.in_adj)
    }

    /// `d-(v) - d--(v)`.
    pub fn degree_gap(&self, v: Vertex) -> Result<i64, DigraphError> {
        let inn = self.in_distances_to(v)?;
        let ones = inn.iter().filter(|d| **d == Some(1)).count() as i64;
        let twos = inn.iter().filter(|d| **d == Some(2)).count() as i64;
        Ok(ones - twos)
    }

    pub fn min_out_degree(&self) -> Option<usize> {
        self.out_adj.iter().map(Vec::len).min()
    }

    pub fn min_in_degree(&self) -> Option<usize> {
        self.in_adj.iter().map(Vec::len).min()
    }

    /// Every unordered pair joined by exactly one arc.
    pub fn is_tournament(&self) -> bool {
        self.arcs.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Replaces vertex `i` by an independent class of `multiplicities[i-1]`
    /// vertices and every arc `(i, j)` by all arcs from class `i` to class `j`.
    ///
    /// New vertices are numbered class by class in input order. The second
    /// return value maps each new vertex (index 0 unused) to its class.
    pub fn blow_up(&self, multiplicities: &[u64]) -> Result<(Digraph, Vec<Vertex>), DigraphError> {
        if multiplicities.len() != self.n {
            return Err(DigraphError::MultiplicityCount {
                expected: self.n,
                got: multiplicities.len(),
            });
        }
        if let Some(pos) = multiplicities.iter().position(|&u| u == 0) {
            return Err(DigraphError::NonPositiveMultiplicity(pos + 1));
        }
        let mut class_of = vec![0];
        let mut members: Vec<Vec<Vertex>> = Vec::with_capacity(self.n);
        for (i, &u) in multiplicities.iter().enumerate() {
            let start = class_of.len();
            members.push((start..start + u as usize).collect());
            class_of.extend(std::iter::repeat_n(i + 1, u as usize));
        }
        let mut arcs = BTreeSet::new();
        for a in &self.arcs {
            for &x in &members[a.tail - 1] {
                for &y in &members[a.head - 1] {
                    arcs.insert(Arc::new(x, y));
                }
            }
        }
        Ok((Self::from_checked(class_of.len() - 1, arcs), class_of))
    }

    /// Relabels vertex `v` as `perm[v-1]` (a permutation of `1..=n`).
    pub fn relabel(&self, perm: &[Vertex]) -> Digraph {
        debug_assert_eq!(perm.len(), self.n);
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc::new(perm[a.tail - 1], perm[a.head - 1]))
            .collect();
        Self::from_checked(self.n, arcs)
    }

    /// Parses the `n m` / `u v` text format. `#` lines are comments.
    pub fn parse(text: &str) -> Result<Digraph, DigraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(DigraphError::Parse {
            line: 1,
            column: 1,
            message: "missing header `n m`".into(),
        })?;
        let hv = parse_fields(hline, header, 2)?;
        let (n, m) = (hv[0], hv[1]);
        let mut arcs = Vec::with_capacity(m);
        let mut last_line = hline;
        for (lineno, line) in lines.by_ref().take(m) {
            let f = parse_fields(lineno, line, 2)?;
            let arc = Arc::new(f[0], f[1]);
            if let Err(e) = Digraph::new(n, arcs.iter().copied().chain([arc])) {
                return Err(DigraphError::Parse {
                    line: lineno,
                    column: 1,
                    message: e.to_string(),
                });
            }
            arcs.push(arc);
            last_line = lineno;
        }
        if arcs.len() < m {
            return Err(DigraphError::Parse {
                line: last_line + 1,
                column: 1,
                message: format!("expected {m} arcs, found {}", arcs.len()),
            });
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(DigraphError::Parse {
                line: lineno,
                column: 1,
                message: format!("unexpected content after {m} arcs"),
            });
        }
        Digraph::new(n, arcs)
    }

    /// Writes the text format, arcs sorted lexicographically.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.arcs.len());
        for a in &self.arcs {
            s.push_str(&format!("{} {}\n", a.tail, a.head));
        }
        s
    }
}

fn parse_fields(lineno: usize, line: &str, count: usize) -> Result<Vec<usize>, DigraphError> {
    let mut out = Vec::with_capacity(count);
    let mut column = 1;
    for tok in line.split(' ') {
        if tok.is_empty() {
            return Err(DigraphError::Parse {
                line: lineno,
                column,
                message: "fields must be separated by a single space".into(),
            });
        }
        let v = tok.parse::<usize>().map_err(|_| DigraphError::Parse {
            line: lineno,
            column,
            message: format!("`{tok}` is not a non-negative integer"),
        })?;
        out.push(v);
        column += tok.len() + 1;
    }
    if out.len() != count {
        return Err(DigraphError::Parse {
            line: lineno,
            column: 1,
            message: format!("expected {count} fields, found {}", out.len()),
        });
    }
    Ok(out)
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}
