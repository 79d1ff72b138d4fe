//! Dense digraph representation and the metric primitives everything else
//! builds on: two-way distances, girth, semicompleteness, induced subdigraphs.

use std::collections::VecDeque;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Label, Result};

/// Sentinel for "no path" inside distance computations; never escapes the
/// public API, which reports unreachable pairs as errors instead.
const UNREACHABLE: u16 = u16::MAX;

/// A finite simple digraph on vertices `0..n`, one adjacency bit per ordered
/// pair. Loops are rejected at construction; antiparallel pairs (edges) are
/// allowed. Values are immutable once constructed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    bits: Vec<u64>,
}

impl Digraph {
    pub(crate) fn with_vertices(n: usize) -> Self {
        let words = (n * n).div_ceil(64);
        Digraph { n, bits: vec![0; words] }
    }

    /// Builds a digraph from an arc list. Duplicate arcs collapse silently;
    /// loops and out-of-range endpoints are errors.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::ArcOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::LoopArc(u));
            }
            g.set_arc(u, v);
        }
        Ok(g)
    }

    pub(crate) fn set_arc(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        let i = u * self.n + v;
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        let i = u * self.n + v;
        (self.bits[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn arc_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.arc_count());
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.has_arc(u, v)).collect()
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_arc(u, v)).collect()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.has_arc(u, v)).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| self.has_arc(u, v)).count()
    }

    /// Copy with vertex `v` renamed to `perm[v]`. `perm` must be a bijection
    /// on `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Digraph {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let mut seen = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let mut g = Digraph::with_vertices(self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    g.set_arc(perm[u], perm[v]);
                }
            }
        }
        g
    }

    /// Forward BFS distances from `src` into `dist` (preallocated, length n).
    fn bfs(&self, src: usize, dist: &mut [u16]) {
        dist.fill(UNREACHABLE);
        dist[src] = 0;
        let mut queue = VecDeque::with_capacity(self.n);
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x];
            for y in 0..self.n {
                if self.has_arc(x, y) && dist[y] == UNREACHABLE {
                    dist[y] = dx + 1;
                    queue.push_back(y);
                }
            }
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut dist = vec![UNREACHABLE; self.n];
        self.bfs(0, &mut dist);
        if dist.contains(&UNREACHABLE) {
            return false;
        }
        // Reverse reachability: BFS over in-neighbors from vertex 0.
        dist.fill(UNREACHABLE);
        dist[0] = 0;
        let mut queue = VecDeque::with_capacity(self.n);
        queue.push_back(0);
        while let Some(x) = queue.pop_front() {
            for y in 0..self.n {
                if self.has_arc(y, x) && dist[y] == UNREACHABLE {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        !dist.contains(&UNREACHABLE)
    }

    /// All-pairs two-way distances. Errors on an empty digraph and on the
    /// lexicographically first unreachable ordered pair.
    pub fn two_way_distance(&self) -> Result<TwoWayDistanceMatrix> {
        if self.n == 0 {
            return Err(Error::EmptyDigraph);
        }
        let n = self.n;
        let mut fwd = vec![UNREACHABLE; n * n];
        for x in 0..n {
            self.bfs(x, &mut fwd[x * n..(x + 1) * n]);
        }
        for x in 0..n {
            for y in 0..n {
                if fwd[x * n + y] == UNREACHABLE {
                    return Err(Error::NotStronglyConnected { from: x, to: y });
                }
            }
        }
        let mut labels: Vec<Label> = Vec::new();
        for x in 0..n {
            for y in 0..n {
                labels.push((fwd[x * n + y] as usize, fwd[y * n + x] as usize));
            }
        }
        labels.sort_unstable();
        labels.dedup();
        Ok(TwoWayDistanceMatrix { n, fwd, labels })
    }

    /// Length of a shortest circuit: min over arcs (u,v) of 1 + ∂(v,u).
    /// Circuits are closed walks, so an edge yields girth 2.
    pub fn girth(&self) -> Result<usize> {
        if self.n == 0 {
            return Err(Error::NoCircuit);
        }
        let mut dist = vec![UNREACHABLE; self.n];
        let mut best: Option<usize> = None;
        for v in 0..self.n {
            if self.in_degree(v) == 0 {
                continue;
            }
            self.bfs(v, &mut dist);
            for u in 0..self.n {
                if self.has_arc(u, v) && dist[u] != UNREACHABLE {
                    let len = 1 + dist[u] as usize;
                    if best.map_or(true, |b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
        best.ok_or(Error::NoCircuit)
    }

    /// Every unordered pair of distinct vertices carries at least one arc.
    pub fn is_semicomplete(&self) -> bool {
        self.semicomplete_witness().is_none()
    }

    /// A nonadjacent unordered pair, lexicographically first, if any.
    pub fn semicomplete_witness(&self) -> Option<(usize, usize)> {
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_arc(u, v) && !self.has_arc(v, u) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Both the out- and in-neighborhood of every vertex induce semicomplete
    /// subdigraphs.
    pub fn is_locally_semicomplete(&self) -> bool {
        self.local_semicompleteness_witness().is_none()
    }

    /// First `(x, u, v)` such that `u, v` are nonadjacent but both lie in
    /// `N⁺(x)` or both in `N⁻(x)`.
    pub fn local_semicompleteness_witness(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.n {
            for u in 0..self.n {
                for v in u + 1..self.n {
                    if u == x || v == x || self.has_arc(u, v) || self.has_arc(v, u) {
                        continue;
                    }
                    let both_out = self.has_arc(x, u) && self.has_arc(x, v);
                    let both_in = self.has_arc(u, x) && self.has_arc(v, x);
                    if both_out || both_in {
                        return Some((x, u, v));
                    }
                }
            }
        }
        None
    }

    /// Subdigraph induced on `s` (any order, duplicates collapse), relabeled
    /// ascending. Returns the new digraph and the new-to-old vertex map.
    pub fn induced_subdigraph(&self, s: &[usize]) -> Result<(Digraph, Vec<usize>)> {
        let mut verts: Vec<usize> = s.to_vec();
        verts.sort_unstable();
        verts.dedup();
        if verts.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        if let Some(&v) = verts.iter().find(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { v, n: self.n });
        }
        let mut g = Digraph::with_vertices(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if i != j && self.has_arc(u, v) {
                    g.set_arc(i, j);
                }
            }
        }
        Ok((g, verts))
    }

    /// `Some(k)` when every vertex has out-degree and in-degree `k`.
    pub fn is_regular(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let k = self.out_degree(0);
        for v in 0..self.n {
            if self.out_degree(v) != k || self.in_degree(v) != k {
                return None;
            }
        }
        Some(k)
    }

    /// DOT text: one `u -> v;` line per arc, vertices implicit.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph {\n");
        for (u, v) in self.arcs() {
            s.push_str(&format!("  {u} -> {v};\n"));
        }
        s.push('}');
        s.push('\n');
        s
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.arcs())
    }
}

#[derive(Serialize, Deserialize)]
struct DigraphRepr {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Serialize for Digraph {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        // arcs() is already lexicographically sorted, giving bit-exact output.
        DigraphRepr { n: self.n, arcs: self.arcs() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = DigraphRepr::deserialize(de)?;
        Digraph::from_arcs(repr.n, &repr.arcs).map_err(D::Error::custom)
    }
}

/// All-pairs two-way distances of a strongly connected digraph, plus the
/// sorted set of distinct labels.
#[derive(Clone, Debug)]
pub struct TwoWayDistanceMatrix {
    n: usize,
    fwd: Vec<u16>,
    labels: Vec<Label>,
}

impl TwoWayDistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// One-way distance ∂(x, y).
    pub fn forward(&self, x: usize, y: usize) -> usize {
        self.fwd[x * self.n + y] as usize
    }

    /// The pair (∂(x,y), ∂(y,x)).
    pub fn pair(&self, x: usize, y: usize) -> Label {
        (self.forward(x, y), self.forward(y, x))
    }

    /// Distinct labels in lexicographic order. Always contains (0,0), and is
    /// closed under transposition.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}
