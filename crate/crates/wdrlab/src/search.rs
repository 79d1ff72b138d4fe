//! Backtracking search for doubly regular team tournaments.
//!
//! Variables are the cross-part vertex pairs; each is oriented one way or the
//! other. Pairs are assigned in part-pair blocks so that the per-part balance
//! constraint of type II propagates as early as possible. Leaves are
//! validated from scratch, so every pruning rule only has to be sound, never
//! complete.

use serde::Serialize;

use crate::constructions::{
    doubly_regular_params, is_type_ii, team_tournament, DoublyRegularParams, TeamTournament,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TargetParams {
    pub alpha: usize,
    pub beta: usize,
    /// `None` matches any value; a value is also accepted vacuously when the
    /// tournament has no same-part pairs (m = 1).
    pub gamma: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSpec {
    pub r: usize,
    pub m: usize,
    pub target: Option<TargetParams>,
    pub require_type_ii: bool,
    pub limit: usize,
    /// Node-expansion cap; exceeding it ends the search inconclusively.
    pub budget: u64,
}

impl SearchSpec {
    pub fn new(r: usize, m: usize) -> Self {
        SearchSpec {
            r,
            m,
            target: None,
            require_type_ii: false,
            limit: 1,
            budget: 100_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// The whole space (up to within-part relabeling) was covered.
    Exhausted,
    LimitReached,
    /// The budget ran out first; absence of results proves nothing.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub tournaments: Vec<TeamTournament>,
    pub status: SearchStatus,
    pub nodes: u64,
}

/// Re-checks a returned tournament against the `SearchSpec` it came from.
pub fn verify_certificate(tt: &TeamTournament, spec: &SearchSpec) -> bool {
    if tt.r() != spec.r || tt.m() != spec.m {
        return false;
    }
    let params = match doubly_regular_params(tt) {
        Some(p) => p,
        None => return false,
    };
    if !target_matches(&params, &spec.target) {
        return false;
    }
    !spec.require_type_ii || is_type_ii(tt, &params)
}

fn target_matches(params: &DoublyRegularParams, target: &Option<TargetParams>) -> bool {
    match target {
        None => true,
        Some(t) => {
            params.alpha == t.alpha
                && params.beta == t.beta
                && match t.gamma {
                    None => true,
                    Some(gv) => !params.gamma_constrained || params.gamma == gv,
                }
        }
    }
}

struct Searcher {
    r: usize,
    m: usize,
    k: usize,
    spec: SearchSpec,
    use_symmetry: bool,
    /// Pair list in assignment order; pair t is (u, v) with u < v.
    pairs: Vec<(usize, usize)>,
    /// Orientation choice per pair: true = u → v.
    bits: Vec<bool>,
    out_deg: Vec<usize>,
    /// Unassigned pairs incident to each vertex.
    open: Vec<usize>,
    /// sent[v * r + p]: arcs from v into part p so far.
    sent: Vec<usize>,
    /// open_part[v * r + p]: unassigned pairs between v and part p.
    open_part: Vec<usize>,
    nodes: u64,
    results: Vec<TeamTournament>,
    status: SearchStatus,
}

impl Searcher {
    fn part_of(&self, v: usize) -> usize {
        v / self.m
    }

    fn assign(&mut self, t: usize, bit: bool) {
        let (u, v) = self.pairs[t];
        self.bits[t] = bit;
        let (from, to) = if bit { (u, v) } else { (v, u) };
        let sent_idx = from * self.r + self.part_of(to);
        let open_uv = u * self.r + self.part_of(v);
        let open_vu = v * self.r + self.part_of(u);
        self.out_deg[from] += 1;
        self.sent[sent_idx] += 1;
        self.open[u] -= 1;
        self.open[v] -= 1;
        self.open_part[open_uv] -= 1;
        self.open_part[open_vu] -= 1;
    }

    fn unassign(&mut self, t: usize, bit: bool) {
        let (u, v) = self.pairs[t];
        let (from, to) = if bit { (u, v) } else { (v, u) };
        let sent_idx = from * self.r + self.part_of(to);
        let open_uv = u * self.r + self.part_of(v);
        let open_vu = v * self.r + self.part_of(u);
        self.out_deg[from] -= 1;
        self.sent[sent_idx] -= 1;
        self.open[u] += 1;
        self.open[v] += 1;
        self.open_part[open_uv] += 1;
        self.open_part[open_vu] += 1;
    }

    fn feasible_after(&self, t: usize, bit: bool) -> bool {
        let (u, v) = self.pairs[t];
        for &x in &[u, v] {
            if self.out_deg[x] > self.k || self.out_deg[x] + self.open[x] < self.k {
                return false;
            }
        }
        if self.spec.require_type_ii {
            let half = self.m / 2;
            for &(x, y) in &[(u, v), (v, u)] {
                let p = self.part_of(y);
                let s = self.sent[x * self.r + p];
                if s > half || s + self.open_part[x * self.r + p] < half {
                    return false;
                }
            }
        }
        // Within-part normalization: vertex 0's out-neighbors in each
        // foreign part must form a prefix of that part, so a cleared bit for
        // (0, v) forbids a set bit for (0, v + 1).
        if self.use_symmetry && self.pairs[t].0 == 0 {
            let v = self.pairs[t].1;
            if bit && v % self.m != 0 {
                // The pair (0, v - 1) sits immediately before (0, v) in the
                // assignment order, so it is already decided.
                let prev = t - 1;
                debug_assert_eq!(self.pairs[prev], (0, v - 1));
                if !self.bits[prev] {
                    return false;
                }
            }
        }
        true
    }

    fn leaf(&mut self) {
        let orientation: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .zip(&self.bits)
            .map(|(&(u, v), &bit)| if bit { (u, v) } else { (v, u) })
            .collect();
        let tt = team_tournament(self.r, self.m, &orientation)
            .expect("search assigns every cross pair exactly once");
        let params = match doubly_regular_params(&tt) {
            Some(p) => p,
            None => return,
        };
        if !target_matches(&params, &self.spec.target) {
            return;
        }
        if self.spec.require_type_ii && !is_type_ii(&tt, &params) {
            return;
        }
        self.results.push(tt);
        if self.results.len() >= self.spec.limit {
            self.status = SearchStatus::LimitReached;
        }
    }

    fn dfs(&mut self, t: usize) {
        if self.status != SearchStatus::Exhausted {
            return;
        }
        if self.nodes >= self.spec.budget {
            self.status = SearchStatus::Inconclusive;
            return;
        }
        self.nodes += 1;
        if t == self.pairs.len() {
            self.leaf();
            return;
        }
        for bit in [true, false] {
            self.assign(t, bit);
            if self.feasible_after(t, bit) {
                self.dfs(t + 1);
            }
            self.unassign(t, bit);
            if self.status != SearchStatus::Exhausted {
                return;
            }
        }
    }
}

pub fn search(spec: &SearchSpec) -> Result<SearchOutcome> {
    search_with_symmetry(spec, true)
}

/// The symmetry flag only controls the within-part normalization; disabling
/// it enumerates raw orientations, which tests use to confirm the pruned
/// search still reaches every isomorphism class.
pub(crate) fn search_with_symmetry(spec: &SearchSpec, use_symmetry: bool) -> Result<SearchOutcome> {
    if spec.r < 2 || spec.m < 1 {
        return Err(Error::SearchSpec(format!(
            "need r >= 2 and m >= 1, got r={}, m={}",
            spec.r, spec.m
        )));
    }
    if spec.limit < 1 {
        return Err(Error::SearchSpec("limit must be at least 1".into()));
    }
    let r = spec.r;
    let m = spec.m;
    let n = r * m;
    // Regularity forces out-degree (r-1)m/2; odd totals are infeasible, as
    // is the balance constraint for odd part sizes.
    if (r - 1) * m % 2 != 0 || (spec.require_type_ii && m % 2 != 0) {
        return Ok(SearchOutcome {
            tournaments: Vec::new(),
            status: SearchStatus::Exhausted,
            nodes: 0,
        });
    }
    let k = (r - 1) * m / 2;
    if let Some(t) = &spec.target {
        if let (a, b, Some(gv)) = (t.alpha, t.beta, t.gamma) {
            // Row sums of the defining identity: k^2 = (α + β)k + γ(n-1-2k).
            if n >= 1 + 2 * k && (a + b) * k + gv * (n - 1 - 2 * k) != k * k {
                return Ok(SearchOutcome {
                    tournaments: Vec::new(),
                    status: SearchStatus::Exhausted,
                    nodes: 0,
                });
            }
        }
    }
    let mut pairs = Vec::new();
    for pa in 0..r {
        for pb in pa + 1..r {
            for u in pa * m..(pa + 1) * m {
                for v in pb * m..(pb + 1) * m {
                    pairs.push((u, v));
                }
            }
        }
    }
    let mut open = vec![0usize; n];
    let mut open_part = vec![0usize; n * r];
    for &(u, v) in &pairs {
        open[u] += 1;
        open[v] += 1;
        open_part[u * r + v / m] += 1;
        open_part[v * r + u / m] += 1;
    }
    let total = pairs.len();
    let mut s = Searcher {
        r,
        m,
        k,
        spec: spec.clone(),
        use_symmetry,
        pairs,
        bits: vec![false; total],
        out_deg: vec![0; n],
        open,
        sent: vec![0; n * r],
        open_part,
        nodes: 0,
        results: Vec::new(),
        status: SearchStatus::Exhausted,
    };
    s.dfs(0);
    Ok(SearchOutcome {
        tournaments: s.results,
        status: s.status,
        nodes: s.nodes,
    })
}
