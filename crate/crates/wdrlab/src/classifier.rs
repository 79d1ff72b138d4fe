//! Hypothesis checking and the classification pipeline, together with the two
//! verification drivers: an exhaustive small-order sweep and the bundled
//! statement suite that re-checks the theory's claims on a construction grid.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constructions::{
    cayley_circulant, complete_digraph, doubly_regular_params, empty_digraph, family1, family2,
    family3, is_type_ii, lexicographic_product, team_tournament_from_digraph, TeamTournament,
};
use crate::digraph::Digraph;
use crate::iso::{are_isomorphic, canonical_form};
use crate::scheme::{
    intersection_numbers, relation_partition, verify_scheme_identities, IntersectionTensor,
    RelationPartition,
};
use crate::search::{search, SearchSpec};
use crate::structure::{
    arc_type_profile, closed_subset_closure, delta_subdigraph, f_component,
    verify_mixed_structure, ArcTypeProfile,
};
use crate::{Error, Label, Result};

/// The five clauses of the classification hypothesis, evaluated in order.
/// A later flag stays `None` when an earlier clause already failed, so the
/// report never claims anything about properties it did not compute.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub strongly_connected: bool,
    pub wdr: Option<bool>,
    pub commutative: Option<bool>,
    pub locally_semicomplete: Option<bool>,
    pub semicomplete: Option<bool>,
    /// Named clause plus a concrete witness for the first failure.
    pub first_failure: Option<String>,
}

impl HypothesisReport {
    /// True when the digraph is strongly connected, weakly distance-regular,
    /// commutative, locally semicomplete, and not semicomplete.
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            Some(clause) => write!(f, "{clause}"),
            None => write!(f, "all hypothesis clauses hold"),
        }
    }
}

/// Evaluates the hypothesis clauses in order, stopping at the first failure.
pub fn check_hypothesis(g: &Digraph) -> HypothesisReport {
    let mut rep = HypothesisReport {
        strongly_connected: false,
        wdr: None,
        commutative: None,
        locally_semicomplete: None,
        semicomplete: None,
        first_failure: None,
    };
    let rp = match relation_partition(g) {
        Ok(rp) => rp,
        Err(Error::NotStronglyConnected { from, to }) => {
            rep.first_failure =
                Some(format!("strongly-connected: no directed path from {from} to {to}"));
            return rep;
        }
        Err(e) => {
            rep.first_failure = Some(format!("strongly-connected: {e}"));
            return rep;
        }
    };
    rep.strongly_connected = true;

    let t = intersection_numbers(&rp);
    if !t.wdr() {
        rep.wdr = Some(false);
        let w = t.witness().expect("non-wdr tensor carries a witness");
        rep.first_failure = Some(format!(
            "weakly-distance-regular: pairs {:?} and {:?}, both at two-way distance {:?}, \
             see {} vs {} intermediate vertices through ({:?}, {:?})",
            w.pair1, w.pair2, w.h, w.count1, w.count2, w.i, w.j
        ));
        return rep;
    }
    rep.wdr = Some(true);

    if !t.commutative() {
        rep.commutative = Some(false);
        'outer: for h in 0..t.label_count() {
            for i in 0..t.label_count() {
                for j in 0..t.label_count() {
                    if t.p(h, i, j) != t.p(h, j, i) {
                        rep.first_failure = Some(format!(
                            "commutative: p^{:?}_{{{:?},{:?}}} = {} but p^{:?}_{{{:?},{:?}}} = {}",
                            t.labels()[h],
                            t.labels()[i],
                            t.labels()[j],
                            t.p(h, i, j),
                            t.labels()[h],
                            t.labels()[j],
                            t.labels()[i],
                            t.p(h, j, i)
                        ));
                        break 'outer;
                    }
                }
            }
        }
        return rep;
    }
    rep.commutative = Some(true);

    if let Some((x, u, v)) = g.local_semicompleteness_witness() {
        rep.locally_semicomplete = Some(false);
        rep.first_failure = Some(format!(
            "locally-semicomplete: {u} and {v} share the neighborhood of {x} but carry no arc"
        ));
        return rep;
    }
    rep.locally_semicomplete = Some(true);

    if g.is_semicomplete() {
        rep.semicomplete = Some(true);
        rep.first_failure = Some(
            "semicomplete: every two distinct vertices are adjacent, \
             but the hypothesis requires a non-adjacent pair"
                .into(),
        );
        return rep;
    }
    rep.semicomplete = Some(false);
    rep
}

/// Parameters of a matched family member. Family 3 carries a digest of the
/// fiber multiset: the SHA-256 of the fibers' canonical certificates in
/// sorted order, which is invariant under relabeling of the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilyParams {
    #[serde(rename = "1")]
    Family1 { r: usize, m: usize },
    #[serde(rename = "2")]
    Family2 { i: usize, l: usize, m: usize },
    #[serde(rename = "3")]
    Family3 { i: usize, q: usize, fiber_digest: String },
}

/// One family that matched, with the parameters used to rebuild it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchEntry {
    pub family: u8,
    pub params: FamilyParams,
}

/// Ledger entry for one family attempt: `matched`, `not-isomorphic`,
/// `construction-failed: …`, or `not-attempted: …`.
#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub family: u8,
    pub params: Option<FamilyParams>,
    pub outcome: String,
}

/// Output of [`classify`]. `family` is the first match in the precedence
/// order 2, 3, 1; `all_matches` keeps every family that matched, since
/// degenerate parameters can land in more than one. `family == None` with a
/// holding hypothesis marks a potential counterexample and is surfaced, not
/// hidden.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationResult {
    pub hypothesis: HypothesisReport,
    pub family: Option<u8>,
    pub params: Option<FamilyParams>,
    /// Vertex bijection onto a freshly constructed member of `family`,
    /// revalidated arc-exactly before being returned.
    pub witness: Option<Vec<usize>>,
    pub all_matches: Vec<MatchEntry>,
    pub attempts: Vec<Attempt>,
}

/// Runs the classification pipeline: compute the arc types T and q = max T,
/// then attempt the families suggested by the pure/mixed character of
/// (1, q-1) — the team-tournament product for pure q = 3, the circulant
/// products for q ≥ 4 (step set {1} when pure, {1, 2} on half the cycle
/// length when mixed). Every candidate is constructed from extracted
/// parameters and the verdict is always a checked isomorphism.
pub fn classify(g: &Digraph) -> Result<ClassificationResult> {
    let hypothesis = check_hypothesis(g);
    if !hypothesis.holds() {
        return Err(Error::Hypothesis(Box::new(hypothesis)));
    }
    let rp = relation_partition(g)?;
    let t = intersection_numbers(&rp);
    let profile = arc_type_profile(g, &rp);
    let tv: Vec<usize> = profile.t_values().to_vec();
    // A non-semicomplete strongly connected digraph has n ≥ 2 and at least
    // one arc, so T is never empty.
    let q = *tv.last().expect("arc types exist");
    let mixed = profile.is_mixed(q) == Some(true);

    let mut attempts: Vec<Attempt> = Vec::new();
    let mut matches: Vec<(MatchEntry, Vec<usize>)> = Vec::new();

    let try_candidate = |family: u8,
                             params: FamilyParams,
                             built: std::result::Result<Digraph, String>,
                             attempts: &mut Vec<Attempt>,
                             matches: &mut Vec<(MatchEntry, Vec<usize>)>| {
        match built {
            Err(why) => attempts.push(Attempt {
                family,
                params: Some(params),
                outcome: format!("construction-failed: {why}"),
            }),
            Ok(cand) => match are_isomorphic(g, &cand) {
                Some(w) => {
                    attempts.push(Attempt {
                        family,
                        params: Some(params.clone()),
                        outcome: "matched".into(),
                    });
                    matches.push((MatchEntry { family, params }, w));
                }
                None => attempts.push(Attempt {
                    family,
                    params: Some(params),
                    outcome: "not-isomorphic".into(),
                }),
            },
        }
    };
    let not_attempted = |family: u8, why: &str| Attempt {
        family,
        params: None,
        outcome: format!("not-attempted: {why}"),
    };

    if q < 3 {
        // Only digon types present; no family produces such a digraph under
        // a non-semicomplete hypothesis.
        let why = format!("largest arc type is {q}, below every family's circuit length");
        for fam in [2u8, 3, 1] {
            attempts.push(not_attempted(fam, &why));
        }
    } else if mixed && q == 3 {
        let why = "(1, 2) is mixed, which no family realizes";
        for fam in [2u8, 3, 1] {
            attempts.push(not_attempted(fam, why));
        }
    } else if !mixed && q == 3 {
        attempts.push(not_attempted(2, "largest arc type is 3; the circulant families start at 4"));
        attempts.push(not_attempted(3, "largest arc type is 3; the circulant families start at 4"));
        let params_guess = family1_candidate(g, &rp, &t);
        match params_guess {
            Err(why) => attempts.push(Attempt {
                family: 1,
                params: None,
                outcome: format!("construction-failed: {why}"),
            }),
            Ok((r, m, cand)) => try_candidate(
                1,
                FamilyParams::Family1 { r, m },
                Ok(cand),
                &mut attempts,
                &mut matches,
            ),
        }
    } else {
        // q ≥ 4: circulant step set {1} on Z_q when pure, {1, 2} on Z_{2q-2}
        // when mixed.
        let m = t.k(t.label_index((1, q - 1)).expect("q = max T")); // k_{1,q-1}
        let (i, l) = if mixed { (2, q - 1) } else { (1, q) };
        let built = if g.n() == i * l * m {
            family2(i, l, m).map_err(|e| e.to_string())
        } else {
            Err(format!("vertex count {} is not i*l*m = {}*{}*{}", g.n(), i, l, m))
        };
        try_candidate(2, FamilyParams::Family2 { i, l, m }, built, &mut attempts, &mut matches);

        let q3 = if mixed { q - 1 } else { q };
        if q3 < 4 {
            attempts.push(not_attempted(3, "the generalized product needs a base cycle of length at least 4"));
        } else {
            let drop: Vec<usize> = if mixed { vec![q - 1, q] } else { vec![q] };
            match family3_candidate(g, &rp, &t, &tv, i, q3, &drop) {
                Err(why) => attempts.push(Attempt {
                    family: 3,
                    params: None,
                    outcome: format!("construction-failed: {why}"),
                }),
                Ok((cand, fibers)) => {
                    let params = FamilyParams::Family3 {
                        i,
                        q: q3,
                        fiber_digest: fiber_digest(&fibers),
                    };
                    try_candidate(3, params, Ok(cand), &mut attempts, &mut matches);
                }
            }
        }
        attempts.push(not_attempted(1, &format!("largest arc type is {q}, not 3")));
    }

    let family = matches.first().map(|(e, _)| e.family);
    let params = matches.first().map(|(e, _)| e.params.clone());
    let witness = matches.first().map(|(_, w)| w.clone());
    let all_matches = matches.into_iter().map(|(e, _)| e).collect();
    Ok(ClassificationResult { hypothesis, family, params, witness, all_matches, attempts })
}

/// SHA-256 over the sorted canonical certificates of the fibers; a
/// relabeling-invariant identifier for the fiber multiset.
pub fn fiber_digest(fibers: &[Digraph]) -> String {
    let mut certs: Vec<Vec<u8>> = fibers.iter().map(|f| canonical_form(f).cert).collect();
    certs.sort();
    let mut h = Sha256::new();
    for c in &certs {
        h.update(c);
    }
    format!("{:x}", h.finalize())
}

/// Partitions the vertex set into the classes of the closed subset `cs`
/// (one per distinct component, ordered by least vertex).
fn f_classes(rp: &RelationPartition, cs: &crate::structure::ClosedSubset) -> Vec<Vec<usize>> {
    let n = rp.n();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let comp = f_component(rp, cs, v).expect("vertex in range");
        for &u in &comp {
            seen[u] = true;
        }
        classes.push(comp);
    }
    classes
}

/// Collapses each class to one vertex; arc between distinct classes when any
/// member arc crosses. Returns the quotient and each vertex's class index.
fn quotient_digraph(g: &Digraph, classes: &[Vec<usize>]) -> (Digraph, Vec<usize>) {
    let mut class_of = vec![usize::MAX; g.n()];
    for (ci, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v] = ci;
        }
    }
    let mut qd = Digraph::with_vertices(classes.len());
    for (u, v) in g.arcs() {
        if class_of[u] != class_of[v] {
            qd.set_arc(class_of[u], class_of[v]);
        }
    }
    (qd, class_of)
}

/// Orders the quotient classes along the base circulant: repeatedly take the
/// +1 successor, which for step set {1, 2} is the out-neighbor that points at
/// the other one.
fn cycle_order(qd: &Digraph, start: usize, i: usize) -> std::result::Result<Vec<usize>, String> {
    let nq = qd.n();
    let mut order = vec![start];
    let mut visited = vec![false; nq];
    visited[start] = true;
    let mut cur = start;
    for _ in 1..nq {
        let outs = qd.out_neighbors(cur);
        let next = if i == 1 {
            if outs.len() != 1 {
                return Err(format!(
                    "quotient class {cur} has {} successors, need exactly 1",
                    outs.len()
                ));
            }
            outs[0]
        } else {
            if outs.len() != 2 {
                return Err(format!(
                    "quotient class {cur} has {} successors, need exactly 2",
                    outs.len()
                ));
            }
            let (a, b) = (outs[0], outs[1]);
            match (qd.has_arc(a, b), qd.has_arc(b, a)) {
                (true, false) => a,
                (false, true) => b,
                _ => {
                    return Err(format!(
                        "successors {a} and {b} of class {cur} do not order themselves"
                    ))
                }
            }
        };
        if visited[next] {
            return Err(format!("quotient walk revisits class {next}"));
        }
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    if !qd.has_arc(cur, start) {
        return Err("quotient walk does not close into a cycle".into());
    }
    Ok(order)
}

/// Extracts fiber classes for the generalized-product family: classes of the
/// closure generated by the arc labels of all types except the dropped ones,
/// walked along the quotient cycle starting at the class of vertex 0.
fn family3_candidate(
    g: &Digraph,
    rp: &RelationPartition,
    t: &IntersectionTensor,
    tv: &[usize],
    i: usize,
    q3: usize,
    drop: &[usize],
) -> std::result::Result<(Digraph, Vec<Digraph>), String> {
    let mut gen: Vec<Label> = vec![(0, 0)];
    gen.extend(tv.iter().filter(|a| !drop.contains(a)).map(|&a| (1, a - 1)));
    let cs = closed_subset_closure(t, &gen).map_err(|e| e.to_string())?;
    let classes = f_classes(rp, &cs);
    if classes.len() != i * q3 {
        return Err(format!("found {} fiber classes, need {}", classes.len(), i * q3));
    }
    let (qd, class_of) = quotient_digraph(g, &classes);
    let order = cycle_order(&qd, class_of[0], i)?;
    let mut fibers = Vec::with_capacity(order.len());
    for &c in &order {
        let (f, _) = g.induced_subdigraph(&classes[c]).map_err(|e| e.to_string())?;
        fibers.push(f);
    }
    let (cand, _) = family3(i, q3, &fibers).map_err(|e| e.to_string())?;
    Ok((cand, fibers))
}

/// Rebuilds the team-tournament product: quotient by the digon classes
/// (trivial when type 2 is absent), demand the team-tournament label pattern
/// {(0,0),(1,2),(2,1),(2,2)}, pair parts through the unique (2,2) partner,
/// and hand the result to the family-1 constructor.
fn family1_candidate(
    g: &Digraph,
    rp: &RelationPartition,
    t: &IntersectionTensor,
) -> std::result::Result<(usize, usize, Digraph), String> {
    let (m, classes) = match t.label_index((1, 1)) {
        Some(idx) => {
            let m = t.k(idx) + 1;
            let cs = closed_subset_closure(t, &[(1, 1)]).map_err(|e| e.to_string())?;
            (m, f_classes(rp, &cs))
        }
        None => (1, (0..g.n()).map(|v| vec![v]).collect()),
    };
    for c in &classes {
        if c.len() != m {
            return Err(format!("digon class sizes are uneven: {} vs {m}", c.len()));
        }
    }
    let (qd, _) = quotient_digraph(g, &classes);
    let rq = relation_partition(&qd).map_err(|e| e.to_string())?;
    if rq.labels() != [(0, 0), (1, 2), (2, 1), (2, 2)] {
        return Err(format!(
            "quotient labels {:?} differ from the team-tournament pattern",
            rq.labels()
        ));
    }
    let nq = qd.n();
    let mut partner = vec![usize::MAX; nq];
    for c in 0..nq {
        let ps: Vec<usize> = (0..nq).filter(|&d| rq.label_of(c, d) == (2, 2)).collect();
        if ps.len() != 1 {
            return Err(format!("class {c} has {} partners at (2,2), need exactly 1", ps.len()));
        }
        partner[c] = ps[0];
    }
    // (2,2) is self-transposed, so partnering is an involution without fixed
    // points; pair classes off in part-major order.
    let mut perm = vec![usize::MAX; nq];
    let mut pos = 0;
    for c in 0..nq {
        if perm[c] == usize::MAX {
            perm[c] = pos;
            perm[partner[c]] = pos + 1;
            pos += 2;
        }
    }
    let qrel = qd.permuted(&perm);
    let lambda = team_tournament_from_digraph(&qrel, 2).map_err(|e| e.to_string())?;
    let r = lambda.r();
    let cand = family1(&lambda, m).map_err(|e| e.to_string())?;
    Ok((r, m, cand))
}

// ---------------------------------------------------------------------------
// Exhaustive small-order sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepStatus {
    Complete,
    /// The budget refused the enumeration; nothing is claimed.
    Inconclusive,
}

/// One isomorphism class of hypothesis-passing digraphs found by the sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepClass {
    pub n: usize,
    pub representative: Digraph,
    /// Number of labeled digraphs in the class.
    pub count: u64,
    pub family: Option<u8>,
    pub params: Option<FamilyParams>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub status: SweepStatus,
    /// Labeled digraphs enumerated (all orders combined).
    pub enumerated: u64,
    pub classes: Vec<SweepClass>,
    /// Classes with no matching family — would-be counterexamples.
    pub unclassified: usize,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub n_max: usize,
    pub jobs: usize,
    /// Cap on the number of labeled digraphs the sweep may enumerate.
    pub budget: u64,
    /// Checkpoint file, written after each completed order and read back on
    /// start; a partially enumerated order restarts from its first partition.
    pub checkpoint: Option<PathBuf>,
}

impl SweepOptions {
    pub fn new(n_max: usize) -> Self {
        SweepOptions { n_max, jobs: 1, budget: 1 << 31, checkpoint: None }
    }
}

/// Persisted sweep progress: the completed orders, the partition index within
/// the next order (always 0 at an order boundary), and the survivors so far.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    completed: Vec<usize>,
    partition: usize,
    survivors: Vec<SurvivorRecord>,
    enumerated: u64,
}

/// A hypothesis-passing labeled digraph, stored as its orientation code:
/// base-4 digits over unordered pairs in lexicographic order, first pair most
/// significant; 0 none, 1 low→high, 2 high→low, 3 both.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct SurvivorRecord {
    n: usize,
    code: u64,
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    pairs
}

fn digraph_from_code(n: usize, pairs: &[(usize, usize)], code: u64) -> Digraph {
    let p = pairs.len();
    let mut arcs = Vec::new();
    for (t, &(u, v)) in pairs.iter().enumerate() {
        let digit = (code >> (2 * (p - 1 - t))) & 3;
        if digit & 1 != 0 {
            arcs.push((u, v));
        }
        if digit & 2 != 0 {
            arcs.push((v, u));
        }
    }
    Digraph::from_arcs(n, &arcs).expect("codes never produce loops or range errors")
}

/// Cheap bitmask rejection: strong connectivity, local semicompleteness, and
/// non-semicompleteness. Sound for n ≤ 16; the authoritative hypothesis check
/// runs only on what passes here.
fn prefilter(n: usize, pairs: &[(usize, usize)], code: u64) -> bool {
    let p = pairs.len();
    let mut out = [0u16; 16];
    let mut inn = [0u16; 16];
    let mut nonadjacent = false;
    for (t, &(u, v)) in pairs.iter().enumerate() {
        let digit = (code >> (2 * (p - 1 - t))) & 3;
        if digit == 0 {
            nonadjacent = true;
        }
        if digit & 1 != 0 {
            out[u] |= 1 << v;
            inn[v] |= 1 << u;
        }
        if digit & 2 != 0 {
            out[v] |= 1 << u;
            inn[u] |= 1 << v;
        }
    }
    if !nonadjacent {
        return false;
    }
    let full = ((1u32 << n) - 1) as u16;
    for v in 0..n {
        if out[v] == 0 || inn[v] == 0 {
            return false;
        }
    }
    // Strong connectivity: vertex 0 reaches everything forward and backward.
    for masks in [&out, &inn] {
        let mut reach: u16 = 1;
        loop {
            let mut next = reach;
            let mut m = reach;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                next |= masks[u];
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        if reach != full {
            return false;
        }
    }
    // Local semicompleteness: both neighborhoods of every vertex induce
    // semicomplete subdigraphs.
    for v in 0..n {
        for hood in [out[v], inn[v]] {
            let mut m1 = hood;
            while m1 != 0 {
                let a = m1.trailing_zeros() as usize;
                m1 &= m1 - 1;
                let mut m2 = m1;
                while m2 != 0 {
                    let b = m2.trailing_zeros() as usize;
                    m2 &= m2 - 1;
                    if (out[a] >> b) & 1 == 0 && (out[b] >> a) & 1 == 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Enumerates every labeled digraph on 2..=n_max vertices, keeps the
/// hypothesis passers, groups them by canonical form, and classifies one
/// representative per class. The partition space is the first
/// min(3, #pairs) orientation digits; workers consume partitions from a
/// shared queue and results merge in fixed partition order, so the report is
/// identical for every `jobs` setting.
pub fn sweep(opts: &SweepOptions) -> Result<SweepReport> {
    if opts.n_max < 2 {
        return Err(Error::Invalid("sweep needs n_max >= 2".into()));
    }
    if opts.jobs < 1 {
        return Err(Error::Invalid("sweep needs at least one worker".into()));
    }

    let mut completed: Vec<usize> = Vec::new();
    let mut survivors: Vec<SurvivorRecord> = Vec::new();
    let mut enumerated: u64 = 0;
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let cp: Checkpoint = serde_json::from_str(&text)?;
            completed = cp.completed.into_iter().filter(|&n| n <= opts.n_max).collect();
            survivors = cp
                .survivors
                .into_iter()
                .filter(|s| completed.contains(&s.n))
                .collect();
            enumerated = completed.iter().map(|&n| space_size(n)).sum();
        }
    }

    let remaining: u64 = (2..=opts.n_max)
        .filter(|n| !completed.contains(n))
        .map(space_size)
        .sum();
    if remaining > opts.budget {
        let classes = group_and_classify(&survivors)?;
        let unclassified = classes.iter().filter(|c| c.family.is_none()).count();
        return Ok(SweepReport {
            n_max: opts.n_max,
            status: SweepStatus::Inconclusive,
            enumerated,
            classes,
            unclassified,
        });
    }

    for n in 2..=opts.n_max {
        if completed.contains(&n) {
            continue;
        }
        let pairs = pair_list(n);
        let p = pairs.len();
        let kp = p.min(3);
        let suffix_bits = 2 * (p - kp);
        let partitions = 1usize << (2 * kp);
        let slots: Mutex<Vec<Option<Vec<u64>>>> = Mutex::new(vec![None; partitions]);
        let counter = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..opts.jobs.min(partitions) {
                scope.spawn(|| loop {
                    let part = counter.fetch_add(1, Ordering::Relaxed);
                    if part >= partitions {
                        break;
                    }
                    let base = (part as u64) << suffix_bits;
                    let mut found = Vec::new();
                    for off in 0..(1u64 << suffix_bits) {
                        let code = base | off;
                        if !prefilter(n, &pairs, code) {
                            continue;
                        }
                        let g = digraph_from_code(n, &pairs, code);
                        if check_hypothesis(&g).holds() {
                            found.push(code);
                        }
                    }
                    slots.lock().expect("no panics hold the lock")[part] = Some(found);
                });
            }
        });
        let slots = slots.into_inner().expect("workers joined");
        for slot in slots {
            for code in slot.expect("every partition processed") {
                survivors.push(SurvivorRecord { n, code });
            }
        }
        enumerated += space_size(n);
        completed.push(n);
        if let Some(path) = &opts.checkpoint {
            let cp = Checkpoint {
                completed: completed.clone(),
                partition: 0,
                survivors: survivors.clone(),
                enumerated,
            };
            std::fs::write(path, serde_json::to_string_pretty(&cp)?)?;
        }
    }

    let classes = group_and_classify(&survivors)?;
    let unclassified = classes.iter().filter(|c| c.family.is_none()).count();
    Ok(SweepReport {
        n_max: opts.n_max,
        status: SweepStatus::Complete,
        enumerated,
        classes,
        unclassified,
    })
}

fn space_size(n: usize) -> u64 {
    1u64 << (2 * (n * (n - 1) / 2))
}

fn group_and_classify(survivors: &[SurvivorRecord]) -> Result<Vec<SweepClass>> {
    let mut classes: Vec<SweepClass> = Vec::new();
    let mut seen: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut pairs_cache: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for rec in survivors {
        let pairs = pairs_cache.entry(rec.n).or_insert_with(|| pair_list(rec.n));
        let g = digraph_from_code(rec.n, pairs, rec.code);
        let cert = canonical_form(&g).cert;
        match seen.get(&cert) {
            Some(&idx) => classes[idx].count += 1,
            None => {
                let cls = classify(&g)?;
                seen.insert(cert, classes.len());
                classes.push(SweepClass {
                    n: rec.n,
                    representative: g,
                    count: 1,
                    family: cls.family,
                    params: cls.params,
                });
            }
        }
    }
    Ok(classes)
}

// ---------------------------------------------------------------------------
// Statement verification suite
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSize {
    Small,
    Default,
}

/// One constructed instance of the grid, with the parameters that built it.
#[derive(Clone, Debug)]
pub struct GridInstance {
    pub name: String,
    pub expected: MatchEntry,
    pub digraph: Digraph,
}

/// Named fiber digraphs used by the grid's generalized products.
pub fn grid_fibers() -> Vec<(String, Digraph)> {
    vec![
        ("cycle3".into(), cayley_circulant(3, &[1]).expect("valid circulant")),
        ("paley7".into(), cayley_circulant(7, &[1, 2, 4]).expect("valid circulant")),
    ]
}

/// The searched doubly regular (4, 2)-team tournament of type II used by the
/// family-1 grid points; deterministic because the search is.
pub fn searched_lambda() -> Result<TeamTournament> {
    let mut spec = SearchSpec::new(4, 2);
    spec.require_type_ii = true;
    spec.limit = 1;
    let outcome = search(&spec)?;
    outcome
        .tournaments
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid("no type-II (4,2)-team tournament found".into()))
}

/// Builds the construction grid: the two circulant families over their small
/// parameter boxes, generalized products with 3-cycle and paley-7 fibers, and
/// team-tournament products over the searched Λ.
pub fn construction_grid(size: GridSize) -> Result<Vec<GridInstance>> {
    let mut out = Vec::new();
    let family2_box: Vec<(usize, usize, usize)> = match size {
        GridSize::Default => {
            let mut v = Vec::new();
            for i in [1, 2] {
                for l in [4, 5, 6] {
                    for m in [1, 2, 3] {
                        v.push((i, l, m));
                    }
                }
            }
            v
        }
        GridSize::Small => vec![(1, 4, 1), (2, 4, 2)],
    };
    for (i, l, m) in family2_box {
        out.push(GridInstance {
            name: format!("family2-i{i}-l{l}-m{m}"),
            expected: MatchEntry { family: 2, params: FamilyParams::Family2 { i, l, m } },
            digraph: family2(i, l, m)?,
        });
    }

    let family3_box: Vec<(usize, usize)> = match size {
        GridSize::Default => vec![(1, 4), (1, 5), (2, 4), (2, 5)],
        GridSize::Small => vec![(1, 4)],
    };
    let fibers = grid_fibers();
    for (i, q) in family3_box {
        for (fname, fib) in &fibers {
            if size == GridSize::Small && fname != "cycle3" {
                continue;
            }
            let copies: Vec<Digraph> = vec![fib.clone(); i * q];
            let (g, _) = family3(i, q, &copies)?;
            out.push(GridInstance {
                name: format!("family3-i{i}-q{q}-{fname}"),
                expected: MatchEntry {
                    family: 3,
                    params: FamilyParams::Family3 { i, q, fiber_digest: fiber_digest(&copies) },
                },
                digraph: g,
            });
        }
    }

    let lambda = searched_lambda()?;
    let family1_box: Vec<usize> = match size {
        GridSize::Default => vec![1, 2],
        GridSize::Small => vec![1],
    };
    for m in family1_box {
        out.push(GridInstance {
            name: format!("family1-r4-m{m}"),
            expected: MatchEntry { family: 1, params: FamilyParams::Family1 { r: 4, m } },
            digraph: family1(&lambda, m)?,
        });
    }
    Ok(out)
}

/// One pass/fail line of the suite: which statement, on which instance.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteItem {
    pub statement: String,
    pub instance: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub grid: GridSize,
    pub seed: u64,
    pub items: Vec<SuiteItem>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn failures(&self) -> Vec<&SuiteItem> {
        self.items.iter().filter(|i| !i.pass).collect()
    }
}

fn item(statement: &str, instance: &str, pass: bool, detail: String) -> SuiteItem {
    SuiteItem { statement: statement.into(), instance: instance.into(), pass, detail }
}

/// Per-instance checks: hypothesis flags, counting identities, the mixed-arc
/// trigger and structure, and the Δ-subdigraph isomorphisms. Statement names
/// are stable so fault injection can be observed check by check. When the
/// hypothesis fails, the dependent checks are reported as failed rather than
/// silently skipped.
pub fn instance_health(name: &str, g: &Digraph) -> Vec<SuiteItem> {
    let mut items = Vec::new();
    let hyp = check_hypothesis(g);
    items.push(item(
        "construction-hypothesis",
        name,
        hyp.holds(),
        hyp.first_failure.clone().unwrap_or_else(|| "all five flags hold".into()),
    ));
    let dependent = [
        "scheme-identities",
        "mixed-trigger",
        "mixed-structure",
        "pure-delta-cycle",
        "mixed-delta-cycle",
    ];
    if !hyp.holds() {
        for st in dependent {
            items.push(item(st, name, false, "not evaluated: the hypothesis failed".into()));
        }
        return items;
    }
    let rp = relation_partition(g).expect("hypothesis implies strong connectivity");
    let t = intersection_numbers(&rp);
    let profile = arc_type_profile(g, &rp);
    let tv: Vec<usize> = profile.t_values().to_vec();

    match verify_scheme_identities(&t) {
        Ok(rep) => {
            let failed: Vec<&str> = rep
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.identity.as_str())
                .collect();
            items.push(item(
                "scheme-identities",
                name,
                rep.all_pass(),
                if failed.is_empty() {
                    "all four identities hold".into()
                } else {
                    format!("failing: {}", failed.join(", "))
                },
            ));
        }
        Err(e) => items.push(item("scheme-identities", name, false, e.to_string())),
    }

    // A nonzero p^{(2,q-2)}_{(1,s-1),(1,t-1)} with q ∈ T \ {s} forces
    // (1, q-1) to be mixed.
    let mut trigger_pass = true;
    let mut trigger_detail = String::from("no trigger fires, or every fired trigger is mixed");
    'trigger: for &s in &tv {
        for &tt in &tv {
            for &qq in &tv {
                if qq == s || qq < 2 {
                    continue;
                }
                let pval = t.p_by_label((2, qq - 2), (1, s - 1), (1, tt - 1));
                if pval != 0 && profile.is_mixed(qq) != Some(true) {
                    trigger_pass = false;
                    trigger_detail = format!(
                        "p^(2,{})_((1,{}),(1,{})) = {pval} but type {qq} is not mixed",
                        qq - 2,
                        s - 1,
                        tt - 1
                    );
                    break 'trigger;
                }
            }
        }
    }
    items.push(item("mixed-trigger", name, trigger_pass, trigger_detail));

    match verify_mixed_structure(g, &t, &profile) {
        Ok(rep) => {
            let failed: Vec<String> = rep
                .assertions
                .iter()
                .filter(|a| !a.pass)
                .map(|a| format!("{} (q={}): {}", a.assertion, a.q, a.detail))
                .collect();
            items.push(item(
                "mixed-structure",
                name,
                rep.all_pass(),
                if failed.is_empty() {
                    format!("{} assertions hold", rep.assertions.len())
                } else {
                    failed.join("; ")
                },
            ));
        }
        Err(e) => items.push(item("mixed-structure", name, false, e.to_string())),
    }

    items.push(delta_item(name, g, &rp, &t, &profile, false));
    items.push(delta_item(name, g, &rp, &t, &profile, true));
    items
}

/// Checks Δ_q(x) ≅ Cay(Z_q,{1})[K̄_m] for pure q ≥ 4 (or
/// Δ_{q-1,q}(x) ≅ Cay(Z_{2q-2},{1,2})[K̄_m] for mixed q ≥ 4), sampling one x
/// per component of the respective closure.
fn delta_item(
    name: &str,
    g: &Digraph,
    rp: &RelationPartition,
    t: &IntersectionTensor,
    profile: &ArcTypeProfile,
    want_mixed: bool,
) -> SuiteItem {
    let statement = if want_mixed { "mixed-delta-cycle" } else { "pure-delta-cycle" };
    let mut checked = 0usize;
    for &q in profile.t_values() {
        if q < 4 || (profile.is_mixed(q) == Some(true)) != want_mixed {
            continue;
        }
        let m = t.k(t.label_index((1, q - 1)).expect("q in T"));
        let i_set: Vec<usize> = if want_mixed { vec![q - 1, q] } else { vec![q] };
        let target = match build_delta_target(q, m, want_mixed) {
            Ok(d) => d,
            Err(e) => return item(statement, name, false, format!("target build failed: {e}")),
        };
        let gen: Vec<Label> = i_set.iter().map(|&a| (1, a - 1)).collect();
        let cs = match closed_subset_closure(t, &gen) {
            Ok(cs) => cs,
            Err(e) => return item(statement, name, false, format!("closure failed: {e}")),
        };
        for class in f_classes(rp, &cs) {
            let x = class[0];
            let delta = match delta_subdigraph(g, rp, t, &i_set, x) {
                Ok(d) => d,
                Err(e) => {
                    return item(statement, name, false, format!("subdigraph at {x} failed: {e}"))
                }
            };
            if are_isomorphic(&delta.digraph, &target).is_none() {
                return item(
                    statement,
                    name,
                    false,
                    format!("subdigraph at vertex {x} for type {q} misses the cycle product"),
                );
            }
            checked += 1;
        }
    }
    let detail = if checked == 0 {
        format!("vacuous: no {} type of length >= 4", if want_mixed { "mixed" } else { "pure" })
    } else {
        format!("{checked} base points verified")
    };
    item(statement, name, true, detail)
}

fn build_delta_target(q: usize, m: usize, mixed: bool) -> Result<Digraph> {
    let base = if mixed {
        cayley_circulant(2 * q - 2, &[1, 2])?
    } else {
        cayley_circulant(q, &[1])?
    };
    lexicographic_product(&base, &empty_digraph(m)?)
}

/// Runs the bundled statement checks over the construction grid: instance
/// health for every grid point, seeded relabeled identity checks, the
/// diameter bound on the semicomplete fiber digraphs, and the value/type
/// claims for the searched team tournament.
pub fn run_paper_suite(size: GridSize, seed: u64) -> Result<SuiteReport> {
    let grid = construction_grid(size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::new();

    for inst in &grid {
        items.extend(instance_health(&inst.name, &inst.digraph));

        // One seeded relabeling per instance: the identities must survive a
        // recomputation from a permuted copy.
        let mut perm: Vec<usize> = (0..inst.digraph.n()).collect();
        perm.shuffle(&mut rng);
        let permuted = inst.digraph.permuted(&perm);
        let pass = relation_partition(&permuted)
            .map(|rp| intersection_numbers(&rp))
            .and_then(|t| verify_scheme_identities(&t))
            .map(|rep| rep.all_pass())
            .unwrap_or(false);
        items.push(item(
            "scheme-identities-relabeled",
            &inst.name,
            pass,
            "identities recomputed on a seeded relabeling".into(),
        ));
    }

    // Semicomplete digraphs stay within two-way distance {(0,0),(1,1),(1,2),(2,1)}.
    let mut fiber_instances = grid_fibers();
    fiber_instances.push(("complete2".into(), complete_digraph(2)?));
    fiber_instances.push(("complete3".into(), complete_digraph(3)?));
    for (fname, fib) in &fiber_instances {
        let allowed = [(0, 0), (1, 1), (1, 2), (2, 1)];
        let result = relation_partition(fib);
        let (pass, detail) = match result {
            Ok(rp) => {
                let bad: Vec<Label> =
                    rp.labels().iter().copied().filter(|l| !allowed.contains(l)).collect();
                if !fib.is_semicomplete() {
                    (false, "instance is not semicomplete".into())
                } else if bad.is_empty() {
                    (true, format!("labels {:?}", rp.labels()))
                } else {
                    (false, format!("labels outside the bound: {bad:?}"))
                }
            }
            Err(e) => (false, e.to_string()),
        };
        items.push(item("semicomplete-diameter", &format!("fiber-{fname}"), pass, detail));
    }

    // Value and type claims for the searched doubly regular team tournament.
    let lambda = searched_lambda()?;
    items.push(team_values_item(&lambda));
    items.push(team_type_item(&lambda));

    Ok(SuiteReport { grid: size, seed, items })
}

fn team_values_item(lambda: &TeamTournament) -> SuiteItem {
    let name = format!("lambda-r{}-m{}", lambda.r(), lambda.m());
    let rp = match relation_partition(lambda.digraph()) {
        Ok(rp) => rp,
        Err(e) => return item("team-tournament-values", &name, false, e.to_string()),
    };
    let t = intersection_numbers(&rp);
    if rp.labels() != [(0, 0), (1, 2), (2, 1), (2, 2)] {
        return item(
            "team-tournament-values",
            &name,
            false,
            format!("labels {:?}", rp.labels()),
        );
    }
    let k12 = t.k(t.label_index((1, 2)).expect("label checked"));
    let k22 = t.k(t.label_index((2, 2)).expect("label checked"));
    let half = t.p_by_label((1, 2), (1, 2), (1, 2));
    let half_tr = t.p_by_label((2, 1), (1, 2), (1, 2));
    let full = t.p_by_label((2, 2), (1, 2), (1, 2));
    let pass = half == (k12 - 1) / 2 && half_tr == (k12 - 1) / 2 && full == k12 && k22 == 1;
    item(
        "team-tournament-values",
        &name,
        pass,
        format!(
            "p^(1,2) = {half}, p^(2,1) = {half_tr} (want {}), p^(2,2) = {full} (want {k12}), \
             k_(2,2) = {k22} (want 1)",
            (k12 - 1) / 2
        ),
    )
}

fn team_type_item(lambda: &TeamTournament) -> SuiteItem {
    let name = format!("lambda-r{}-m{}", lambda.r(), lambda.m());
    let params = match doubly_regular_params(lambda) {
        Some(p) => p,
        None => {
            return item("team-tournament-type", &name, false, "not doubly regular".into())
        }
    };
    let rp = match relation_partition(lambda.digraph()) {
        Ok(rp) => rp,
        Err(e) => return item("team-tournament-type", &name, false, e.to_string()),
    };
    let t = intersection_numbers(&rp);
    let k12 = match t.label_index((1, 2)) {
        Some(idx) => t.k(idx),
        None => return item("team-tournament-type", &name, false, "label (1,2) missing".into()),
    };
    let pass = params.alpha == 1
        && params.beta == 1
        && params.gamma == 3
        && params.gamma_constrained
        && is_type_ii(lambda, &params)
        && k12 % 4 == 3;
    item(
        "team-tournament-type",
        &name,
        pass,
        format!(
            "(alpha, beta, gamma) = ({}, {}, {}), type II = {}, k_(1,2) = {k12} ≡ {} (mod 4)",
            params.alpha,
            params.beta,
            params.gamma,
            is_type_ii(lambda, &params),
            k12 % 4
        ),
    )
}
