//! Structure theory on top of the scheme: arc types and their pure/mixed
//! character, closed label subsets, component subdigraphs, and the two
//! short-circuit configurations that govern the mixed case.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::scheme::{relation_product, IntersectionTensor, RelationPartition};
use crate::{Error, Label, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

/// The set T of arc types q with (1, q-1) present, and each type's purity.
#[derive(Clone, Debug, Serialize)]
pub struct ArcTypeProfile {
    t: Vec<usize>,
    purity: BTreeMap<usize, Purity>,
}

impl ArcTypeProfile {
    /// Arc types in ascending order.
    pub fn t_values(&self) -> &[usize] {
        &self.t
    }

    pub fn purity(&self, q: usize) -> Option<Purity> {
        self.purity.get(&q).copied()
    }

    pub fn is_mixed(&self, q: usize) -> Option<bool> {
        self.purity(q).map(|p| p == Purity::Mixed)
    }
}

/// Computes T and decides purity of each type (1, q-1).
///
/// An arc (x,y) of type (1, q-1) lies on q-circuits whose remaining arcs are
/// exactly the arcs of shortest y→x paths, so the type is pure iff every arc
/// (u,v) with ∂(y,u) + 1 + ∂(v,x) = q-1 is itself of type (1, q-1). This
/// avoids enumerating circuits and is order-independent because all arcs of
/// the class are examined.
pub fn arc_type_profile(g: &Digraph, rp: &RelationPartition) -> ArcTypeProfile {
    let arcs = g.arcs();
    let mut t = Vec::new();
    let mut purity = BTreeMap::new();
    for (li, &label) in rp.labels().iter().enumerate() {
        if label.0 != 1 {
            continue;
        }
        let q = label.1 + 1;
        t.push(q);
        let mut verdict = Purity::Pure;
        'class: for &(x, y) in &arcs {
            if rp.pair_index(x, y) != li {
                continue;
            }
            for &(u, v) in &arcs {
                if rp.forward(y, u) + 1 + rp.forward(v, x) == q - 1 && rp.pair_index(u, v) != li {
                    verdict = Purity::Mixed;
                    break 'class;
                }
            }
        }
        purity.insert(q, verdict);
    }
    t.sort_unstable();
    ArcTypeProfile { t, purity }
}

/// A closed subset of labels: contains (0,0) and is closed under the
/// transposed relation products that arise inside it.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedSubset {
    pub members: Vec<Label>,
    pub generator: Vec<Label>,
}

impl ClosedSubset {
    pub fn contains(&self, l: Label) -> bool {
        self.members.binary_search(&l).is_ok()
    }
}

/// Least closed subset containing `f0` (plus (0,0)): the fixpoint of adding
/// every h with p^h_{iᵗ,j} ≠ 0 for i, j already in the set.
pub fn closed_subset_closure(t: &IntersectionTensor, f0: &[Label]) -> Result<ClosedSubset> {
    if !t.wdr() {
        return Err(Error::NotWeaklyDistanceRegular);
    }
    if f0.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let r = t.label_count();
    let mut inside = vec![false; r];
    inside[t.label_index((0, 0)).expect("(0,0) present")] = true;
    for &l in f0 {
        let i = t.label_index(l).ok_or(Error::UnknownLabel(l.0, l.1))?;
        inside[i] = true;
    }
    loop {
        let mut grew = false;
        for i in 0..r {
            if !inside[i] {
                continue;
            }
            let ti = t.transpose_index(i);
            for j in 0..r {
                if !inside[j] {
                    continue;
                }
                for h in 0..r {
                    if !inside[h] && t.p(h, ti, j) != 0 {
                        inside[h] = true;
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let members = (0..r).filter(|&i| inside[i]).map(|i| t.labels()[i]).collect();
    let mut generator = f0.to_vec();
    generator.sort_unstable();
    generator.dedup();
    Ok(ClosedSubset { members, generator })
}

/// F(x): the vertices whose label from `x` lies in the closed subset.
/// Contains `x` itself and is sorted ascending.
pub fn f_component(rp: &RelationPartition, cs: &ClosedSubset, x: usize) -> Result<Vec<usize>> {
    if x >= rp.n() {
        return Err(Error::VertexOutOfRange { v: x, n: rp.n() });
    }
    Ok((0..rp.n()).filter(|&y| cs.contains(rp.label_of(x, y))).collect())
}

/// Δ_I(x): the subdigraph on F_I(x) keeping only arcs of types (1, q-1) for
/// q ∈ I, where F_I is the closure generated by those labels.
#[derive(Clone, Debug)]
pub struct DeltaSubdigraph {
    pub digraph: Digraph,
    /// New-to-old vertex map, ascending.
    pub vertices: Vec<usize>,
}

pub fn delta_subdigraph(
    g: &Digraph,
    rp: &RelationPartition,
    t: &IntersectionTensor,
    i_set: &[usize],
    x: usize,
) -> Result<DeltaSubdigraph> {
    if i_set.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let mut gen = Vec::new();
    for &q in i_set {
        if q < 2 || rp.label_index((1, q - 1)).is_none() {
            return Err(Error::ArcTypeNotPresent(q));
        }
        gen.push((1, q - 1));
    }
    let cs = closed_subset_closure(t, &gen)?;
    let verts = f_component(rp, &cs, x)?;
    let mut d = Digraph::with_vertices(verts.len());
    for (i, &u) in verts.iter().enumerate() {
        for (j, &v) in verts.iter().enumerate() {
            if i != j && g.has_arc(u, v) && gen.contains(&rp.label_of(u, v)) {
                d.set_arc(i, j);
            }
        }
    }
    Ok(DeltaSubdigraph { digraph: d, vertices: verts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Configuration {
    /// A type-(1, q-1) two-step collapse onto a pure (1, q-2): nonzero
    /// p^{(1,q-2)}_{(1,q-1),(1,q-1)} with (1, q-2) pure.
    C,
    /// A pure (1, q-2) step followed by its transpose landing on (1, q-1):
    /// nonzero p^{(1,q-1)}_{(1,q-2),(q-2,1)} with (1, q-2) pure.
    D,
}

/// Decides whether configuration C(q) or D(q) occurs. Labels absent from the
/// tensor make the intersection-number factor zero, hence `false`.
pub fn configuration_exists(
    t: &IntersectionTensor,
    profile: &ArcTypeProfile,
    q: usize,
    which: Configuration,
) -> Result<bool> {
    if !t.wdr() {
        return Err(Error::NotWeaklyDistanceRegular);
    }
    if q < 3 {
        return Err(Error::Invalid(format!("configuration requires q >= 3, got {q}")));
    }
    let count = match which {
        Configuration::C => t.p_by_label((1, q - 2), (1, q - 1), (1, q - 1)),
        Configuration::D => t.p_by_label((1, q - 1), (1, q - 2), (q - 2, 1)),
    };
    if count == 0 {
        return Ok(false);
    }
    // The factor is nonzero, so (1, q-2) is a label and q-1 ∈ T.
    Ok(profile.purity(q - 1) == Some(Purity::Pure))
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedAssertion {
    pub assertion: String,
    pub q: usize,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedStructureReport {
    pub assertions: Vec<MixedAssertion>,
}

impl MixedStructureReport {
    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

/// For every arc type q ≥ 4, checks that (1, q-1) is mixed exactly when C(q)
/// occurs, and that in the mixed case the relation products collapse:
/// Γ_{1,q-1}² = {Γ_{1,q-2}} and Γ_{1,q-2}Γ_{q-1,1} = {Γ_{1,q-1}}.
///
/// Errors when the preconditions of the theory fail: the tensor must be
/// weakly distance-regular and commutative and the digraph locally
/// semicomplete.
pub fn verify_mixed_structure(
    g: &Digraph,
    t: &IntersectionTensor,
    profile: &ArcTypeProfile,
) -> Result<MixedStructureReport> {
    if !t.wdr() {
        return Err(Error::NotWeaklyDistanceRegular);
    }
    if !t.commutative() {
        return Err(Error::NotCommutative);
    }
    if !g.is_locally_semicomplete() {
        return Err(Error::NotLocallySemicomplete);
    }
    let mut assertions = Vec::new();
    for &q in profile.t_values() {
        if q < 4 {
            continue;
        }
        let mixed = profile.is_mixed(q).expect("q comes from the profile");
        let c = configuration_exists(t, profile, q, Configuration::C)?;
        assertions.push(MixedAssertion {
            assertion: "mixed-iff-collapse-configuration".into(),
            q,
            pass: mixed == c,
            detail: format!("mixed={mixed}, configuration={c}"),
        });
        if mixed {
            let square = relation_product(t, &[(1, q - 1)], &[(1, q - 1)])?;
            assertions.push(MixedAssertion {
                assertion: "mixed-square-collapses".into(),
                q,
                pass: square == vec![(1, q - 2)],
                detail: format!("product {square:?}"),
            });
            let (pass, detail) = if t.label_index((1, q - 2)).is_some() {
                let restore = relation_product(t, &[(1, q - 2)], &[(q - 1, 1)])?;
                (restore == vec![(1, q - 1)], format!("product {restore:?}"))
            } else {
                (false, format!("label (1, {}) missing", q - 2))
            };
            assertions.push(MixedAssertion {
                assertion: "mixed-product-restores".into(),
                q,
                pass,
                detail,
            });
        }
    }
    Ok(MixedStructureReport { assertions })
}
