//! Bell inequalities and PR boxes under relabelings, inseparability
//! witness reports built from PD polytopes, the NS₂ and Svetlichny sets,
//! broadcast-local sets and the sequential Wigner's-friend mapping.
//!
//! Correlators use the convention that the first output of every input
//! counts as +1 and the second as −1.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::behaviour::Behaviour;
use crate::error::{Error, Result};
use crate::exactgeom::{tight_set, AffineFunctional, HRep, MembershipCertificate};
use crate::num::{q, qi, Q};
use crate::polytopes::{Enumerator, Family, VertexSet};
use crate::product::set_product;
use crate::scenario::{tuples, InputCollection, Scenario};

/// A relabeling of parties, inputs and outputs between scenarios of the
/// same shape. New party `i` is old party `parties[i]`; its input `x` is
/// old input `inputs[i][x]`, whose output `a` is old output
/// `outputs[i][x][a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub parties: Vec<usize>,
    pub inputs: Vec<Vec<usize>>,
    pub outputs: Vec<Vec<Vec<usize>>>,
}

impl Relabeling {
    pub fn identity(s: &Scenario) -> Self {
        let n = s.num_parties();
        Relabeling {
            parties: (0..n).collect(),
            inputs: (0..n).map(|i| (0..s.num_inputs(i)).collect()).collect(),
            outputs: (0..n)
                .map(|i| {
                    (0..s.num_inputs(i))
                        .map(|x| (0..s.num_outputs(i, x)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    fn validate(&self, s: &Scenario) -> Result<()> {
        let n = s.num_parties();
        let bad = || Error::validation("relabeling does not match the scenario shape");
        let perm = |v: &[usize], k: usize| {
            let mut seen = vec![false; k];
            v.len() == k
                && v.iter()
                    .all(|&j| j < k && !std::mem::replace(&mut seen[j], true))
        };
        if !perm(&self.parties, n) || self.inputs.len() != n || self.outputs.len() != n {
            return Err(bad());
        }
        for i in 0..n {
            let j = self.parties[i];
            if s.num_inputs(i) != s.num_inputs(j) || !perm(&self.inputs[i], s.num_inputs(i)) {
                return Err(bad());
            }
            if self.outputs[i].len() != s.num_inputs(i) {
                return Err(bad());
            }
            for x in 0..s.num_inputs(i) {
                let y = self.inputs[i][x];
                if s.num_outputs(i, x) != s.num_outputs(j, y)
                    || !perm(&self.outputs[i][x], s.num_outputs(i, x))
                {
                    return Err(bad());
                }
            }
        }
        Ok(())
    }

    /// σ with (R p)_c = p_{σ(c)}.
    pub fn coordinate_map(&self, s: &Scenario) -> Result<Vec<usize>> {
        self.validate(s)?;
        let n = s.num_parties();
        let mut map = Vec::with_capacity(s.ambient_dim());
        for ctx in s.contexts() {
            for out in tuples(&s.outcome_radices(&ctx)) {
                let mut octx = vec![0; n];
                let mut oout = vec![0; n];
                for i in 0..n {
                    let j = self.parties[i];
                    octx[j] = self.inputs[i][ctx[i]];
                    oout[j] = self.outputs[i][ctx[i]][out[i]];
                }
                map.push(s.coord(&octx, &oout));
            }
        }
        Ok(map)
    }

    pub fn apply(&self, p: &Behaviour) -> Result<Behaviour> {
        let s = p.scenario();
        let map = self.coordinate_map(s)?;
        let v: Vec<Q> = map.iter().map(|&c| p.as_vector()[c].clone()).collect();
        Behaviour::new(s.clone(), v)
    }

    /// f′ with f′(p) = f(R p).
    pub fn apply_functional(&self, s: &Scenario, f: &AffineFunctional) -> Result<AffineFunctional> {
        let map = self.coordinate_map(s)?;
        let mut coeffs = vec![Q::zero(); s.ambient_dim()];
        for (c, &sc) in map.iter().enumerate() {
            coeffs[sc] = f.coeffs[c].clone();
        }
        Ok(AffineFunctional::new(coeffs, f.bound.clone()))
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Every relabeling of a scenario whose parties, inputs and outputs are
/// interchangeable (uniform shape), in a fixed order.
pub fn all_relabelings(s: &Scenario) -> Result<Vec<Relabeling>> {
    let n = s.num_parties();
    let m = s.num_inputs(0);
    let k = s.num_outputs(0, 0);
    if (0..n).any(|i| s.num_inputs(i) != m || (0..m).any(|x| s.num_outputs(i, x) != k)) {
        return Err(Error::validation(
            "relabeling orbits need a uniform scenario",
        ));
    }
    let pp = permutations(n);
    let ip = permutations(m);
    let op = permutations(k);
    let slots = n * m;
    let mut out = Vec::new();
    for parties in &pp {
        for input_choice in tuples(&vec![ip.len(); n]) {
            for output_choice in tuples(&vec![op.len(); slots]) {
                out.push(Relabeling {
                    parties: parties.clone(),
                    inputs: input_choice.iter().map(|&c| ip[c].clone()).collect(),
                    outputs: (0..n)
                        .map(|i| {
                            (0..m)
                                .map(|x| op[output_choice[i * m + x]].clone())
                                .collect()
                        })
                        .collect(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityTag {
    Ch,
    Chsh,
    Sliwa3A,
    Sliwa3B,
    Sliwa3C,
    Custom(String),
}

impl fmt::Display for InequalityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InequalityTag::Ch => write!(f, "CH"),
            InequalityTag::Chsh => write!(f, "CHSH"),
            InequalityTag::Sliwa3A => write!(f, "Sliwa3A"),
            InequalityTag::Sliwa3B => write!(f, "Sliwa3B"),
            InequalityTag::Sliwa3C => write!(f, "Sliwa3C"),
            InequalityTag::Custom(s) => write!(f, "{s}"),
        }
    }
}

impl InequalityTag {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ch" => InequalityTag::Ch,
            "chsh" => InequalityTag::Chsh,
            "sliwa3a" => InequalityTag::Sliwa3A,
            "sliwa3b" => InequalityTag::Sliwa3B,
            "sliwa3c" => InequalityTag::Sliwa3C,
            other => return Err(Error::validation(format!("unknown inequality {other:?}"))),
        })
    }
}

/// `functional.coeffs · p ≤ functional.bound` in probability coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub scenario: Scenario,
    pub functional: AffineFunctional,
    pub tag: InequalityTag,
    pub relabeling: Option<Relabeling>,
}

impl Inequality {
    pub fn value(&self, p: &Behaviour) -> Q {
        self.functional.value(p.as_vector())
    }

    pub fn bound(&self) -> &Q {
        &self.functional.bound
    }

    pub fn is_satisfied(&self, p: &Behaviour) -> bool {
        self.functional.is_satisfied(p.as_vector())
    }
}

fn require_shape(s: &Scenario, parties: usize, what: &str) -> Result<()> {
    let ok = s.num_parties() == parties
        && (0..parties).all(|i| s.num_inputs(i) == 2 && (0..2).all(|x| s.num_outputs(i, x) == 2));
    if ok {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "{what} needs {parties} parties with two binary-output inputs each"
        )))
    }
}

/// Coefficients of the full correlator ⟨∏_i A^{(i)}_{x_i}⟩ in context `ctx`.
pub fn correlator(s: &Scenario, ctx: &[usize]) -> Vec<Q> {
    let mut v = vec![Q::zero(); s.ambient_dim()];
    for out in tuples(&s.outcome_radices(ctx)) {
        let minus = out.iter().filter(|&&a| a == 1).count() % 2 == 1;
        if out.iter().all(|&a| a < 2) {
            v[s.coord(ctx, &out)] = if minus { -Q::one() } else { Q::one() };
        }
    }
    v
}

fn add_scaled(acc: &mut [Q], v: &[Q], c: i64) {
    let c = qi(c);
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += &c * x;
        }
    }
}

fn base_functional(s: &Scenario, tag: &InequalityTag) -> Result<AffineFunctional> {
    let d = s.ambient_dim();
    match tag {
        InequalityTag::Chsh => {
            require_shape(s, 2, "CHSH")?;
            let mut c = vec![Q::zero(); d];
            for ctx in s.contexts() {
                let sign = if ctx == [1, 1] { -1 } else { 1 };
                add_scaled(&mut c, &correlator(s, &ctx), sign);
            }
            Ok(AffineFunctional::new(c, qi(2)))
        }
        InequalityTag::Ch => {
            // p(11|11) + p(11|12) + p(11|21) − p(11|22) − p_A(1|1) − p_B(1|1) ≤ 0,
            // with the marginals read in contexts (1,1).
            require_shape(s, 2, "CH")?;
            let mut c = vec![Q::zero(); d];
            for (ctx, sign) in [([0, 0], 1), ([0, 1], 1), ([1, 0], 1), ([1, 1], -1)] {
                c[s.coord(&ctx, &[0, 0])] += qi(sign);
            }
            for b in 0..2 {
                c[s.coord(&[0, 0], &[0, b])] -= Q::one();
                c[s.coord(&[0, 0], &[b, 0])] -= Q::one();
            }
            Ok(AffineFunctional::new(c, Q::zero()))
        }
        InequalityTag::Sliwa3A | InequalityTag::Sliwa3B | InequalityTag::Sliwa3C => {
            require_shape(s, 3, "Sliwa")?;
            let terms: [([usize; 3], i64); 4] = match tag {
                InequalityTag::Sliwa3A => [
                    ([0, 0, 0], 1),
                    ([1, 0, 0], 1),
                    ([0, 1, 1], 1),
                    ([1, 1, 1], -1),
                ],
                InequalityTag::Sliwa3B => [
                    ([0, 0, 0], 1),
                    ([0, 1, 0], 1),
                    ([1, 0, 1], 1),
                    ([1, 1, 1], -1),
                ],
                _ => [
                    ([0, 0, 0], 1),
                    ([0, 0, 1], 1),
                    ([1, 1, 0], 1),
                    ([1, 1, 1], -1),
                ],
            };
            let mut c = vec![Q::zero(); d];
            for (ctx, sign) in terms {
                add_scaled(&mut c, &correlator(s, &ctx), sign);
            }
            Ok(AffineFunctional::new(c, qi(2)))
        }
        InequalityTag::Custom(name) => Err(Error::validation(format!(
            "custom inequality {name:?} has no built-in form"
        ))),
    }
}

/// The tagged inequality, optionally relabeled: with relabeling R the
/// result is the functional p ↦ f(R p).
pub fn build_inequality(
    s: &Scenario,
    tag: InequalityTag,
    relabeling: Option<&Relabeling>,
) -> Result<Inequality> {
    let base = base_functional(s, &tag)?;
    let functional = match relabeling {
        Some(r) => r.apply_functional(s, &base)?,
        None => base,
    };
    Ok(Inequality {
        scenario: s.clone(),
        functional,
        tag,
        relabeling: relabeling.cloned(),
    })
}

/// Distinct members of the relabeling orbit of an inequality, compared as
/// coefficient vectors. First representative kept, in relabeling order.
pub fn inequality_orbit(s: &Scenario, tag: InequalityTag) -> Result<Vec<Inequality>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in all_relabelings(s)? {
        let ineq = build_inequality(s, tag.clone(), Some(&r))?;
        if seen.insert(ineq.functional.clone()) {
            out.push(ineq);
        }
    }
    Ok(out)
}

/// p(ab|xy) = 1/2 when a ⊕ b = x·y (0-based labels): the correlator is +1
/// except in context (2,2) where it is −1, marginals unbiased.
pub fn pr_box(s: &Scenario, relabeling: Option<&Relabeling>) -> Result<Behaviour> {
    require_shape(s, 2, "PR box")?;
    let p = Behaviour::from_fn(s, |x, a| {
        if (a[0] ^ a[1]) == (x[0] & x[1]) {
            q(1, 2)
        } else {
            Q::zero()
        }
    })?;
    match relabeling {
        Some(r) => r.apply(&p),
        None => Ok(p),
    }
}

/// Distinct relabelings of the PR box.
pub fn pr_box_orbit(s: &Scenario) -> Result<Vec<Behaviour>> {
    let base = pr_box(s, None)?;
    let mut set = BTreeSet::new();
    for r in all_relabelings(s)? {
        set.insert(r.apply(&base)?);
    }
    Ok(set.into_iter().collect())
}

/// Tripartite box where party `k` outputs its first outcome on both inputs
/// and the other two share a PR box (⟨A_k⟩ = 1, correlators +1 except −1
/// at inputs (2,2) of the pair).
pub fn partial_pr_box(s: &Scenario, k: usize) -> Result<Behaviour> {
    require_shape(s, 3, "partial PR box")?;
    if k >= 3 {
        return Err(Error::validation("party index out of range"));
    }
    let pair: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    Behaviour::from_fn(s, |x, a| {
        let (i, j) = (pair[0], pair[1]);
        if a[k] == 0 && (a[i] ^ a[j]) == (x[i] & x[j]) {
            q(1, 2)
        } else {
            Q::zero()
        }
    })
}

/// A list 𝓘 of nonempty party subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartySubsetCollection {
    subsets: Vec<Vec<usize>>,
}

impl PartySubsetCollection {
    pub fn new(s: &Scenario, mut subsets: Vec<Vec<usize>>) -> Result<Self> {
        for sub in &mut subsets {
            sub.sort_unstable();
            sub.dedup();
            if sub.is_empty() {
                return Err(Error::validation("party subsets must be nonempty"));
            }
            if sub.iter().any(|&i| i >= s.num_parties()) {
                return Err(Error::validation("party index out of range"));
            }
        }
        Ok(PartySubsetCollection { subsets })
    }

    /// 𝓘^max: every singleton.
    pub fn maximal(s: &Scenario) -> Self {
        PartySubsetCollection {
            subsets: (0..s.num_parties()).map(|i| vec![i]).collect(),
        }
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
}

/// What a membership pattern certifies about the behaviour. These are
/// statements about behaviour sets only: a behaviour outside a set cannot
/// come from local measurements on states of the matching separability
/// class. Nothing is concluded from being inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Outside PD(S, M^{I′}).
    Inseparable(Vec<usize>),
    /// Outside at least one PD(S, M^{I′}), i.e. outside the intersection.
    WeaklyInseparable,
    /// Outside every PD(S, M^{I′}), i.e. outside the union.
    CollectionInseparable,
    /// Outside conv of the union.
    StronglyInseparable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetMembership {
    pub parties: Vec<usize>,
    pub collection: InputCollection,
    pub certificate: MembershipCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InseparabilityReport {
    pub members: Vec<SubsetMembership>,
    pub in_intersection: bool,
    pub in_union: bool,
    /// Certificate against the merged vertex list of all PD(S, M^{I′}).
    pub conv_union: MembershipCertificate,
    pub witnesses: Vec<Witness>,
}

/// Membership of `wp` in each PD(S, M^{I′}), their intersection, union and
/// the convex hull of the union.
pub fn inseparability_report(
    wp: &Behaviour,
    coll: &PartySubsetCollection,
    e: &Enumerator,
) -> Result<InseparabilityReport> {
    let s = wp.scenario();
    let mut members = Vec::new();
    let mut merged: Option<VertexSet> = None;
    for sub in coll.subsets() {
        let m = s.party_collection(sub)?;
        let set = e.pd(s, &m)?;
        let certificate = set.membership(wp, e.budget())?;
        merged = Some(match merged {
            None => set.clone(),
            Some(acc) => acc.union(&set, Family::Custom("union".into()))?,
        });
        members.push(SubsetMembership {
            parties: sub.clone(),
            collection: m,
            certificate,
        });
    }
    let merged = merged.ok_or_else(|| Error::validation("empty party subset collection"))?;
    let conv_union = merged.membership(wp, e.budget())?;
    let in_intersection = members.iter().all(|m| m.certificate.is_inside());
    let in_union = members.iter().any(|m| m.certificate.is_inside());
    let mut witnesses: Vec<Witness> = members
        .iter()
        .filter(|m| !m.certificate.is_inside())
        .map(|m| Witness::Inseparable(m.parties.clone()))
        .collect();
    if !in_intersection {
        witnesses.push(Witness::WeaklyInseparable);
    }
    if !in_union {
        witnesses.push(Witness::CollectionInseparable);
    }
    if !conv_union.is_inside() {
        witnesses.push(Witness::StronglyInseparable);
    }
    Ok(InseparabilityReport {
        members,
        in_intersection,
        in_union,
        conv_union,
        witnesses,
    })
}

fn require_tripartite(s: &Scenario) -> Result<()> {
    if s.num_parties() == 3 {
        Ok(())
    } else {
        Err(Error::validation("this set is defined for three parties"))
    }
}

/// NS₂: the union of the vertex sets of PD(S, M^{i}) over parties i.
pub fn ns2_vertices(s: &Scenario, e: &Enumerator) -> Result<VertexSet> {
    require_tripartite(s)?;
    let mut all = Vec::new();
    for i in 0..3 {
        all.extend(
            e.pd(s, &s.party_collection(&[i])?)?
                .vertices()
                .iter()
                .cloned(),
        );
    }
    VertexSet::new(s.clone(), Family::Custom("ns2".into()), all)
}

/// Svetlichny set: ∪_i B(S^{i}) ⊙ E(S^{i⊥}), where the second factor may
/// signal between the two remaining parties.
pub fn svetlichny_vertices(s: &Scenario, e: &Enumerator) -> Result<VertexSet> {
    require_tripartite(s)?;
    let mut all = Vec::new();
    for i in 0..3 {
        let m = s.party_collection(&[i])?;
        let left = e.bell(&s.restrict(&m)?.sub)?;
        let right = e.e(&s.restrict(&m.complement(s))?.sub)?;
        let prod = set_product(s, &m, &left, &right, Family::Custom("svetlichny".into()))?;
        all.extend(prod.vertices().iter().cloned());
    }
    VertexSet::new(s.clone(), Family::Custom("svetlichny".into()), all)
}

/// Broadcast-local set with local parties `local` and broadcasting blocks
/// partitioning the remaining parties. Without blocks this is
/// PD(S, M^{I_L}); with blocks it is B(S^{I_L}) ⊙ NS(S^{B_1}) ⊙ NS(S^{B_2}) ⊙ ….
pub fn broadcast_local_vertices(
    s: &Scenario,
    local: &[usize],
    blocks: Option<&[Vec<usize>]>,
    e: &Enumerator,
) -> Result<VertexSet> {
    let n = s.num_parties();
    let mut owner = vec![None; n];
    for &i in local {
        if i >= n || owner[i].replace(0usize).is_some() {
            return Err(Error::validation(
                "local parties must be distinct party indices",
            ));
        }
    }
    let fam = Family::Custom("broadcast-local".into());
    let Some(blocks) = blocks else {
        return Ok(e.pd(s, &s.party_collection(local)?)?.with_family(fam));
    };
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::validation("broadcast blocks must be nonempty"));
        }
        for &i in block {
            if i >= n || owner[i].replace(b + 1).is_some() {
                return Err(Error::validation(
                    "broadcast blocks overlap or repeat a local party",
                ));
            }
        }
    }
    if owner.iter().any(|o| o.is_none()) {
        return Err(Error::validation("blocks must cover every non-local party"));
    }
    let sub_of = |parties: &[usize]| -> Result<Scenario> {
        Ok(s.restrict(&s.party_collection(parties)?)?.sub)
    };
    let mut acc_parties: Vec<usize> = local.to_vec();
    let mut rest = blocks.iter();
    let mut acc = if local.is_empty() {
        let first = rest.next().ok_or_else(|| Error::validation("no parties"))?;
        acc_parties = first.clone();
        e.ns(&sub_of(first)?)?
    } else {
        e.bell(&sub_of(local)?)?
    };
    for block in rest {
        let mut joined = acc_parties.clone();
        joined.extend_from_slice(block);
        joined.sort_unstable();
        let js = sub_of(&joined)?;
        let inner: Vec<usize> = acc_parties
            .iter()
            .map(|i| joined.iter().position(|j| j == i).unwrap())
            .collect();
        let m = js.party_collection(&inner)?;
        let right = e.ns(&sub_of(block)?)?;
        acc_parties = joined;
        acc = set_product(&js, &m, &acc, &right, fam.clone())?;
    }
    Ok(acc.with_family(fam))
}

/// A sequential Wigner's-friend scenario: party i's first `queries[i]`
/// inputs are those where a friend's recorded outcome is queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialScenario {
    pub base: Scenario,
    pub queries: Vec<usize>,
}

impl SequentialScenario {
    pub fn new(base: Scenario, queries: Vec<usize>) -> Result<Self> {
        if queries.len() != base.num_parties() {
            return Err(Error::DimensionMismatch {
                expected: base.num_parties(),
                got: queries.len(),
            });
        }
        if queries
            .iter()
            .enumerate()
            .any(|(i, &z)| z > base.num_inputs(i))
        {
            return Err(Error::validation("more queries than inputs"));
        }
        Ok(SequentialScenario { base, queries })
    }

    /// Parties with a friend.
    pub fn friends(&self) -> Vec<usize> {
        (0..self.queries.len())
            .filter(|&i| self.queries[i] > 0)
            .collect()
    }
}

/// (S, M^Z): Local Friendliness correlations are PD(S, M^Z).
pub fn sequential_to_pd(sw: &SequentialScenario) -> (Scenario, InputCollection) {
    let m = InputCollection::leading(&sw.base, &sw.queries).expect("validated on construction");
    (sw.base.clone(), m)
}

/// How a facet of a polytope is recognised among known inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FacetKind {
    /// Tight on the same vertices as p_c ≥ 0.
    Positivity(usize),
    /// Tight on the same vertices as member `k` of the supplied family.
    Family(usize),
    Other,
}

/// Identifies each facet by its set of tight vertices, which determines a
/// facet uniquely regardless of how its functional is written.
pub fn identify_facets(h: &HRep, set: &VertexSet, family: &[AffineFunctional]) -> Vec<FacetKind> {
    let vx: Vec<Vec<Q>> = set
        .vertices()
        .iter()
        .map(|b| b.as_vector().to_vec())
        .collect();
    let d = set.scenario().ambient_dim();
    let positivity: Vec<Vec<usize>> = (0..d)
        .map(|c| (0..vx.len()).filter(|&j| vx[j][c].is_zero()).collect())
        .collect();
    let fam: Vec<Vec<usize>> = family.iter().map(|f| tight_set(f, &vx)).collect();
    h.inequalities
        .iter()
        .map(|f| {
            let t = tight_set(f, &vx);
            if let Some(c) = positivity.iter().position(|p| *p == t) {
                FacetKind::Positivity(c)
            } else if let Some(k) = fam.iter().position(|p| *p == t) {
                FacetKind::Family(k)
            } else {
                FacetKind::Other
            }
        })
        .collect()
}

/// Constructive witness that ∪_k PD(S, M^{k}) is not convex for three
/// parties: each partial PR box lies in its own polytope, and their uniform
/// mixture lies in none of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonConvexityWitness {
    pub mixture: Behaviour,
    /// Inside certificate of box k in PD(S, M^{k}).
    pub components: Vec<MembershipCertificate>,
    /// Outside certificate of the mixture against PD(S, M^{k}).
    pub separations: Vec<MembershipCertificate>,
}

impl NonConvexityWitness {
    pub fn holds(&self) -> bool {
        self.components.iter().all(|c| c.is_inside())
            && self.separations.iter().all(|c| !c.is_inside())
    }
}

pub fn union_nonconvexity_witness(s: &Scenario, e: &Enumerator) -> Result<NonConvexityWitness> {
    require_shape(s, 3, "union non-convexity check")?;
    let boxes: Vec<Behaviour> = (0..3)
        .map(|k| partial_pr_box(s, k))
        .collect::<Result<_>>()?;
    let third = q(1, 3);
    let mixture = Behaviour::mix(
        &boxes
            .iter()
            .map(|b| (third.clone(), b.clone()))
            .collect::<Vec<_>>(),
    )?;
    let mut components = Vec::new();
    let mut separations = Vec::new();
    for (k, b) in boxes.iter().enumerate() {
        let set = e.pd(s, &s.party_collection(&[k])?)?;
        components.push(set.membership(b, e.budget())?);
        separations.push(set.membership(&mixture, e.budget())?);
    }
    Ok(NonConvexityWitness {
        mixture,
        components,
        separations,
    })
}
