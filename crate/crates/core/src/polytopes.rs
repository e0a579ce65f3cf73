//! Vertex sets of the Bell-local, no-signalling and partially
//! deterministic polytopes, and membership queries against them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::behaviour::Behaviour;
use crate::error::{Error, Result};
use crate::exactgeom::{self, AffineFunctional, Budget, HRep, MembershipCertificate, VRep};
use crate::num::Q;
use crate::product::set_product;
use crate::scenario::{tuples, InputCollection, Scenario};

/// What a vertex set is the vertex set of.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    /// All predictable behaviours, signalling ones included.
    E,
    Bell,
    NoSignalling,
    PartiallyDeterministic(InputCollection),
    /// A named construction (products, unions) outside the three base
    /// families.
    Custom(String),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::E => write!(f, "e"),
            Family::Bell => write!(f, "bell"),
            Family::NoSignalling => write!(f, "ns"),
            Family::PartiallyDeterministic(m) => write!(f, "pd{m:?}"),
            Family::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// A user-facing request for one of the base families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    E,
    Bell,
    NoSignalling,
    Pd(InputCollection),
}

impl FamilySpec {
    /// `e`, `bell`, `ns` or `pd`; `pd` requires a collection.
    pub fn parse(kind: &str, collection: Option<InputCollection>) -> Result<Self> {
        match (kind.to_ascii_lowercase().as_str(), collection) {
            ("e", _) => Ok(FamilySpec::E),
            ("bell" | "local", _) => Ok(FamilySpec::Bell),
            ("ns" | "nosignalling" | "no-signalling", _) => Ok(FamilySpec::NoSignalling),
            ("pd", Some(m)) => Ok(FamilySpec::Pd(m)),
            ("pd", None) => Err(Error::validation("family pd needs a collection")),
            (other, _) => Err(Error::validation(format!("unknown family {other:?}"))),
        }
    }

    pub fn vertices(&self, s: &Scenario, e: &Enumerator) -> Result<VertexSet> {
        match self {
            FamilySpec::E => e.e(s),
            FamilySpec::Bell => e.bell(s),
            FamilySpec::NoSignalling => e.ns(s),
            FamilySpec::Pd(m) => e.pd(s, m),
        }
    }
}

/// How a product vertex set was built: vertex `j` is
/// `left[pairs[j].0] ⊙ right[pairs[j].1]` over the bipartition of
/// `collection`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub collection: InputCollection,
    pub left: Arc<VertexSet>,
    pub right: Arc<VertexSet>,
    pub pairs: Vec<(usize, usize)>,
}

/// A sorted, duplicate-free list of behaviours on one scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    scenario: Scenario,
    family: Family,
    vertices: Vec<Behaviour>,
    composition: Option<Composition>,
}

impl VertexSet {
    /// Sorts and deduplicates. Fails if a behaviour belongs to another
    /// scenario.
    pub fn new(scenario: Scenario, family: Family, mut vertices: Vec<Behaviour>) -> Result<Self> {
        if vertices.iter().any(|v| v.scenario() != &scenario) {
            return Err(Error::validation("vertex from a different scenario"));
        }
        vertices.sort();
        vertices.dedup();
        Ok(VertexSet {
            scenario,
            family,
            vertices,
            composition: None,
        })
    }

    /// Caller guarantees sorted, distinct vertices on `scenario`.
    pub(crate) fn from_parts(
        scenario: Scenario,
        family: Family,
        vertices: Vec<Behaviour>,
        composition: Option<Composition>,
    ) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        VertexSet {
            scenario,
            family,
            vertices,
            composition,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn vertices(&self) -> &[Behaviour] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn composition(&self) -> Option<&Composition> {
        self.composition.as_ref()
    }

    pub fn contains(&self, b: &Behaviour) -> bool {
        self.vertices.binary_search(b).is_ok()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.scenario == other.scenario && self.vertices.iter().all(|v| other.contains(v))
    }

    /// Union as a point set (not its convex hull).
    pub fn union(&self, other: &VertexSet, family: Family) -> Result<VertexSet> {
        if self.scenario != other.scenario {
            return Err(Error::validation("union of sets on different scenarios"));
        }
        let mut v = self.vertices.clone();
        v.extend(other.vertices.iter().cloned());
        VertexSet::new(self.scenario.clone(), family, v)
    }

    pub fn to_vrep(&self) -> VRep {
        VRep {
            dim: self.scenario.ambient_dim(),
            vertices: self
                .vertices
                .iter()
                .map(|b| b.as_vector().to_vec())
                .collect(),
        }
    }

    /// Dimension of the affine hull.
    pub fn affine_rank(&self) -> Option<usize> {
        exactgeom::affine_rank(&self.to_vrep().vertices)
    }

    /// Exact membership of `b` in the convex hull, with a verified
    /// certificate. Vertex indices refer to [`VertexSet::vertices`].
    pub fn membership(&self, b: &Behaviour, budget: &Budget) -> Result<MembershipCertificate> {
        if b.scenario() != &self.scenario {
            return Err(Error::validation(
                "behaviour and vertex set are on different scenarios",
            ));
        }
        exactgeom::lp_membership(&self.vertices, b.as_vector(), budget)
    }

    pub fn facets(&self, budget: &Budget) -> Result<HRep> {
        exactgeom::facets_from_vrep(&self.to_vrep(), budget)
    }
}

/// H-representation of NS(S): normalisation, single-party marginal
/// equalities and positivity.
pub fn ns_hrep(s: &Scenario) -> HRep {
    let d = s.ambient_dim();
    let mut equalities = Vec::new();
    for c in 0..s.num_contexts() {
        let mut coeffs = vec![Q::zero(); d];
        let off = s.context_offset(c);
        for x in &mut coeffs[off..off + s.context_size(c)] {
            *x = Q::one();
        }
        equalities.push(AffineFunctional::new(coeffs, Q::one()));
    }
    let n = s.num_parties();
    for i in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for ctx in s.contexts().filter(|c| c[i] == 0) {
            let rest_radices: Vec<usize> = rest.iter().map(|&j| s.num_outputs(j, ctx[j])).collect();
            for x in 1..s.num_inputs(i) {
                let mut other = ctx.clone();
                other[i] = x;
                for b in tuples(&rest_radices) {
                    let mut coeffs = vec![Q::zero(); d];
                    for (c, sign) in [(&ctx, 1), (&other, -1)] {
                        for a in 0..s.num_outputs(i, c[i]) {
                            let mut out = vec![0; n];
                            out[i] = a;
                            for (k, &j) in rest.iter().enumerate() {
                                out[j] = b[k];
                            }
                            coeffs[s.coord(c, &out)] += Q::from_integer(sign.into());
                        }
                    }
                    equalities.push(AffineFunctional::new(coeffs, Q::zero()));
                }
            }
        }
    }
    let inequalities = (0..d)
        .map(|k| {
            let mut coeffs = vec![Q::zero(); d];
            coeffs[k] = -Q::one();
            AffineFunctional::new(coeffs, Q::zero())
        })
        .collect();
    HRep {
        dim: d,
        equalities,
        inequalities,
    }
}

/// Vertex enumeration front end with a budget and a cache of no-signalling
/// vertex lists keyed by scenario shape.
pub struct Enumerator {
    budget: Budget,
    ns_cache: Mutex<HashMap<Vec<Vec<usize>>, Arc<Vec<Vec<Q>>>>>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self::new(Budget::default())
    }
}

impl Enumerator {
    pub fn new(budget: Budget) -> Self {
        Enumerator {
            budget,
            ns_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn check_count(&self, stage: &'static str, count: usize) -> Result<()> {
        match self.budget.max_vertices {
            Some(limit) if count > limit => Err(Error::BudgetExceeded {
                stage,
                limit,
                done: 0,
            }),
            _ => Ok(()),
        }
    }

    /// Ext(E(S)): every predictable behaviour, one outcome per context.
    pub fn e(&self, s: &Scenario) -> Result<VertexSet> {
        self.check_count("e_vertices", s.num_predictable())?;
        let radices: Vec<usize> = (0..s.num_contexts()).map(|c| s.context_size(c)).collect();
        let mut vertices: Vec<Behaviour> = tuples(&radices)
            .map(|choice| Behaviour::predictable(s, &choice).expect("choice in range"))
            .collect();
        vertices.sort();
        Ok(VertexSet::from_parts(s.clone(), Family::E, vertices, None))
    }

    /// Ext(B(S)): the local deterministic behaviours.
    pub fn bell(&self, s: &Scenario) -> Result<VertexSet> {
        self.check_count("bell_vertices", s.num_local_strategies())?;
        let slots: Vec<(usize, usize)> = (0..s.num_parties())
            .flat_map(|i| (0..s.num_inputs(i)).map(move |x| (i, x)))
            .collect();
        let radices: Vec<usize> = slots.iter().map(|&(i, x)| s.num_outputs(i, x)).collect();
        let mut vertices: Vec<Behaviour> = tuples(&radices)
            .map(|flat| {
                let mut strat: Vec<Vec<usize>> = (0..s.num_parties())
                    .map(|i| vec![0; s.num_inputs(i)])
                    .collect();
                for (&(i, x), a) in slots.iter().zip(flat) {
                    strat[i][x] = a;
                }
                Behaviour::local_deterministic(s, &strat).expect("strategy in range")
            })
            .collect();
        vertices.sort();
        vertices.dedup();
        Ok(VertexSet::from_parts(
            s.clone(),
            Family::Bell,
            vertices,
            None,
        ))
    }

    /// Vertices of NS(S) by double description.
    pub fn ns(&self, s: &Scenario) -> Result<VertexSet> {
        let key = s.output_counts();
        let cached = self.ns_cache.lock().unwrap().get(&key).cloned();
        let vecs = match cached {
            Some(v) => v,
            None => {
                let v =
                    Arc::new(exactgeom::vertices_from_hrep(&ns_hrep(s), &self.budget)?.vertices);
                self.ns_cache.lock().unwrap().insert(key, v.clone());
                v
            }
        };
        let mut vertices: Vec<Behaviour> = vecs
            .iter()
            .map(|v| Behaviour::new_unchecked(s.clone(), v.clone()))
            .collect();
        vertices.sort();
        Ok(VertexSet::from_parts(
            s.clone(),
            Family::NoSignalling,
            vertices,
            None,
        ))
    }

    /// Vertices of PD(S, M′) as E(S_{|M′}) ⊙ NS(S_{|M′⊥}). The trivial
    /// collections give NS(S) (M′ = ∅) and B(S) (M′ = M).
    pub fn pd(&self, s: &Scenario, m: &InputCollection) -> Result<VertexSet> {
        m.validate(s)?;
        let fam = Family::PartiallyDeterministic(m.clone());
        if m.is_empty() {
            return Ok(self.ns(s)?.with_family(fam));
        }
        if m.is_full(s) {
            return Ok(self.bell(s)?.with_family(fam));
        }
        let left = s.restrict(m)?;
        let right = s.restrict(&m.complement(s))?;
        let e = self.bell(&left.sub)?;
        let n = self.ns(&right.sub)?;
        set_product(s, m, &e, &n, fam)
    }
}

pub fn bell_vertices(s: &Scenario, budget: &Budget) -> Result<VertexSet> {
    Enumerator::new(budget.clone()).bell(s)
}

pub fn e_vertices(s: &Scenario, budget: &Budget) -> Result<VertexSet> {
    Enumerator::new(budget.clone()).e(s)
}

pub fn ns_vertices(s: &Scenario, budget: &Budget) -> Result<VertexSet> {
    Enumerator::new(budget.clone()).ns(s)
}

pub fn pd_vertices(s: &Scenario, m: &InputCollection, budget: &Budget) -> Result<VertexSet> {
    Enumerator::new(budget.clone()).pd(s, m)
}

/// Exact membership of `b` in conv(`set`).
pub fn membership(
    set: &VertexSet,
    b: &Behaviour,
    budget: &Budget,
) -> Result<MembershipCertificate> {
    set.membership(b, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviour::tests::pr_box;

    #[test]
    fn chsh_counts() {
        let s = Scenario::chsh();
        let b = bell_vertices(&s, &Budget::default()).unwrap();
        assert_eq!(b.len(), 16);
        let ns = ns_vertices(&s, &Budget::default()).unwrap();
        assert_eq!(ns.len(), 24);
        assert!(b.is_subset(&ns));
        assert_eq!(
            ns.vertices().iter().filter(|v| !v.is_predictable()).count(),
            8
        );
        assert!(ns.contains(&pr_box()));
        assert_eq!(b.affine_rank(), Some(8));
        assert_eq!(ns.affine_rank(), Some(8));
    }

    #[test]
    fn e_counts() {
        let b = Budget::default();
        assert_eq!(e_vertices(&Scenario::chsh(), &b).unwrap().len(), 256);
        assert_eq!(
            e_vertices(&Scenario::uniform(&[1], 5).unwrap(), &b)
                .unwrap()
                .len(),
            5
        );
        let one_one = Scenario::uniform(&[1, 1], 2).unwrap();
        assert_eq!(
            e_vertices(&one_one, &b).unwrap().len(),
            one_one.num_predictable()
        );
        let small = Budget {
            max_vertices: Some(100),
            ..Budget::default()
        };
        assert!(e_vertices(&Scenario::chsh(), &small)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn dd_matches_basis_enumeration_on_chsh() {
        let h = ns_hrep(&Scenario::chsh());
        let a = exactgeom::vertices_from_hrep(&h, &Budget::default()).unwrap();
        let b = exactgeom::vertices_by_bases(&h, &Budget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pd_trivial_collections() {
        let s = Scenario::chsh();
        let e = Enumerator::default();
        assert_eq!(
            e.pd(&s, &s.full_collection()).unwrap().vertices(),
            bell_vertices(&s, &Budget::default()).unwrap().vertices()
        );
        assert_eq!(e.pd(&s, &s.empty_collection()).unwrap().len(), 24);
    }

    #[test]
    fn pd_chsh_one_input_is_bell() {
        let s = Scenario::chsh();
        let m = InputCollection::new(&s, &[vec![0], vec![]]).unwrap();
        let pd = pd_vertices(&s, &m, &Budget::default()).unwrap();
        assert_eq!(
            pd.vertices(),
            bell_vertices(&s, &Budget::default()).unwrap().vertices()
        );
        assert!(pd.composition().is_some());
    }

    #[test]
    fn pr_box_outside_bell() {
        let s = Scenario::chsh();
        let c = bell_vertices(&s, &Budget::default())
            .unwrap()
            .membership(&pr_box(), &Budget::default())
            .unwrap();
        let MembershipCertificate::Outside { separator } = c else {
            panic!("PR box is nonlocal")
        };
        assert!(!separator.is_satisfied(pr_box().as_vector()));
        assert!(ns_vertices(&s, &Budget::default())
            .unwrap()
            .membership(&pr_box(), &Budget::default())
            .unwrap()
            .is_inside());
    }

    #[test]
    fn family_spec_parse() {
        let s = Scenario::chsh();
        assert_eq!(FamilySpec::parse("bell", None).unwrap(), FamilySpec::Bell);
        assert!(FamilySpec::parse("pd", None).is_err());
        let m = s.full_collection();
        assert_eq!(
            FamilySpec::parse("PD", Some(m.clone())).unwrap(),
            FamilySpec::Pd(m)
        );
        assert!(FamilySpec::parse("quantum", None).is_err());
    }
}
