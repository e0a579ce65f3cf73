//! Maximal solid fragments and the closed-form equivalence-class calculus
//! of partially deterministic polytopes.
//!
//! Inputs with a single output are deterministic in every behaviour, so
//! they are treated as members of every collection when the fragment is
//! computed.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::polytopes::VertexSet;
use crate::scenario::{InputCollection, Scenario};

/// The class invariant of PD(S, M′).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MsfDescriptor {
    /// PD(S, M′) = B(S).
    Bottom,
    /// The fragment R_{|M′^min}(NS(S)), given by M′^min.
    Fragment(InputCollection),
}

impl MsfDescriptor {
    pub fn is_bottom(&self) -> bool {
        matches!(self, MsfDescriptor::Bottom)
    }

    pub fn min_collection(&self) -> Option<&InputCollection> {
        match self {
            MsfDescriptor::Bottom => None,
            MsfDescriptor::Fragment(m) => Some(m),
        }
    }

    /// Total number of inputs in M′^min; zero for Bottom.
    pub fn weight(&self) -> usize {
        self.min_collection()
            .map_or(0, |m| (0..m.num_parties()).map(|i| m.count(i)).sum())
    }
}

impl fmt::Display for MsfDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsfDescriptor::Bottom => write!(f, "bottom"),
            MsfDescriptor::Fragment(m) => write!(f, "fragment{m:?}"),
        }
    }
}

/// Relation of PD(S, M′) to PD(S, M″). Subset and Superset are strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Equal,
    Subset,
    Superset,
    Incomparable,
}

impl Relation {
    pub fn flip(self) -> Relation {
        match self {
            Relation::Subset => Relation::Superset,
            Relation::Superset => Relation::Subset,
            r => r,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Equal => "equal",
            Relation::Subset => "subset",
            Relation::Superset => "superset",
            Relation::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inputs with exactly one output.
fn trivial_inputs(s: &Scenario) -> InputCollection {
    let masks = (0..s.num_parties())
        .map(|i| {
            (0..s.num_inputs(i))
                .filter(|&x| s.num_outputs(i, x) == 1)
                .fold(0u64, |acc, x| acc | 1 << x)
        })
        .collect();
    InputCollection::from_masks(masks)
}

/// MSF(PD(S, M′)): M′^min_i = M′^⊥_i when it has at least two inputs,
/// otherwise empty; Bottom if fewer than two parties keep inputs.
pub fn msf(s: &Scenario, m: &InputCollection) -> MsfDescriptor {
    let det = m.union(&trivial_inputs(s));
    let perp = det.complement(s);
    let masks: Vec<u64> = perp
        .masks()
        .iter()
        .map(|&k| if k.count_ones() >= 2 { k } else { 0 })
        .collect();
    if masks.iter().filter(|&&k| k != 0).count() < 2 {
        MsfDescriptor::Bottom
    } else {
        MsfDescriptor::Fragment(InputCollection::from_masks(masks))
    }
}

/// Relation between the polytopes with the given descriptors.
pub fn compare_descriptors(a: &MsfDescriptor, b: &MsfDescriptor) -> Relation {
    match (a, b) {
        (MsfDescriptor::Bottom, MsfDescriptor::Bottom) => Relation::Equal,
        (MsfDescriptor::Bottom, _) => Relation::Subset,
        (_, MsfDescriptor::Bottom) => Relation::Superset,
        (MsfDescriptor::Fragment(x), MsfDescriptor::Fragment(y)) => {
            if x == y {
                Relation::Equal
            } else if x.is_subset(y) {
                Relation::Subset
            } else if y.is_subset(x) {
                Relation::Superset
            } else {
                Relation::Incomparable
            }
        }
    }
}

/// Predicted relation of PD(S, M′) to PD(S, M″), without enumeration.
pub fn compare(s: &Scenario, m1: &InputCollection, m2: &InputCollection) -> Relation {
    compare_descriptors(&msf(s, m1), &msf(s, m2))
}

pub fn is_bell(s: &Scenario, m: &InputCollection) -> bool {
    msf(s, m).is_bottom()
}

pub fn is_ns(s: &Scenario, m: &InputCollection) -> bool {
    msf(s, m) == msf(s, &s.empty_collection())
}

/// The largest collection with the given descriptor: M*_i = M_i ∖ M′^min_i,
/// which is M itself for Bottom.
pub fn representative(s: &Scenario, d: &MsfDescriptor) -> InputCollection {
    match d {
        MsfDescriptor::Bottom => s.full_collection(),
        MsfDescriptor::Fragment(min) => min.complement(s),
    }
}

/// Exact relation between two vertex sets of polytopes whose vertices are
/// all no-signalling vertices, where polytope containment reduces to
/// vertex-set containment.
pub fn vertex_relation(a: &VertexSet, b: &VertexSet) -> Relation {
    match (a.is_subset(b), b.is_subset(a)) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::Subset,
        (false, true) => Relation::Superset,
        (false, false) => Relation::Incomparable,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub msf: MsfDescriptor,
    pub representative: InputCollection,
    /// Members in collection enumeration order.
    pub members: Vec<InputCollection>,
    pub is_bell: bool,
    pub is_ns: bool,
    /// Relation of this class to every other class that is comparable, by
    /// class index.
    pub relations: Vec<(usize, Relation)>,
}

impl ClassReport {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub scenario: Scenario,
    /// Ordered by fragment weight (Bottom first), then descriptor.
    pub classes: Vec<ClassReport>,
    /// Covering pairs (smaller, larger) of the strict order on classes.
    pub hasse: Vec<(usize, usize)>,
}

impl Classification {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, m: &InputCollection) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(m))
    }

    pub fn bell_class(&self) -> Option<&ClassReport> {
        self.classes.iter().find(|c| c.is_bell)
    }

    pub fn ns_class(&self) -> Option<&ClassReport> {
        self.classes.iter().find(|c| c.is_ns)
    }
}

/// Groups every collection of S (including ∅ and M) by descriptor.
pub fn classify_all(s: &Scenario) -> Classification {
    let collections: Vec<InputCollection> = s.all_collections(true).collect();
    let descs: Vec<MsfDescriptor> = collections.par_iter().map(|m| msf(s, m)).collect();
    let mut groups: BTreeMap<(usize, MsfDescriptor), Vec<InputCollection>> = BTreeMap::new();
    for (m, d) in collections.into_iter().zip(descs) {
        groups.entry((d.weight(), d)).or_default().push(m);
    }
    let ns_desc = msf(s, &s.empty_collection());
    let mut classes: Vec<ClassReport> = groups
        .into_iter()
        .map(|((_, d), members)| ClassReport {
            representative: representative(s, &d),
            is_bell: d.is_bottom(),
            is_ns: d == ns_desc,
            msf: d,
            members,
            relations: Vec::new(),
        })
        .collect();
    let n = classes.len();
    let rel: Vec<Vec<Relation>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| compare_descriptors(&classes[a].msf, &classes[b].msf))
                .collect()
        })
        .collect();
    for (a, class) in classes.iter_mut().enumerate() {
        class.relations = (0..n)
            .filter(|&b| b != a && rel[a][b] != Relation::Incomparable)
            .map(|b| (b, rel[a][b]))
            .collect();
    }
    let mut hasse = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rel[a][b] != Relation::Subset {
                continue;
            }
            let covered =
                (0..n).any(|c| rel[a][c] == Relation::Subset && rel[c][b] == Relation::Subset);
            if !covered {
                hasse.push((a, b));
            }
        }
    }
    Classification {
        scenario: s.clone(),
        classes,
        hasse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(s: &Scenario, sets: &[&[usize]]) -> InputCollection {
        let v: Vec<Vec<usize>> = sets.iter().map(|x| x.to_vec()).collect();
        InputCollection::new(s, &v).unwrap()
    }

    #[test]
    fn msf_examples() {
        let b3 = Scenario::uniform(&[3, 3], 2).unwrap();
        assert_eq!(msf(&b3, &b3.full_collection()), MsfDescriptor::Bottom);
        assert_eq!(
            msf(&b3, &col(&b3, &[&[0], &[]])),
            MsfDescriptor::Fragment(col(&b3, &[&[1, 2], &[0, 1, 2]]))
        );
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        let ma = t.party_collection(&[0]).unwrap();
        assert_eq!(
            msf(&t, &ma),
            MsfDescriptor::Fragment(col(&t, &[&[], &[0, 1], &[0, 1]]))
        );
    }

    #[test]
    fn compare_examples() {
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        assert_eq!(
            compare(
                &t,
                &col(&t, &[&[0], &[], &[]]),
                &t.party_collection(&[0]).unwrap()
            ),
            Relation::Equal
        );
        let b3 = Scenario::uniform(&[3, 3], 2).unwrap();
        assert_eq!(
            compare(&b3, &col(&b3, &[&[0], &[]]), &col(&b3, &[&[0], &[0]])),
            Relation::Superset
        );
        assert_eq!(
            compare(&b3, &col(&b3, &[&[0, 1], &[]]), &b3.full_collection()),
            Relation::Equal
        );
        assert_eq!(
            compare(&b3, &col(&b3, &[&[0], &[]]), &col(&b3, &[&[1], &[]])),
            Relation::Incomparable
        );
    }

    #[test]
    fn bell_ns_predicates() {
        let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
        assert!(is_ns(&t, &t.empty_collection()));
        let b3 = Scenario::uniform(&[3, 3], 2).unwrap();
        assert!(is_bell(&b3, &col(&b3, &[&[0, 1], &[]])));
        let m = col(&t, &[&[0], &[], &[]]);
        assert!(!is_bell(&t, &m) && !is_ns(&t, &m));
    }

    #[test]
    fn single_output_inputs_are_deterministic() {
        // B's second input has one outcome, so B has one informative input
        // and NS(S) = B(S).
        let s = Scenario::from_output_counts(&[vec![2, 2], vec![2, 1]]).unwrap();
        assert!(is_bell(&s, &s.empty_collection()));
        assert!(is_ns(&s, &s.full_collection()));
    }

    #[test]
    fn class_counts() {
        let chsh = classify_all(&Scenario::chsh());
        assert_eq!(chsh.num_classes(), 2);
        assert_eq!(chsh.bell_class().unwrap().size(), 15);
        assert_eq!(chsh.ns_class().unwrap().size(), 1);
        assert_eq!(chsh.hasse, vec![(0, 1)]);
        let t = classify_all(&Scenario::uniform(&[2, 2, 2], 2).unwrap());
        let sizes: Vec<usize> = t.classes.iter().map(|c| c.size()).collect();
        assert_eq!(sizes, vec![54, 3, 3, 3, 1]);
    }

    #[test]
    fn representatives_are_maximal_members() {
        let b3 = Scenario::uniform(&[3, 3], 2).unwrap();
        for c in classify_all(&b3).classes {
            assert!(c.members.contains(&c.representative));
            for m in &c.members {
                assert!(m.is_subset(&c.representative));
            }
        }
    }

    proptest! {
        #[test]
        fn compare_is_antisymmetric(a in 0u64..64, b in 0u64..64) {
            let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
            let ma = InputCollection::from_masks(vec![a & 3, (a >> 2) & 3, a >> 4]);
            let mb = InputCollection::from_masks(vec![b & 3, (b >> 2) & 3, b >> 4]);
            prop_assert_eq!(compare(&t, &ma, &mb), compare(&t, &mb, &ma).flip());
        }

        #[test]
        fn more_determinism_never_enlarges(a in 0u64..64, b in 0u64..64) {
            let t = Scenario::uniform(&[2, 2, 2], 2).unwrap();
            let big = InputCollection::from_masks(vec![a & 3, (a >> 2) & 3, a >> 4]);
            let small = big.union(&InputCollection::from_masks(vec![b & 3, (b >> 2) & 3, b >> 4]));
            let r = compare(&t, &small, &big);
            prop_assert!(r == Relation::Equal || r == Relation::Subset);
        }
    }
}
